import math
import pytest
import sys
import os
sys.path.insert(1, os.path.abspath('.'))
from cochainlab.harness.env_vars import Cell, ExperimentConfig
from cochainlab.harness import experiments
from cochainlab.output.csv_sink import render_body
from cochainlab.theory.garland import TheoremViolationException
from cochainlab.topology.cochains import BudgetExceededException
from cochainlab.topology.complex import complex_from_json


def small_config(experiment, cells, trials=2, **kwargs):
    return ExperimentConfig(experiment, cells, trials, seed=1, **kwargs)


class TestClosedForms:
    def test_k5_2(self):
        forms = experiments.complete_complex_closed_forms(5, 2)
        assert forms["laplacian"] == [(0.0, 4), (5.0, 6)]
        assert forms["normalized"] == [(0.0, 4), (pytest.approx(5 / 3), 6)]
        assert forms["adjacency"] == [(-2.0, 6), (3.0, 4)]

    def test_multiplicities_cover_every_face(self):
        for n, k in ((6, 2), (7, 3), (8, 4)):
            forms = experiments.complete_complex_closed_forms(n, k)
            assert sum(count for _, count in forms["laplacian"]) == math.comb(n, k)


class TestGolden:
    def test_complete_complexes(self):
        records = experiments.golden_complete_complex([4, 5, 6, 6, 7], [2, 2, 2, 3, 3])
        assert len(records) == 5
        assert all(record.stats["passed"] for record in records)
        assert records[-1].stats["adjacency_spectrum"] == "-3:20;4:15"

    def test_mismatched_lists(self):
        with pytest.raises(ValueError):
            experiments.golden_complete_complex([4, 5], [2])

    def test_parallel_matches_serial(self):
        cells = [Cell("linial_meshulam", n, 2, p=1.0) for n in (4, 5, 6)]
        serial = experiments.run_golden(small_config("complete_complex_golden", cells, trials=1))
        parallel = experiments.run_golden(small_config("complete_complex_golden", cells, trials=1, jobs=2))
        assert serial.rows() == parallel.rows()

    def test_summary(self):
        config = small_config("complete_complex_golden", [Cell("linial_meshulam", 5, 2, p=1.0)], trials=1)
        result = experiments.run_golden(config)
        assert result.summary["experiment"] == "complete_complex_golden"
        assert result.summary["cells"][0]["passed"] == 1.0
        assert result.summary["skipped"] == []


class TestConcentration:
    def test_dense_cell(self):
        config = small_config("concentration", [Cell("linial_meshulam", 20, 2, p=0.8)])
        result = experiments.run_concentration(config)
        assert len(result.records) == 2
        for record in result.records:
            assert record.stats["trivial_count"] == 19
            assert record.stats["trivial_measured"] == 19
        assert result.columns[:7] == experiments.CELL_COLUMNS
        assert len(result.rows()[0]) == len(result.columns)

    def test_rows_are_reproducible(self):
        config = small_config("concentration", [Cell("linial_meshulam", 15, 2, p=0.7)])
        first = experiments.run_concentration(config)
        second = experiments.run_concentration(config)
        assert render_body(first.columns, first.rows()) == render_body(second.columns, second.rows())

    def test_records_are_ordered(self):
        cells = [Cell("linial_meshulam", 12, 2, p=0.9), Cell("linial_meshulam", 10, 2, p=0.9)]
        result = experiments.run_concentration(small_config("concentration", cells))
        assert [record.key for record in result.records] == [(0, 0), (0, 1), (1, 0), (1, 1)]


class TestCounterexample:
    def test_small_grid(self):
        cells = [Cell("counterexample_z", 10, 2, p=1.0, q=q) for q in (0.0, 0.3)]
        result = experiments.run_counterexample(small_config("counterexample", cells))
        planted = [record for record in result.records if record.q == 0.0]
        assert planted
        for record in planted:
            assert record.stats["delta_weight"] == 0
            assert len(record.stats["z2_cohomology"].split(";")) == 2
            assert record.stats["delta_faces_ambient"] == math.comb(10, 3)
        summary = result.summary
        assert [q for q, _ in summary["mean_ratio_by_q"]] == [0.0, 0.3]
        assert "ratio_increasing_in_q" in summary
        assert summary["cells"][0]["coboundary_zero"] == 1.0

    def test_coset_cap_skips_cells(self):
        cells = [Cell("counterexample_z", 10, 2, p=1.0), Cell("counterexample_z", 40, 2, p=1.0)]
        result = experiments.run_counterexample(small_config("counterexample", cells, trials=1, budget=1024))
        assert [s.cell for s in result.skipped] == [1]
        assert result.summary["skipped"][0]["n"] == 40
        assert all(record.cell == 0 for record in result.records)


class TestBudget:
    def test_order_cap(self):
        config = small_config("concentration", [Cell("linial_meshulam", 30, 2, p=0.5)], max_order=100)
        tasks, skipped = experiments.plan(config, experiments._order_cap)
        assert tasks == []
        assert "exceeds the cap" in skipped[0].reason

    def test_every_cell_skipped(self):
        config = small_config("concentration", [Cell("linial_meshulam", 30, 2, p=0.5)], max_order=100)
        with pytest.raises(BudgetExceededException):
            experiments.run_concentration(config)


class TestGarlandAudit:
    def test_small_cell(self, tmp_path):
        config = small_config("garland_audit", [Cell("linial_meshulam", 12, 2, p=0.7)], samples=5)
        result = experiments.run_garland_audit(config, dump_dir=str(tmp_path))
        assert len(result.records) == 2
        for record in result.records:
            for flag in ("garland_passed", "adjacency_passed", "identities_passed", "reducing_passed"):
                assert record.stats[flag]
        assert list(tmp_path.iterdir()) == []
        assert result.summary["cells"][0]["garland_passed"] == 1.0
        assert result.summary["cells"][0]["refusals"] == 0
        assert all(record.stats["refusal"] is None for record in result.records)

    def test_non_pure_samples_are_refused(self):
        '''with p = 0 no edge lies in a triangle'''
        config = small_config("garland_audit", [Cell("linial_meshulam", 8, 2, p=0.0)], trials=3, samples=2)
        result = experiments.run_garland_audit(config)
        assert len(result.records) == 3
        for record in result.records:
            assert "not pure" in record.stats["refusal"]
            assert record.stats["garland_passed"] is None
        assert result.summary["cells"][0]["refusals"] == 3
        assert math.isnan(result.summary["cells"][0]["garland_passed"])
        assert len(result.rows()[0]) == len(result.columns)

    def test_sparse_cell_keeps_running(self):
        cells = [Cell("linial_meshulam", 12, 2, p=0.15), Cell("linial_meshulam", 10, 2, p=1.0)]
        result = experiments.run_garland_audit(small_config("garland_audit", cells, samples=2))
        assert len(result.records) == 4
        complete = [record for record in result.records if record.cell == 1]
        assert all(record.stats["garland_passed"] for record in complete)
        summary = {entry["cell"]: entry for entry in result.summary["cells"]}
        assert summary[1]["refusals"] == 0
        assert summary[0]["refusals"] == 2

    def test_violation_dumps_the_complex(self, monkeypatch, tmp_path):
        def failing(X, **kwargs):
            raise TheoremViolationException("eigenvalue outside the interval")

        monkeypatch.setattr(experiments, "verify_garland", failing)
        config = small_config("garland_audit", [Cell("linial_meshulam", 8, 2, p=1.0)], trials=1)
        with pytest.raises(TheoremViolationException):
            experiments.run_garland_audit(config, dump_dir=str(tmp_path))
        with open(str(tmp_path / "violation_cell0_trial0.json")) as f:
            X, metadata = complex_from_json(f.read())
        assert X.f_vector() == (8, 28, 56)
        assert metadata["model"] == "linial_meshulam"
        assert metadata["trial"] == 0


class TestRunners:
    def test_every_experiment_has_a_runner(self):
        assert set(experiments.RUNNERS) == set(experiments.COLUMNS)

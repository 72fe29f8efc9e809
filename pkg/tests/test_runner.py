import json
import sys
import os
sys.path.insert(1, os.path.abspath('.'))
from cochainlab.harness import experiments
from cochainlab.harness.runner import EXIT_BUDGET, EXIT_ERROR, EXIT_OK, EXIT_VIOLATION, main
from cochainlab.theory.garland import TheoremViolationException
from cochainlab.output.csv_sink import read_body
from cochainlab.topology.complex import complete_complex, complex_from_json


class TestGenerate:
    def test_writes_a_complex_file(self, clean_env, tmp_path):
        out = str(tmp_path / "k6.json")
        assert main(["generate", "--model", "linial_meshulam", "--n", "6", "--k", "2", "--p", "1.0",
                     "--out", out]) == EXIT_OK
        with open(out) as f:
            X, metadata = complex_from_json(f.read())
        assert X == complete_complex(6, 2)
        assert metadata["model"] == "linial_meshulam"
        assert metadata["trial"] == 0

    def test_planted_cochain_is_kept(self, clean_env, tmp_path):
        out = str(tmp_path / "y.json")
        assert main(["generate", "--model", "counterexample_y", "--n", "10", "--k", "2", "--p", "1.0",
                     "--seed", "3", "--out", out]) == EXIT_OK
        with open(out) as f:
            _, metadata = complex_from_json(f.read())
        assert metadata["a"]
        assert main(["expansion", "--complex", out]) == EXIT_OK

    def test_stdout(self, clean_env, capsys):
        assert main(["generate", "--model", "gnp", "--n", "5", "--k", "1", "--p", "1.0"]) == EXIT_OK
        X, _ = complex_from_json(capsys.readouterr().out)
        assert X.face_count(1) == 10

    def test_invalid_model(self, clean_env):
        assert main(["generate", "--model", "erdos", "--n", "5", "--k", "1", "--p", "0.5"]) == EXIT_ERROR


class TestSpectrum:
    def test_json(self, clean_env, capsys):
        assert main(["spectrum", "--n", "5", "--k", "2", "--p", "1.0", "--operator", "laplacian"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["kind"] == "laplacian"
        assert len(data["eigenvalues"]) == 10
        assert data["trivial_count"] == 4

    def test_csv(self, clean_env, tmp_path):
        out = str(tmp_path / "spectrum.csv")
        assert main(["spectrum", "--n", "5", "--k", "2", "--p", "1.0", "--out", out]) == EXIT_OK
        body = read_body(out)
        assert body[0] == "trial,kind,index,value,is_trivial"
        assert len(body) == 11


class TestExpansion:
    def test_exact(self, clean_env, capsys):
        assert main(["expansion", "--n", "4", "--k", "2", "--p", "1.0"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["epsilon_exact"] == "3/1"

    def test_budget_refusal(self, clean_env):
        assert main(["expansion", "--n", "8", "--k", "2", "--p", "1.0", "--budget", "4"]) == EXIT_BUDGET


class TestGarland:
    def test_complete_complex(self, clean_env, tmp_path, capsys):
        path = tmp_path / "k6.json"
        path.write_text(complete_complex(6, 2).to_json())
        assert main(["garland", "--complex", str(path)]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["garland"]["passed"]
        assert data["adjacency"]["passed"]


class TestExperiment:
    def test_golden(self, clean_env, tmp_path):
        out = str(tmp_path / "x.csv")
        assert main(["experiment", "complete_complex_golden", "--out", out]) == EXIT_OK
        body = read_body(out)
        assert body[0].startswith("cell,model,n,k,p,q,trial,laplacian_spectrum")
        assert len(body) == 6
        with open(str(tmp_path / "x.json")) as f:
            sidecar = json.load(f)
        assert sidecar["config"]["experiment"] == "complete_complex_golden"
        assert sidecar["summary"]["cells"][0]["passed"] == 1.0

    def test_out_dir_from_env(self, clean_env, tmp_path):
        clean_env.setenv("COCHAINLAB_OUT_DIR", str(tmp_path))
        assert main(["experiment", "concentration", "--n", "12", "--p", "0.9", "--trials", "1"]) == EXIT_OK
        assert len(read_body(str(tmp_path / "concentration.csv"))) == 2
        assert os.path.exists(str(tmp_path / "concentration.json"))

    def test_budget_exit_code(self, clean_env, tmp_path):
        clean_env.setenv("COCHAINLAB_OUT_DIR", str(tmp_path))
        clean_env.setenv("COCHAINLAB_MAX_ORDER", "10")
        assert main(["experiment", "concentration", "--n", "12", "--p", "0.9", "--trials", "1"]) == EXIT_BUDGET

    def test_violation_exit_code(self, clean_env, tmp_path, monkeypatch):
        def failing(X, **kwargs):
            raise TheoremViolationException("eigenvalue outside the interval")

        monkeypatch.setattr(experiments, "verify_garland", failing)
        clean_env.setenv("COCHAINLAB_OUT_DIR", str(tmp_path))
        assert main(["experiment", "garland_audit", "--n", "8", "--p", "1.0", "--trials", "1"]) == EXIT_VIOLATION
        assert os.path.exists(str(tmp_path / "violation_cell0_trial0.json"))
        assert not os.path.exists(str(tmp_path / "garland_audit.csv"))

    def test_refusals_are_written(self, clean_env, tmp_path):
        clean_env.setenv("COCHAINLAB_OUT_DIR", str(tmp_path))
        assert main(["experiment", "garland_audit", "--n", "8", "--p", "0.0", "--trials", "2",
                     "--samples", "2"]) == EXIT_OK
        body = read_body(str(tmp_path / "garland_audit.csv"))
        assert len(body) == 3
        assert body[0].endswith(",refusal")
        with open(str(tmp_path / "garland_audit.json")) as f:
            assert json.load(f)["summary"]["cells"][0]["refusals"] == 2

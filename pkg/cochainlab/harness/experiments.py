"""
The four experiments run by the command line harness.

Each experiment expands its config into ``(cell, trial)`` tasks, runs them (in a process pool
when ``jobs > 1``) and returns one :class:`ExperimentRecord` per task, sorted by cell and trial.
Every pass flag in a record can be recomputed from the statistics next to it.
"""
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from cochainlab.harness.env_vars import Cell, ExperimentConfig
from cochainlab.models.random_complexes import ModelSpec, RandomStreams, sample
from cochainlab.theory.garland import (GarlandException, TheoremViolationException, localization_identities,
                                       mean_degree, verify_adjacency_intervals, verify_garland,
                                       verify_reducing_to_links)
from cochainlab.topology.cochains import (BudgetExceededException, gf2_cohomology_dim, z2_class_norm,
                                          z2_coboundary)
from cochainlab.topology.complex import SimplicialComplex, complete_complex
from cochainlab.topology.spectral import (TRIVIAL_TOLERANCE, adjacency_spectrum, multiplicities,
                                          normalized_up_spectrum, up_laplacian_spectrum)
from cochainlab.utils import binomial

logger = logging.getLogger(__name__)

CELL_COLUMNS = ("cell", "model", "n", "k", "p", "q", "trial")

COLUMNS = {
    "concentration": (
        "trivial_count", "trivial_measured", "degenerate", "lambda_min", "lambda_max", "d", "deviation",
        "envelope_low", "envelope_high", "within_envelope", "adj_top_min", "adj_top_max", "adj_rest_min",
        "adj_rest_max", "adj_top_width", "adj_rest_width", "adjacency_within",
    ),
    "counterexample": (
        "class_norm", "class_weight", "cochain_faces", "delta_weight", "delta_faces_ambient", "delta_faces",
        "delta_norm", "ratio", "ratio_actual", "lambda_min", "lambda_max", "envelope_low", "envelope_high",
        "within_envelope", "z2_cohomology", "h_top",
    ),
    "garland_audit": (
        "garland_lower", "garland_upper", "nontrivial_min", "nontrivial_max", "garland_passed", "d", "phi",
        "h", "top_low", "top_high", "rest_low", "rest_high", "adjacency_passed", "laplacian_identity",
        "adjacency_identity", "normalized_deviation", "identities_passed", "reducing_ratio", "reducing_bound",
        "reducing_passed", "refusal",
    ),
    "complete_complex_golden": (
        "laplacian_spectrum", "normalized_spectrum", "adjacency_spectrum", "laplacian_error",
        "normalized_error", "adjacency_error", "passed",
    ),
}

ENVELOPE_SIGMAS = 4.0
COUNTEREXAMPLE_SIGMAS = 6.0
GOLDEN_TOLERANCE = 1e-9


@dataclass
class ExperimentRecord:
    cell: int
    model: str
    n: int
    k: int
    p: float
    q: float
    trial: int
    stats: Dict[str, object]
    runtime: float = 0.0

    @property
    def key(self) -> Tuple[int, int]:
        return (self.cell, self.trial)

    def row(self, columns: Sequence[str]) -> tuple:
        return (self.cell, self.model, self.n, self.k, self.p, self.q, self.trial) + tuple(
            self.stats.get(c) for c in columns)


@dataclass
class SkippedCell:
    cell: int
    model: str
    n: int
    k: int
    reason: str


@dataclass
class ExperimentResult:
    experiment: str
    records: List[ExperimentRecord]
    skipped: List[SkippedCell] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def columns(self) -> Tuple[str, ...]:
        return CELL_COLUMNS + COLUMNS[self.experiment]

    def rows(self) -> List[tuple]:
        columns = COLUMNS[self.experiment]
        return [record.row(columns) for record in self.records]

    @property
    def runtime(self) -> float:
        return sum(record.runtime for record in self.records)


@dataclass(frozen=True)
class TrialTask:
    cell_index: int
    cell: Cell
    trial: int
    seed: int
    budget: int
    max_order: int
    strict: bool
    samples: int
    dump_dir: Optional[str]

    def spec(self) -> ModelSpec:
        return ModelSpec(self.cell.model, self.cell.n, self.cell.k, self.cell.probability(), self.cell.q,
                         self.seed)

    def record(self, stats: dict, started: float) -> ExperimentRecord:
        return ExperimentRecord(self.cell_index, self.cell.model, self.cell.n, self.cell.k, self.cell.probability(),
                                self.cell.q, self.trial, stats, time.perf_counter() - started)


def _order_cap(config: ExperimentConfig, cell: Cell) -> Optional[str]:
    order = binomial(cell.n, cell.k)
    if order > config.max_order:
        return "matrix order %d exceeds the cap %d" % (order, config.max_order)
    return None


def _coset_cap(config: ExperimentConfig, cell: Cell) -> Optional[str]:
    reason = _order_cap(config, cell)
    if reason:
        return reason
    exponent = binomial(cell.n - 1, cell.k - 1)
    if exponent >= 63 or (1 << exponent) > config.budget:
        return "coset of size 2^%d exceeds the budget %d" % (exponent, config.budget)
    return None


def plan(config: ExperimentConfig, cap: Callable[[ExperimentConfig, Cell], Optional[str]],
         dump_dir: Optional[str] = None) -> Tuple[List[TrialTask], List[SkippedCell]]:
    """Tasks for every cell within the caps; cells over a cap are skipped with the reason logged."""
    tasks, skipped = [], []
    for index, cell in enumerate(config.cells):
        reason = cap(config, cell)
        if reason:
            logger.warning("skipping cell %d (%s n=%d k=%d): %s", index, cell.model, cell.n, cell.k, reason)
            skipped.append(SkippedCell(index, cell.model, cell.n, cell.k, reason))
            continue
        for trial in range(config.trials):
            tasks.append(TrialTask(index, cell, trial, config.seed, config.budget, config.max_order, config.strict,
                                   config.samples, dump_dir))
    return tasks, skipped


def run_tasks(worker: Callable[[TrialTask], ExperimentRecord], tasks: List[TrialTask],
              jobs: int) -> List[ExperimentRecord]:
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(worker, tasks))
    else:
        records = [worker(task) for task in tasks]
    return sorted(records, key=lambda record: record.key)


def _range(values: np.ndarray) -> Tuple[float, float]:
    if values.size == 0:
        return (math.nan, math.nan)
    return (float(values.min()), float(values.max()))


def concentration_trial(task: TrialTask) -> ExperimentRecord:
    started = time.perf_counter()
    spec = task.spec()
    X, _ = sample(spec, task.trial)
    d = spec.p * (spec.n - spec.k)
    root = math.sqrt(d) if d > 0 else math.nan

    report = normalized_up_spectrum(X, allow_non_pure=True, max_order=task.max_order)
    nontrivial = report.nontrivial()
    low, high = _range(nontrivial)
    envelope = (1 - ENVELOPE_SIGMAS / root, 1 + ENVELOPE_SIGMAS / root)
    deviation = float(np.abs(nontrivial - 1).max(initial=0.0)) * root

    adjacency = adjacency_spectrum(X, task.max_order)
    top, rest = adjacency.trivial(), adjacency.nontrivial()
    top_low, top_high = _range(top)
    rest_low, rest_high = _range(rest)
    top_width = float(np.abs(top - d).max(initial=0.0)) / root
    rest_width = float(np.abs(rest).max(initial=0.0)) / root

    stats = {
        "trivial_count": report.trivial_count,
        "trivial_measured": int(np.count_nonzero(report.eigenvalues < TRIVIAL_TOLERANCE)),
        "degenerate": report.degenerate,
        "lambda_min": low,
        "lambda_max": high,
        "d": d,
        "deviation": deviation,
        "envelope_low": envelope[0],
        "envelope_high": envelope[1],
        "within_envelope": bool(envelope[0] <= low and high <= envelope[1]),
        "adj_top_min": top_low,
        "adj_top_max": top_high,
        "adj_rest_min": rest_low,
        "adj_rest_max": rest_high,
        "adj_top_width": top_width,
        "adj_rest_width": rest_width,
        "adjacency_within": bool(top_width <= ENVELOPE_SIGMAS and rest_width <= ENVELOPE_SIGMAS),
    }
    logger.debug("concentration cell %d trial %d: %s", task.cell_index, task.trial, stats)
    return task.record(stats, started)


def counterexample_trial(task: TrialTask) -> ExperimentRecord:
    started = time.perf_counter()
    spec = task.spec()
    X, a = sample(spec, task.trial)
    n, k = X.n, X.k

    norm = z2_class_norm(X, a, task.budget)
    delta = z2_coboundary(X, a)
    ambient = binomial(n, k + 1)
    delta_norm = delta.weight / ambient
    if norm.weight:
        ratio = delta_norm / norm.norm
        actual = X.face_count(k)
        ratio_actual = (delta.weight / actual) / norm.norm if actual else 0.0
    else:
        ratio = ratio_actual = math.nan

    report = normalized_up_spectrum(X, allow_non_pure=True, max_order=task.max_order)
    low, high = _range(report.nontrivial())
    r = spec.p / 2 + spec.q - spec.p * spec.q / 2
    width = COUNTEREXAMPLE_SIGMAS / math.sqrt(r * n) if r > 0 else math.inf
    dims = [gf2_cohomology_dim(X, i) for i in range(k)]

    stats = {
        "class_norm": norm.norm,
        "class_weight": norm.weight,
        "cochain_faces": norm.total,
        "delta_weight": delta.weight,
        "delta_faces_ambient": ambient,
        "delta_faces": X.face_count(k),
        "delta_norm": delta_norm,
        "ratio": ratio,
        "ratio_actual": ratio_actual,
        "lambda_min": low,
        "lambda_max": high,
        "envelope_low": 1 - width,
        "envelope_high": 1 + width,
        "within_envelope": bool(1 - width <= low and high <= 1 + width),
        "z2_cohomology": ";".join(str(dim) for dim in dims),
        "h_top": dims[-1],
    }
    logger.debug("counterexample cell %d trial %d: %s", task.cell_index, task.trial, stats)
    return task.record(stats, started)


def _dump(task: TrialTask, X: SimplicialComplex) -> Optional[str]:
    if task.dump_dir is None:
        return None
    os.makedirs(task.dump_dir, exist_ok=True)
    path = os.path.join(task.dump_dir, "violation_cell%d_trial%d.json" % (task.cell_index, task.trial))
    with open(path, "w") as f:
        f.write(X.to_json(metadata=task.spec().metadata(task.trial)))
    logger.error("dumped offending complex to %s", path)
    return path


def garland_trial(task: TrialTask) -> ExperimentRecord:
    started = time.perf_counter()
    spec = task.spec()
    X, _ = sample(spec, task.trial)
    try:
        garland = verify_garland(X, strict=task.strict, max_order=task.max_order)
        adjacency = verify_adjacency_intervals(X, strict=task.strict, max_order=task.max_order)
        identities = localization_identities(X, strict=task.strict)
        rng = RandomStreams(task.seed, task.trial).stream("samples")
        reducing = verify_reducing_to_links(X, mean_degree(X), task.samples, rng, strict=task.strict)
    except TheoremViolationException:
        _dump(task, X)
        raise
    except GarlandException as e:
        logger.warning("garland cell %d trial %d refused: %s", task.cell_index, task.trial, e)
        stats = {column: None for column in COLUMNS["garland_audit"]}
        stats["refusal"] = str(e)
        return task.record(stats, started)

    top_low, top_high = adjacency.top_interval
    rest_low, rest_high = adjacency.rest_interval
    stats = {
        "garland_lower": garland.interval.lower,
        "garland_upper": garland.interval.upper,
        "nontrivial_min": min(garland.nontrivial, default=math.nan),
        "nontrivial_max": max(garland.nontrivial, default=math.nan),
        "garland_passed": garland.passed,
        "d": adjacency.conditions.d,
        "phi": adjacency.conditions.phi,
        "h": adjacency.conditions.h,
        "top_low": top_low,
        "top_high": top_high,
        "rest_low": rest_low,
        "rest_high": rest_high,
        "adjacency_passed": adjacency.passed,
        "laplacian_identity": identities.laplacian_exact,
        "adjacency_identity": identities.adjacency_exact,
        "normalized_deviation": identities.normalized_deviation,
        "identities_passed": identities.passed,
        "reducing_ratio": reducing.exact_ratio,
        "reducing_bound": reducing.k * reducing.f_n,
        "reducing_passed": reducing.passed,
        "refusal": None,
    }
    logger.debug("garland cell %d trial %d: %s", task.cell_index, task.trial, stats)
    return task.record(stats, started)


def complete_complex_closed_forms(n: int, k: int) -> Dict[str, List[Tuple[float, int]]]:
    """
    Eigenvalues and multiplicities of ``L^up_{k-1}``, ``Delta^up_{k-1}`` and ``A_{k-1}`` of ``K_n^k``.

    ``L`` has ``0`` (``C(n-1, k-1)`` times) and ``n`` (``C(n-1, k)`` times); every ``(k-1)``-face has
    degree ``n - k``, so ``Delta = L / (n - k)`` and ``A = (n - k) I - L``.
    """
    trivial, rest = binomial(n - 1, k - 1), binomial(n - 1, k)
    return {
        "laplacian": [(0.0, trivial), (float(n), rest)],
        "normalized": [(0.0, trivial), (n / (n - k), rest)],
        "adjacency": [(float(-k), rest), (float(n - k), trivial)],
    }


def _expand(groups: List[Tuple[float, int]]) -> np.ndarray:
    return np.sort(np.concatenate([np.full(count, value) for value, count in groups if count]))


def _relative_error(measured: np.ndarray, expected: np.ndarray) -> float:
    if measured.shape != expected.shape:
        return math.inf
    return float((np.abs(measured - expected) / np.maximum(1.0, np.abs(expected))).max(initial=0.0))


def _format_groups(eigenvalues: np.ndarray) -> str:
    return ";".join("%.9g:%d" % (value, count) for value, count in multiplicities(eigenvalues, 1e-6))


def golden_trial(task: TrialTask) -> ExperimentRecord:
    started = time.perf_counter()
    n, k = task.cell.n, task.cell.k
    X = complete_complex(n, k)
    expected = complete_complex_closed_forms(n, k)
    spectra = {
        "laplacian": up_laplacian_spectrum(X, task.max_order).eigenvalues,
        "normalized": normalized_up_spectrum(X, max_order=task.max_order).eigenvalues,
        "adjacency": adjacency_spectrum(X, task.max_order).eigenvalues,
    }
    errors = {name: _relative_error(values, _expand(expected[name])) for name, values in spectra.items()}
    passed = all(error <= GOLDEN_TOLERANCE for error in errors.values())
    stats = {
        "laplacian_spectrum": _format_groups(spectra["laplacian"]),
        "normalized_spectrum": _format_groups(spectra["normalized"]),
        "adjacency_spectrum": _format_groups(spectra["adjacency"]),
        "laplacian_error": errors["laplacian"],
        "normalized_error": errors["normalized"],
        "adjacency_error": errors["adjacency"],
        "passed": passed,
    }
    if not passed:
        logger.error("K_%d^%d spectra differ from the closed forms: %s", n, k, errors)
        raise TheoremViolationException("K_%d^%d spectra differ from the closed forms: %s" % (n, k, errors))
    return task.record(stats, started)


def _run(config: ExperimentConfig, worker, cap, dump_dir: Optional[str] = None) -> ExperimentResult:
    tasks, skipped = plan(config, cap, dump_dir)
    if not tasks and skipped:
        raise BudgetExceededException("Every cell of %s is over its cap" % config.experiment)
    logger.info("running %s: %d tasks on %d jobs", config.experiment, len(tasks), config.jobs)
    records = run_tasks(worker, tasks, config.jobs)
    result = ExperimentResult(config.experiment, records, skipped)
    result.summary = summarize(config.experiment, records)
    result.summary["skipped"] = [s.__dict__ for s in skipped]
    logger.info("finished %s", config.experiment)
    return result


def run_concentration(config: ExperimentConfig) -> ExperimentResult:
    return _run(config, concentration_trial, _order_cap)


def run_counterexample(config: ExperimentConfig) -> ExperimentResult:
    return _run(config, counterexample_trial, _coset_cap)


def run_garland_audit(config: ExperimentConfig, dump_dir: Optional[str] = None) -> ExperimentResult:
    return _run(config, garland_trial, _order_cap, dump_dir)


def run_golden(config: ExperimentConfig) -> ExperimentResult:
    return _run(config, golden_trial, _order_cap)


def golden_complete_complex(n_list: Sequence[int], k_list: Sequence[int],
                            max_order: int = 6000) -> List[ExperimentRecord]:
    """Checks ``K_n^k`` against the closed forms for the pairs ``zip(n_list, k_list)``."""
    if len(n_list) != len(k_list):
        raise ValueError("n_list and k_list must have the same length")
    cells = [Cell("linial_meshulam", n, k, p=1.0) for n, k in zip(n_list, k_list)]
    config = ExperimentConfig("complete_complex_golden", cells, trials=1, max_order=max_order)
    return run_golden(config).records


def _fraction(flags) -> float:
    flags = list(flags)
    return sum(1 for flag in flags if flag) / len(flags) if flags else math.nan


def _by_cell(records: List[ExperimentRecord]) -> Dict[int, List[ExperimentRecord]]:
    cells: Dict[int, List[ExperimentRecord]] = {}
    for record in records:
        cells.setdefault(record.cell, []).append(record)
    return cells


def summarize(experiment: str, records: List[ExperimentRecord]) -> dict:
    """Per-cell pass rates; for the counterexample also the mean ratio per ``q`` and its monotonicity."""
    cells = []
    for index, group in sorted(_by_cell(records).items()):
        first = group[0]
        entry = {"cell": index, "model": first.model, "n": first.n, "k": first.k, "p": first.p, "q": first.q,
                 "trials": len(group)}
        stats = [record.stats for record in group]
        if experiment == "concentration":
            entry["trivial_exact"] = _fraction(s["trivial_measured"] == s["trivial_count"] for s in stats)
            entry["within_envelope"] = _fraction(s["within_envelope"] for s in stats)
            entry["adjacency_within"] = _fraction(s["adjacency_within"] for s in stats)
        elif experiment == "counterexample":
            entry["class_norm_at_least_0.3"] = _fraction(s["class_norm"] >= 0.3 for s in stats)
            entry["ratio_at_most_2q"] = _fraction(s["ratio"] <= 2 * first.q for s in stats)
            entry["within_envelope"] = _fraction(s["within_envelope"] for s in stats)
            entry["coboundary_zero"] = _fraction(s["delta_weight"] == 0 for s in stats)
            entry["top_cohomology_vanishes"] = _fraction(s["h_top"] == 0 for s in stats)
            ratios = [s["ratio"] for s in stats if not math.isnan(s["ratio"])]
            entry["mean_ratio"] = float(np.mean(ratios)) if ratios else math.nan
        elif experiment == "garland_audit":
            audited = [s for s in stats if s["refusal"] is None]
            entry["refusals"] = len(stats) - len(audited)
            for flag in ("garland_passed", "adjacency_passed", "identities_passed", "reducing_passed"):
                entry[flag] = _fraction(s[flag] for s in audited)
        else:
            entry["passed"] = _fraction(s["passed"] for s in stats)
        cells.append(entry)

    summary = {"experiment": experiment, "cells": cells}
    if experiment == "counterexample":
        by_q = sorted((entry["q"], entry["mean_ratio"]) for entry in cells)
        summary["mean_ratio_by_q"] = [[q, ratio] for q, ratio in by_q]
        summary["ratio_increasing_in_q"] = all(b[1] > a[1] for a, b in zip(by_q, by_q[1:]))
    return summary


RUNNERS = {
    "concentration": run_concentration,
    "counterexample": run_counterexample,
    "garland_audit": run_garland_audit,
    "complete_complex_golden": run_golden,
}

import sys
import os
sys.path.insert(1, os.path.abspath('.'))
import argparse
import json
import logging
from dataclasses import asdict
from typing import List, Optional

import cochainlab.utils as utils
from cochainlab.harness.env_vars import EXPERIMENTS, get_env_vars, load_config
from cochainlab.harness.experiments import RUNNERS
from cochainlab.models.random_complexes import ModelSpec, sample
from cochainlab.output.csv_sink import CsvSink
from cochainlab.output.json_sidecar import JsonSidecar
from cochainlab.theory.expansion import z2_expansion_exact, z2_expansion_witness
from cochainlab.theory.garland import (TheoremViolationException, localization_identities,
                                       verify_adjacency_intervals, verify_garland)
from cochainlab.topology.cochains import BudgetExceededException, Z2Cochain
from cochainlab.topology.complex import complex_from_json
from cochainlab.topology.spectral import adjacency_spectrum, normalized_up_spectrum, up_laplacian_spectrum

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BUDGET = 2
EXIT_VIOLATION = 3

SPECTRUM_COLUMNS = ("trial", "kind", "index", "value", "is_trivial")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cochainlab", description="Spectra and expansion of simplicial complexes")
    parser.add_argument("--log-level", default=None, help="overrides COCHAINLAB_LOG_LEVEL")
    verbs = parser.add_subparsers(dest="verb", required=True)

    def common(sub):
        sub.add_argument("--config", help="JSON config file")
        sub.add_argument("--model", default=None, help="gnp, linial_meshulam, counterexample_y or counterexample_z")
        sub.add_argument("--n", default=None)
        sub.add_argument("--k", default=None)
        sub.add_argument("--p", default=None)
        sub.add_argument("--q", default=None)
        sub.add_argument("--seed", type=int, default=None)
        sub.add_argument("--out", default=None)
        sub.add_argument("--budget", type=int, default=None)
        sub.add_argument("--jobs", type=int, default=None)
        return sub

    for verb in ("generate", "spectrum", "expansion", "garland"):
        sub = common(verbs.add_parser(verb))
        sub.add_argument("--trial", type=int, default=0)
        sub.add_argument("--complex", default=None, help="read the complex from a JSON file instead of sampling")
    verbs.choices["spectrum"].add_argument("--operator", default="normalized",
                                           choices=("normalized", "laplacian", "adjacency"))
    verbs.choices["expansion"].add_argument("--dim", type=int, default=None)
    verbs.choices["garland"].add_argument("--d", type=float, default=None)

    experiment = common(verbs.add_parser("experiment"))
    experiment.add_argument("name", choices=EXPERIMENTS)
    experiment.add_argument("--trials", type=int, default=None)
    experiment.add_argument("--p-log-factor", dest="p_log_factor", default=None)
    experiment.add_argument("--samples", type=int, default=None)
    experiment.add_argument("--no-strict", dest="strict", action="store_false", default=None)
    return parser


def _model_spec(args, data: dict) -> ModelSpec:
    values = {}
    if args.config:
        with open(args.config) as f:
            values.update(json.load(f))
    for key, cast in (("model", str), ("n", int), ("k", int), ("p", float), ("q", float)):
        value = getattr(args, key)
        if value is not None:
            values[key] = cast(value)
    values.setdefault("model", "linial_meshulam")
    if args.seed is not None:
        values["seed"] = args.seed
    values.setdefault("seed", data['seed'])
    return ModelSpec.from_dict(values)


def _load(args, data: dict):
    """The complex, the planted cochain (if any) and the metadata describing where it came from."""
    if args.complex:
        with open(args.complex) as f:
            X, metadata = complex_from_json(f.read())
        a = None
        if metadata and "a" in metadata:
            a = Z2Cochain.from_support(X, X.k - 1, metadata["a"])
        return X, a, metadata or {}
    spec = _model_spec(args, data)
    X, a = sample(spec, args.trial)
    return X, a, spec.metadata(args.trial)


def _emit(text: str, out: Optional[str]):
    if out:
        directory = os.path.dirname(out)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(out, "w") as f:
            f.write(text + "\n")
        logger.info("wrote %s", out)
    else:
        print(text)


def generate(args, data: dict) -> int:
    X, a, metadata = _load(args, data)
    if a is not None:
        metadata = dict(metadata, a=list(a.support))
    _emit(X.to_json(metadata=metadata), args.out)
    return EXIT_OK


def spectrum(args, data: dict) -> int:
    X, _, _ = _load(args, data)
    if args.operator == "laplacian":
        report = up_laplacian_spectrum(X, data['max_order'])
    elif args.operator == "adjacency":
        report = adjacency_spectrum(X, data['max_order'])
    else:
        report = normalized_up_spectrum(X, allow_non_pure=True, max_order=data['max_order'])
    if args.out and args.out.endswith(".csv"):
        CsvSink(args.out).write(SPECTRUM_COLUMNS, report.rows(args.trial))
    else:
        _emit(report.to_json(), args.out)
    return EXIT_OK


def expansion(args, data: dict) -> int:
    X, a, _ = _load(args, data)
    budget = data['budget'] if args.budget is None else args.budget
    jobs = data['jobs'] if args.jobs is None else args.jobs
    if a is not None and args.dim is None:
        report = z2_expansion_witness(X, a, budget, jobs)
    else:
        report = z2_expansion_exact(X, X.k if args.dim is None else args.dim, budget, jobs)
    _emit(json.dumps(report.to_dict()), args.out)
    return EXIT_OK


def garland(args, data: dict) -> int:
    X, _, _ = _load(args, data)
    strict = data['strict']
    result = {
        "garland": verify_garland(X, strict=strict, max_order=data['max_order']).to_dict(),
        "adjacency": verify_adjacency_intervals(X, args.d, strict=strict, max_order=data['max_order']).to_dict(),
        "identities": asdict(localization_identities(X, strict=strict)),
    }
    _emit(json.dumps(result), args.out)
    passed = result["garland"]["passed"] and result["adjacency"]["passed"]
    return EXIT_OK if passed else EXIT_VIOLATION


def experiment(args, data: dict) -> int:
    overrides = {
        "seed": args.seed,
        "trials": args.trials,
        "jobs": args.jobs,
        "budget": args.budget,
        "samples": args.samples,
        "strict": args.strict,
        "out": args.out,
        "model": args.model,
    }
    for key, parse in (("n", utils.str_to_int_list), ("k", utils.str_to_int_list), ("p", utils.str_to_float_list),
                       ("q", utils.str_to_float_list), ("p_log_factor", utils.str_to_float_list)):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = parse(value)
    config = load_config(args.name, args.config, overrides, env=data)
    path = config.output_path(data['out_dir'])

    if config.experiment == "garland_audit":
        result = RUNNERS[config.experiment](config, os.path.dirname(path) or ".")
    else:
        result = RUNNERS[config.experiment](config)

    CsvSink(path).write(result.columns, result.rows())
    JsonSidecar.beside(path).write(config.to_dict(), result.summary, result.runtime)
    return EXIT_OK


VERBS = {
    "generate": generate,
    "spectrum": spectrum,
    "expansion": expansion,
    "garland": garland,
    "experiment": experiment,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    data = get_env_vars()
    level = (args.log_level or data['log_level']).upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return VERBS[args.verb](args, data)
    except BudgetExceededException as e:
        logger.error("budget refusal: %s", e)
        return EXIT_BUDGET
    except TheoremViolationException as e:
        logger.error("theorem violation: %s", e)
        return EXIT_VIOLATION
    except Exception as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())

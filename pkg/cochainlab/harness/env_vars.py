import json
import logging
import os
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import cochainlab.utils as utils
from cochainlab.topology.cochains import DEFAULT_BUDGET

logger = logging.getLogger(__name__)

EXPERIMENTS = ("concentration", "counterexample", "garland_audit", "complete_complex_golden")


class ConfigException(Exception):
    pass


def get_env_vars():
    data = {}
    try:
        seed = int(os.environ["COCHAINLAB_SEED"])
    except KeyError:
        seed = 0

    data['seed'] = seed

    try:
        jobs = int(os.environ["COCHAINLAB_JOBS"])
    except KeyError:
        jobs = 1

    data['jobs'] = jobs

    try:
        budget = int(os.environ["COCHAINLAB_BUDGET"])
    except KeyError:
        budget = DEFAULT_BUDGET

    data['budget'] = budget

    try:
        max_order = int(os.environ["COCHAINLAB_MAX_ORDER"])
    except KeyError:
        max_order = 6000

    data['max_order'] = max_order

    try:
        out_dir = os.environ["COCHAINLAB_OUT_DIR"]
    except KeyError:
        out_dir = 'results'

    data['out_dir'] = out_dir

    try:
        log_level = os.environ["COCHAINLAB_LOG_LEVEL"].upper()
    except KeyError:
        log_level = 'INFO'

    data['log_level'] = log_level

    try:
        strict = utils.str_to_bool(os.environ["COCHAINLAB_STRICT"])
    except KeyError:
        strict = True

    data['strict'] = strict

    if jobs < 1 or budget < 1 or max_order < 1:
        raise ConfigException("COCHAINLAB_JOBS, COCHAINLAB_BUDGET and COCHAINLAB_MAX_ORDER must be positive")

    return data


@dataclass
class Cell:
    """One grid point; ``q`` and ``p_log_factor`` are optional."""
    model: str
    n: int
    k: int
    p: Optional[float] = None
    q: float = 0.0
    p_log_factor: Optional[float] = None

    def probability(self) -> float:
        try:
            if self.p is not None:
                return utils.check_probability(self.p)
            if self.p_log_factor is not None:
                return utils.log_threshold_probability(self.p_log_factor, self.n)
        except ValueError as e:
            raise ConfigException("Cell %s: %s" % (self, e))
        raise ConfigException("Cell %s has neither p nor p_log_factor" % (self,))

    def key(self) -> tuple:
        return (self.model, self.n, self.k, self.probability(), self.q)


DEFAULT_GRIDS = {
    "concentration": [Cell("linial_meshulam", 50, 2, p_log_factor=8.0),
                      Cell("linial_meshulam", 80, 2, p_log_factor=8.0)],
    "counterexample": [Cell("counterexample_z", 20, 2, p=1.0, q=q) for q in (0.0, 0.1, 0.2, 0.3)],
    "garland_audit": [Cell("linial_meshulam", 30, 2, p=0.6),
                      Cell("linial_meshulam", 40, 2, p=0.3),
                      Cell("counterexample_y", 20, 2, p=1.0),
                      Cell("counterexample_z", 20, 2, p=1.0, q=0.3)],
    "complete_complex_golden": [Cell("linial_meshulam", n, k, p=1.0)
                                for n, k in ((4, 2), (5, 2), (6, 2), (6, 3), (7, 3))],
}

DEFAULT_TRIALS = {
    "concentration": 20,
    "counterexample": 50,
    "garland_audit": 100,
    "complete_complex_golden": 1,
}


@dataclass
class ExperimentConfig:
    """
    An experiment, its grid and the ambient settings it runs with.

    Parameters
    ----------
    experiment : str
        One of ``concentration``, ``counterexample``, ``garland_audit`` or ``complete_complex_golden``.
    cells : list of Cell
        The grid, one cell per model / parameter combination.
    trials : int
        Trials per cell.
    """
    experiment: str
    cells: List[Cell]
    trials: int
    seed: int = 0
    out: Optional[str] = None
    jobs: int = 1
    budget: int = DEFAULT_BUDGET
    max_order: int = 6000
    strict: bool = True
    samples: int = 50
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigException("Unknown experiment %r; choose from %s" % (self.experiment, ", ".join(EXPERIMENTS)))
        if not self.cells:
            raise ConfigException("Experiment grid is empty")
        if self.trials < 1:
            raise ConfigException("trials must be at least 1, got %r" % self.trials)
        for cell in self.cells:
            cell.probability()

    def to_dict(self) -> dict:
        return asdict(self)

    def output_path(self, out_dir: str) -> str:
        return self.out or os.path.join(out_dir, "%s.csv" % self.experiment)


def expand_grid(grid: dict, model: str) -> List[Cell]:
    """Cartesian product of the ``n``, ``k``, ``p`` / ``p_log_factor`` and ``q`` lists of a config."""
    try:
        ns = grid["n"]
    except KeyError:
        raise ConfigException("Grid needs an 'n' list")
    ks = grid.get("k", [2])
    qs = grid.get("q", [0.0])
    if "p" in grid:
        probabilities = [("p", p) for p in grid["p"]]
    elif "p_log_factor" in grid:
        probabilities = [("p_log_factor", c) for c in grid["p_log_factor"]]
    else:
        raise ConfigException("Grid needs a 'p' or 'p_log_factor' list")
    return [Cell(model, int(n), int(k), q=float(q), **{name: float(value)})
            for n in ns for k in ks for name, value in probabilities for q in qs]


def _default_model(experiment: str) -> str:
    return "counterexample_z" if experiment == "counterexample" else "linial_meshulam"


def load_config(experiment: str, path: Optional[str] = None, overrides: Optional[dict] = None,
                env: Optional[dict] = None) -> ExperimentConfig:
    """
    Builds an :class:`ExperimentConfig` from the built-in grid, a JSON file and inline flags.

    Later sources win: environment defaults, then the file, then ``overrides``. A grid given by
    flags (``n`` together with ``p`` or ``p_log_factor``) replaces the default grid.
    """
    env = get_env_vars() if env is None else env
    data = {"seed": env['seed'], "jobs": env['jobs'], "budget": env['budget'], "max_order": env['max_order'],
            "strict": env['strict']}
    if experiment not in EXPERIMENTS:
        raise ConfigException("Unknown experiment %r" % experiment)
    cells = list(DEFAULT_GRIDS[experiment])
    trials = DEFAULT_TRIALS[experiment]

    if path is not None:
        try:
            with open(path) as f:
                loaded = json.load(f)
        except (OSError, ValueError) as e:
            raise ConfigException("Cannot read config %s: %s" % (path, e))
        if loaded.get("experiment", experiment) != experiment:
            experiment = loaded["experiment"]
            if experiment not in EXPERIMENTS:
                raise ConfigException("Unknown experiment %r in %s" % (experiment, path))
            cells = list(DEFAULT_GRIDS[experiment])
            trials = DEFAULT_TRIALS[experiment]
        loaded.pop("experiment", None)
        if "cells" in loaded:
            try:
                cells = [Cell(**cell) for cell in loaded.pop("cells")]
            except TypeError as e:
                raise ConfigException("Bad cell in %s: %s" % (path, e))
        elif "grid" in loaded:
            grid = loaded.pop("grid")
            cells = expand_grid(grid, grid.get("model", _default_model(experiment)))
        trials = int(loaded.pop("trials", trials))
        data.update(loaded)

    overrides = {key: value for key, value in (overrides or {}).items() if value is not None}
    if "n" in overrides:
        grid = {"n": overrides.pop("n"), "k": overrides.pop("k", [2])}
        for key in ("p", "p_log_factor", "q"):
            if key in overrides:
                grid[key] = overrides.pop(key)
        cells = expand_grid(grid, overrides.pop("model", _default_model(experiment)))
    for key in ("k", "p", "p_log_factor", "q", "model"):
        overrides.pop(key, None)
    trials = int(overrides.pop("trials", trials))
    data.update(overrides)

    try:
        config = ExperimentConfig(experiment=experiment, cells=cells, trials=trials, **data)
    except TypeError as e:
        raise ConfigException("Unknown config key: %s" % e)
    logger.debug("config %s", config.to_dict())
    return config

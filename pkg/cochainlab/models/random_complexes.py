import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import numpy as np

from cochainlab.topology.cochains import Z2Cochain
from cochainlab.topology.complex import Face, SimplicialComplex, build_complex, facets
from cochainlab.utils import check_probability

logger = logging.getLogger(__name__)

STAGE_TAGS = {
    "gnp": 1,
    "lm": 2,
    "planted": 3,
    "thinning": 4,
    "extra": 5,
    "pairs": 6,
    "samples": 7,
}


class ModelException(Exception):
    pass


class ModelKind(Enum):
    GNP = "gnp"
    LINIAL_MESHULAM = "linial_meshulam"
    COUNTEREXAMPLE_Y = "counterexample_y"
    COUNTEREXAMPLE_Z = "counterexample_z"


@dataclass(frozen=True)
class ModelSpec:
    """
    Parameters of one random model.

    ``q`` is only read by ``counterexample_z``; ``gnp`` always has ``k = 1``.
    """
    model: str
    n: int
    k: int
    p: float
    q: float = 0.0
    seed: int = 0

    def __post_init__(self):
        try:
            ModelKind(self.model)
        except ValueError:
            raise ModelException("Unknown model %r" % (self.model,))
        try:
            check_probability(self.p, "p")
            check_probability(self.q, "q")
        except ValueError as e:
            raise ModelException(str(e))
        if not 0 <= self.k < self.n:
            raise ModelException("Need 0 <= k < n, got n=%r, k=%r" % (self.n, self.k))
        if self.kind == ModelKind.GNP and self.k != 1:
            raise ModelException("gnp graphs have k = 1, got k=%r" % self.k)
        if self.kind != ModelKind.GNP and self.k < 1:
            raise ModelException("Random complexes need k >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ModelException("Seed must be a 64-bit non-negative integer, got %r" % self.seed)

    @property
    def kind(self) -> ModelKind:
        return ModelKind(self.model)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ModelSpec":
        try:
            return cls(model=data["model"], n=int(data["n"]), k=int(data.get("k", 1)), p=float(data["p"]),
                       q=float(data.get("q", 0.0)), seed=int(data.get("seed", 0)))
        except KeyError as e:
            raise ModelException("Model spec is missing key %s" % e)

    def metadata(self, trial: int) -> dict:
        data = self.to_dict()
        data["trial"] = trial
        return data


class RandomStreams(object):
    """
    Independent generators per ``(seed, stage, trial)``.

    Each stream is a Philox generator seeded with ``SeedSequence([seed, stage tag, trial])``, so stages
    never share state and any trial can be regenerated alone.
    """

    def __init__(self, seed: int, trial: int = 0):
        self.seed = seed
        self.trial = trial

    def __repr__(self):
        return "RandomStreams(seed=%d, trial=%d)" % (self.seed, self.trial)

    def stream(self, stage: str) -> np.random.Generator:
        try:
            tag = STAGE_TAGS[stage]
        except KeyError:
            raise ModelException("Unknown stream stage %r" % stage)
        return np.random.Generator(np.random.Philox(np.random.SeedSequence([self.seed, tag, self.trial])))


def _bernoulli(candidates: List[Face], p: float, rng: np.random.Generator) -> List[Face]:
    """One uniform draw per candidate, in the given (lexicographic) order."""
    if not candidates:
        return []
    keep = rng.random(len(candidates)) < p
    return [face for face, chosen in zip(candidates, keep) if chosen]


def gnp(n: int, p: float, rng: np.random.Generator) -> SimplicialComplex:
    """The random graph ``G(n, p)``."""
    check_probability(p)
    edges = _bernoulli(list(combinations(range(n), 2)), p, rng)
    return build_complex(n, 1, edges, complete_skeleton_dim=0)


def linial_meshulam(n: int, k: int, p: float, rng: np.random.Generator) -> SimplicialComplex:
    """``X^k(n, p)``: complete ``(k-1)``-skeleton and independent ``k``-faces."""
    check_probability(p)
    if not 1 <= k < n:
        raise ModelException("linial_meshulam needs 1 <= k < n, got n=%r, k=%r" % (n, k))
    faces = _bernoulli(list(combinations(range(n), k + 1)), p, rng)
    return build_complex(n, k, faces, complete_skeleton_dim=k - 1)


@dataclass(frozen=True, eq=False)
class CounterexampleSample:
    """A complex together with the planted ``(k-1)``-cochain ``a``."""
    complex: SimplicialComplex
    a: Z2Cochain

    def bad_faces(self) -> List[Face]:
        """``k``-faces whose boundary meets ``a`` an odd number of times."""
        X = self.complex
        bits = self.a.bits
        return [H for H in X.faces(X.k) if sum(int(bits[X.index(G)]) for _, G in facets(H)) % 2]


def _parities(n: int, k: int, bits: np.ndarray, candidates: List[Face]) -> np.ndarray:
    index: Dict[Face, int] = {face: row for row, face in enumerate(combinations(range(n), k))}
    rows = np.array([[index[G] for _, G in facets(H)] for H in candidates], dtype=np.int64)
    return bits[rows].sum(axis=1) % 2


def counterexample_y(n: int, k: int, p: float, streams: RandomStreams) -> CounterexampleSample:
    """
    ``Y^k(n, p)``.

    ``a`` is a uniform random ``(k-1)``-cochain; a ``(k+1)``-set is "good" when its boundary meets ``a``
    an even number of times, and each good set becomes a ``k``-face with probability ``p``. ``a`` is then
    a cocycle of the result.
    """
    check_probability(p)
    if not 1 <= k < n:
        raise ModelException("counterexample_y needs 1 <= k < n, got n=%r, k=%r" % (n, k))
    ridges = math.comb(n, k)
    bits = (streams.stream("planted").random(ridges) < 0.5).astype(np.uint8)
    candidates = list(combinations(range(n), k + 1))
    good = _parities(n, k, bits, candidates) == 0
    draws = streams.stream("thinning").random(len(candidates)) < p
    faces = [H for H, ok, kept in zip(candidates, good, draws) if ok and kept]
    X = build_complex(n, k, faces, complete_skeleton_dim=k - 1)
    return CounterexampleSample(X, Z2Cochain(k - 1, bits))


def counterexample_z(n: int, k: int, p: float, q: float, streams: RandomStreams) -> CounterexampleSample:
    """``Z^k(n, p, q)``: the union of ``Y^k(n, p)`` and an independent ``X^k(n, q)``, keeping ``a``."""
    check_probability(q, "q")
    planted = counterexample_y(n, k, p, streams)
    extra = linial_meshulam(n, k, q, streams.stream("extra"))
    faces = sorted(set(planted.complex.faces(k)) | set(extra.faces(k)))
    X = build_complex(n, k, faces, complete_skeleton_dim=k - 1)
    return CounterexampleSample(X, planted.a)


def sample(spec: ModelSpec, trial: int) -> Tuple[SimplicialComplex, Optional[Z2Cochain]]:
    """Draws trial ``trial`` of ``spec``; the cochain is ``None`` for models without a planted cochain."""
    streams = RandomStreams(spec.seed, trial)
    kind = spec.kind
    if kind == ModelKind.GNP:
        return gnp(spec.n, spec.p, streams.stream("gnp")), None
    if kind == ModelKind.LINIAL_MESHULAM:
        return linial_meshulam(spec.n, spec.k, spec.p, streams.stream("lm")), None
    if kind == ModelKind.COUNTEREXAMPLE_Y:
        result = counterexample_y(spec.n, spec.k, spec.p, streams)
    else:
        result = counterexample_z(spec.n, spec.k, spec.p, spec.q, streams)
    return result.complex, result.a


def link_edge_probability(spec: ModelSpec) -> float:
    kind = spec.kind
    if kind == ModelKind.COUNTEREXAMPLE_Y:
        return spec.p / 2
    if kind == ModelKind.COUNTEREXAMPLE_Z:
        return spec.p / 2 + spec.q - spec.p * spec.q / 2
    if kind == ModelKind.LINIAL_MESHULAM:
        return spec.p
    raise ModelException("Link distribution is defined for random complexes, not %s" % spec.model)


@dataclass(frozen=True, eq=False)
class LinkDistributionReport:
    """
    Per-edge frequencies of a link across trials and their z-scores against the target probability.

    ``pair_z_scores`` compare the joint frequency of sampled edge pairs with the product of marginals.
    """
    face: Face
    target: float
    trials: int
    edges: Tuple[Tuple[int, int], ...]
    frequencies: np.ndarray
    z_scores: np.ndarray
    pairs: Tuple[Tuple[int, int], ...]
    pair_z_scores: np.ndarray

    @property
    def max_abs_z(self) -> float:
        return float(np.abs(self.z_scores).max(initial=0.0))

    @property
    def max_abs_pair_z(self) -> float:
        return float(np.abs(self.pair_z_scores).max(initial=0.0))

    def within(self, sigmas: float) -> bool:
        return self.max_abs_z <= sigmas and self.max_abs_pair_z <= sigmas

    def to_dict(self) -> dict:
        return {
            "face": list(self.face),
            "target": self.target,
            "trials": self.trials,
            "max_abs_z": self.max_abs_z,
            "max_abs_pair_z": self.max_abs_pair_z,
            "edges": [{"edge": list(e), "frequency": float(f), "z": float(z)}
                      for e, f, z in zip(self.edges, self.frequencies, self.z_scores)],
        }


def _z(observed: np.ndarray, expected, variance: float, trials: int) -> np.ndarray:
    sigma = math.sqrt(variance / trials)
    diff = observed - expected
    if sigma == 0:
        return np.where(np.abs(diff) > 0, np.inf, 0.0)
    return diff / sigma


def link_distribution_test(model: ModelSpec, F: Face, trials: int, pairs: int = 50) -> LinkDistributionReport:
    """
    Empirical distribution of the link of the ``(k-2)``-face ``F`` over ``trials`` seeded samples.

    Link vertices are ``V \\ F``; an edge ``uv`` is present when ``F + {u, v}`` is a ``k``-face.
    """
    target = link_edge_probability(model)
    F = tuple(F)
    if len(F) != model.k - 1:
        raise ModelException("Link test needs a face of dimension %d, got %r" % (model.k - 2, F))
    if trials < 1:
        raise ModelException("Need at least one trial")
    outside = [v for v in range(model.n) if v not in F]
    edges = list(combinations(outside, 2))
    faces = [tuple(sorted(F + e)) for e in edges]

    counts = np.zeros((trials, len(edges)), dtype=np.uint8)
    for trial in range(trials):
        X, _ = sample(model, trial)
        counts[trial] = [face in X for face in faces]

    frequencies = counts.mean(axis=0)
    z_scores = _z(frequencies, target, target * (1 - target), trials)

    rng = RandomStreams(model.seed).stream("pairs")
    chosen = []
    if len(edges) > 1:
        for _ in range(pairs):
            e, f = rng.choice(len(edges), size=2, replace=False)
            chosen.append((int(e), int(f)))
    joint = np.array([(counts[:, e] & counts[:, f]).mean() for e, f in chosen])
    products = np.array([frequencies[e] * frequencies[f] for e, f in chosen])
    pair_z = _z(joint, products, target ** 2 * (1 - target ** 2), trials) if chosen else np.zeros(0)

    report = LinkDistributionReport(F, target, trials, tuple(edges), frequencies, z_scores,
                                    tuple(chosen), pair_z)
    logger.info("link test for %s: max |z| %.2f, max pair |z| %.2f", model.model, report.max_abs_z,
                report.max_abs_pair_z)
    return report

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import networkx as nx
import numpy as np
from scipy.sparse import csgraph

from cochainlab.topology import gf2
from cochainlab.topology.cochains import (DEFAULT_BUDGET, BudgetExceededException, Z2Cochain, coboundary_sparse,
                                          coboundary_space_basis, gf2_cohomology_dim, z2_class_norm, z2_coboundary)
from cochainlab.topology.complex import SimplicialComplex, complex_from_networkx
from cochainlab.topology.spectral import hodge_check, normalized_up_spectrum, symmetric_spectrum, up_laplacian

logger = logging.getLogger(__name__)

CHEEGER_TOLERANCE = 1e-9


class ExpansionException(Exception):
    pass


class UndefinedRatioException(ExpansionException):
    pass


@dataclass(frozen=True)
class ExpansionReport:
    """
    ``||delta f|| / ||[f]||`` for the minimizing class (``exhaustive``) or for one given cochain (``witness``).

    ``epsilon`` is the exact ratio ``(coboundary_weight / coboundary_faces) / (class_weight / cochain_faces)``;
    it is ``None`` when every class is trivial. A ``witness`` value is an upper bound on the expansion.
    """
    method: str
    dim: int
    epsilon: Optional[Fraction]
    coboundary_weight: int
    coboundary_faces: int
    class_weight: int
    cochain_faces: int
    representative: Optional[Z2Cochain]
    classes: int = 1

    @property
    def value(self) -> float:
        return math.inf if self.epsilon is None else float(self.epsilon)

    @property
    def is_upper_bound(self) -> bool:
        return self.method == "witness"

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "dim": self.dim,
            "epsilon": None if self.epsilon is None else float(self.epsilon),
            "epsilon_exact": None if self.epsilon is None else "%d/%d" % (self.epsilon.numerator,
                                                                           self.epsilon.denominator),
            "coboundary_weight": self.coboundary_weight,
            "coboundary_faces": self.coboundary_faces,
            "class_weight": self.class_weight,
            "cochain_faces": self.cochain_faces,
            "representative": None if self.representative is None else list(self.representative.support),
            "classes": self.classes,
        }


def _ratio(delta_weight: int, delta_faces: int, class_weight: int, cochain_faces: int) -> Fraction:
    if delta_faces == 0:
        return Fraction(0)
    return Fraction(delta_weight * cochain_faces, delta_faces * class_weight)


def _scan_classes(args) -> Optional[Tuple[Fraction, int, int, int]]:
    """Minimum ratio over ``start + span(words)``, skipping the zero class. Returns ``(ratio, word, class, delta)``."""
    start, start_delta, words, delta_words, basis, delta_faces, cochain_faces = args
    best = None
    current, current_delta = start, start_delta

    def consider(best):
        if current == 0:
            return best
        class_weight, word = gf2.coset_minimum(current, basis)
        ratio = _ratio(current_delta.bit_count(), delta_faces, class_weight, cochain_faces)
        candidate = (ratio, word, class_weight, current_delta.bit_count())
        if best is None or candidate[:2] < best[:2]:
            return candidate
        return best

    best = consider(best)
    for flip in gf2.gray_code_flips(len(words)):
        current ^= words[flip]
        current_delta ^= delta_words[flip]
        best = consider(best)
    return best


def _chunks(words: List[int], delta_words: List[int], jobs: int):
    high = min(len(words), max(0, (4 * jobs - 1).bit_length()))
    cut = len(words) - high
    for prefix in range(1 << high):
        start = start_delta = 0
        for j in range(high):
            if prefix >> j & 1:
                start ^= words[cut + j]
                start_delta ^= delta_words[cut + j]
        yield start, start_delta, words[:cut], delta_words[:cut]


def z2_expansion_exact(X: SimplicialComplex, i: int, budget: int = DEFAULT_BUDGET, jobs: int = 1) -> ExpansionReport:
    """
    Exact ``i``-dimensional Z2 coboundary expansion.

    One representative per cohomology-free class of ``C^{i-1}`` is enumerated from a complement of
    ``B^{i-1}``; ``||delta f||`` is constant on a class and ``||[f]||`` is an exact coset minimum.
    Ties between classes go to the lexicographically smallest minimal representative.

    Raises
    ------
    BudgetExceededException
        If the number of classes or the coset size exceeds ``budget``.
    """
    if not 1 <= i <= X.k:
        raise ExpansionException("z2_expansion_exact needs 1 <= i <= %d, got %d" % (X.k, i))
    cochain_faces = X.face_count(i - 1)
    delta_faces = X.face_count(i)
    basis = coboundary_space_basis(X, i - 1)
    rows = np.vstack([b.bits for b in basis]) if basis else np.zeros((0, cochain_faces), dtype=np.uint8)
    complement = gf2.complement_basis(rows, cochain_faces)
    for label, size in (("classes", len(complement)), ("coset", len(basis))):
        if (1 << size) > budget:
            logger.error("%s of size 2^%d exceed the budget %d", label, size, budget)
            raise BudgetExceededException("%s of size 2^%d exceed the budget %d" % (label, size, budget))

    delta = abs(coboundary_sparse(X, i - 1)).tocsc()
    words = [gf2.pack_bits(vec) for vec in complement]
    delta_words = [gf2.pack_bits(delta[:, int(np.flatnonzero(vec)[0])].toarray().ravel() % 2) for vec in complement]
    basis_words = [b.word for b in basis]

    if jobs > 1 and len(words) > 8:
        tasks = [(s, sd, w, dw, basis_words, delta_faces, cochain_faces)
                 for s, sd, w, dw in _chunks(words, delta_words, jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = [r for r in pool.map(_scan_classes, tasks) if r is not None]
        best = min(results, key=lambda r: r[:2]) if results else None
    else:
        best = _scan_classes((0, 0, words, delta_words, basis_words, delta_faces, cochain_faces))

    classes = 1 << len(complement)
    if best is None:
        logger.info("every %d-cochain is a coboundary; expansion is unbounded", i - 1)
        return ExpansionReport("exhaustive", i, None, 0, delta_faces, 0, cochain_faces, None, classes)
    ratio, word, class_weight, delta_weight = best
    representative = Z2Cochain(i - 1, gf2.unpack_bits(word, cochain_faces))
    return ExpansionReport("exhaustive", i, ratio, delta_weight, delta_faces, class_weight, cochain_faces,
                           representative, classes)


def z2_expansion_witness(X: SimplicialComplex, f: Z2Cochain, budget: int = DEFAULT_BUDGET,
                         jobs: int = 1) -> ExpansionReport:
    """
    The exact ratio ``||delta f|| / ||[f]||`` of one cochain, an upper bound on the expansion.

    Raises
    ------
    UndefinedRatioException
        If ``f`` is a coboundary.
    BudgetExceededException
        If the coset of ``f`` is too large to minimize over.
    """
    if f.dim + 1 > X.k:
        raise ExpansionException("No coboundary above the top dimension %d" % X.k)
    norm = z2_class_norm(X, f, budget, jobs)
    if norm.weight == 0:
        raise UndefinedRatioException("Cochain is a coboundary; ||[f]|| = 0")
    delta_weight = z2_coboundary(X, f).weight
    delta_faces = X.face_count(f.dim + 1)
    ratio = _ratio(delta_weight, delta_faces, norm.weight, norm.total)
    return ExpansionReport("witness", f.dim + 1, ratio, delta_weight, delta_faces, norm.weight, norm.total,
                           norm.representative)


def spectral_expansion(X: SimplicialComplex, max_order: Optional[int] = None) -> float:
    """
    Smallest nontrivial eigenvalue of ``Delta^up_{k-1}``.

    A degenerate trivial split is logged as a warning and the value at the split is returned.
    """
    if X.k < 1 or not X.has_complete_skeleton(X.k - 1):
        raise ExpansionException("spectral_expansion needs a complete %d-skeleton" % (X.k - 1))
    report = normalized_up_spectrum(X, max_order=max_order)
    values = report.nontrivial()
    if not values.size:
        raise ExpansionException("No nontrivial eigenvalues")
    if report.degenerate:
        logger.warning("spectral expansion read from a degenerate split")
    return float(values[0])


def cohomology_consistent(X: SimplicialComplex, report: ExpansionReport) -> bool:
    """A positive exhaustive expansion in dimension ``i`` forces vanishing ``(i-1)``-cohomology over Z2 and R."""
    if report.method != "exhaustive":
        raise ExpansionException("Only exhaustive reports determine the cohomology")
    if report.epsilon is not None and report.epsilon == 0:
        return True
    z2 = gf2_cohomology_dim(X, report.dim - 1)
    real = hodge_check(X, report.dim - 1).harmonic_dim
    return z2 == 0 and real == 0


def _as_graph(G) -> SimplicialComplex:
    if isinstance(G, nx.Graph):
        return complex_from_networkx(G)
    if not isinstance(G, SimplicialComplex) or G.k != 1:
        raise ExpansionException("Expected a graph, got %r" % (G,))
    return G


def _neighbours(G: SimplicialComplex) -> List[List[int]]:
    adjacent: List[List[int]] = [[] for _ in range(G.n)]
    for u, v in G.faces(1):
        adjacent[u].append(v)
        adjacent[v].append(u)
    return adjacent


@dataclass(frozen=True)
class EdgeExpansion:
    """
    Exact cut statistics of a graph.

    ``epsilon`` is ``min (|E(S, S^c)| / |E|) / (min(|S|, |S^c|) / |V|)`` and ``cut_ratio`` is
    ``min |E(S, S^c)| / |S|`` over ``|S| <= |V| / 2``.
    """
    epsilon: Fraction
    cut_ratio: Fraction
    subset: Tuple[int, ...]


def graph_edge_expansion(G, budget: int = DEFAULT_BUDGET) -> EdgeExpansion:
    """
    Enumerates the ``2^(n-1)`` vertex subsets that avoid the last vertex, in Gray-code order.

    Raises
    ------
    BudgetExceededException
        If ``2^(n-1)`` exceeds ``budget``.
    ExpansionException
        If the graph has no edges.
    """
    G = _as_graph(G)
    n = G.n
    edges = G.face_count(1)
    if edges == 0:
        raise ExpansionException("Edge expansion needs at least one edge")
    if (1 << (n - 1)) > budget:
        logger.error("2^%d subsets exceed the budget %d", n - 1, budget)
        raise BudgetExceededException("2^%d subsets exceed the budget %d" % (n - 1, budget))

    adjacent = _neighbours(G)
    inside = [False] * n
    size = cut = 0
    best_eps: Optional[Fraction] = None
    best_cut: Optional[Fraction] = None
    best_mask = 0
    mask = 0
    for flip in gf2.gray_code_flips(n - 1):
        same = sum(1 for u in adjacent[flip] if inside[u] == inside[flip])
        cut += same - (len(adjacent[flip]) - same)
        inside[flip] = not inside[flip]
        size += 1 if inside[flip] else -1
        mask ^= 1 << flip
        smaller = min(size, n - size)
        eps = Fraction(cut * n, edges * smaller)
        if best_eps is None or eps < best_eps:
            best_eps, best_mask = eps, mask
        ratio = Fraction(cut, size) if size <= n - size else Fraction(cut, n - size)
        if best_cut is None or ratio < best_cut:
            best_cut = ratio
    subset = tuple(v for v in range(n) if best_mask >> v & 1)
    return EdgeExpansion(best_eps, best_cut, subset)


def graph_edge_expansion_exact(G, budget: int = DEFAULT_BUDGET) -> Fraction:
    """Exact ``epsilon(G)`` by subset enumeration."""
    return graph_edge_expansion(G, budget).epsilon


@dataclass(frozen=True)
class CheegerReport:
    """``lambda_2 <= 2h <= sqrt(8 lambda_2)`` with ``h = min |E(S, S^c)| / (d |S|)``."""
    d: int
    lambda_2: float
    h: Fraction

    @property
    def epsilon(self) -> float:
        return 2 * float(self.h)

    @property
    def lower_holds(self) -> bool:
        return self.lambda_2 <= self.epsilon + CHEEGER_TOLERANCE

    @property
    def upper_holds(self) -> bool:
        return self.epsilon <= math.sqrt(8 * max(self.lambda_2, 0.0)) + CHEEGER_TOLERANCE

    @property
    def passed(self) -> bool:
        return self.lower_holds and self.upper_holds

    def to_dict(self) -> dict:
        return {"d": self.d, "lambda_2": self.lambda_2, "h": float(self.h), "epsilon": self.epsilon,
                "passed": self.passed}


def cheeger_check(G, budget: int = DEFAULT_BUDGET) -> CheegerReport:
    """
    Checks both Cheeger inequalities on a connected ``d``-regular graph.

    Raises
    ------
    ExpansionException
        If the graph is not regular or not connected.
    """
    G = _as_graph(G)
    degrees = G.degrees(0)
    if degrees.size == 0 or np.any(degrees != degrees[0]) or degrees[0] == 0:
        raise ExpansionException("Cheeger check needs a regular graph of positive degree")
    adjacency = abs(coboundary_sparse(G, 0)).T @ abs(coboundary_sparse(G, 0))
    components, _ = csgraph.connected_components(adjacency, directed=False)
    if components != 1:
        raise ExpansionException("Cheeger check needs a connected graph, got %d components" % components)

    d = int(degrees[0])
    eigenvalues = symmetric_spectrum(up_laplacian(G, 0)) / d
    cut = graph_edge_expansion(G, budget)
    report = CheegerReport(d=d, lambda_2=float(eigenvalues[1]), h=cut.cut_ratio / d)
    logger.debug("cheeger check: %s", report.to_dict())
    return report


def class_norm_unchanged(X: SimplicialComplex, Y: SimplicialComplex, f: Z2Cochain,
                         budget: int = DEFAULT_BUDGET) -> bool:
    """``||[f]||`` agrees on two complexes that share the skeleton below ``f``'s dimension plus one."""
    return z2_class_norm(X, f, budget).weight == z2_class_norm(Y, f, budget).weight

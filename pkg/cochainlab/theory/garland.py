"""
Localization of operators on (k-1)-faces to the links of (k-2)-faces.

Every check here compares a spectral quantity of the complex with quantities of its links. The
theorems behind them are unconditional, so a failed check with ``strict=True`` raises
:class:`TheoremViolationException` instead of returning a report.
"""
import json
import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg as linalg
from scipy import sparse

from cochainlab.topology.cochains import RealCochain, WeightFunction, coboundary_sparse, random_coboundary
from cochainlab.topology.complex import Face, SimplicialComplex, canonical_face, facets, incidence_number, is_pure, link
from cochainlab.topology.operators import OperatorKind, OperatorMatrix
from cochainlab.topology.spectral import (SpectralException, adjacency_matrix, coboundary_complement,
                                          coboundary_frame, normalized_up_spectrum, symmetric_spectrum,
                                          up_laplacian)
from cochainlab.utils import binomial

logger = logging.getLogger(__name__)

GARLAND_TOLERANCE = 1e-8
IDENTITY_TOLERANCE = 1e-12


class GarlandException(Exception):
    pass


class TheoremViolationException(Exception):
    pass


def _union(F: Face, v: int) -> Face:
    return tuple(sorted(F + (v,)))


def _check_ridge(X: SimplicialComplex, F: Face) -> Face:
    F = canonical_face(F)
    if len(F) != X.k - 1:
        raise GarlandException("Expected a face of dimension %d, got %r" % (X.k - 2, F))
    if F not in X:
        raise GarlandException("Face %r is not in the complex" % (F,))
    return F


def _check_complete(X: SimplicialComplex):
    if X.k < 1 or not X.has_complete_skeleton(X.k - 1):
        raise GarlandException("Need a complex with complete %d-skeleton" % (X.k - 1))


def _violation(message: str, strict: bool):
    logger.error(message)
    if strict:
        raise TheoremViolationException(message)


@dataclass(frozen=True, eq=False)
class LinkRestriction:
    """
    The link graph of a ``(k-2)``-face with the sign twist ``s(v) = [F + {v} : F]``.

    ``rows[j]`` is the row of ``F + {vertex_map[j]}`` among the ``(k-1)``-faces of the host complex.
    """
    face: Face
    graph: SimplicialComplex
    vertex_map: Tuple[int, ...]
    signs: np.ndarray
    rows: np.ndarray
    complex_id: str

    @property
    def size(self) -> int:
        return len(self.vertex_map)


def link_restriction(X: SimplicialComplex, F: Face) -> LinkRestriction:
    F = _check_ridge(X, F)
    graph = link(X, F)
    vertices = graph.vertex_map
    signs = np.array([incidence_number(_union(F, v), F) for v in vertices], dtype=np.int64)
    rows = np.array([X.index(_union(F, v)) for v in vertices], dtype=np.int64)
    return LinkRestriction(F, graph, vertices, signs, rows, X.fingerprint)


def restrict_cochain(f: RealCochain, R: LinkRestriction) -> RealCochain:
    """``f_F(u) = [F + {u} : F] f(F + {u})`` on the link vertices."""
    if f.dim != len(R.face):
        raise GarlandException("Restriction needs a %d-cochain, got dimension %d" % (len(R.face), f.dim))
    return RealCochain(0, R.signs * f.values[R.rows])


def _star_rows(X: SimplicialComplex) -> Dict[Face, List[int]]:
    star: Dict[Face, List[int]] = {F: [] for F in X.faces(X.k - 2)}
    for row, G in enumerate(X.faces(X.k - 1)):
        for _, F in facets(G):
            star[F].append(row)
    return star


def _projector(size: int, rows, dtype) -> sparse.csr_matrix:
    mask = np.zeros(size, dtype=dtype)
    mask[list(rows)] = 1
    return sparse.diags(mask, format="csr", dtype=dtype)


def localize(M: OperatorMatrix, X: SimplicialComplex, F: Face) -> OperatorMatrix:
    """
    ``rho_F M rho_F``: zeroes the rows and columns of ``(k-1)``-faces not containing ``F``.

    Raises
    ------
    GarlandException
        If ``F`` is not a ``(k-2)``-face of ``X`` or ``M`` is not an operator on the ``(k-1)``-faces of ``X``.
    """
    F = _check_ridge(X, F)
    if M.dim != X.k - 1 or M.rows != X.face_count(X.k - 1) or M.cols != M.rows:
        raise GarlandException("Cannot localize %r on a complex with %d faces of dimension %d"
                               % (M, X.face_count(X.k - 1), X.k - 1))
    base = set(F)
    rows = [row for row, G in enumerate(X.faces(X.k - 1)) if base.issubset(G)]
    rho = _projector(M.rows, rows, M.entries.dtype)
    return OperatorMatrix((rho @ M.entries @ rho).tocsr(), M.kind, M.complex_id, M.dim, face=F)


def localization_sum(M: OperatorMatrix, X: SimplicialComplex) -> sparse.csr_matrix:
    """``sum_F rho_F M rho_F`` over all ``(k-2)``-faces ``F``."""
    total = sparse.csr_matrix(M.entries.shape, dtype=M.entries.dtype)
    for rows in _star_rows(X).values():
        rho = _projector(M.rows, rows, M.entries.dtype)
        total = total + rho @ M.entries @ rho
    return total.tocsr()


@dataclass(frozen=True)
class LocalizationReport:
    """
    ``sum_F rho_F L rho_F = L + (k-1) D`` and ``sum_F rho_F A rho_F = A`` in integers, and
    ``sum_F rho_F Delta rho_F = Delta + (k-1) I`` in floats.
    """
    laplacian_exact: bool
    adjacency_exact: bool
    normalized_deviation: float

    @property
    def passed(self) -> bool:
        return self.laplacian_exact and self.adjacency_exact and self.normalized_deviation <= IDENTITY_TOLERANCE


def localization_identities(X: SimplicialComplex, strict: bool = False) -> LocalizationReport:
    if X.k < 1:
        raise GarlandException("Localization needs k >= 1")
    if not is_pure(X):
        raise GarlandException("Localization identities need a pure complex")
    size = X.face_count(X.k - 1)
    identity = sparse.identity(size, dtype=np.int64, format="csr")
    degrees = sparse.diags(X.degrees(X.k - 1), format="csr", dtype=np.int64)

    laplacian = up_laplacian(X, X.k - 1)
    laplacian_exact = (localization_sum(laplacian, X) - laplacian.entries - (X.k - 1) * degrees).count_nonzero() == 0

    adjacency = adjacency_matrix(X)
    adjacency_exact = (localization_sum(adjacency, X) - adjacency.entries).count_nonzero() == 0

    normalized = up_laplacian(X, X.k - 1, WeightFunction.degree(X))
    diff = localization_sum(normalized, X) - normalized.entries - (X.k - 1) * identity
    deviation = float(abs(diff).max()) if diff.nnz else 0.0

    report = LocalizationReport(laplacian_exact, adjacency_exact, deviation)
    if not report.passed:
        _violation("localization identities fail: %s" % (report,), strict)
    return report


def sign_identity_holds(n: int, k: int) -> bool:
    """
    ``[F+{u,v} : F+{u}] [F+{u,v} : F+{v}] = -[F+{u} : F] [F+{v} : F]`` for every face ``F`` of
    ``K_n`` with at most ``k - 1`` vertices and all distinct ``u, v`` outside ``F``.
    """
    for size in range(0, k):
        for F in combinations(range(n), size):
            outside = [v for v in range(n) if v not in F]
            for u, v in combinations(outside, 2):
                Fu, Fv = _union(F, u), _union(F, v)
                Fuv = _union(Fu, v)
                left = incidence_number(Fuv, Fu) * incidence_number(Fuv, Fv)
                right = -incidence_number(Fu, F) * incidence_number(Fv, F)
                if left != right:
                    logger.error("sign identity fails at F=%r, u=%d, v=%d", F, u, v)
                    return False
    return True


def link_random_walk_laplacian(graph: SimplicialComplex) -> np.ndarray:
    """``I - D^{-1} A`` of a graph; rows of isolated vertices are zero."""
    matrix = up_laplacian(graph, 0, WeightFunction.degree(graph), allow_zero=True).dense()
    return matrix


def localized_entries_match(X: SimplicialComplex, R: LinkRestriction) -> bool:
    """``(Delta^{up,F})_{F+u, F+v} = s(u) s(v) Delta(lk F)_{u,v}`` for all link vertices ``u, v``."""
    normalized = up_laplacian(X, X.k - 1, WeightFunction.degree(X)).entries
    block = normalized[R.rows][:, R.rows].toarray()
    twisted = np.outer(R.signs, R.signs) * link_random_walk_laplacian(R.graph)
    return bool(np.allclose(block, twisted, rtol=IDENTITY_TOLERANCE, atol=IDENTITY_TOLERANCE))


def localized_quadratic_forms(X: SimplicialComplex, f: RealCochain, F: Face) -> Tuple[float, float]:
    """
    ``(<Delta^{up,F} f, f>_deg, <Delta(lk F) f_F, f_F>_deg)``, two values that agree.

    In the degree-weighted inner products both equal the unweighted Laplacian forms
    ``(rho f)^T L (rho f)`` and ``f_F^T L(lk F) f_F``.
    """
    R = link_restriction(X, F)
    local = localize(up_laplacian(X, X.k - 1), X, R.face).entries
    lhs = float(f.values @ (local @ f.values))
    g = restrict_cochain(f, R).values
    rhs = float(g @ (up_laplacian(R.graph, 0).entries @ g))
    return lhs, rhs


def link_weighted_sums(X: SimplicialComplex, f: RealCochain) -> np.ndarray:
    """``<f_F, 1>`` in the link degree weights, for every ``(k-2)``-face ``F``."""
    sums = []
    for F in X.faces(X.k - 2):
        R = link_restriction(X, F)
        if R.size == 0:
            sums.append(0.0)
            continue
        sums.append(float(np.dot(R.graph.degrees(0), restrict_cochain(f, R).values)))
    return np.array(sums)


@dataclass(frozen=True)
class LinkSpectrum:
    face: Face
    vertices: int
    lambda_2: float
    lambda_max: float


@dataclass(frozen=True)
class GarlandInterval:
    """``[1 + k lambda_min - k, 1 + k lambda_max - k]`` from the extreme link eigenvalues."""
    k: int
    lambda_min: float
    lambda_max: float
    links: Tuple[LinkSpectrum, ...] = field(default_factory=tuple)

    @property
    def lower(self) -> float:
        return 1 + self.k * self.lambda_min - self.k

    @property
    def upper(self) -> float:
        return 1 + self.k * self.lambda_max - self.k

    def contains(self, value: float, tol: float = GARLAND_TOLERANCE) -> bool:
        return self.lower - tol <= value <= self.upper + tol

    def to_dict(self) -> dict:
        return {
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
            "interval": [self.lower, self.upper],
            "links": [{"face": list(s.face), "vertices": s.vertices, "lambda_2": s.lambda_2,
                       "lambda_max": s.lambda_max} for s in self.links],
        }


def garland_interval(X: SimplicialComplex) -> GarlandInterval:
    """
    Extreme nontrivial normalized-Laplacian eigenvalues over the links of all ``(k-2)``-faces.

    ``lambda_min`` is the smallest ``lambda_2`` of a link. Empty links are skipped.

    Raises
    ------
    GarlandException
        If the complex is not pure or a link has an isolated vertex.
    """
    if X.k < 1:
        raise GarlandException("Garland's method needs k >= 1")
    if not is_pure(X):
        logger.error("garland interval requested for a non-pure complex")
        raise GarlandException("Complex is not pure")

    spectra = []
    for F in X.faces(X.k - 2):
        graph = link(X, F)
        if graph.n == 0:
            logger.debug("skipping empty link of %r", F)
            continue
        try:
            eigenvalues = normalized_up_spectrum(graph).eigenvalues
        except SpectralException:
            raise GarlandException("Link of %r has isolated vertices" % (F,))
        spectra.append(LinkSpectrum(F, graph.n, float(eigenvalues[1]), float(eigenvalues[-1])))

    if not spectra:
        raise GarlandException("Complex has no nonempty links")
    interval = GarlandInterval(X.k, min(s.lambda_2 for s in spectra), max(s.lambda_max for s in spectra),
                               tuple(spectra))
    logger.debug("garland interval [%g, %g] from %d links", interval.lower, interval.upper, len(spectra))
    return interval


@dataclass(frozen=True)
class GarlandReport:
    interval: GarlandInterval
    nontrivial: Tuple[float, ...]
    violations: Tuple[Tuple[int, float], ...]
    tolerance: float

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        data = self.interval.to_dict()
        data.update({"nontrivial_min": min(self.nontrivial, default=math.nan),
                     "nontrivial_max": max(self.nontrivial, default=math.nan),
                     "violations": [list(v) for v in self.violations],
                     "passed": self.passed})
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def verify_garland(X: SimplicialComplex, tol: float = GARLAND_TOLERANCE, strict: bool = False,
                   max_order: Optional[int] = None) -> GarlandReport:
    """
    Checks that every nontrivial eigenvalue of ``Delta^up_{k-1}`` lies in :func:`garland_interval`.

    Raises
    ------
    GarlandException
        If the complex is not pure.
    TheoremViolationException
        With ``strict`` set, when an eigenvalue lies outside the interval.
    """
    interval = garland_interval(X)
    spectrum = normalized_up_spectrum(X, max_order=max_order)
    nontrivial = spectrum.nontrivial()
    violations = tuple((spectrum.trivial_count + j, float(value)) for j, value in enumerate(nontrivial)
                       if not interval.contains(value, tol))
    report = GarlandReport(interval, tuple(float(v) for v in nontrivial), violations, tol)
    if violations:
        _violation("%d eigenvalues outside the garland interval [%g, %g]"
                   % (len(violations), interval.lower, interval.upper), strict)
    return report


@dataclass(frozen=True, eq=False)
class DeviationMatrix:
    """``E = D_{k-1} - d I``."""
    d: float
    diagonal: np.ndarray

    def operator(self, X: SimplicialComplex) -> OperatorMatrix:
        return OperatorMatrix(sparse.diags(self.diagonal, format="csr"), OperatorKind.DEVIATION,
                              X.fingerprint, X.k - 1)

    def apply(self, values: np.ndarray) -> np.ndarray:
        return self.diagonal * values


def deviation_matrix(X: SimplicialComplex, d: float) -> DeviationMatrix:
    if X.k < 1:
        raise GarlandException("Deviation matrix needs k >= 1")
    degrees = X.degrees(X.k - 1)
    if float(d).is_integer():
        diagonal = degrees - int(d)
    else:
        diagonal = degrees - float(d)
    return DeviationMatrix(float(d), diagonal)


def h_vector(X: SimplicialComplex, b: RealCochain) -> RealCochain:
    """
    ``h_b(F) = sum_{v not in F} [F+{v} : F] b(F+{v})`` over the ``(k-2)``-faces.

    Raises
    ------
    GarlandException
        Unless the ``(k-1)``-skeleton is complete.
    """
    _check_complete(X)
    b.check_host(X)
    if b.dim != X.k - 1:
        raise GarlandException("h_vector needs a %d-cochain, got dimension %d" % (X.k - 1, b.dim))
    return RealCochain(X.k - 2, coboundary_sparse(X, X.k - 2).T @ b.values)


def reconstruct_from_h(X: SimplicialComplex, h: RealCochain) -> RealCochain:
    """``b(H) = (1/n) sum_{F in H} [H:F] h_b(F)``; exact when ``b`` is a coboundary."""
    _check_complete(X)
    return RealCochain(X.k - 1, (coboundary_sparse(X, X.k - 2) @ h.values) / X.n)


@dataclass(frozen=True)
class ReducingReport:
    """Reconstruction from ``h_b`` and the three bounds on ``||E b||`` over sampled coboundaries."""
    k: int
    d: float
    f_n: float
    samples: int
    worst_reconstruction: float
    worst_ratio: float
    exact_ratio: float
    energy_failures: int
    h_mass_failures: int
    ratio_failures: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return (self.worst_reconstruction <= 1e-10 and self.energy_failures == 0 and self.h_mass_failures == 0
                and self.ratio_failures == 0
                and self.exact_ratio <= self.k * self.f_n + self.tolerance)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "f_n": self.f_n,
            "samples": self.samples,
            "worst_reconstruction": self.worst_reconstruction,
            "worst_ratio": self.worst_ratio,
            "exact_ratio": self.exact_ratio,
            "energy_failures": self.energy_failures,
            "h_mass_failures": self.h_mass_failures,
            "ratio_failures": self.ratio_failures,
            "passed": self.passed,
        }


def verify_reducing_to_links(X: SimplicialComplex, d: float, samples: int, rng: np.random.Generator,
                             tol: float = 1e-9, strict: bool = False) -> ReducingReport:
    """
    Bounds ``||E b||`` on coboundaries by the values ``||E delta e_F|| / ||delta e_F||``.

    With ``f(n)`` the largest of these ratios, every sampled coboundary ``b`` is checked for
    ``||E b|| <= k f(n) ||b||``, for the reconstruction of ``b`` from ``h_b``, and for
    ``<Eb, Eb> <= (k/n^2) sum_F h_b(F)^2 ||E delta e_F||^2`` and
    ``sum_F h_b(F)^2 <= k (n-k+1) <b, b>``. The supremum of ``||E b|| / ||b||`` over all of
    ``B^{k-1}`` is also computed exactly as a spectral norm.
    """
    _check_complete(X)
    n, k = X.n, X.k
    E = deviation_matrix(X, d)
    delta = coboundary_sparse(X, k - 2).tocsc().astype(float)
    column_norms = np.sqrt(np.asarray(abs(delta).sum(axis=0)).ravel())
    deviated = sparse.diags(E.diagonal.astype(float)) @ delta
    deviated_norms = np.sqrt(np.asarray(deviated.multiply(deviated).sum(axis=0)).ravel())
    f_n = float(np.max(deviated_norms / column_norms)) if column_norms.size else 0.0

    frame = coboundary_frame(X)
    exact_ratio = float(np.linalg.norm(E.apply(frame.T).T, 2)) if frame.size else 0.0

    worst_reconstruction = 0.0
    worst_ratio = 0.0
    energy = h_mass = ratio_over = 0
    for _ in range(samples):
        b = random_coboundary(X, k - 1, rng)
        norm = float(np.linalg.norm(b.values))
        if norm == 0:
            continue
        h = h_vector(X, b)
        rebuilt = reconstruct_from_h(X, h)
        worst_reconstruction = max(worst_reconstruction, float(np.linalg.norm(rebuilt.values - b.values)) / norm)

        Eb = E.apply(b.values)
        ratio = float(np.linalg.norm(Eb)) / norm
        worst_ratio = max(worst_ratio, ratio)
        if ratio > k * f_n * (1 + tol) + tol:
            ratio_over += 1
        h_sq = h.values ** 2
        if float(Eb @ Eb) > k / n ** 2 * float(h_sq @ deviated_norms ** 2) * (1 + tol) + tol:
            energy += 1
        if float(h_sq.sum()) > k * (n - k + 1) * norm ** 2 * (1 + tol) + tol:
            h_mass += 1

    report = ReducingReport(k=k, d=float(d), f_n=f_n, samples=samples, worst_reconstruction=worst_reconstruction,
                            worst_ratio=worst_ratio, exact_ratio=exact_ratio, energy_failures=energy,
                            h_mass_failures=h_mass, ratio_failures=ratio_over, tolerance=tol)
    logger.debug("reducing to links: %s", report.to_dict())
    if not report.passed:
        _violation("reducing-to-links bounds fail: %s" % report.to_dict(), strict)
    return report


@dataclass(frozen=True)
class LinkConditions:
    """
    Conditions of one link graph ``B`` with ``u = 1/sqrt(m)``.

    ``f = |<Bu, u> - d|``, ``g`` is the norm of the part of ``Bu`` orthogonal to ``1`` and ``h`` the
    spectral norm of ``B`` compressed to ``1^perp``. ``degree_deviation`` is ``sum_v (deg v - d)^2``,
    which is at most ``(f + g + h)^2 m``.
    """
    face: Face
    vertices: int
    f: float
    g: float
    h: float
    degree_deviation: float

    @property
    def deviation_bound(self) -> float:
        return (self.f + self.g + self.h) ** 2 * self.vertices


@dataclass(frozen=True)
class AdjacencyConditions:
    d: float
    links: Tuple[LinkConditions, ...]

    @property
    def f(self) -> float:
        return max((c.f for c in self.links), default=0.0)

    @property
    def g(self) -> float:
        return max((c.g for c in self.links), default=0.0)

    @property
    def h(self) -> float:
        return max((c.h for c in self.links), default=0.0)

    @property
    def phi(self) -> float:
        return self.f + self.g + self.h

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "f": self.f,
            "g": self.g,
            "h": self.h,
            "links": [{"face": list(c.face), "f": c.f, "g": c.g, "h": c.h,
                       "degree_deviation": c.degree_deviation} for c in self.links],
        }


def mean_degree(X: SimplicialComplex) -> float:
    degrees = X.degrees(X.k - 1)
    return float(degrees.mean()) if degrees.size else 0.0


def adjacency_link_conditions(X: SimplicialComplex, d: float) -> AdjacencyConditions:
    """
    Measures the three link conditions of every ``(k-2)``-face link.

    Raises
    ------
    GarlandException
        Unless the ``(k-1)``-skeleton is complete and every link is nonempty.
    """
    _check_complete(X)
    if d <= 0:
        raise GarlandException("Reference degree must be positive, got %r" % d)
    conditions = []
    for F in X.faces(X.k - 2):
        graph = link(X, F)
        m = graph.n
        if m == 0:
            raise GarlandException("Link of %r is empty" % (F,))
        B = adjacency_matrix(graph).dense().astype(float)
        u = np.full(m, 1.0 / math.sqrt(m))
        Bu = B @ u
        quadratic = float(u @ Bu)
        g = float(np.linalg.norm(Bu - quadratic * u))
        if m > 1:
            Q = linalg.null_space(np.ones((1, m)))
            h = float(np.abs(symmetric_spectrum(Q.T @ B @ Q)).max())
        else:
            h = 0.0
        deviation = float(((graph.degrees(0) - d) ** 2).sum())
        conditions.append(LinkConditions(F, m, abs(quadratic - d), g, h, deviation))
    return AdjacencyConditions(float(d), tuple(conditions))


@dataclass(frozen=True)
class AdjacencyReport:
    """
    Placement of the ``A_{k-1}`` spectrum against the intervals derived from the link conditions.

    ``coboundary_drift`` is the exact supremum of ``|<Ab, b> - d|`` over unit ``b`` in ``B^{k-1}``,
    ``cross_term`` that of ``|<Ab, z>|`` with unit ``z`` orthogonal to ``B^{k-1}``, and ``cocycle_drift``
    that of ``|<Az, z>|``. The first two are bounded by ``k phi``, the last by ``k h``.
    """
    k: int
    conditions: AdjacencyConditions
    top: Tuple[float, ...]
    rest: Tuple[float, ...]
    top_interval: Tuple[float, float]
    rest_interval: Tuple[float, float]
    coboundary_drift: float
    cross_term: float
    cocycle_drift: float
    tolerance: float

    @property
    def top_inside(self) -> bool:
        low, high = self.top_interval
        return all(low - self.tolerance <= v <= high + self.tolerance for v in self.top)

    @property
    def rest_inside(self) -> bool:
        low, high = self.rest_interval
        return all(low - self.tolerance <= v <= high + self.tolerance for v in self.rest)

    @property
    def bounds_hold(self) -> bool:
        bound = self.k * self.conditions.phi + self.tolerance
        return (self.coboundary_drift <= bound and self.cross_term <= bound
                and self.cocycle_drift <= self.k * self.conditions.h + self.tolerance)

    @property
    def link_degrees_hold(self) -> bool:
        return all(c.degree_deviation <= c.deviation_bound * (1 + self.tolerance) + self.tolerance
                   for c in self.conditions.links)

    @property
    def passed(self) -> bool:
        return self.top_inside and self.rest_inside and self.bounds_hold and self.link_degrees_hold

    def to_dict(self) -> dict:
        data = self.conditions.to_dict()
        data.update({
            "phi": self.conditions.phi,
            "top_interval": list(self.top_interval),
            "rest_interval": list(self.rest_interval),
            "top_range": [min(self.top, default=math.nan), max(self.top, default=math.nan)],
            "rest_range": [min(self.rest, default=math.nan), max(self.rest, default=math.nan)],
            "coboundary_drift": self.coboundary_drift,
            "cross_term": self.cross_term,
            "cocycle_drift": self.cocycle_drift,
            "passed": self.passed,
        })
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def verify_adjacency_intervals(X: SimplicialComplex, d: Optional[float] = None, tol: float = GARLAND_TOLERANCE,
                               strict: bool = False, max_order: Optional[int] = None) -> AdjacencyReport:
    """
    Checks where the eigenvalues of ``A_{k-1}`` fall given the measured link conditions.

    The largest ``C(n-1, k-1)`` eigenvalues must lie in ``[d - k phi, d + 2k phi + k h]`` and the others
    in ``[min(d - k phi, 0) - k phi - k h, k h]``. The lower end follows from writing a unit vector as
    ``b + z`` with ``b`` in ``B^{k-1}`` and ``z`` orthogonal to it: the quadratic form is at least
    ``(d - k phi)|b|^2 - 2k phi |b||z| - k h |z|^2``. The first term is dropped only when ``d >= k phi``,
    which gives ``-k(phi + h)``; for smaller ``d`` it can be negative and stays in the bound.
    ``d`` defaults to the mean ``(k-1)``-face degree.

    Raises
    ------
    TheoremViolationException
        With ``strict`` set, when any bound fails.
    """
    _check_complete(X)
    d = mean_degree(X) if d is None else float(d)
    k = X.k
    conditions = adjacency_link_conditions(X, d)
    phi, h = conditions.phi, conditions.h

    A = adjacency_matrix(X)
    eigenvalues = symmetric_spectrum(A, max_order)
    trivial = binomial(X.n - 1, k - 1)
    top = eigenvalues[len(eigenvalues) - trivial:]
    rest = eigenvalues[:len(eigenvalues) - trivial]

    dense = A.dense().astype(float)
    frame = coboundary_frame(X)
    complement = coboundary_complement(X)
    on_b = symmetric_spectrum(frame.T @ dense @ frame) if frame.shape[1] else np.zeros(0)
    on_z = symmetric_spectrum(complement.T @ dense @ complement) if complement.shape[1] else np.zeros(0)
    coboundary_drift = float(np.abs(on_b - d).max(initial=0.0))
    cross_term = (float(np.linalg.norm(frame.T @ dense @ complement, 2))
                    if frame.shape[1] and complement.shape[1] else 0.0)
    cocycle_drift = float(np.abs(on_z).max(initial=0.0))

    report = AdjacencyReport(
        k=k, conditions=conditions,
        top=tuple(float(v) for v in top), rest=tuple(float(v) for v in rest),
        top_interval=(d - k * phi, d + 2 * k * phi + k * h),
        rest_interval=(min(d - k * phi, 0.0) - k * phi - k * h, k * h),
        coboundary_drift=coboundary_drift, cross_term=cross_term, cocycle_drift=cocycle_drift, tolerance=tol)
    logger.debug("adjacency intervals: top %s rest %s", report.top_interval, report.rest_interval)
    if not report.passed:
        _violation("adjacency intervals fail: %s" % report.to_dict(), strict)
    return report

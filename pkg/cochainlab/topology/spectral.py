import json
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg as linalg
from scipy import sparse

from cochainlab.topology.cochains import (WeightFunction, WeightKind, coboundary_sparse, inverse_weights,
                                          weighted_adjoint_sparse)
from cochainlab.topology.complex import SimplicialComplex, is_pure
from cochainlab.topology.operators import OperatorKind, OperatorMatrix
from cochainlab.utils import binomial

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-12
TRIVIAL_TOLERANCE = 1e-6
SPLIT_FACTOR = 10.0
COMPLEMENT_RCOND = 1e-10


class SpectralException(Exception):
    pass


class NotSymmetricException(SpectralException):
    pass


def _check_top(X: SimplicialComplex):
    if X.k < 1:
        raise SpectralException("Need a complex of dimension k >= 1, got k=%d" % X.k)


def up_laplacian_sparse(X: SimplicialComplex, i: int) -> sparse.csr_matrix:
    delta = coboundary_sparse(X, i)
    return (delta.T @ delta).tocsr()


def degree_matrix(X: SimplicialComplex) -> OperatorMatrix:
    """``D_{k-1}``: diagonal of the ``(k-1)``-face degrees."""
    _check_top(X)
    entries = sparse.diags(X.degrees(X.k - 1), format="csr", dtype=np.int64)
    return OperatorMatrix(entries, OperatorKind.DEGREE, X.fingerprint, X.k - 1)


def adjacency_matrix(X: SimplicialComplex) -> OperatorMatrix:
    """
    The signed adjacency matrix ``A_{k-1}`` of the ``(k-1)``-faces.

    Two ``(k-1)``-faces ``F != G`` are adjacent when their union is a ``k``-face ``H``; the entry
    is then ``-[H:F][H:G]``. Built as ``D_{k-1} - delta^T delta`` in integers.
    """
    _check_top(X)
    laplacian = up_laplacian_sparse(X, X.k - 1)
    degrees = sparse.diags(X.degrees(X.k - 1), format="csr", dtype=np.int64)
    entries = (degrees - laplacian).tocsr()
    entries.eliminate_zeros()
    return OperatorMatrix(entries, OperatorKind.ADJACENCY, X.fingerprint, X.k - 1)


def up_laplacian(X: SimplicialComplex, i: int, w: Optional[WeightFunction] = None,
                 allow_zero: bool = False) -> OperatorMatrix:
    """
    ``L^up_i = delta_i^* delta_i``.

    With ``w`` omitted or unit weights this is the integer matrix ``delta_i^T delta_i``, which for
    ``i = k - 1`` equals ``D - A``.
    """
    if not -1 <= i <= X.k:
        raise SpectralException("up_laplacian needs -1 <= i <= %d, got %d" % (X.k, i))
    if w is None or w.kind == WeightKind.UNIT:
        entries = up_laplacian_sparse(X, i)
    else:
        entries = (weighted_adjoint_sparse(X, i, w, allow_zero) @ coboundary_sparse(X, i)).tocsr()
    return OperatorMatrix(entries, OperatorKind.UP_LAPLACIAN, X.fingerprint, i)


def down_laplacian(X: SimplicialComplex, i: int, w: Optional[WeightFunction] = None,
                   allow_zero: bool = False) -> OperatorMatrix:
    """
    ``L^down_i = delta_{i-1} delta_{i-1}^*``.

    The empty face is part of every complex, so ``L^down_0`` with unit weights is the all-ones matrix.
    """
    if not 0 <= i <= X.k:
        raise SpectralException("down_laplacian needs 0 <= i <= %d, got %d" % (X.k, i))
    delta = coboundary_sparse(X, i - 1)
    if w is None or w.kind == WeightKind.UNIT:
        entries = (delta @ delta.T).tocsr()
    else:
        entries = (delta @ weighted_adjoint_sparse(X, i - 1, w, allow_zero)).tocsr()
    return OperatorMatrix(entries, OperatorKind.DOWN_LAPLACIAN, X.fingerprint, i)


def normalized_up_matrix(X: SimplicialComplex, allow_non_pure: bool = False) -> OperatorMatrix:
    """
    Symmetric conjugate ``D^{-1/2} L^up_{k-1} D^{-1/2}`` of ``Delta^up_{k-1} = D^{-1} L^up_{k-1}``.

    Faces of degree 0 get zero rows and columns; that convention is refused unless
    ``allow_non_pure`` is set.
    """
    _check_top(X)
    if not allow_non_pure and not is_pure(X):
        logger.error("normalized Laplacian requested for a non-pure complex")
        raise SpectralException("Complex is not pure; pass allow_non_pure to zero degree-0 rows")
    degrees = X.degrees(X.k - 1).astype(float)
    scale = np.zeros_like(degrees)
    scale[degrees > 0] = 1.0 / np.sqrt(degrees[degrees > 0])
    conj = sparse.diags(scale) @ up_laplacian_sparse(X, X.k - 1).astype(float) @ sparse.diags(scale)
    return OperatorMatrix(conj.tocsr(), OperatorKind.NORMALIZED_UP, X.fingerprint, X.k - 1)


def _as_dense(M) -> np.ndarray:
    if isinstance(M, OperatorMatrix):
        return M.dense().astype(float)
    if sparse.issparse(M):
        return M.toarray().astype(float)
    return np.asarray(M, dtype=float)


def symmetric_spectrum(M, max_order: Optional[int] = None) -> np.ndarray:
    """
    All eigenvalues of a real symmetric matrix, ascending.

    Parameters
    ----------
    M : OperatorMatrix, scipy sparse matrix or array
        Must be symmetric up to ``1e-12`` relative to its largest entry.
    max_order : int, optional
        Refuse matrices of larger order.

    Raises
    ------
    NotSymmetricException
        If ``M`` is not symmetric.
    SpectralException
        If the order exceeds ``max_order``.
    """
    dense = _as_dense(M)
    if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
        raise NotSymmetricException("Matrix of shape %s is not square" % (dense.shape,))
    if max_order is not None and dense.shape[0] > max_order:
        raise SpectralException("Matrix order %d exceeds the cap %d" % (dense.shape[0], max_order))
    if dense.shape[0] == 0:
        return np.zeros(0)
    scale = np.abs(dense).max()
    asymmetry = np.abs(dense - dense.T).max()
    if scale and asymmetry / scale > SYMMETRY_TOLERANCE:
        logger.error("asymmetric matrix (relative asymmetry %g)", asymmetry / scale)
        raise NotSymmetricException("Matrix is not symmetric (relative asymmetry %g)" % (asymmetry / scale))
    return linalg.eigh(dense, eigvals_only=True, check_finite=False)


def multiplicities(eigenvalues, tol: float = 1e-9) -> List[Tuple[float, int]]:
    """Groups sorted eigenvalues that lie within ``tol`` of the first member of their group."""
    groups: List[Tuple[float, int]] = []
    for value in eigenvalues:
        if groups and abs(value - groups[-1][0]) <= tol * max(1.0, abs(groups[-1][0])):
            groups[-1] = (groups[-1][0], groups[-1][1] + 1)
        else:
            groups.append((float(value), 1))
    return groups


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    """
    Sorted eigenvalues with a trivial / nontrivial split.

    For Laplacians the trivial eigenvalues are the ``trivial_count`` smallest (the zeros coming from
    coboundaries). For the adjacency matrix they are the ``trivial_count`` largest (the cluster
    near the degree), flagged by ``trivial_at_top``.
    """
    eigenvalues: np.ndarray
    kind: OperatorKind
    trivial_count: int
    trivial_tolerance: float = TRIVIAL_TOLERANCE
    trivial_at_top: bool = False
    degenerate: bool = False
    zero_degree_faces: int = 0

    @property
    def order(self) -> int:
        return int(self.eigenvalues.shape[0])

    def trivial(self) -> np.ndarray:
        if self.trivial_at_top:
            return self.eigenvalues[self.order - self.trivial_count:]
        return self.eigenvalues[:self.trivial_count]

    def nontrivial(self) -> np.ndarray:
        if self.trivial_at_top:
            return self.eigenvalues[:self.order - self.trivial_count]
        return self.eigenvalues[self.trivial_count:]

    @property
    def nontrivial_range(self) -> Tuple[float, float]:
        values = self.nontrivial()
        if values.size == 0:
            return (math.nan, math.nan)
        return (float(values.min()), float(values.max()))

    def multiplicities(self, tol: float = 1e-9) -> List[Tuple[float, int]]:
        return multiplicities(self.eigenvalues, tol)

    def is_trivial(self, index: int) -> bool:
        if self.trivial_at_top:
            return index >= self.order - self.trivial_count
        return index < self.trivial_count

    def rows(self, trial: int) -> List[tuple]:
        """CSV rows ``(trial, kind, index, value, is_trivial)``."""
        return [(trial, self.kind.value, index, repr(float(value)), int(self.is_trivial(index)))
                for index, value in enumerate(self.eigenvalues)]

    def to_dict(self) -> dict:
        low, high = self.nontrivial_range
        return {
            "kind": self.kind.value,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "trivial_count": self.trivial_count,
            "trivial_tolerance": self.trivial_tolerance,
            "trivial_at_top": self.trivial_at_top,
            "nontrivial_range": [low, high],
            "degenerate": self.degenerate,
            "zero_degree_faces": self.zero_degree_faces,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def real_rank(matrix) -> int:
    dense = _as_dense(matrix)
    if dense.size == 0:
        return 0
    return int(np.linalg.matrix_rank(dense))


def coboundary_space_dim(X: SimplicialComplex, i: int) -> int:
    """``dim B^i`` over the reals: ``C(n-1, i)`` on a complete ``i``-skeleton, a rank otherwise."""
    if i < 0:
        return 0
    if X.has_complete_skeleton(i):
        return binomial(X.n - 1, i)
    return real_rank(coboundary_sparse(X, i - 1))


def _degenerate_split(eigenvalues: np.ndarray, count: int, tol: float) -> bool:
    if count > 0 and abs(eigenvalues[count - 1]) >= tol:
        return True
    if count < eigenvalues.shape[0] and eigenvalues[count] < SPLIT_FACTOR * tol:
        return True
    return False


def laplacian_report(eigenvalues: np.ndarray, kind: OperatorKind, trivial_count: int,
                     tol: float = TRIVIAL_TOLERANCE, zero_degree_faces: int = 0) -> SpectrumReport:
    degenerate = _degenerate_split(eigenvalues, trivial_count, tol)
    if degenerate:
        logger.warning("degenerate trivial split for %s: %d trivial of %d", kind.value, trivial_count,
                       eigenvalues.shape[0])
    return SpectrumReport(eigenvalues, kind, trivial_count, tol, degenerate=degenerate,
                          zero_degree_faces=zero_degree_faces)


def normalized_up_spectrum(X: SimplicialComplex, allow_non_pure: bool = False,
                           max_order: Optional[int] = None) -> SpectrumReport:
    """
    Spectrum of ``Delta^up_{k-1}``, computed on its symmetric conjugate.

    The ``dim B^{k-1}`` smallest eigenvalues are trivial. A report is flagged ``degenerate`` when the
    last trivial eigenvalue is not below ``1e-6`` or the first nontrivial one is not ten times that.
    """
    matrix = normalized_up_matrix(X, allow_non_pure)
    eigenvalues = symmetric_spectrum(matrix, max_order)
    zero_degree = int(np.count_nonzero(X.degrees(X.k - 1) == 0))
    return laplacian_report(eigenvalues, OperatorKind.NORMALIZED_UP, coboundary_space_dim(X, X.k - 1),
                            zero_degree_faces=zero_degree)


def up_laplacian_spectrum(X: SimplicialComplex, max_order: Optional[int] = None) -> SpectrumReport:
    _check_top(X)
    eigenvalues = symmetric_spectrum(up_laplacian(X, X.k - 1), max_order)
    return laplacian_report(eigenvalues, OperatorKind.UP_LAPLACIAN, coboundary_space_dim(X, X.k - 1))


def adjacency_spectrum(X: SimplicialComplex, max_order: Optional[int] = None) -> SpectrumReport:
    """Spectrum of ``A_{k-1}`` with the top ``dim B^{k-1}`` eigenvalues marked trivial."""
    eigenvalues = symmetric_spectrum(adjacency_matrix(X), max_order)
    return SpectrumReport(eigenvalues, OperatorKind.ADJACENCY, coboundary_space_dim(X, X.k - 1),
                          trivial_at_top=True)


def regular_degree(X: SimplicialComplex) -> Optional[int]:
    """The common degree of all ``(k-1)``-faces, or ``None``."""
    degrees = X.degrees(X.k - 1)
    if degrees.size == 0 or np.any(degrees != degrees[0]):
        return None
    return int(degrees[0])


def regular_identity_holds(X: SimplicialComplex) -> bool:
    """
    For a ``d``-regular complex: ``L^up = dI - A`` in integers and ``d Delta^up = L^up``.

    Raises
    ------
    SpectralException
        If the ``(k-1)``-degrees differ.
    """
    d = regular_degree(X)
    if d is None:
        raise SpectralException("Complex is not regular")
    laplacian = up_laplacian(X, X.k - 1).entries
    shifted = d * sparse.identity(laplacian.shape[0], dtype=np.int64, format="csr") - adjacency_matrix(X).entries
    integer_ok = (laplacian - shifted).count_nonzero() == 0
    if d == 0:
        return integer_ok
    normalized = normalized_up_matrix(X).dense()
    return integer_ok and np.allclose(d * normalized, laplacian.toarray(), rtol=0.0, atol=1e-12 * d)


def orthogonal_complement(spanning) -> np.ndarray:
    """
    Orthonormal basis (as columns) of the orthogonal complement of the column span of ``spanning``.

    Rank is decided by singular values relative to the largest one, cut at ``1e-10``.
    """
    dense = _as_dense(spanning)
    if dense.shape[1] == 0:
        return np.eye(dense.shape[0])
    return linalg.null_space(dense.T, rcond=COMPLEMENT_RCOND)


def coboundary_frame(X: SimplicialComplex) -> np.ndarray:
    """Orthonormal columns spanning ``B^{k-1}`` in the unit inner product."""
    _check_top(X)
    dense = coboundary_sparse(X, X.k - 2).toarray().astype(float)
    if dense.size == 0:
        return np.zeros((X.face_count(X.k - 1), 0))
    return linalg.orth(dense, rcond=COMPLEMENT_RCOND)


def coboundary_complement(X: SimplicialComplex, weights: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Columns spanning ``{f : <f, b>_w = 0 for all b in B^{k-1}}``.

    The constraints are the rows ``<., delta e_F>_w`` for the ``(k-2)``-faces ``F``; ``weights``
    defaults to unit weights. Columns are orthonormal in the unit inner product.
    """
    _check_top(X)
    delta = coboundary_sparse(X, X.k - 2).toarray().astype(float)
    if weights is not None:
        delta = np.asarray(weights, dtype=float)[:, None] * delta
    return orthogonal_complement(delta)


@dataclass(frozen=True)
class HodgeReport:
    """Dimension count and orthogonality of ``C^i = H_i + B^i + im delta_i^*``."""
    dim: int
    cochain_dim: int
    coboundary_rank: int
    adjoint_rank: int
    harmonic_dim: int
    max_cross_product: float
    tolerance: float

    @property
    def expected_harmonic_dim(self) -> int:
        return self.cochain_dim - self.coboundary_rank - self.adjoint_rank

    @property
    def dimensions_match(self) -> bool:
        return self.harmonic_dim == self.expected_harmonic_dim

    @property
    def orthogonal(self) -> bool:
        return self.max_cross_product <= self.tolerance

    @property
    def passed(self) -> bool:
        return self.dimensions_match and self.orthogonal

    @property
    def betti(self) -> int:
        return self.harmonic_dim

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "cochain_dim": self.cochain_dim,
            "coboundary_rank": self.coboundary_rank,
            "adjoint_rank": self.adjoint_rank,
            "harmonic_dim": self.harmonic_dim,
            "expected_harmonic_dim": self.expected_harmonic_dim,
            "max_cross_product": self.max_cross_product,
            "passed": self.passed,
        }


def _scaled_coboundary(X: SimplicialComplex, i: int, w: WeightFunction) -> np.ndarray:
    """``W_{i+1}^{1/2} delta_i W_i^{-1/2}`` as a dense matrix."""
    delta = coboundary_sparse(X, i).toarray().astype(float)
    if i >= X.k:
        return delta
    left = np.sqrt(w.on(i + 1))
    right = np.sqrt(inverse_weights(w, i))
    return left[:, None] * delta * right[None, :]


def _cross_product(x: np.ndarray, y: np.ndarray, weights: np.ndarray, limit: int) -> float:
    if x.shape[1] == 0 or y.shape[1] == 0:
        return 0.0
    x = x[:, :limit]
    y = y[:, :limit]
    gram = x.T @ (weights[:, None] * y)
    norms_x = np.sqrt(np.einsum("ij,i,ij->j", x, weights, x))
    norms_y = np.sqrt(np.einsum("ij,i,ij->j", y, weights, y))
    scale = np.outer(norms_x, norms_y)
    scale[scale == 0] = 1.0
    return float(np.abs(gram / scale).max())


def hodge_check(X: SimplicialComplex, i: int, w: Optional[WeightFunction] = None, tol: float = 1e-9,
                limit: int = 25) -> HodgeReport:
    """
    Checks the weighted Hodge decomposition of ``C^i``.

    ``dim ker L_i`` (with ``L_i = L^up_i + L^down_i``) is compared with
    ``|X_i| - rank delta_{i-1} - rank delta_i^*``, and up to ``limit`` basis vectors of each of the
    three summands are checked for pairwise ``w``-orthogonality.

    Raises
    ------
    SpectralException
        If ``i`` is out of range or a weight in dimensions ``i-1..i+1`` is zero.
    """
    if not -1 <= i <= X.k:
        raise SpectralException("hodge_check needs -1 <= i <= %d, got %d" % (X.k, i))
    w = w if w is not None else WeightFunction.unit(X)
    for dim in range(max(i - 1, -1), min(i + 1, X.k) + 1):
        if np.any(w.on(dim) <= 0):
            raise SpectralException("Hodge decomposition needs positive weights (dimension %d)" % dim)

    weights = w.on(i)
    up = _scaled_coboundary(X, i, w)
    down = _scaled_coboundary(X, i - 1, w) if i >= 0 else np.zeros((X.face_count(i), 0))
    conj = up.T @ up + down @ down.T

    harmonic = linalg.null_space(conj, rcond=COMPLEMENT_RCOND) if conj.size else np.zeros((0, 0))
    back = 1.0 / np.sqrt(weights)
    harmonic = back[:, None] * harmonic

    coboundaries = coboundary_sparse(X, i - 1).toarray().astype(float) if i >= 0 else np.zeros((X.face_count(i), 0))
    adjoint_image = (weighted_adjoint_sparse(X, i, w).toarray() if i < X.k
                     else np.zeros((X.face_count(i), 0)))

    coboundary_rank = real_rank(coboundaries)
    adjoint_rank = real_rank(adjoint_image)
    worst = max(_cross_product(harmonic, coboundaries, weights, limit),
                _cross_product(harmonic, adjoint_image, weights, limit),
                _cross_product(coboundaries, adjoint_image, weights, limit))
    report = HodgeReport(dim=i, cochain_dim=X.face_count(i), coboundary_rank=coboundary_rank,
                         adjoint_rank=adjoint_rank, harmonic_dim=int(harmonic.shape[1]),
                         max_cross_product=worst, tolerance=tol)
    logger.debug("hodge check dim %d: %s", i, report.to_dict())
    return report


@dataclass(frozen=True)
class VariationalReport:
    """
    First nontrivial eigenvalue of ``Delta^up_{k-1}`` against ``min ||delta f||^2 / ||f||^2`` over ``f``
    orthogonal to ``B``.
    """
    eigenvalue: float
    variational_minimum: float
    rayleigh_quotient: float
    orthogonality_defect: float
    tolerance: float

    @property
    def passed(self) -> bool:
        scale = max(1.0, abs(self.eigenvalue))
        return (abs(self.eigenvalue - self.variational_minimum) <= self.tolerance * scale
                and abs(self.rayleigh_quotient - self.variational_minimum) <= self.tolerance * scale
                and self.orthogonality_defect <= self.tolerance)


def variational_check(X: SimplicialComplex, tol: float = 1e-8) -> VariationalReport:
    """
    Minimizes the Rayleigh quotient over the ``deg``-orthogonal complement of ``B^{k-1}``.

    The minimizer is mapped back to cochain coordinates, where its orthogonality to ``B^{k-1}`` and
    its quotient ``||delta f||^2 / <f, f>_deg`` are recomputed from ``delta`` directly.

    Raises
    ------
    SpectralException
        If the complex is not pure.
    """
    report = normalized_up_spectrum(X)
    if not report.nontrivial().size:
        raise SpectralException("Complex has no nontrivial eigenvalues")
    degrees = X.degrees(X.k - 1).astype(float)
    root = np.sqrt(degrees)

    frame = coboundary_complement(X, weights=root)
    conj = normalized_up_matrix(X).dense()
    values, vectors = linalg.eigh(frame.T @ conj @ frame)
    f = (frame @ vectors[:, 0]) / root

    delta_below = coboundary_sparse(X, X.k - 2)
    delta = coboundary_sparse(X, X.k - 1)
    norm = math.sqrt(float(np.dot(degrees * f, f)))
    column_norms = np.sqrt(abs(delta_below).T @ degrees)
    defect = np.abs(delta_below.T @ (degrees * f)) / (norm * np.maximum(column_norms, 1e-300))
    image = delta @ f
    quotient = float(np.dot(image, image)) / (norm * norm)
    return VariationalReport(eigenvalue=float(report.nontrivial()[0]), variational_minimum=float(values[0]),
                             rayleigh_quotient=quotient, orthogonality_defect=float(defect.max(initial=0.0)),
                             tolerance=tol)


@dataclass(frozen=True)
class DegreeDeviationReport:
    """Largest ``|1 - lambda|`` over nontrivial eigenvalues next to ``sqrt(k/d_max * (n-d_max)/(n-k))``."""
    measured: float
    bound: float
    d_max: int

    @property
    def holds(self) -> bool:
        return self.measured >= self.bound - 1e-9


def degree_deviation_bound(X: SimplicialComplex, report: Optional[SpectrumReport] = None) -> DegreeDeviationReport:
    report = report if report is not None else normalized_up_spectrum(X)
    d_max = int(X.degrees(X.k - 1).max())
    values = report.nontrivial()
    measured = float(np.abs(1.0 - values).max()) if values.size else math.nan
    if d_max == 0 or X.n == X.k:
        bound = math.nan
    else:
        bound = math.sqrt(X.k / d_max * max(X.n - d_max, 0) / (X.n - X.k))
    return DegreeDeviationReport(measured=measured, bound=bound, d_max=d_max)

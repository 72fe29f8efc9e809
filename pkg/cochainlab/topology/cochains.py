import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Sequence

import numpy as np
from scipy import sparse

from cochainlab.topology import gf2
from cochainlab.topology.complex import Face, SimplicialComplex, facets
from cochainlab.topology.operators import OperatorKind, OperatorMatrix
from cochainlab.utils import binomial

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 2 ** 24


class CochainException(Exception):
    pass


class BudgetExceededException(Exception):
    pass


@dataclass(frozen=True, eq=False)
class RealCochain:
    """Real coefficients on the ``dim``-faces of a complex, indexed like ``X.faces(dim)``."""
    dim: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float).ravel())

    @classmethod
    def zeros(cls, X: SimplicialComplex, dim: int) -> "RealCochain":
        return cls(dim, np.zeros(X.face_count(dim)))

    @classmethod
    def ones(cls, X: SimplicialComplex, dim: int) -> "RealCochain":
        return cls(dim, np.ones(X.face_count(dim)))

    @classmethod
    def elementary(cls, X: SimplicialComplex, face: Face) -> "RealCochain":
        dim = len(face) - 1
        values = np.zeros(X.face_count(dim))
        values[X.index(face)] = 1.0
        return cls(dim, values)

    def check_host(self, X: SimplicialComplex):
        if self.values.shape[0] != X.face_count(self.dim):
            raise CochainException("Cochain of length %d does not match the %d faces of dimension %d"
                                   % (self.values.shape[0], X.face_count(self.dim), self.dim))

    def to_json(self) -> str:
        return json.dumps({"dim": self.dim, "values": [float(v) for v in self.values]})

    @classmethod
    def from_json(cls, text: str) -> "RealCochain":
        data = json.loads(text)
        return cls(int(data["dim"]), np.array(data["values"], dtype=float))


@dataclass(frozen=True)
class Z2Cochain:
    """A GF(2) cochain stored as a 0/1 vector over the ``dim``-faces."""
    dim: int
    bits: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "bits", gf2.to_gf2(np.asarray(self.bits).ravel()))

    @classmethod
    def zeros(cls, X: SimplicialComplex, dim: int) -> "Z2Cochain":
        return cls(dim, np.zeros(X.face_count(dim), dtype=np.uint8))

    @classmethod
    def from_support(cls, X: SimplicialComplex, dim: int, support) -> "Z2Cochain":
        bits = np.zeros(X.face_count(dim), dtype=np.uint8)
        for row in support:
            if not 0 <= row < bits.shape[0]:
                raise CochainException("Support index %r out of range for dimension %d" % (row, dim))
            bits[row] = 1
        return cls(dim, bits)

    @classmethod
    def indicator(cls, X: SimplicialComplex, faces: Sequence[Face]) -> "Z2Cochain":
        faces = list(faces)
        if not faces:
            raise CochainException("indicator needs at least one face to infer the dimension")
        dim = len(faces[0]) - 1
        return cls.from_support(X, dim, [X.index(face) for face in faces])

    @property
    def support(self) -> tuple:
        return tuple(int(j) for j in np.flatnonzero(self.bits))

    @property
    def weight(self) -> int:
        return int(self.bits.sum())

    @property
    def word(self) -> int:
        return gf2.pack_bits(self.bits)

    def __add__(self, other: "Z2Cochain") -> "Z2Cochain":
        if self.dim != other.dim or self.bits.shape != other.bits.shape:
            raise CochainException("Cannot add cochains of different dimension or length")
        return Z2Cochain(self.dim, self.bits ^ other.bits)

    def __eq__(self, other):
        if not isinstance(other, Z2Cochain):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.dim, self.word))

    def check_host(self, X: SimplicialComplex):
        if self.bits.shape[0] != X.face_count(self.dim):
            raise CochainException("Cochain of length %d does not match the %d faces of dimension %d"
                                   % (self.bits.shape[0], X.face_count(self.dim), self.dim))

    def to_json(self) -> str:
        return json.dumps({"dim": self.dim, "support": list(self.support)})

    @classmethod
    def from_json(cls, text: str, X: SimplicialComplex) -> "Z2Cochain":
        data = json.loads(text)
        return cls.from_support(X, int(data["dim"]), data["support"])


class WeightKind(Enum):
    UNIT = "unit"
    DEGREE = "degree"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class WeightFunction:
    """
    Nonnegative weights per dimension.

    ``degree`` weights are ``w(F) = deg(F)``, the number of top faces containing ``F``; top faces
    get weight 1, so on ``(k-1)``-faces they are the degrees used by the normalized Laplacian.
    """
    kind: WeightKind
    weights: Dict[int, np.ndarray] = field(default_factory=dict)

    @classmethod
    def unit(cls, X: SimplicialComplex) -> "WeightFunction":
        return cls(WeightKind.UNIT, {dim: np.ones(X.face_count(dim)) for dim in range(-1, X.k + 1)})

    @classmethod
    def degree(cls, X: SimplicialComplex) -> "WeightFunction":
        return cls(WeightKind.DEGREE, {dim: X.degrees(dim).astype(float) for dim in range(-1, X.k + 1)})

    @classmethod
    def custom(cls, weights: Dict[int, Sequence[float]]) -> "WeightFunction":
        checked = {}
        for dim, values in weights.items():
            values = np.asarray(values, dtype=float)
            if np.any(values < 0):
                raise CochainException("Weights must be nonnegative (dimension %d)" % dim)
            checked[dim] = values
        return cls(WeightKind.CUSTOM, checked)

    def on(self, dim: int) -> np.ndarray:
        try:
            return self.weights[dim]
        except KeyError:
            raise CochainException("No %s weights for dimension %d" % (self.kind.value, dim))


def coboundary_sparse(X: SimplicialComplex, i: int) -> sparse.csr_matrix:
    """
    Integer matrix of ``delta_i``, shape ``|X_{i+1}| x |X_i|``.

    For ``i = k`` the matrix has no rows.
    """
    rows, cols, values = [], [], []
    index = X.faces(i)
    if i < X.k:
        for row, face in enumerate(X.faces(i + 1)):
            for j, facet in facets(face):
                rows.append(row)
                cols.append(X.index(facet))
                values.append(-1 if j % 2 else 1)
    shape = (X.face_count(i + 1) if i < X.k else 0, len(index))
    return sparse.csr_matrix((np.array(values, dtype=np.int64), (rows, cols)), shape=shape, dtype=np.int64)


def coboundary_matrix(X: SimplicialComplex, i: int) -> OperatorMatrix:
    """
    The coboundary ``delta_i`` with entries ``[F:G]``.

    Raises
    ------
    CochainException
        Unless ``-1 <= i < k``.
    """
    if not -1 <= i < X.k:
        raise CochainException("coboundary_matrix needs -1 <= i < %d, got %d" % (X.k, i))
    return OperatorMatrix(coboundary_sparse(X, i), OperatorKind.COBOUNDARY, X.fingerprint, i)


def inverse_weights(w: WeightFunction, dim: int, allow_zero: bool = False) -> np.ndarray:
    """
    Elementwise ``1 / w`` on ``dim``-faces.

    Zero weights map to zero under degree weights (a degree-0 face gets a zero row), or when
    ``allow_zero`` is set; otherwise they are refused.
    """
    values = w.on(dim)
    zero = values == 0
    if np.any(zero) and not (allow_zero or w.kind == WeightKind.DEGREE):
        raise CochainException("%d faces of dimension %d have weight 0" % (int(zero.sum()), dim))
    if np.any(zero):
        logger.debug("zeroing %d rows with weight 0 in dimension %d", int(zero.sum()), dim)
    inverse = np.zeros_like(values)
    inverse[~zero] = 1.0 / values[~zero]
    return inverse


def weighted_adjoint_sparse(X: SimplicialComplex, i: int, w: WeightFunction,
                            allow_zero: bool = False) -> sparse.csr_matrix:
    delta = coboundary_sparse(X, i).astype(float)
    return (sparse.diags(inverse_weights(w, i, allow_zero)) @ delta.T @ sparse.diags(w.on(i + 1))).tocsr()


def weighted_adjoint_matrix(X: SimplicialComplex, i: int, w: WeightFunction,
                            allow_zero: bool = False) -> OperatorMatrix:
    """
    The adjoint ``delta_i^*`` of ``delta_i`` for the ``w``-weighted inner products.

    ``(delta_i^* f)(G) = sum_F w(F)/w(G) [F:G] f(F)``. With unit weights this is the transpose
    of :func:`coboundary_matrix`, kept in integer form.
    """
    if not -1 <= i < X.k:
        raise CochainException("weighted_adjoint_matrix needs -1 <= i < %d, got %d" % (X.k, i))
    if w.kind == WeightKind.UNIT:
        entries = coboundary_sparse(X, i).T.tocsr()
    else:
        entries = weighted_adjoint_sparse(X, i, w, allow_zero)
    return OperatorMatrix(entries, OperatorKind.ADJOINT, X.fingerprint, i + 1)


def weighted_inner_product(f: RealCochain, g: RealCochain, w: WeightFunction) -> float:
    """``sum_F w(F) f(F) g(F)``."""
    if f.dim != g.dim or f.values.shape != g.values.shape:
        raise CochainException("Inner product of cochains with dimensions %d and %d" % (f.dim, g.dim))
    return float(np.dot(w.on(f.dim) * f.values, g.values))


def apply_coboundary(X: SimplicialComplex, f: RealCochain) -> RealCochain:
    f.check_host(X)
    return RealCochain(f.dim + 1, coboundary_sparse(X, f.dim) @ f.values)


def z2_coboundary(X: SimplicialComplex, f: Z2Cochain) -> Z2Cochain:
    """``(delta f)(F) = sum_{G in F} f(G) mod 2``."""
    f.check_host(X)
    if f.dim >= X.k:
        raise CochainException("No coboundary above the top dimension %d" % X.k)
    delta = abs(coboundary_sparse(X, f.dim))
    return Z2Cochain(f.dim + 1, (delta @ f.bits.astype(np.int64)) % 2)


def coboundary_basis(X: SimplicialComplex, i: int) -> List[Z2Cochain]:
    """
    The basis ``{delta e_F : 0 not in F}`` of ``B^i`` for a complex with complete ``i``-skeleton.

    Returns ``C(n-1, i)`` cochains; the same vectors are a real basis.

    Raises
    ------
    CochainException
        If the ``i``-skeleton is incomplete, or if the vectors turn out dependent.
    """
    if i < 0 or i > X.k:
        raise CochainException("coboundary_basis needs 0 <= i <= %d, got %d" % (X.k, i))
    if not X.has_complete_skeleton(i):
        raise CochainException("coboundary_basis needs a complete %d-skeleton" % i)
    delta = abs(coboundary_sparse(X, i - 1)).tocsc()
    chosen = [X.index(face) for face in X.faces(i - 1) if 0 not in face]
    basis = [Z2Cochain(i, delta[:, col].toarray().ravel()) for col in chosen]
    expected = binomial(X.n - 1, i)
    rank = gf2.gf2_rank(np.vstack([b.bits for b in basis])) if basis else 0
    if len(basis) != expected or rank != expected:
        raise CochainException("coboundary basis has %d vectors of rank %d, expected %d"
                               % (len(basis), rank, expected))
    return basis


def coboundary_space_basis(X: SimplicialComplex, i: int) -> List[Z2Cochain]:
    """A GF(2) basis of ``B^i = im delta_{i-1}`` for any complex."""
    if i < 0:
        return []
    if X.has_complete_skeleton(i):
        return coboundary_basis(X, i)
    delta = gf2.to_gf2(coboundary_sparse(X, i - 1))
    pivots = gf2.gf2_row_reduce(delta).pivots
    return [Z2Cochain(i, delta[:, col]) for col in pivots]


def is_coboundary(X: SimplicialComplex, f: Z2Cochain) -> bool:
    """True iff ``delta_{i-1} g = f`` has a GF(2) solution."""
    f.check_host(X)
    if f.dim < 0:
        return f.weight == 0
    return gf2.gf2_solve(coboundary_sparse(X, f.dim - 1), f.bits) is not None


def gf2_cohomology_dim(X: SimplicialComplex, i: int) -> int:
    """Dimension of reduced cohomology ``dim ker delta_i - rank delta_{i-1}`` over GF(2)."""
    if not -1 <= i <= X.k:
        raise CochainException("gf2_cohomology_dim needs -1 <= i <= %d, got %d" % (X.k, i))
    kernel = X.face_count(i) - gf2.gf2_rank(coboundary_sparse(X, i))
    image = gf2.gf2_rank(coboundary_sparse(X, i - 1)) if i >= 0 else 0
    return kernel - image


def hamming_norm(X: SimplicialComplex, f: Z2Cochain) -> float:
    """Support size over the number of faces of that dimension (uniform weights)."""
    total = X.face_count(f.dim)
    return f.weight / total if total else 0.0


@dataclass(frozen=True)
class ClassNorm:
    """Exact ``||[f]||`` with its minimizing representative."""
    norm: float
    weight: int
    total: int
    representative: Z2Cochain
    coset_size: int


def _split_prefixes(start: int, words: List[int], jobs: int):
    high = min(len(words), max(0, (4 * jobs - 1).bit_length()))
    low_words, high_words = words[:len(words) - high], words[len(words) - high:]
    for prefix in range(1 << high):
        shifted = start
        for j, word in enumerate(high_words):
            if prefix >> j & 1:
                shifted ^= word
        yield shifted, low_words


def z2_class_norm(X: SimplicialComplex, f: Z2Cochain, budget: int = DEFAULT_BUDGET, jobs: int = 1) -> ClassNorm:
    """
    Exact ``||[f]|| = min ||f + b||`` over all coboundaries ``b``.

    The coset ``f + B`` is enumerated in Gray-code order over a GF(2) basis of ``B``. With
    ``jobs > 1`` the walk is split by fixing the coefficients of the last basis vectors.

    Raises
    ------
    BudgetExceededException
        If the coset has more than ``budget`` elements.
    """
    f.check_host(X)
    basis = coboundary_space_basis(X, f.dim)
    coset_size = 1 << len(basis)
    if coset_size > budget:
        logger.error("coset of size 2^%d exceeds the budget %d", len(basis), budget)
        raise BudgetExceededException("coset of size 2^%d exceeds the budget %d" % (len(basis), budget))

    words = [b.word for b in basis]
    if jobs > 1 and len(words) > 12:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            weight, word = min(pool.map(gf2.coset_minimum_task, _split_prefixes(f.word, words, jobs)))
    else:
        weight, word = gf2.coset_minimum(f.word, words)

    total = X.face_count(f.dim)
    representative = Z2Cochain(f.dim, gf2.unpack_bits(word, total))
    return ClassNorm(norm=weight / total if total else 0.0, weight=weight, total=total,
                     representative=representative, coset_size=coset_size)


def random_real_cochain(X: SimplicialComplex, dim: int, rng: np.random.Generator) -> RealCochain:
    return RealCochain(dim, rng.standard_normal(X.face_count(dim)))


def random_coboundary(X: SimplicialComplex, dim: int, rng: np.random.Generator) -> RealCochain:
    """``delta g`` for a standard normal ``(dim-1)``-cochain ``g``."""
    return apply_coboundary(X, random_real_cochain(X, dim - 1, rng))

"""GF(2) linear algebra on dense 0/1 matrices and on int-packed bit vectors."""
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

logger = logging.getLogger(__name__)


class GF2Exception(Exception):
    pass


def to_gf2(matrix) -> np.ndarray:
    if sparse.issparse(matrix):
        matrix = matrix.toarray()
    return np.abs(np.asarray(matrix, dtype=np.int64)).astype(np.uint8) % 2


@dataclass(frozen=True)
class RowReduceResult:
    matrix: np.ndarray
    rank: int
    pivots: Tuple[int, ...]


def gf2_row_reduce(matrix) -> RowReduceResult:
    """
    Reduced row echelon form over GF(2).

    Returns
    -------
    RowReduceResult
        The reduced matrix, its rank and the pivot column of every nonzero row. The pivot
        columns of the input form a basis of its column space.
    """
    mat = to_gf2(matrix).copy()
    m, n = mat.shape
    pivots = []
    row = 0
    for col in range(n):
        if row == m:
            break
        candidates = np.flatnonzero(mat[row:, col])
        if candidates.size == 0:
            continue
        pivot = row + candidates[0]
        if pivot != row:
            mat[[row, pivot]] = mat[[pivot, row]]
        hits = np.flatnonzero(mat[:, col])
        hits = hits[hits != row]
        if hits.size:
            mat[hits] ^= mat[row]
        pivots.append(col)
        row += 1
    return RowReduceResult(matrix=mat, rank=len(pivots), pivots=tuple(pivots))


def gf2_rank(matrix) -> int:
    """Rank over GF(2), eliminating on byte-packed rows."""
    mat = to_gf2(matrix)
    m, n = mat.shape
    if m == 0 or n == 0:
        return 0
    if m < n:
        mat = mat.T
        m, n = n, m
    packed = np.packbits(mat, axis=1)
    rank = 0
    for col in range(n):
        if rank == m:
            break
        byte, shift = col >> 3, 7 - (col & 7)
        column = (packed[rank:, byte] >> shift) & 1
        candidates = np.flatnonzero(column)
        if candidates.size == 0:
            continue
        pivot = rank + candidates[0]
        if pivot != rank:
            packed[[rank, pivot]] = packed[[pivot, rank]]
        hits = rank + 1 + np.flatnonzero((packed[rank + 1:, byte] >> shift) & 1)
        if hits.size:
            packed[hits] ^= packed[rank]
        rank += 1
    return rank


def gf2_nullspace_basis(matrix) -> np.ndarray:
    """Return a basis for the nullspace of matrix over GF(2), one vector per row."""
    reduced = gf2_row_reduce(matrix)
    mat = reduced.matrix
    n = mat.shape[1]
    pivots = set(reduced.pivots)
    basis = []
    for free in (c for c in range(n) if c not in pivots):
        vec = np.zeros(n, dtype=np.uint8)
        vec[free] = 1
        for row, col in enumerate(reduced.pivots):
            if mat[row, free] == 1:
                vec[col] = 1
        basis.append(vec)
    if not basis:
        return np.zeros((0, n), dtype=np.uint8)
    return np.vstack(basis)


def gf2_solve(matrix, vector) -> Optional[np.ndarray]:
    """
    Solves ``matrix @ x = vector`` over GF(2).

    Returns
    -------
    numpy.ndarray or None
        One solution (free variables set to 0), or ``None`` when the system is inconsistent.
    """
    mat = to_gf2(matrix)
    vec = to_gf2(vector).reshape(-1, 1)
    if mat.shape[0] != vec.shape[0]:
        raise GF2Exception("Shape mismatch: %s vs %s" % (mat.shape, vec.shape))
    n = mat.shape[1]
    reduced = gf2_row_reduce(np.concatenate([mat, vec], axis=1))
    if n in reduced.pivots:
        return None
    solution = np.zeros(n, dtype=np.uint8)
    for row, col in enumerate(reduced.pivots):
        solution[col] = reduced.matrix[row, n]
    return solution


def complement_basis(rows, length: int) -> np.ndarray:
    """
    Unit vectors that extend the span of ``rows`` to all of GF(2)^length.

    The returned vectors are ``e_j`` for the non-pivot columns ``j`` of the reduced row
    echelon form of ``rows``, so ``rows`` plus the result is a basis.
    """
    rows = to_gf2(rows).reshape(-1, length)
    pivots = set(gf2_row_reduce(rows).pivots) if rows.shape[0] else set()
    free = [j for j in range(length) if j not in pivots]
    basis = np.zeros((len(free), length), dtype=np.uint8)
    basis[np.arange(len(free)), free] = 1
    return basis


def pack_bits(bits: Iterable[int]) -> int:
    """
    Packs a 0/1 vector into an int with index 0 as the most significant bit.

    Comparing packed words as integers is then the lexicographic order of the vectors.
    """
    word = 0
    for bit in bits:
        word = (word << 1) | (int(bit) & 1)
    return word


def unpack_bits(word: int, length: int) -> np.ndarray:
    bits = np.zeros(length, dtype=np.uint8)
    for j in range(length - 1, -1, -1):
        bits[j] = word & 1
        word >>= 1
    return bits


def gray_code_flips(count: int) -> Iterable[int]:
    """Index of the basis vector flipped at each step of a ``count``-bit Gray code walk."""
    for step in range(1, 1 << count):
        yield (step & -step).bit_length() - 1


def coset_minimum(start: int, words: Sequence[int]) -> Tuple[int, int]:
    """
    Minimum weight over ``start + span(words)``, visiting the coset in Gray-code order.

    Ties go to the smallest packed word, i.e. the lexicographically smallest vector.

    Returns
    -------
    tuple
        ``(weight, word)`` of the minimizer.
    """
    best_weight = start.bit_count()
    best_word = start
    current = start
    for flip in gray_code_flips(len(words)):
        current ^= words[flip]
        weight = current.bit_count()
        if weight < best_weight or (weight == best_weight and current < best_word):
            best_weight, best_word = weight, current
    return best_weight, best_word


def coset_minimum_task(args: Tuple[int, List[int]]) -> Tuple[int, int]:
    start, words = args
    return coset_minimum(start, words)

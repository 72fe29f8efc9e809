from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy import sparse

from cochainlab.topology.complex import Face


class OperatorKind(Enum):
    ADJACENCY = "adjacency"
    UP_LAPLACIAN = "up-laplacian"
    DOWN_LAPLACIAN = "down-laplacian"
    NORMALIZED_UP = "normalized-up"
    COBOUNDARY = "coboundary"
    ADJOINT = "adjoint"
    DEGREE = "degree"
    DEVIATION = "deviation"


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """
    A matrix over the indexed faces of one complex.

    Attributes
    ----------
    entries : scipy.sparse.csr_matrix
        Integer entries for incidence-built operators, floats for weighted ones.
    kind : OperatorKind
    complex_id : str
        Fingerprint of the host complex.
    dim : int
        Dimension of the faces indexing the columns.
    face : Face, optional
        The ``(k-2)``-face an operator was localized to.
    """
    entries: sparse.csr_matrix
    kind: OperatorKind
    complex_id: str
    dim: int
    face: Optional[Face] = None

    def __repr__(self):
        return "OperatorMatrix(%s, dim=%d, %dx%d)" % (self.kind.value, self.dim, self.rows, self.cols)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def dense(self) -> np.ndarray:
        return self.entries.toarray()

    def is_exact(self) -> bool:
        return np.issubdtype(self.entries.dtype, np.integer)

    def asymmetry(self) -> float:
        """Largest ``|M - M^T|`` entry relative to the largest ``|M|`` entry."""
        if self.rows != self.cols:
            return float("inf")
        scale = abs(self.entries).max() if self.entries.nnz else 0.0
        diff = self.entries - self.entries.T
        worst = abs(diff).max() if diff.nnz else 0.0
        return float(worst / scale) if scale else float(worst)

import hashlib
import json
import logging
from functools import cached_property
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

Face = Tuple[int, ...]

EMPTY_FACE: Face = ()


class ComplexException(Exception):
    pass


def canonical_face(vertices: Iterable[int], n: Optional[int] = None) -> Face:
    """
    Validates a face given as a strictly increasing sequence of vertex ids.

    Parameters
    ----------
    vertices : Iterable[int]
        Vertex ids of the face.
    n : int, optional
        When given, every vertex id must be smaller than ``n``.

    Returns
    -------
    Face
        The face as a tuple.

    Raises
    ------
    ComplexException
        If an id is not a non-negative integer, the ids are not strictly increasing,
        or an id is out of range.
    """
    face = tuple(vertices)
    for v in face:
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 0:
            raise ComplexException("Vertex ids must be non-negative integers: %r" % (face,))
    if any(a >= b for a, b in zip(face, face[1:])):
        raise ComplexException("Face is not in canonical (strictly increasing) form: %r" % (face,))
    if n is not None and face and face[-1] >= n:
        raise ComplexException("Face %r uses a vertex outside 0..%d" % (face, n - 1))
    return tuple(int(v) for v in face)


def face_dimension(face: Face) -> int:
    return len(face) - 1


def facets(face: Face) -> Iterator[Tuple[int, Face]]:
    """Yields ``(j, face minus its j-th vertex)`` for j = 0..dim."""
    for j in range(len(face)):
        yield j, face[:j] + face[j + 1:]


def incidence_number(F: Face, G: Face) -> int:
    """
    Returns the oriented incidence number ``[F:G]``.

    The value is ``(-1)**j`` when ``G`` is obtained from ``F`` by deleting its ``j``-th smallest
    vertex (0-based) and ``0`` when ``G`` is not contained in ``F``.

    Raises
    ------
    ComplexException
        If ``dim F != dim G + 1``.
    """
    F = canonical_face(F)
    G = canonical_face(G)
    if len(F) != len(G) + 1:
        raise ComplexException("Incidence needs dim F = dim G + 1, got %r and %r" % (F, G))
    G_set = set(G)
    missing = [j for j, v in enumerate(F) if v not in G_set]
    if len(missing) != 1:
        return 0
    return -1 if missing[0] % 2 else 1


class SimplicialComplex(object):
    """
    A finite abstract simplicial complex on the vertices ``0..n-1``.

    Faces are stored per dimension in lexicographic order, from the empty face (dimension -1)
    up to the top dimension ``k``. Row indices of every matrix built over the complex follow
    this order. Instances are immutable; build them with :func:`build_complex`.

    Attributes
    ----------
    n : int
        Number of vertices.
    k : int
        Top dimension.
    complete_skeleton_dim : int
        All faces of dimension up to this value are present.
    vertex_map : tuple of int
        ``vertex_map[v]`` is the label of vertex ``v`` in the complex this one was derived from
        (the identity for complexes that were not produced by :func:`link`).
    """

    def __init__(self, n: int, k: int, faces: Dict[int, Tuple[Face, ...]], complete_skeleton_dim: int,
                 vertex_map: Optional[Sequence[int]] = None):
        self.n = n
        self.k = k
        self.complete_skeleton_dim = complete_skeleton_dim
        self.vertex_map = tuple(vertex_map) if vertex_map is not None else tuple(range(n))
        self._faces = faces
        self._index = {dim: {face: row for row, face in enumerate(faces[dim])} for dim in faces}
        self._degree_cache: Dict[int, np.ndarray] = {}

    def __repr__(self):
        return "SimplicialComplex(n=%d, k=%d, f=%s)" % (self.n, self.k, self.f_vector())

    def __eq__(self, other):
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self.n == other.n and self.k == other.k and self._faces == other._faces

    def __hash__(self):
        return hash(self.fingerprint)

    def __contains__(self, face) -> bool:
        face = tuple(face)
        return face in self._index.get(len(face) - 1, {})

    def faces(self, dim: int) -> Tuple[Face, ...]:
        return self._faces.get(dim, ())

    def face_count(self, dim: int) -> int:
        return len(self._faces.get(dim, ()))

    def f_vector(self) -> Tuple[int, ...]:
        return tuple(self.face_count(dim) for dim in range(0, self.k + 1))

    def index(self, face: Face) -> int:
        """Row index of ``face`` within its dimension."""
        face = tuple(face)
        try:
            return self._index[len(face) - 1][face]
        except KeyError:
            raise ComplexException("Face %r is not in the complex" % (face,))

    def has_complete_skeleton(self, dim: int) -> bool:
        return max(self.complete_skeleton_dim, 0) >= dim

    def degrees(self, dim: int) -> np.ndarray:
        """
        Number of top-dimensional faces containing each face of dimension ``dim``.

        Returns
        -------
        numpy.ndarray
            Integer vector indexed like ``faces(dim)``.
        """
        if dim in self._degree_cache:
            return self._degree_cache[dim]
        counts = np.zeros(self.face_count(dim), dtype=np.int64)
        if dim == self.k:
            counts[:] = 1
        elif -1 <= dim < self.k:
            index = self._index[dim]
            for top in self._faces[self.k]:
                for sub in combinations(top, dim + 1):
                    counts[index[sub]] += 1
        counts.setflags(write=False)
        self._degree_cache[dim] = counts
        return counts

    def top_faces(self) -> List[Face]:
        """Faces not implied by the complete skeleton, in file (lexicographic) order."""
        floor = max(self.complete_skeleton_dim, 0)
        faces = [face for dim in range(floor + 1, self.k + 1) for face in self._faces[dim]]
        return sorted(faces)

    def to_dict(self, metadata: Optional[dict] = None) -> dict:
        data = {
            "n": self.n,
            "k": self.k,
            "complete_skeleton_dim": self.complete_skeleton_dim,
            "top_faces": [list(face) for face in self.top_faces()],
        }
        if metadata is not None:
            data["metadata"] = metadata
        return data

    def to_json(self, metadata: Optional[dict] = None) -> str:
        return json.dumps(self.to_dict(metadata))

    @cached_property
    def fingerprint(self) -> str:
        """Short content hash used to tag matrices with their host complex."""
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()[:16]


def build_complex(n: int, k: int, top_faces: Iterable[Iterable[int]], complete_skeleton_dim: int = 0,
                  vertex_map: Optional[Sequence[int]] = None) -> SimplicialComplex:
    """
    Builds and validates a simplicial complex.

    Faces of dimension up to ``complete_skeleton_dim`` are enumerated combinatorially; vertices
    ``0..n-1`` are always present. Every other face must be listed in ``top_faces`` together
    with all of its faces above the complete skeleton. Listing a face inside the skeleton is allowed;
    listing any face twice is not.

    Parameters
    ----------
    n : int
        Number of vertices.
    k : int
        Top dimension.
    top_faces : Iterable of faces
        Faces in canonical (strictly increasing) form.
    complete_skeleton_dim : int
        Dimension of the complete skeleton, ``-1 <= complete_skeleton_dim <= k``.

    Returns
    -------
    SimplicialComplex

    Raises
    ------
    ComplexException
        On non-canonical or duplicate faces, faces of dimension above ``k``, out-of-range
        vertices, or a face whose facet is missing.
    """
    if n < 0 or k < 0:
        raise ComplexException("n and k must be non-negative, got n=%r, k=%r" % (n, k))
    if not -1 <= complete_skeleton_dim <= k:
        raise ComplexException("complete_skeleton_dim must lie in [-1, k], got %r" % complete_skeleton_dim)

    floor = max(complete_skeleton_dim, 0)
    listed: Dict[int, set] = {dim: set() for dim in range(floor + 1, k + 1)}
    seen = set()
    for raw in top_faces:
        face = canonical_face(raw, n)
        dim = len(face) - 1
        if dim > k:
            raise ComplexException("Face %r has dimension %d > k=%d" % (face, dim, k))
        if face in seen:
            raise ComplexException("Duplicate face %r" % (face,))
        seen.add(face)
        if dim > floor:
            listed[dim].add(face)

    for dim in range(floor + 2, k + 1):
        below = listed[dim - 1]
        for face in listed[dim]:
            for _, facet in facets(face):
                if facet not in below:
                    raise ComplexException("Face %r is missing its facet %r" % (face, facet))

    faces: Dict[int, Tuple[Face, ...]] = {-1: (EMPTY_FACE,)}
    for dim in range(0, k + 1):
        if dim <= floor:
            faces[dim] = tuple(combinations(range(n), dim + 1))
        else:
            faces[dim] = tuple(sorted(listed[dim]))

    complex_ = SimplicialComplex(n, k, faces, complete_skeleton_dim, vertex_map)
    logger.debug("built %r", complex_)
    return complex_


def complete_complex(n: int, k: int) -> SimplicialComplex:
    """
    Returns the complete ``k``-dimensional complex ``K_n^k`` on ``n`` vertices.

    Raises
    ------
    ComplexException
        If ``k >= n`` or ``k < 0``.
    """
    if not 0 <= k < n:
        raise ComplexException("complete complex needs 0 <= k < n, got n=%r, k=%r" % (n, k))
    return build_complex(n, k, [], complete_skeleton_dim=k)


def complex_from_dict(data: dict) -> SimplicialComplex:
    try:
        return build_complex(int(data["n"]), int(data["k"]), data["top_faces"],
                             int(data["complete_skeleton_dim"]))
    except KeyError as e:
        raise ComplexException("Complex file is missing key %s" % e)


def complex_from_json(text: str) -> Tuple[SimplicialComplex, Optional[dict]]:
    """
    Parses the complex file format.

    Returns
    -------
    tuple
        The complex and the embedded metadata (``None`` when absent).
    """
    try:
        data = json.loads(text)
    except ValueError as e:
        raise ComplexException("Invalid complex file: %s" % e)
    return complex_from_dict(data), data.get("metadata")


def complex_from_networkx(graph) -> SimplicialComplex:
    """
    Builds the 1-dimensional complex of a ``networkx`` graph.

    Nodes are relabelled ``0..n-1`` in sorted order; self-loops are rejected.
    """
    nodes = sorted(graph.nodes())
    relabel = {node: i for i, node in enumerate(nodes)}
    edges = []
    for u, v in graph.edges():
        a, b = relabel[u], relabel[v]
        if a == b:
            raise ComplexException("Self-loop at node %r" % (u,))
        edges.append((min(a, b), max(a, b)))
    return build_complex(len(nodes), 1, edges, complete_skeleton_dim=0)


def link(X: SimplicialComplex, F: Face) -> SimplicialComplex:
    """
    Returns the link of ``F`` in ``X``, reindexed to vertices ``0..m-1``.

    The link contains ``G`` iff ``F`` and ``G`` are disjoint and ``F | G`` is a face of ``X``.
    Its vertices are the ``v`` with ``F + {v}`` in ``X``, numbered in increasing order; the
    result's ``vertex_map`` records the original ids. The link of a ``(k-2)``-face is a graph.

    Raises
    ------
    ComplexException
        If ``F`` is not a face of ``X``.
    """
    F = canonical_face(F)
    if F not in X:
        raise ComplexException("Face %r is not in the complex" % (F,))

    base = set(F)
    rank = len(F)
    vertices = sorted(v for face in X.faces(rank) if base.issubset(face) for v in face if v not in base)
    relabel = {v: i for i, v in enumerate(vertices)}

    link_faces = []
    for dim in range(rank + 1, X.k + 1):
        for face in X.faces(dim):
            if base.issubset(face):
                link_faces.append(tuple(relabel[v] for v in face if v not in base))

    return build_complex(len(vertices), X.k - rank, link_faces, complete_skeleton_dim=0, vertex_map=vertices)


def degree(X: SimplicialComplex, F: Face) -> int:
    """
    Number of top-dimensional faces of ``X`` containing ``F``.

    Raises
    ------
    ComplexException
        If ``F`` is not a face of ``X``.
    """
    F = canonical_face(F)
    row = X.index(F)
    return int(X.degrees(len(F) - 1)[row])


def is_pure(X: SimplicialComplex) -> bool:
    """True iff every ``(k-1)``-face lies in at least one ``k``-face."""
    return bool(np.all(X.degrees(X.k - 1) >= 1))

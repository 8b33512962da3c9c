"""The ambient n-simplex and its maximal faces.

Face indices are 1-based throughout the package: ``face(S, i)`` is the face
spanned by every vertex except the i-th, for ``i`` in ``1..n+1``.
"""

from __future__ import annotations

from functools import cached_property
from itertools import combinations

import numpy as np

from facecover._hull import HullProjector
from facecover.errors import DegenerateSimplex, DimensionMismatch, IndexOutOfRange

DET_RTOL = 1e-10
MEMBERSHIP_TOL = 1e-9


def as_point(u, dim: int | None = None) -> np.ndarray:
    """Coerce a scalar or sequence to a finite 1-D float array."""
    p = np.atleast_1d(np.asarray(u, dtype=float))
    if p.ndim != 1:
        raise DimensionMismatch(f"a point must be a flat vector, got shape {p.shape}")
    if dim is not None and p.shape[0] != dim:
        raise DimensionMismatch(f"expected a point of dimension {dim}, got {p.shape[0]}")
    if not np.all(np.isfinite(p)):
        raise DimensionMismatch("point has non-finite coordinates")
    return p


class Simplex:
    """n+1 affinely independent vertices in R^n.

    Instances are immutable; derived quantities are cached on first use.
    """

    def __init__(self, vertices, det_rtol: float = DET_RTOL):
        verts = np.asarray(vertices, dtype=float)
        if verts.ndim == 1:
            verts = verts[:, None]
        if verts.ndim != 2:
            raise DimensionMismatch("vertices must be a list of points")
        m, n = verts.shape
        if n < 1 or m != n + 1:
            raise DimensionMismatch(
                f"an n-simplex in R^n needs n+1 vertices; got {m} vertices of dimension {n}"
            )
        if not np.all(np.isfinite(verts)):
            raise DimensionMismatch("vertices have non-finite coordinates")
        edges = verts[:-1] - verts[-1]
        norms = np.linalg.norm(edges, axis=1)
        if np.any(norms == 0):
            raise DegenerateSimplex("repeated vertex")
        rel_det = abs(np.linalg.det(edges)) / np.prod(norms)
        if rel_det < det_rtol:
            raise DegenerateSimplex(
                f"vertices are not affinely independent (relative determinant {rel_det:.3g})"
            )
        verts.setflags(write=False)
        self._vertices = verts
        self.dim = n
        # Barycentric solve: [a_1 .. a_{n+1}; 1 .. 1] lambda = [u; 1].
        system = np.vstack([verts.T, np.ones(n + 1)])
        self._bary_inv = np.linalg.inv(system)

    @property
    def vertices(self) -> np.ndarray:
        return self._vertices

    def __repr__(self):
        return f"Simplex({self._vertices.tolist()})"

    def __eq__(self, other):
        return isinstance(other, Simplex) and np.array_equal(self._vertices, other._vertices)

    def __hash__(self):
        return hash(self._vertices.tobytes())

    def face(self, i: int) -> Face:
        return Face(self, i)

    def faces(self) -> list[Face]:
        return [Face(self, i) for i in range(1, self.dim + 2)]

    def barycentric_coords(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.ndim == 2:
            rhs = np.hstack([u, np.ones((u.shape[0], 1))])
            return rhs @ self._bary_inv.T
        u = as_point(u, self.dim)
        return self._bary_inv @ np.append(u, 1.0)

    def contains(self, u, tol: float = MEMBERSHIP_TOL) -> bool:
        return bool(np.all(self.barycentric_coords(u) >= -tol))

    def from_barycentric(self, weights) -> np.ndarray:
        return np.asarray(weights, dtype=float) @ self._vertices

    @cached_property
    def barycenter(self) -> np.ndarray:
        return self._vertices.mean(axis=0)

    @cached_property
    def diameter(self) -> float:
        # The farthest pair of points of a polytope is a pair of vertices.
        return max(
            float(np.linalg.norm(a - b)) for a, b in combinations(self._vertices, 2)
        )

    @cached_property
    def min_face_distance(self) -> float:
        """Smallest distance from the barycenter to a maximal face."""
        b = self.barycenter
        return min(float(np.linalg.norm(b - f.project(b))) for f in self.faces())

    @cached_property
    def _projector(self) -> HullProjector:
        return HullProjector(self._vertices)

    def project(self, u) -> np.ndarray:
        return self._projector.project(u)

    @cached_property
    def halfspaces(self) -> tuple[np.ndarray, np.ndarray]:
        """Outward unit normals and offsets, ``normals @ x <= offsets`` on S.

        Row ``i-1`` bounds the face opposite vertex ``a_i``.
        """
        normals = np.empty((self.dim + 1, self.dim))
        offsets = np.empty(self.dim + 1)
        for k in range(self.dim + 1):
            # Gradient of the k-th barycentric coordinate points inward.
            g = -self._bary_inv[k, :-1]
            c = self._bary_inv[k, -1]
            norm = np.linalg.norm(g)
            normals[k] = g / norm
            offsets[k] = c / norm
        return normals, offsets


class Face:
    """The maximal face of ``parent`` that omits vertex ``index`` (1-based)."""

    def __init__(self, parent: Simplex, index: int):
        if isinstance(index, bool) or not isinstance(index, (int, np.integer)):
            raise IndexOutOfRange(f"face index must be an integer, got {index!r}")
        if not 1 <= index <= parent.dim + 1:
            raise IndexOutOfRange(
                f"face index {index} outside 1..{parent.dim + 1}"
            )
        self.parent = parent
        self.index = int(index)
        keep = [j for j in range(parent.dim + 1) if j != self.index - 1]
        self.vertices = parent.vertices[keep]

    def __repr__(self):
        return f"Face(index={self.index}, vertices={self.vertices.tolist()})"

    def __eq__(self, other):
        return (
            isinstance(other, Face)
            and self.index == other.index
            and self.parent == other.parent
        )

    def __hash__(self):
        return hash((self.parent, self.index))

    @cached_property
    def _projector(self) -> HullProjector:
        return HullProjector(self.vertices)

    def project(self, u) -> np.ndarray:
        return self._projector.project(u)


def new_simplex(vertices) -> Simplex:
    return Simplex(vertices)

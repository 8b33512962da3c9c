"""Brute-force barycentric lattice oracle.

The depth-m lattice of a simplex is every point sum_i (k_i/m) a_i with
nonnegative integers k_i summing to m.  Distance functions to convex sets are
1-Lipschitz, so exhaustive max/min over the lattice is within ``mesh =
diameter / m`` of the true sup/inf over the simplex.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from facecover.errors import GridTooLarge, ValidationError

GRID_POINT_CAP = 10_000_000


@lru_cache(maxsize=None)
def _compositions(parts: int, total: int) -> np.ndarray:
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    blocks = []
    for first in range(total + 1):
        rest = _compositions(parts - 1, total - first)
        blocks.append(np.hstack([np.full((rest.shape[0], 1), first, dtype=np.int64), rest]))
    out = np.vstack(blocks)
    out.setflags(write=False)
    return out


def compositions(parts: int, total: int) -> np.ndarray:
    """All k in N^parts with sum(k) == total, in lexicographic order."""
    return _compositions(parts, total)


@dataclass(frozen=True)
class BaryGrid:
    vertices: np.ndarray
    depth: int
    weights: np.ndarray
    points: np.ndarray
    mesh: float

    def __len__(self):
        return self.points.shape[0]


def lattice(vertices, depth: int, diameter: float | None = None, cap: int = GRID_POINT_CAP) -> BaryGrid:
    """Depth-``depth`` lattice over the simplex spanned by ``vertices``.

    ``vertices`` may be a face (fewer vertices than the ambient dimension + 1).
    """
    verts = np.atleast_2d(np.asarray(vertices, dtype=float))
    if depth < 1:
        raise ValidationError(f"grid depth must be >= 1, got {depth}")
    k = verts.shape[0]
    size = comb(depth + k - 1, k - 1)
    if size > cap:
        raise GridTooLarge(f"grid of depth {depth} has {size} points (cap {cap})")
    weights = compositions(k, depth)
    points = (weights / depth) @ verts
    if diameter is None:
        diameter = max(
            (float(np.linalg.norm(a - b)) for i, a in enumerate(verts) for b in verts[i + 1:]),
            default=0.0,
        )
    return BaryGrid(verts, depth, weights, points, diameter / depth)


def grid(simplex, depth: int, cap: int = GRID_POINT_CAP) -> BaryGrid:
    return lattice(simplex.vertices, depth, simplex.diameter, cap)


def distance_matrix(points: np.ndarray, bodies) -> np.ndarray:
    """(N, len(bodies)) matrix of point-to-body distances."""
    return np.column_stack([body.distances(points) for body in bodies])


def grid_maximin(simplex, bodies, depth: int, cap: int = GRID_POINT_CAP):
    """Max over lattice points of the distance to the nearest body.

    Returns ``(value, argmax, mesh)``.  Ties go to the lexicographically
    smallest barycentric index.
    """
    g = grid(simplex, depth, cap)
    nearest = distance_matrix(g.points, bodies).min(axis=1)
    j = int(np.argmax(nearest))
    return float(nearest[j]), g.points[j], g.mesh


def grid_minimax(simplex, bodies, depth: int, cap: int = GRID_POINT_CAP):
    """Min over lattice points of the distance to the farthest body.

    Returns ``(value, argmin, mesh)``.
    """
    g = grid(simplex, depth, cap)
    farthest = distance_matrix(g.points, bodies).max(axis=1)
    j = int(np.argmin(farthest))
    return float(farthest[j]), g.points[j], g.mesh


def equispace_locus(simplex, bodies, depth: int, eps0: float, slack: float,
                    cap: int = GRID_POINT_CAP) -> np.ndarray:
    """Lattice points whose farthest-body distance is at most ``eps0 + slack``."""
    g = grid(simplex, depth, cap)
    farthest = distance_matrix(g.points, bodies).max(axis=1)
    return g.points[farthest <= eps0 + slack]


def point_set_diameter(points: np.ndarray) -> float:
    pts = np.atleast_2d(points)
    if pts.shape[0] < 2:
        return 0.0
    if pts.shape[1] == 1:
        return float(pts.max() - pts.min())
    if pts.shape[0] > 2000:
        try:
            pts = pts[ConvexHull(pts).vertices]
        except QhullError:
            pass
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt(np.einsum("ijk,ijk->ij", diff, diff).max()))

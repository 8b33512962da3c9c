"""Random test families shared across the suite."""

from __future__ import annotations

import numpy as np

from facecover.bodies import VPolytope
from facecover.equispace import HFamily
from facecover.simplex import Simplex

CORNER = Simplex([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
UNIT = Simplex([[0.0], [1.0]])


def standard_simplex(n: int) -> Simplex:
    return Simplex(np.vstack([np.zeros(n), np.eye(n)]))


def random_simplex(n: int, rng) -> Simplex:
    while True:
        verts = rng.normal(size=(n + 1, n))
        edges = verts[1:] - verts[0]
        if abs(np.linalg.det(edges)) > 0.3:
            return Simplex(verts)


def random_points_in(simplex: Simplex, rng, size: int) -> np.ndarray:
    w = rng.dirichlet(np.ones(simplex.dim + 1), size=size)
    return w @ simplex.vertices


def grown_polytope(simplex: Simplex, i: int, rng, k: int = 2, hmax: float = 0.5) -> VPolytope:
    """co(S^i ∪ extras) where each extra point puts weight h <= hmax on a_i."""
    n = simplex.dim
    w = rng.dirichlet(np.ones(n + 1), size=k)
    h = rng.uniform(0.05, hmax, size=k)
    w[:, i - 1] = 0.0
    w /= w.sum(axis=1, keepdims=True)
    w *= (1.0 - h)[:, None]
    w[:, i - 1] = h
    return VPolytope(np.vstack([simplex.face(i).vertices, w @ simplex.vertices]))


def random_hfamily(simplex: Simplex, rng, k: int = 2, hmax: float = 0.5) -> HFamily:
    """Face-anchored V-polytopes.

    With hmax < 1/(n+1) no set reaches the barycenter, so the family cannot
    cover S; larger hmax gives covering families now and then.
    """
    return HFamily(simplex, [grown_polytope(simplex, i, rng, k, hmax) for i in range(1, simplex.dim + 2)])


def subdivision_family(simplex: Simplex) -> HFamily:
    b = simplex.barycenter
    return HFamily(simplex, [VPolytope(np.vstack([f.vertices, b])) for f in simplex.faces()])


def random_covers(simplex: Simplex, rng) -> list:
    """Face-anchored polytopes through a shared interior point, so they cover S."""
    c = random_points_in(simplex, rng, 1)[0]
    covers = []
    for f in simplex.faces():
        extra = random_points_in(simplex, rng, 2)
        covers.append(VPolytope(np.vstack([f.vertices, c, extra])))
    return covers

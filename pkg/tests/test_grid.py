import math

import numpy as np
import pytest

from facecover.bodies import FaceBody, VPolytope
from facecover.errors import GridTooLarge
from facecover.grid import (
    compositions,
    distance_matrix,
    equispace_locus,
    grid,
    grid_maximin,
    grid_minimax,
    lattice,
    point_set_diameter,
)

from _families import CORNER, UNIT, random_simplex, standard_simplex, subdivision_family

GAP = [VPolytope([0.7, 1.0]), VPolytope([0.0, 0.3])]
FACES = [FaceBody(f) for f in CORNER.faces()]
R = (2 - math.sqrt(2)) / 2


@pytest.mark.parametrize("n,m", [(1, 5), (2, 2), (2, 7), (3, 4), (4, 3)])
def test_counts_and_membership(n, m, rng):
    S = random_simplex(n, rng)
    g = grid(S, m)
    assert len(g.points) == math.comb(m + n, n)
    assert np.all(g.weights.sum(axis=1) == m)
    assert all(S.contains(p) for p in g.points)
    assert g.mesh == pytest.approx(S.diameter / m)


def test_compositions_lexicographic():
    c = compositions(3, 2)
    assert c.tolist() == sorted(c.tolist(), reverse=True) or c.tolist() == sorted(c.tolist())
    assert len({tuple(r) for r in c}) == len(c) == 6


def test_cap():
    with pytest.raises(GridTooLarge):
        grid(standard_simplex(4), 200, cap=1000)


def test_gap_family():
    value, arg, mesh = grid_maximin(UNIT, GAP, 1000)
    assert value == pytest.approx(0.2, abs=1e-3)
    value, arg, _ = grid_minimax(UNIT, GAP, 1000)
    assert value == pytest.approx(0.2, abs=1e-3)
    assert arg == pytest.approx([0.5], abs=1e-3)


def test_subdivision_and_single_body():
    fam = subdivision_family(CORNER)
    value, _, mesh = grid_maximin(CORNER, fam.bodies, 40)
    assert value <= mesh
    value, _, _ = grid_minimax(CORNER, [VPolytope(CORNER.vertices)], 20)
    assert value == pytest.approx(0.0, abs=1e-12)


def test_faces_minimax():
    value, arg, mesh = grid_minimax(CORNER, FACES, 256)
    assert value == pytest.approx(R, abs=mesh)


def test_tie_break_is_first():
    # every grid point is at distance 0 from S itself
    g = grid(CORNER, 4)
    _, arg, _ = grid_minimax(CORNER, [VPolytope(CORNER.vertices)], 4)
    assert arg == pytest.approx(g.points[0])


def test_locus():
    mesh = 1 / 200
    pts = equispace_locus(UNIT, GAP, 200, 0.2, mesh)
    assert np.all(np.abs(pts[:, 0] - 0.5) <= 2 * mesh)
    g = grid(CORNER, 96)
    pts = equispace_locus(CORNER, FACES, 96, R, g.mesh)
    assert point_set_diameter(pts) <= 20 * g.mesh
    assert np.linalg.norm(pts.mean(0) - [R, R]) <= 2 * g.mesh


def test_distance_matrix_shape():
    g = lattice(CORNER.vertices, 5)
    d = distance_matrix(g.points, FACES)
    assert d.shape == (len(g.points), 3)
    assert np.all(d >= 0)


def test_point_set_diameter(rng):
    pts = rng.normal(size=(3000, 2))
    brute = max(np.linalg.norm(pts[None, :200] - pts[:200, None], axis=2).max(), 0)
    assert point_set_diameter(pts) >= brute
    from scipy.spatial.distance import pdist

    assert point_set_diameter(pts) == pytest.approx(pdist(pts).max())

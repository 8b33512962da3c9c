import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from facecover.errors import DegenerateSimplex, DimensionMismatch, IndexOutOfRange
from facecover.simplex import Simplex, new_simplex

from _families import CORNER, UNIT, random_simplex


def test_unit_segment():
    S = new_simplex([[0.0], [1.0]])
    assert S.dim == 1
    assert S.barycenter == pytest.approx([0.5])
    assert S.diameter == pytest.approx(1.0)
    assert S.min_face_distance == pytest.approx(0.5)


def test_corner_triangle_quantities():
    assert CORNER.barycenter == pytest.approx([1 / 3, 1 / 3])
    assert CORNER.diameter == pytest.approx(math.sqrt(2))
    # distance from (1/3, 1/3) to the line x + y = 1
    assert CORNER.min_face_distance == pytest.approx((1 / 3) / math.sqrt(2))


def test_degenerate_rejected():
    with pytest.raises(DegenerateSimplex):
        Simplex([[0, 0], [1, 0], [2, 0]])


@pytest.mark.parametrize("verts", [[[0, 0], [1, 0]], [[0], [1], [2]], [[0, 0, 0], [1, 0, 0], [0, 1, 0]]])
def test_wrong_counts(verts):
    with pytest.raises(DimensionMismatch):
        Simplex(verts)


def test_faces():
    assert UNIT.face(1).vertices.tolist() == [[1.0]]
    assert CORNER.face(1).vertices.tolist() == [[1.0, 0.0], [0.0, 1.0]]
    assert CORNER.face(3).vertices.tolist() == [[0.0, 0.0], [1.0, 0.0]]
    for bad in (0, 4):
        with pytest.raises(IndexOutOfRange):
            CORNER.face(bad)


def test_barycentric_examples():
    assert CORNER.barycentric_coords([1 / 3, 1 / 3]) == pytest.approx([1 / 3] * 3)
    assert CORNER.barycentric_coords([1, 0]) == pytest.approx([0, 1, 0], abs=1e-15)
    lam = CORNER.barycentric_coords([-0.1, 0])
    assert lam.min() < 0
    assert not CORNER.contains([-0.1, 0])


def test_halfspaces_match_faces():
    normals, offsets = CORNER.halfspaces
    for i in range(3):
        # row i is the facet opposite a_{i+1}; every vertex of that face is on it
        for p in CORNER.face(i + 1).vertices:
            assert normals[i] @ p == pytest.approx(offsets[i])
        assert normals[i] @ CORNER.vertices[i] < offsets[i]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_barycentric_round_trip(n, seed):
    rng = np.random.default_rng(seed)
    S = random_simplex(n, rng)
    w = rng.dirichlet(np.ones(n + 1))
    u = w @ S.vertices
    lam = S.barycentric_coords(u)
    assert np.all(lam >= -1e-9)
    assert np.allclose(lam @ S.vertices, u, atol=1e-9)
    assert S.contains(u)
    assert S.min_face_distance > 0
    pair = max(np.linalg.norm(a - b) for a in S.vertices for b in S.vertices)
    assert S.diameter == pytest.approx(pair)


def test_equality_and_hash():
    a = Simplex([[0, 0], [1, 0], [0, 1]])
    assert a == CORNER and hash(a) == hash(CORNER)
    assert a != Simplex([[0, 0], [2, 0], [0, 1]])

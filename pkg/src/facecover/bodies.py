"""Closed convex sets given by exact nearest-point oracles.

Every body answers ``project`` / ``distance`` for a single point and
``project_many`` / ``distances`` for an (N, n) batch.  The batch path is what
the grid oracle uses; the single-point path is what Dykstra's iteration uses.
"""

from __future__ import annotations

from functools import cached_property
from itertools import combinations, product

import numpy as np

from facecover._hull import HullProjector
from facecover.errors import (
    DimensionMismatch,
    FaceNotContained,
    NegativeEpsilon,
    NonConvergence,
    ValidationError,
)
from facecover.simplex import Face, Simplex, as_point

CONTAIN_TOL = 1e-8

BLEND_MAX_ITER = 10_000
BLEND_TOL = 1e-10
HALFSPACE_MAX_ITER = 100_000
HALFSPACE_TOL = 1e-14


class ConvexBody:
    """Base class.  Subclasses implement ``project_many``."""

    dim: int

    def project_many(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def project(self, u) -> np.ndarray:
        return self._project_one(as_point(u, self.dim))

    def _project_one(self, u: np.ndarray) -> np.ndarray:
        return self.project_many(u[None, :])[0]

    def distance(self, u) -> float:
        u = as_point(u, self.dim)
        diff = u - self._project_one(u)
        return float(np.sqrt(diff @ diff))

    def distances(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.linalg.norm(pts - self.project_many(pts), axis=1)

    def generators(self) -> np.ndarray:
        """Representative points of the body, used as containment probes."""
        raise NotImplementedError

    def contains(self, u, tol: float = CONTAIN_TOL) -> bool:
        return self.distance(u) <= tol


def _check_points(points, dim=None):
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None] if dim == 1 or dim is None else pts[None, :]
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise DimensionMismatch("expected a nonempty list of points")
    if dim is not None and pts.shape[1] != dim:
        raise DimensionMismatch(f"expected points of dimension {dim}, got {pts.shape[1]}")
    if not np.all(np.isfinite(pts)):
        raise DimensionMismatch("points have non-finite coordinates")
    return pts


class VPolytope(ConvexBody):
    """Convex hull of finitely many generators."""

    def __init__(self, generators, dim: int | None = None):
        pts = _check_points(generators, dim)
        pts.setflags(write=False)
        self._generators = pts
        self.dim = pts.shape[1]

    def __repr__(self):
        return f"VPolytope({self._generators.tolist()})"

    @cached_property
    def _projector(self):
        return HullProjector(self._generators)

    def project_many(self, points):
        return self._projector.project(np.atleast_2d(np.asarray(points, dtype=float)))

    def _project_one(self, u):
        return self._projector.project_one(u)

    def generators(self):
        return self._generators


class FaceBody(VPolytope):
    """A maximal face of the ambient simplex, used as a set."""

    def __init__(self, face: Face):
        super().__init__(face.vertices)
        self.face = face

    def __repr__(self):
        return f"FaceBody(index={self.face.index})"


class Ball(ConvexBody):
    def __init__(self, center, radius: float):
        self.center = as_point(center)
        self.dim = self.center.shape[0]
        radius = float(radius)
        if not radius >= 0:
            raise ValidationError(f"ball radius must be >= 0, got {radius}")
        self.radius = radius

    def __repr__(self):
        return f"Ball(center={self.center.tolist()}, radius={self.radius})"

    def project_many(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        rel = pts - self.center
        norm = np.linalg.norm(rel, axis=1)
        scale = np.ones_like(norm)
        far = norm > self.radius
        scale[far] = self.radius / norm[far]
        return self.center + rel * scale[:, None]

    def _project_one(self, u):
        rel = u - self.center
        norm = np.sqrt(rel @ rel)
        if norm <= self.radius:
            return u
        return self.center + rel * (self.radius / norm)

    def generators(self):
        offsets = np.vstack([np.eye(self.dim), -np.eye(self.dim)]) * self.radius
        return np.vstack([self.center[None, :], self.center + offsets])


class HalfspaceSet(ConvexBody):
    """Polyhedron ``normals @ x <= offsets``, optionally cut down to a simplex.

    With ``ambient`` set, the simplex's own facet inequalities are appended so
    the body is the bounded set H intersected with S; its vertices are
    enumerated once and projection is exact.  Without ``ambient`` projection
    runs Dykstra's algorithm over the individual halfspaces, vectorised across
    the query points.
    """

    def __init__(self, normals, offsets, ambient: Simplex | None = None):
        a = np.atleast_2d(np.asarray(normals, dtype=float))
        b = np.atleast_1d(np.asarray(offsets, dtype=float))
        if a.shape[0] != b.shape[0] or a.shape[0] == 0:
            raise DimensionMismatch("need one offset per normal and at least one halfspace")
        norms = np.linalg.norm(a, axis=1)
        if np.any(norms == 0):
            raise ValidationError("halfspace normal must be nonzero")
        self.normals = a / norms[:, None]
        self.offsets = b / norms
        self.dim = a.shape[1]
        self.ambient = ambient
        if ambient is not None:
            if ambient.dim != self.dim:
                raise DimensionMismatch("halfspaces and simplex differ in dimension")
            sn, so = ambient.halfspaces
            self._all_normals = np.vstack([self.normals, sn])
            self._all_offsets = np.concatenate([self.offsets, so])
        else:
            self._all_normals = self.normals
            self._all_offsets = self.offsets

    def __repr__(self):
        return f"HalfspaceSet(normals={self.normals.tolist()}, offsets={self.offsets.tolist()})"

    @cached_property
    def _polytope(self):
        verts = self.vertices()
        if verts.shape[0] == 0:
            raise ValidationError("halfspace set does not meet the simplex")
        return VPolytope(verts)

    def project_many(self, points):
        if self.ambient is not None:
            # Bounded: project exactly onto the enumerated vertex hull.
            return self._polytope.project_many(points)
        return self._dykstra(points)

    def _project_one(self, u):
        if self.ambient is not None:
            return self._polytope._project_one(u)
        return self._dykstra(u[None, :])[0]

    def _dykstra(self, points):
        x = np.atleast_2d(np.asarray(points, dtype=float)).copy()
        a, b = self._all_normals, self._all_offsets
        # Fast exit for points already inside.
        if np.all(x @ a.T <= b):
            return x
        incr = np.zeros((a.shape[0],) + x.shape)
        scale = 1.0 + np.abs(x).max()
        for it in range(1, HALFSPACE_MAX_ITER + 1):
            prev = x
            for j in range(a.shape[0]):
                z = x + incr[j]
                excess = z @ a[j] - b[j]
                x = z - np.maximum(excess, 0.0)[:, None] * a[j]
                incr[j] = z - x
            if np.max(np.abs(x - prev)) <= HALFSPACE_TOL * scale:
                return x
        raise NonConvergence(
            "halfspace projection did not converge",
            iterations=HALFSPACE_MAX_ITER,
            residual=float(np.max(np.abs(x - prev))),
        )

    def vertices(self, tol: float = 1e-9) -> np.ndarray:
        """Vertices by brute-force enumeration of n-subsets of constraints.

        Only meaningful when the set is bounded (e.g. cut by ``ambient``).
        """
        a, b = self._all_normals, self._all_offsets
        found = []
        for rows in combinations(range(a.shape[0]), self.dim):
            sub = a[list(rows)]
            if abs(np.linalg.det(sub)) < 1e-12:
                continue
            x = np.linalg.solve(sub, b[list(rows)])
            if np.all(a @ x <= b + tol) and not any(np.allclose(x, y, atol=tol) for y in found):
                found.append(x)
        if not found:
            return np.empty((0, self.dim))
        return np.array(found)

    def generators(self):
        verts = self.vertices()
        if verts.shape[0] == 0:
            raise ValidationError("halfspace set has no vertices (empty or unbounded)")
        return verts


class EpsilonHull(ConvexBody):
    """Points within ``eps`` of ``inner``; distance is max(d_inner - eps, 0)."""

    def __init__(self, inner: ConvexBody, eps: float):
        eps = float(eps)
        if not eps >= 0:
            raise NegativeEpsilon(f"eps must be >= 0, got {eps}")
        self.inner = inner
        self.eps = eps
        self.dim = inner.dim

    def __repr__(self):
        return f"EpsilonHull({self.inner!r}, eps={self.eps})"

    def project_many(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        base = self.inner.project_many(pts)
        rel = pts - base
        d = np.linalg.norm(rel, axis=1)
        out = pts.copy()
        far = d > self.eps
        out[far] = base[far] + rel[far] * (self.eps / d[far])[:, None]
        return out

    def _project_one(self, u):
        base = self.inner._project_one(u)
        rel = u - base
        d = np.sqrt(rel @ rel)
        if d <= self.eps:
            return u
        return base + rel * (self.eps / d)

    def distances(self, points):
        return np.maximum(self.inner.distances(points) - self.eps, 0.0)

    def distance(self, u):
        return max(self.inner.distance(u) - self.eps, 0.0)

    def generators(self):
        return self.inner.generators()


class Blend(ConvexBody):
    """Minkowski combination ``(1 - t) * face + t * outer``.

    When the combination has a closed form in terms of other bodies it is
    delegated to that form (V-polytope generators combine pairwise, balls and
    eps-hulls shift their radius by ``t``).  Otherwise the projection solves
    ``min |u - (1-t)s - t c|^2`` over ``s`` in the face and ``c`` in ``outer``
    by alternating exact minimisation.
    """

    def __init__(self, face: Face, outer: ConvexBody, t: float):
        self.face = face
        self.outer = outer
        self.t = float(t)
        self.dim = outer.dim

    def __repr__(self):
        return f"Blend(face={self.face.index}, outer={self.outer!r}, t={self.t})"

    @cached_property
    def _exact(self) -> ConvexBody | None:
        return _reduce_blend(self.face, self.outer, self.t)

    @cached_property
    def _face_body(self):
        return FaceBody(self.face)

    def project_many(self, points):
        if self._exact is not None:
            return self._exact.project_many(points)
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.array([self._alternate(u) for u in pts])

    def _project_one(self, u):
        if self._exact is not None:
            return self._exact._project_one(u)
        return self._alternate(u)

    def distances(self, points):
        if self._exact is not None:
            return self._exact.distances(points)
        return super().distances(points)

    def _alternate(self, u):
        t = self.t
        s = self._face_body.project(u)
        c = self.outer.project(u)
        x = (1 - t) * s + t * c
        for _ in range(BLEND_MAX_ITER):
            s = self._face_body.project((u - t * c) / (1 - t))
            c = self.outer.project((u - (1 - t) * s) / t)
            x_new = (1 - t) * s + t * c
            step = np.linalg.norm(x_new - x)
            x = x_new
            if step <= BLEND_TOL:
                return x
        raise NonConvergence(
            "blend projection did not converge", iterations=BLEND_MAX_ITER, residual=step
        )

    def generators(self):
        if self._exact is not None:
            return self._exact.generators()
        outer = self.outer.generators()
        return np.array(
            [(1 - self.t) * s + self.t * c for s, c in product(self.face.vertices, outer)]
        )


def _reduce_blend(face: Face, outer: ConvexBody, t: float) -> ConvexBody | None:
    if t == 0.0:
        return FaceBody(face)
    if t == 1.0:
        return outer
    if isinstance(outer, VPolytope):
        gens = outer.generators()
        combos = ((1 - t) * face.vertices[:, None, :] + t * gens[None, :, :]).reshape(-1, outer.dim)
        return VPolytope(np.unique(combos, axis=0))
    if isinstance(outer, Ball):
        return EpsilonHull(VPolytope((1 - t) * face.vertices + t * outer.center), t * outer.radius)
    if isinstance(outer, EpsilonHull):
        inner = _reduce_blend(face, outer.inner, t)
        if inner is None:
            inner = Blend(face, outer.inner, t)
        return EpsilonHull(inner, t * outer.eps)
    if isinstance(outer, Blend) and outer.face == face:
        # (1-t)F + t((1-r)F + rC) = (1-tr)F + trC since F is convex.
        return _reduce_blend(face, outer.outer, t * outer.t) or Blend(face, outer.outer, t * outer.t)
    return None


def epsilon_hull(body: ConvexBody, eps: float) -> EpsilonHull:
    return EpsilonHull(body, eps)


def face_containment_gap(face: Face, body: ConvexBody) -> float:
    """Largest distance from a vertex of ``face`` to ``body``.

    The face is the hull of its vertices, so a zero gap means containment.
    """
    return float(body.distances(face.vertices).max())


def blend(face: Face, outer: ConvexBody, t: float, tol: float = CONTAIN_TOL) -> Blend:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValidationError(f"blend parameter must lie in [0, 1], got {t}")
    if outer.dim != face.parent.dim:
        raise DimensionMismatch("face and body differ in dimension")
    gap = face_containment_gap(face, outer)
    if gap > tol:
        raise FaceNotContained(
            f"face {face.index} is not contained in the outer set (gap {gap:.3g})",
            face_index=face.index,
            distance=gap,
        )
    return Blend(face, outer, t)

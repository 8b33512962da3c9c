"""Equally spaced points of face-anchored families of convex sets.

A family here is n+1 convex sets A^1..A^{n+1} in an n-simplex S with the
i-th maximal face S^i inside A^i.  When the union misses part of S there is
exactly one point of S at a common positive distance eps0 from every A^i; when
the union covers S, eps0 is zero and the sets share a point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from facecover import grid as _grid
from facecover.bodies import CONTAIN_TOL, ConvexBody, EpsilonHull, face_containment_gap
from facecover.errors import ContainmentViolated, InvalidFamily
from facecover.feasibility import (
    BISECTION_RTOL,
    FEAS_TOL,
    MAX_ITER,
    Status,
    intersect,
    min_max_distance,
)
from facecover.simplex import Simplex


class HFamily:
    """n+1 bodies with face i contained in body i (1-based, as for faces).

    ``face_gaps[i-1]`` is the largest distance from a vertex of face i to
    body i and ``face_check[i-1]`` says whether it is within ``tol``;
    construction fails unless every check passes.  Whether the union
    covers S is not stored: ask :func:`is_hfamily`.
    """

    def __init__(self, ambient: Simplex, bodies, tol: float = CONTAIN_TOL):
        bodies = list(bodies)
        if len(bodies) != ambient.dim + 1:
            raise InvalidFamily(
                f"need exactly {ambient.dim + 1} bodies for a {ambient.dim}-simplex, got {len(bodies)}"
            )
        for k, body in enumerate(bodies, start=1):
            if not isinstance(body, ConvexBody):
                raise InvalidFamily(f"body {k} is not a ConvexBody")
            if body.dim != ambient.dim:
                raise InvalidFamily(f"body {k} has dimension {body.dim}, expected {ambient.dim}")
        gaps = tuple(face_containment_gap(f, b) for f, b in zip(ambient.faces(), bodies))
        for k, gap in enumerate(gaps, start=1):
            if gap > tol:
                raise InvalidFamily(f"face {k} is not contained in body {k} (gap {gap:.3g})")
        self.ambient = ambient
        self.bodies = tuple(bodies)
        self.face_gaps = gaps
        self.face_check = tuple(gap <= tol for gap in gaps)

    def __len__(self):
        return len(self.bodies)

    def __repr__(self):
        return f"HFamily(n={self.ambient.dim}, bodies={list(self.bodies)!r})"


@dataclass
class EquispaceResult:
    eps0: float
    v: np.ndarray
    distances: np.ndarray
    covering: bool
    diagnostics: dict = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return self.diagnostics.get("iterations", 0)


def default_tol(ambient: Simplex) -> float:
    return BISECTION_RTOL * ambient.diameter


def refine_equispaced(bodies, ambient: Simplex, v, eps, max_steps: int = 30, tol: float = 1e-14):
    """Newton iteration on d_i(v) = e for all i, started from ``(v, eps)``.

    Away from the bodies each distance is differentiable with unit gradient
    (v - p_i) / d_i, giving a square (n+1) x (n+1) system in (v, e).
    Returns ``(v, e)`` or ``None`` when the iteration leaves S, hits a body
    or stalls.
    """
    v = np.array(v, dtype=float)
    e = float(eps)
    for _ in range(max_steps):
        proj = np.array([b.project(v) for b in bodies])
        rel = v - proj
        d = np.linalg.norm(rel, axis=1)
        if np.any(d <= 0):
            return None
        resid = d - e
        if np.max(np.abs(resid)) <= tol * max(1.0, e):
            return v, float(d.mean())
        jac = np.hstack([rel / d[:, None], -np.ones((len(bodies), 1))])
        try:
            step = np.linalg.solve(jac, -resid)
        except np.linalg.LinAlgError:
            return None
        v = v + step[:-1]
        e = e + step[-1]
        if not ambient.contains(v):
            return None
    return None


def solve(fam: HFamily, tol: float | None = None, feas_tol: float = FEAS_TOL,
          max_iter: int = MAX_ITER) -> EquispaceResult:
    """eps0 and the equally spaced point v.

    When ``eps0 <= tol`` the family is reported as covering and ``v`` is a
    common point of all bodies (up to ``feas_tol``); no uniqueness is implied
    in that case.
    """
    if tol is None:
        tol = default_tol(fam.ambient)
    res = min_max_distance(fam.bodies, fam.ambient, tol=tol, feas_tol=feas_tol, max_iter=max_iter)
    eps0, v, refined = res.value, res.point, False
    if eps0 > tol:
        polished = refine_equispaced(fam.bodies, fam.ambient, v, eps0)
        # Keep the Newton answer only if it agrees with the bisection bracket.
        if polished is not None and res.lower - tol <= polished[1] <= res.upper + tol:
            v, eps0 = polished
            refined = True
    distances = np.array([body.distance(v) for body in fam.bodies])
    return EquispaceResult(
        eps0=eps0,
        v=v,
        distances=distances,
        covering=eps0 <= tol,
        diagnostics={
            "refined": refined,
            "iterations": res.iterations,
            "bisection_steps": res.steps,
            "lower": res.lower,
            "upper": res.upper,
            "witness_value": res.point_value,
            "history": res.history,
        },
    )


def is_hfamily(fam: HFamily, tol: float | None = None, feas_tol: float = FEAS_TOL,
               max_iter: int = MAX_ITER) -> bool:
    """True when the union of the family misses part of S, i.e. eps0 > tol.

    Decided by one feasibility run on the tol-hulls; falls back to a full
    solve if that run is inconclusive.
    """
    if tol is None:
        tol = default_tol(fam.ambient)
    hulls = [EpsilonHull(body, tol) for body in fam.bodies]
    report = intersect(hulls, fam.ambient, feas_tol=feas_tol, max_iter=max_iter)
    if report.status is Status.FEASIBLE:
        return False
    if report.status is Status.INFEASIBLE:
        return True
    return not solve(fam, tol, feas_tol, max_iter).covering


def supinf_check(fam: HFamily, grid_depth: int):
    """Grid estimate of sup over S of the distance to the nearest body.

    Returns ``(value, argmax)``; the error is at most ``diameter / grid_depth``.
    """
    value, argmax, _ = _grid.grid_maximin(fam.ambient, fam.bodies, grid_depth)
    return value, argmax


@dataclass
class Comparison:
    eps_inner: float
    eps_outer: float
    consistent: bool


def compare(fam_a: HFamily, fam_d: HFamily, tol: float | None = None,
            contain_tol: float = CONTAIN_TOL) -> Comparison:
    """Solve two families with ``A^i`` inside ``D^i`` and compare their eps0.

    Containment is probed with the generators of each ``A^i``.  Enlarging the
    sets can only bring the equally spaced point closer, so ``consistent``
    records ``eps(D) <= eps(A) + 2 tol``.
    """
    if fam_a.ambient != fam_d.ambient:
        raise ContainmentViolated("families live in different simplices")
    if tol is None:
        tol = default_tol(fam_a.ambient)
    for i, (a, d) in enumerate(zip(fam_a.bodies, fam_d.bodies), start=1):
        gap = float(d.distances(a.generators()).max())
        if gap > contain_tol:
            raise ContainmentViolated(
                f"body {i} of the first family is not inside body {i} of the second (gap {gap:.3g})",
                index=i,
                distance=gap,
            )
    eps_a = solve(fam_a, tol).eps0
    eps_d = solve(fam_d, tol).eps0
    return Comparison(eps_a, eps_d, eps_d <= eps_a + 2 * tol)

"""Nonemptiness of intersections of convex bodies inside a simplex.

``intersect`` runs Dykstra's cyclic corrected projections over the bodies
followed by the ambient simplex.  ``min_max_distance`` bisects on the hull
radius eps to find the smallest eps at which the eps-hulls meet, which is the
same number as min over S of the largest body distance.
"""

from __future__ import annotations

import enum
import logging
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from facecover.bodies import EpsilonHull
from facecover.errors import BisectionStalled, ValidationError
from facecover.simplex import Simplex, as_point

log = logging.getLogger(__name__)

FEAS_TOL = 1e-7
MAX_ITER = 200_000
STALL_RTOL = 1e-12
BISECTION_RTOL = 1e-6
# Cutting-plane certificate: checked every CUT_EVERY cycles over a pool of
# the last CUT_POOL points.
CUT_EVERY = 256
CUT_POOL = 1024
CUT_ROUNDS = 20
REFINE_ROUNDS = 500


class Status(str, enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNDECIDED = "undecided"


@dataclass
class FeasibilityReport:
    status: Status
    witness: np.ndarray
    residual: float
    iterations: int

    @property
    def feasible(self) -> bool:
        return self.status is Status.FEASIBLE


def max_distance(bodies, u) -> float:
    return max(body.distance(u) for body in bodies)


class _CutModel:
    """Piecewise-linear lower model of u -> max_i d(u, body_i) over S.

    Each distance function is convex with gradient ``(w - P(w)) / d`` at a
    point ``w`` off the body, so ``d(u) >= d(w) + g . (u - w)``.  Minimising
    the largest of these cuts over S is a small LP whose value is a
    certified lower bound.  Cuts are computed once per point and the oldest
    points are dropped beyond ``capacity``.
    """

    def __init__(self, bodies, ambient: Simplex, capacity: int = CUT_POOL):
        self.bodies = bodies
        self.ambient = ambient
        self.blocks = deque(maxlen=capacity)
        # Projections are exact up to rounding of size ``err``; that tilts
        # the gradient by about err / d, so each cut is lowered by
        # err * reach / d and points closer than ``floor`` give no cut.
        scale = 1.0 + float(np.abs(ambient.vertices).max())
        self._err = 4e-15 * scale * (ambient.diameter + scale)
        self._floor = 1e-9 * scale
        n = ambient.dim
        sn, so = ambient.halfspaces
        self._box = (np.hstack([sn, np.zeros((n + 1, 1))]), so)

    def add(self, w):
        rows, rhs = [], []
        for body in self.bodies:
            # An eps-hull's distance is max(d_inner - eps, 0): cut the inner
            # distance, whose gradient is known far more precisely.
            eps = 0.0
            while isinstance(body, EpsilonHull):
                eps += body.eps
                body = body.inner
            p = body.project(w)
            d = float(np.linalg.norm(w - p))
            if d <= self._floor:
                continue
            g = (w - p) / d
            rows.append(np.append(g, -1.0))
            rhs.append(g @ w - (d - eps) + self._err / d)
        if rows:
            self.blocks.append((np.array(rows), np.array(rhs)))

    def solve(self):
        """``(bound, argmin)``; ``(0, None)`` while there are no cuts."""
        if not self.blocks:
            return 0.0, None
        n = self.ambient.dim
        a_ub = np.vstack([blk[0] for blk in self.blocks] + [self._box[0]])
        b_ub = np.concatenate([blk[1] for blk in self.blocks] + [self._box[1]])
        c = np.zeros(n + 1)
        c[-1] = 1.0
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * n + [(0, None)],
                      method="highs")
        if res.status != 0:
            return 0.0, None
        return float(res.fun), self.ambient.project(res.x[:n])


def cut_bound(bodies, ambient: Simplex, points):
    """Certified lower bound on min over S of the largest body distance,
    from the gradient cuts at ``points``.  Returns ``(bound, argmin)``."""
    model = _CutModel(list(bodies), ambient, capacity=max(1, len(points)))
    for w in points:
        model.add(as_point(w, ambient.dim))
    return model.solve()


def intersect(bodies, ambient: Simplex, start=None, feas_tol: float = FEAS_TOL,
              max_iter: int = MAX_ITER, stall_rtol: float = STALL_RTOL) -> FeasibilityReport:
    """Look for a point of S lying in every body.

    ``iterations`` counts full Dykstra cycles.  The residual after a cycle is
    the largest body distance of the current iterate, which always lies in S
    because the ambient projection runs last.  A residual that stops moving
    (relative change below ``stall_rtol`` over one cycle, or below the
    rounding floor of the ambient coordinates) while still above ``feas_tol``
    is reported as infeasible; it is then the gap between the
    sets as seen by the iteration.

    Every ``CUT_EVERY`` cycles the recent iterates also feed
    :func:`cut_bound`: a positive bound proves infeasibility, and the LP
    minimiser is accepted as a witness when it lies in every body.  When
    the cut model pins the optimum to within ``feas_tol`` of the threshold
    without deciding it, the run stops early as undecided.
    """
    bodies = list(bodies)
    if not bodies:
        raise ValidationError("need at least one body")
    x = ambient.barycenter.copy() if start is None else as_point(start, ambient.dim)
    if not ambient.contains(x):
        raise ValidationError("start point must lie in the ambient simplex")

    residual = max_distance(bodies, x)
    if residual <= feas_tol:
        return FeasibilityReport(Status.FEASIBLE, x, residual, 0)

    projections = [body.project for body in bodies] + [ambient.project]
    incr = [np.zeros_like(x) for _ in projections]
    # Rounding in the iterates puts a floor under any residual change.
    noise = 64 * np.finfo(float).eps * (ambient.diameter + np.abs(ambient.vertices).max())
    prev = residual
    model = _CutModel(bodies, ambient)
    model.add(x)
    for it in range(1, max_iter + 1):
        for j, proj in enumerate(projections):
            z = x + incr[j]
            x = proj(z)
            incr[j] = z - x
        residual = max_distance(bodies, x)
        if residual <= feas_tol:
            return FeasibilityReport(Status.FEASIBLE, x, residual, it)
        if it > 1 and abs(residual - prev) <= stall_rtol * prev + noise:
            return FeasibilityReport(Status.INFEASIBLE, x, residual, it)
        prev = residual
        if it % CUT_EVERY == 0:
            # Near the threshold Dykstra crawls; a few Kelley rounds on the
            # cut model usually settle the question.
            model.add(x)
            for _ in range(CUT_ROUNDS):
                bound, u = model.solve()
                if bound > feas_tol:
                    return FeasibilityReport(Status.INFEASIBLE, x, residual, it)
                if u is None:
                    break
                r = max_distance(bodies, u)
                if r <= feas_tol:
                    return FeasibilityReport(Status.FEASIBLE, u, r, it)
                if r - bound <= feas_tol:
                    # The optimum is pinned within feas_tol of the threshold:
                    # more cycles cannot settle it.
                    return FeasibilityReport(Status.UNDECIDED, u, r, it)
                model.add(u)
    return FeasibilityReport(Status.UNDECIDED, x, residual, max_iter)


def refine_by_cuts(bodies, ambient: Simplex, seeds, upper: float, tol: float,
                   rounds: int = REFINE_ROUNDS):
    """Kelley's cutting-plane method on u -> max_i d(u, body_i) over S.

    Returns ``(lower_bound, best_point)`` once the certified lower bound is
    within ``tol`` of the best value found (or of ``upper``), or after
    ``rounds`` LPs.
    """
    model = _CutModel(list(bodies), ambient, capacity=rounds + len(seeds))
    best, best_val = None, upper
    for w in seeds:
        w = as_point(w, ambient.dim)
        model.add(w)
        val = max_distance(bodies, w)
        if val <= best_val:
            best, best_val = w, val
    lb = 0.0
    for _ in range(rounds):
        bound, u = model.solve()
        lb = max(lb, bound)
        if u is None:
            break
        val = max_distance(bodies, u)
        if val < best_val:
            best, best_val = u, val
        if best_val - lb < tol:
            break
        model.add(u)
    return lb, best


@dataclass
class MinMaxResult:
    """Outcome of the eps bisection.

    ``value`` is the midpoint of the final bracket ``[lower, upper]``;
    ``point`` is the best witness seen, i.e. the point of S with the smallest
    largest-body distance ``point_value``.
    """

    value: float
    point: np.ndarray
    point_value: float
    lower: float
    upper: float
    steps: int
    iterations: int
    history: list = field(default_factory=list)

    def __iter__(self):
        yield self.value
        yield self.point


def min_max_distance(bodies, ambient: Simplex, start=None, tol: float | None = None,
                     feas_tol: float = FEAS_TOL, max_iter: int = MAX_ITER) -> MinMaxResult:
    """Smallest eps whose eps-hulls of ``bodies`` share a point of S.

    Bisection over ``[0, diameter(S)]`` until the bracket is narrower than
    ``tol`` (default ``1e-6 * diameter``).  Every iterate produced along the
    way is a point of S, so its largest body distance is an upper bound and
    is used to tighten the bracket from above.
    """
    bodies = list(bodies)
    if tol is None:
        tol = BISECTION_RTOL * ambient.diameter
    x0 = ambient.barycenter.copy() if start is None else as_point(start, ambient.dim)

    best = x0
    best_val = max_distance(bodies, x0)
    lo, hi = 0.0, min(ambient.diameter, best_val)
    history = []
    iterations = 0
    steps = 0

    def consider(point):
        nonlocal best, best_val, hi
        val = max_distance(bodies, point)
        if val < best_val:
            best, best_val = point, val
        hi = min(hi, val)

    # eps = 0 first: a covering family should come back with a true common point.
    report = intersect(bodies, ambient, x0, feas_tol, max_iter)
    iterations += report.iterations
    history.append((0.0, report.status))
    consider(report.witness)
    if report.status is Status.UNDECIDED:
        raise BisectionStalled("undecided feasibility at eps = 0", lo, hi, history)

    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        hulls = [EpsilonHull(body, mid) for body in bodies]
        report = intersect(hulls, ambient, x0, feas_tol, max_iter)
        iterations += report.iterations
        steps += 1
        history.append((mid, report.status))
        consider(report.witness)
        if report.status is Status.FEASIBLE:
            hi = min(hi, mid)
        elif report.status is Status.INFEASIBLE:
            lo = mid
        else:
            lb, u = refine_by_cuts(bodies, ambient, [best, report.witness], hi, tol)
            if u is not None:
                consider(u)
            lo = max(lo, lb)
            if hi - lo >= tol and lo < mid < hi:
                raise BisectionStalled(
                    f"undecided feasibility at eps = {mid:.17g} after {report.iterations} cycles",
                    lo, hi, history,
                )
        # A witness can only undercut lo through a misjudged stall; trust the witness.
        lo = min(lo, hi)
        log.debug("bisection step %d: eps=%.12g %s bracket=[%.12g, %.12g]",
                  steps, mid, report.status.value, lo, hi)
    return MinMaxResult(0.5 * (lo + hi), best, best_val, lo, hi, steps, iterations, history)

"""Face covering families: coverage predicates, common equally spaced points
and the Helly-type intersection criterion.

A face covering family is any finite list of convex sets in S where each set
contains some maximal face.  Coverage of S or of its boundary is decided on
the barycentric lattice, so "covered" means "every lattice point lies within
``mesh + tol`` of some set".
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations, permutations
from math import comb

import numpy as np

from facecover import grid as _grid
from facecover.bodies import CONTAIN_TOL, face_containment_gap
from facecover.equispace import HFamily, default_tol, is_hfamily, solve
from facecover.errors import (
    EnumerationCapExceeded,
    HypothesisViolated,
    InvalidFamily,
    ValidationError,
)
from facecover.feasibility import FEAS_TOL, Status, intersect
from facecover.simplex import Simplex

log = logging.getLogger(__name__)

GRID_DEPTH = 128
COVER_TOL = 1e-6
SUBFAMILY_CAP = 1_000_000
# Permutation search for a face assignment is skipped beyond this many faces.
_MAX_MATCHING_FACES = 8


@dataclass
class CoverageReport:
    covered: bool
    value: float
    mesh: float
    witness_uncovered: np.ndarray | None


def _coverage_from_values(nearest, points, mesh, tol):
    j = int(np.argmax(nearest))
    value = float(nearest[j])
    covered = value <= mesh + tol
    return CoverageReport(covered, value, mesh, None if covered else points[j])


def face_assignment(simplex: Simplex, bodies, tol: float = CONTAIN_TOL):
    """A bijection face -> body with face i inside its body, if one exists.

    Returns a tuple ``order`` with ``order[i-1]`` the 0-based body index for
    face i, or ``None``.
    """
    bodies = list(bodies)
    k = simplex.dim + 1
    if len(bodies) != k or k > _MAX_MATCHING_FACES:
        return None
    holds = np.array(
        [[face_containment_gap(f, b) <= tol for b in bodies] for f in simplex.faces()]
    )
    for perm in permutations(range(k)):
        if all(holds[i, perm[i]] for i in range(k)):
            return perm
    return None


def simplex_coverage(simplex: Simplex, bodies, tol: float = COVER_TOL,
                     depth: int = GRID_DEPTH, cross_check: bool = True) -> CoverageReport:
    """Lattice test of whether the union of ``bodies`` covers S.

    For n+1 bodies that can be matched to the faces, the answer is checked
    against the equally-spaced-point solver; on disagreement the solver wins,
    since its resolution does not depend on the mesh.
    """
    bodies = list(bodies)
    g = _grid.grid(simplex, depth)
    nearest = _grid.distance_matrix(g.points, bodies).min(axis=1)
    report = _coverage_from_values(nearest, g.points, g.mesh, tol)
    if cross_check:
        order = face_assignment(simplex, bodies)
        if order is not None:
            fam = HFamily(simplex, [bodies[j] for j in order])
            covered = not is_hfamily(fam)
            if covered != report.covered:
                log.warning("lattice coverage (%s) disagrees with the solver (%s); using the solver",
                            report.covered, covered)
                report.covered = covered
                if covered:
                    report.witness_uncovered = None
    return report


def covers_simplex(simplex: Simplex, bodies, tol: float = COVER_TOL, depth: int = GRID_DEPTH) -> bool:
    return simplex_coverage(simplex, bodies, tol, depth).covered


def _facet_grids(simplex: Simplex, depth: int):
    return [_grid.lattice(f.vertices, depth) for f in simplex.faces()]


def boundary_coverage(simplex: Simplex, bodies, tol: float = COVER_TOL,
                      depth: int = GRID_DEPTH) -> CoverageReport:
    """Lattice test of whether the union of ``bodies`` covers every facet of S.

    Each facet is sampled on its own depth-``depth`` lattice; ``mesh`` is the
    coarsest facet mesh.
    """
    bodies = list(bodies)
    worst = None
    mesh = 0.0
    for fg in _facet_grids(simplex, depth):
        nearest = _grid.distance_matrix(fg.points, bodies).min(axis=1)
        rep = _coverage_from_values(nearest, fg.points, fg.mesh, tol)
        mesh = max(mesh, fg.mesh)
        if worst is None or (worst.covered and not rep.covered) or (
            worst.covered == rep.covered and rep.value > worst.value
        ):
            worst = rep
    worst.mesh = mesh
    return worst


def covers_boundary(simplex: Simplex, bodies, tol: float = COVER_TOL, depth: int = GRID_DEPTH) -> bool:
    return boundary_coverage(simplex, bodies, tol, depth).covered


class FaceCoveringFamily:
    """Indexed sets in S, each meant to contain some maximal face.

    ``assignment`` maps a 1-based face index to a 1-based body index with the
    face inside that body.  Missing entries are filled with the first body
    that contains the face.  ``contained_faces[a-1]`` lists the faces inside
    body ``a``; it may be empty, in which case the family is not a face
    covering in the strict sense (``is_face_covering`` is False) but the
    operations below still run.
    """

    def __init__(self, ambient: Simplex, bodies, assignment=None, tol: float = CONTAIN_TOL):
        bodies = list(bodies)
        if not bodies:
            raise ValidationError("a face covering family needs at least one set")
        for a, body in enumerate(bodies, start=1):
            if body.dim != ambient.dim:
                raise ValidationError(f"set {a} has dimension {body.dim}, expected {ambient.dim}")
        self.ambient = ambient
        self.bodies = tuple(bodies)
        faces = ambient.faces()
        self.contained_faces = tuple(
            tuple(f.index for f in faces if face_containment_gap(f, b) <= tol) for b in bodies
        )
        fixed = {}
        for i, a in dict(assignment or {}).items():
            i, a = int(i), int(a)
            if not 1 <= i <= ambient.dim + 1:
                raise ValidationError(f"assignment face index {i} out of range")
            if not 1 <= a <= len(bodies):
                raise ValidationError(f"assignment set index {a} out of range")
            if i not in self.contained_faces[a - 1]:
                raise InvalidFamily(f"face {i} is not contained in set {a}")
            fixed[i] = a
        for f in faces:
            if f.index not in fixed:
                owner = next(
                    (a for a, cf in enumerate(self.contained_faces, start=1) if f.index in cf), None
                )
                if owner is not None:
                    fixed[f.index] = owner
        self.assignment = dict(sorted(fixed.items()))

    def __len__(self):
        return len(self.bodies)

    @property
    def is_face_covering(self) -> bool:
        return all(self.contained_faces)

    @property
    def assignment_total(self) -> bool:
        return len(self.assignment) == self.ambient.dim + 1


def common_equispaced_point(fam: FaceCoveringFamily, tol: float | None = None) -> np.ndarray:
    """The common equally spaced point of a family with n+2 or more sets.

    Solves the subfamily picked out by the face assignment, then checks every
    other set against the same distance.  Raises ``HypothesisViolated`` for
    the first set (1-based index) that is off by more than ``2 tol``.
    """
    n = fam.ambient.dim
    if len(fam) < n + 2:
        raise ValidationError(f"need at least {n + 2} sets, got {len(fam)}")
    if not fam.assignment_total:
        missing = sorted(set(range(1, n + 2)) - set(fam.assignment))
        raise InvalidFamily(f"faces {missing} are not contained in any set")
    if tol is None:
        tol = default_tol(fam.ambient)
    chosen = [fam.assignment[i] for i in range(1, n + 2)]
    sub = HFamily(fam.ambient, [fam.bodies[a - 1] for a in chosen])
    res = solve(sub, tol)
    if res.covering:
        raise InvalidFamily(f"the assigned subfamily {chosen} covers the simplex")
    for a, body in enumerate(fam.bodies, start=1):
        if a in chosen:
            continue
        d = body.distance(res.v)
        if abs(d - res.eps0) > 2 * tol:
            raise HypothesisViolated(a, d, res.eps0)
    return res.v


@dataclass
class HellyResult:
    intersects: bool
    witness: np.ndarray | None = None
    counterexample: tuple[int, ...] | None = None
    residual: float | None = None


def helly_criterion(fam: FaceCoveringFamily, tol: float = COVER_TOL, depth: int = GRID_DEPTH,
                    cap: int = SUBFAMILY_CAP, feas_tol: float = FEAS_TOL) -> HellyResult:
    """Decide whether the sets share a point.

    Every (n+1)-subfamily that covers the boundary of S must also cover S;
    the first one (in lexicographic order of 1-based indices) that does not
    is returned as a counterexample.  Otherwise the common point is computed
    directly.
    """
    S = fam.ambient
    n = S.dim
    bodies = fam.bodies
    if len(bodies) <= n:
        # Fewer than n+1 faces always share a vertex of S.
        for vert in S.vertices:
            if all(b.distance(vert) <= feas_tol for b in bodies):
                return HellyResult(True, vert.copy(), None, max(b.distance(vert) for b in bodies))
    else:
        count = comb(len(bodies), n + 1)
        if count > cap:
            raise EnumerationCapExceeded(f"{count} subfamilies exceed the cap of {cap}")
        g = _grid.grid(S, depth)
        dist_s = _grid.distance_matrix(g.points, bodies)
        facets = _facet_grids(S, depth)
        dist_f = [_grid.distance_matrix(fg.points, bodies) for fg in facets]
        for subset in combinations(range(len(bodies)), n + 1):
            cols = list(subset)
            boundary = all(
                _coverage_from_values(d[:, cols].min(axis=1), fg.points, fg.mesh, tol).covered
                for d, fg in zip(dist_f, facets)
            )
            if not boundary:
                continue
            whole = _coverage_from_values(dist_s[:, cols].min(axis=1), g.points, g.mesh, tol).covered
            sub = [bodies[j] for j in cols]
            order = face_assignment(S, sub)
            if order is not None:
                solver_says = not is_hfamily(HFamily(S, [sub[j] for j in order]))
                if solver_says != whole:
                    log.warning("lattice coverage of subfamily %s (%s) disagrees with the solver; "
                                "using the solver", [j + 1 for j in cols], whole)
                    whole = solver_says
            if not whole:
                return HellyResult(False, None, tuple(j + 1 for j in cols))

    report = intersect(bodies, S, feas_tol=feas_tol)
    if report.status is Status.FEASIBLE:
        return HellyResult(True, report.witness, None, report.residual)
    log.warning("no counterexample subfamily, but the sets do not meet (%s, residual %.3g); "
                "the family is probably not a face covering", report.status.value, report.residual)
    return HellyResult(False, None, None, report.residual)

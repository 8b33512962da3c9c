"""Deforming faces into a covering family.

Given covering sets C^1..C^{n+1} with S^i inside C^i, the blends
C^i_t = (1 - t) S^i + t C^i grow monotonically in t from the bare faces
(t = 0) to the covers (t = 1).  Below a threshold t0 the blended family leaves
part of S uncovered and has an equally spaced point at distance eps_t; eps_t
is nonincreasing in t and tends to zero as t approaches t0.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from facecover.bodies import CONTAIN_TOL, blend
from facecover.equispace import HFamily, default_tol, is_hfamily, solve
from facecover.errors import FaceCoverError, NotACovering
from facecover.simplex import Simplex

log = logging.getLogger(__name__)

T0_TOL = 1e-6
UNIFORM_SAMPLES = 32
TAIL_SAMPLES = 16


def blend_family(simplex: Simplex, covers, t: float, tol: float = CONTAIN_TOL) -> HFamily:
    covers = list(covers)
    bodies = [blend(simplex.face(i), c, t, tol) for i, c in enumerate(covers, start=1)]
    return HFamily(simplex, bodies, tol)


def find_t0(simplex: Simplex, covers, tol: float = T0_TOL, eps_tol: float | None = None) -> float:
    """Smallest t at which the blended family covers S, to within ``tol``.

    Bisection on "the blend at t is non-covering", which is monotone because
    the blends are nested in t.  ``eps_tol`` is the eps0 threshold below which
    a family counts as covering.
    """
    covers = list(covers)
    if eps_tol is None:
        eps_tol = default_tol(simplex)
    if is_hfamily(blend_family(simplex, covers, 1.0), eps_tol):
        raise NotACovering("the given sets do not cover the simplex")
    lo, hi = 0.0, 1.0
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if is_hfamily(blend_family(simplex, covers, mid), eps_tol):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class HomotopySample:
    t: float
    eps: float
    v: np.ndarray | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class HomotopyCurve:
    samples: list[HomotopySample]
    t0: float
    delta0: float
    dim: int = field(default=0)

    @property
    def ok_samples(self) -> list[HomotopySample]:
        return [s for s in self.samples if s.ok]

    def ts(self) -> np.ndarray:
        return np.array([s.t for s in self.ok_samples])

    def eps(self) -> np.ndarray:
        return np.array([s.eps for s in self.ok_samples])

    def to_csv(self) -> str:
        """``t,eps_t,v1..vn`` rows for the successful samples, 17 significant digits."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "eps_t"] + [f"v{k}" for k in range(1, self.dim + 1)])
        for s in self.ok_samples:
            writer.writerow([f"{x:.17g}" for x in (s.t, s.eps, *s.v)])
        return buf.getvalue()


def default_samples(t0: float, uniform: int = UNIFORM_SAMPLES, tail: int = TAIL_SAMPLES) -> list[float]:
    """``uniform`` evenly spaced values in [0, t0) plus t0 - 2^-k for k = 1..tail."""
    ts = {t0 * k / uniform for k in range(uniform)}
    ts.update(t0 - 2.0 ** -k for k in range(1, tail + 1) if t0 - 2.0 ** -k > 0)
    return sorted(ts)


def epsilon_curve(simplex: Simplex, covers, t_samples=None, t0: float | None = None,
                  tol: float | None = None, t0_tol: float = T0_TOL) -> HomotopyCurve:
    """Solve the blended family at each sample t below t0.

    A sample whose solve fails is kept with ``error`` set and skipped by the
    CSV export; the remaining samples are unaffected.
    """
    covers = list(covers)
    if t0 is None:
        t0 = find_t0(simplex, covers, t0_tol, tol)
    if t_samples is None:
        t_samples = default_samples(t0)
    samples = []
    for t in sorted(set(float(t) for t in t_samples)):
        if t >= t0:
            continue
        try:
            res = solve(blend_family(simplex, covers, t), tol)
            samples.append(HomotopySample(t, res.eps0, res.v))
        except FaceCoverError as exc:
            log.warning("sample t=%.17g failed: %s", t, exc)
            samples.append(HomotopySample(t, math.nan, None, str(exc)))
    good = [s.eps for s in samples if s.ok]
    delta0 = min(good) if good else math.nan
    return HomotopyCurve(samples, t0, delta0, simplex.dim)

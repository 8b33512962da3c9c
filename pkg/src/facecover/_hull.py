"""Exact Euclidean projection onto the convex hull of a finite point set.

The hull is first reduced to its affine span (SVD), so flat point sets such
as simplex faces are handled in their own coordinates.  Inside that span the
nearest point of an exterior query lies in the relative interior of some
simplex of the triangulated boundary; projecting onto the affine span of
every such boundary simplex and keeping the closest candidate with
nonnegative barycentric weights is therefore exact.  Queries are batched so
that whole grids can be evaluated at once.
"""

from itertools import combinations

import numpy as np
from scipy.spatial import ConvexHull

_RANK_RTOL = 1e-10
_WEIGHT_TOL = 1e-12
_CHUNK = 4096


class HullProjector:
    def __init__(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("need a nonempty (m, n) array of points")
        self.points = pts
        self.dim = pts.shape[1]
        self.anchor = pts[0].copy()
        centered = pts - self.anchor
        scale = max(np.abs(centered).max(), np.abs(pts).max(), 1.0)
        if pts.shape[0] > 1:
            _, sing, vt = np.linalg.svd(centered, full_matrices=False)
            rank = int(np.sum(sing > _RANK_RTOL * scale))
        else:
            rank, vt = 0, np.zeros((0, self.dim))
        self.rank = rank
        self.basis = vt[:rank]
        local = centered @ self.basis.T
        self._local = local

        if rank == 1:
            self._lo = local[:, 0].min()
            self._hi = local[:, 0].max()
        elif rank >= 2:
            hull = ConvexHull(local)
            self._equations = hull.equations
            self._inside_tol = 1e-13 * scale
            faces = set()
            for simplex in hull.simplices:
                idx = tuple(sorted(int(i) for i in simplex))
                for size in range(1, len(idx) + 1):
                    faces.update(combinations(idx, size))
            self._candidates = self._build_candidates(local, sorted(faces))

    @staticmethod
    def _build_candidates(local, faces):
        # For boundary simplex c with origin o and edge matrix E, the affine
        # coefficients of x are (x - o) @ pinv(E) and the projection onto its
        # affine span is o + (x - o) @ pinv(E) @ E.  Stacking every simplex
        # (zero-padded to a common width) turns both into single products.
        rank = local.shape[1]
        count = len(faces)
        origins = np.empty((count, rank))
        pinv = np.zeros((count, rank, rank))
        maps = np.zeros((count, rank, rank))
        for c, face in enumerate(faces):
            origins[c] = local[face[0]]
            if len(face) > 1:
                e = local[list(face[1:])] - origins[c]
                p = np.linalg.pinv(e)
                pinv[c, :, : len(face) - 1] = p
                maps[c] = p @ e
        coef_mat = pinv.transpose(1, 0, 2).reshape(rank, count * rank)
        coef_shift = np.einsum("ck,ckr->cr", origins, pinv)
        proj_mat = maps.transpose(1, 0, 2).reshape(rank, count * rank)
        proj_shift = origins - np.einsum("ck,ckj->cj", origins, maps)
        return count, coef_mat, coef_shift, proj_mat, proj_shift

    def _nearest_candidate(self, x):
        count, coef_mat, coef_shift, proj_mat, proj_shift = self._candidates
        n, rank = x.shape
        coef = (x @ coef_mat).reshape(n, count, rank) - coef_shift
        cand = (x @ proj_mat).reshape(n, count, rank) + proj_shift
        diff = x[:, None, :] - cand
        d2 = np.einsum("nck,nck->nc", diff, diff)
        d2[(coef.min(axis=2) < -_WEIGHT_TOL) | (coef.sum(axis=2) > 1.0 + _WEIGHT_TOL)] = np.inf
        return cand[np.arange(n), np.argmin(d2, axis=1)]

    def _project_local(self, x):
        """Nearest hull points for local coordinates ``x`` of shape (N, rank)."""
        eq = self._equations
        inside = np.max(x @ eq[:, :-1].T + eq[:, -1], axis=1) <= self._inside_tol
        best = x.copy()
        out = ~inside
        if out.any():
            best[out] = self._nearest_candidate(x[out])
        return best

    def _project_local_one(self, x):
        eq = self._equations
        if np.max(eq[:, :-1] @ x + eq[:, -1]) <= self._inside_tol:
            return x
        return self._nearest_candidate(x[None, :])[0]

    def project_one(self, u: np.ndarray) -> np.ndarray:
        """Nearest hull point for a single (dim,) float array."""
        if self.rank == 0:
            return self.anchor.copy()
        local = self.basis @ (u - self.anchor)
        if self.rank == 1:
            local = np.clip(local, self._lo, self._hi)
        else:
            local = self._project_local_one(local)
        return self.anchor + local @ self.basis

    def project(self, u):
        """Nearest hull points for an (N, dim) or (dim,) array."""
        u = np.asarray(u, dtype=float)
        if u.ndim == 1:
            if u.shape[0] != self.dim:
                raise ValueError(f"expected a point of dimension {self.dim}, got {u.shape[0]}")
            return self.project_one(u)
        pts = u
        if pts.shape[1] != self.dim:
            raise ValueError(f"expected points of dimension {self.dim}, got {pts.shape[1]}")
        out = np.empty_like(pts)
        for start in range(0, pts.shape[0], _CHUNK):
            block = pts[start:start + _CHUNK]
            rel = block - self.anchor
            if self.rank == 0:
                out[start:start + _CHUNK] = self.anchor
                continue
            local = rel @ self.basis.T
            if self.rank == 1:
                local = np.clip(local, self._lo, self._hi)
            else:
                local = self._project_local(local)
            out[start:start + _CHUNK] = self.anchor + local @ self.basis
        return out

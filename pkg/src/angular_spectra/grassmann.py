"""Subspaces of R^d, principal angles and the Grassmannian metric.

A :class:`Subspace` is stored through an orthonormal basis.  All angle
computations combine cosines (singular values of ``V^T W``) with sines
(singular values of the residual ``W - V V^T W``) so that both tiny and
nearly orthogonal angles keep full relative accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, RankDeficient

ORTHO_TOL = 1e-12
RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Subspace:
    """An ``s``-dimensional subspace of ``R^d`` with orthonormal ``basis`` (d x s)."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=float, copy=True)
        if b.ndim == 1:
            b = b[:, None]
        if b.ndim != 2 or b.shape[1] < 1 or b.shape[1] > b.shape[0]:
            raise DimensionMismatch(f"basis must be d x s with 1 <= s <= d, got {b.shape}")
        err = np.abs(b.T @ b - np.eye(b.shape[1])).max()
        if err > ORTHO_TOL:
            raise ValueError(f"basis is not orthonormal (error {err:.2e}); use orthonormalize()")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim_ambient(self) -> int:
        return self.basis.shape[0]

    @property
    def dim_sub(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def contains(self, x, tol=1e-10) -> bool:
        x = np.asarray(x, dtype=float)
        r = x - self.basis @ (self.basis.T @ x)
        return bool(np.linalg.norm(r) <= tol * max(np.linalg.norm(x), 1.0))

    def __repr__(self):
        return f"Subspace(d={self.dim_ambient}, s={self.dim_sub})"


def orthonormalize(raw_basis) -> Subspace:
    """Return the column span of ``raw_basis`` as a :class:`Subspace`.

    Raises:
        RankDeficient: if the smallest singular value is below
            ``1e-10`` times the largest.
    """
    a = np.asarray(raw_basis, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] <= RANK_TOL * sv[0]:
        raise RankDeficient(f"columns are numerically dependent (singular values {sv})")
    q, _ = np.linalg.qr(a)
    # one re-orthogonalization pass pushes the Gram error to roundoff level
    q, _ = np.linalg.qr(q)
    return Subspace(q)


def span(*vectors) -> Subspace:
    """Convenience wrapper: ``span(v1, v2, ...)``."""
    return orthonormalize(np.column_stack([np.asarray(v, dtype=float) for v in vectors]))


def _check_pair(V: Subspace, W: Subspace):
    if V.dim_ambient != W.dim_ambient or V.dim_sub != W.dim_sub:
        raise DimensionMismatch(
            f"subspaces differ in shape: ({V.dim_ambient},{V.dim_sub}) vs ({W.dim_ambient},{W.dim_sub})"
        )


def principal_angles(V: Subspace, W: Subspace) -> np.ndarray:
    """Principal angles ``phi_1 <= ... <= phi_s`` between ``V`` and ``W`` in radians."""
    _check_pair(V, W)
    m = V.basis.T @ W.basis
    cos = np.clip(np.linalg.svd(m, compute_uv=False), 0.0, 1.0)  # descending
    resid = W.basis - V.basis @ m
    sin = np.clip(np.linalg.svd(resid, compute_uv=False), 0.0, 1.0)[::-1]  # ascending
    # arccos is ill-conditioned near cos = 1; switch to arcsin there.
    return np.where(cos ** 2 >= 0.5, np.arcsin(sin), np.arccos(cos))


def max_angle(V: Subspace, W: Subspace) -> float:
    """Largest principal angle ``angle(V, W)`` in ``[0, pi/2]``."""
    _check_pair(V, W)
    return float(_max_angle_bases(V.basis, W.basis))


def _max_angle_bases(vb: np.ndarray, wb: np.ndarray) -> float:
    m = vb.T @ wb
    cos_min = np.linalg.svd(m, compute_uv=False)[-1]
    sin_max = np.linalg.svd(wb - vb @ m, compute_uv=False)[0]
    return float(np.arctan2(sin_max, cos_min))


def grassmann_distance(V: Subspace, W: Subspace) -> float:
    """Metric ``d(V, W) = sin(angle(V, W))`` on ``G(s, d)``."""
    return float(np.sin(max_angle(V, W)))


def vector_line_angle(v, w) -> float:
    """Angle between the lines ``span(v)`` and ``span(w)``, orientation ignored."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    v = v / np.linalg.norm(v)
    w = w / np.linalg.norm(w)
    c = v @ w
    return float(np.arctan2(np.linalg.norm(w - c * v), abs(c)))


def batched_max_angle(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Max principal angle for stacks of orthonormal bases, shape (B, d, s)."""
    m = np.swapaxes(X, -1, -2) @ Y
    if X.shape[-1] == 1:
        c = np.abs(m[..., 0, 0])
        s = np.linalg.norm(Y[..., 0] - X[..., 0] * m[..., 0, :1], axis=-1)
        return np.arctan2(s, c)
    cos_min = np.linalg.svd(m, compute_uv=False)[..., -1]
    sin_max = np.linalg.svd(Y - X @ m, compute_uv=False)[..., 0]
    return np.arctan2(sin_max, cos_min)


def random_subspace(d: int, s: int, rng: np.random.Generator) -> Subspace:
    return orthonormalize(rng.standard_normal((d, s)))


def direct_sum(*parts: Subspace) -> Subspace:
    return orthonormalize(np.hstack([p.basis for p in parts]))

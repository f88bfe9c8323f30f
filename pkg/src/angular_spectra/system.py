"""Linear nonautonomous systems ``u_{n+1} = A_n u_n`` and angle averages.

Subspaces are pushed forward with a QR re-orthonormalization at every
step; only spans matter for angles, so this is exact for our purposes and
never overflows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np
from numba import njit

from .errors import DimensionMismatch, OutOfRange, SingularMatrix
from .grassmann import Subspace, orthonormalize

INVERTIBILITY_TOL = 1e-12
CHUNK = 4096

MatrixRule = Callable[[int], np.ndarray]
BlockRule = Callable[[int, int], np.ndarray]


@dataclass(frozen=True)
class SystemSpec:
    """A deterministic rule ``n -> A_n`` for ``n >= 0``.

    ``block(start, stop)`` may be supplied to return the stacked matrices
    of a range at once; otherwise ``rule`` is called per index.  ``length``
    is the number of available matrices for systems backed by stored data
    (``None`` means unbounded).
    """

    dim: int
    rule: MatrixRule
    label: str = ""
    length: Optional[int] = None
    block: Optional[BlockRule] = field(default=None, repr=False)
    constant: Optional[np.ndarray] = field(default=None, repr=False)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def autonomous(cls, A, label="autonomous") -> "SystemSpec":
        A = np.array(A, dtype=float)
        A.setflags(write=False)
        return cls(
            dim=A.shape[0],
            rule=lambda n: A,
            label=label,
            block=lambda a, b: np.broadcast_to(A, (b - a,) + A.shape),
            constant=A,
        )

    @classmethod
    def from_matrices(cls, mats, label="stored") -> "SystemSpec":
        mats = np.array(mats, dtype=float)
        mats.setflags(write=False)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise DimensionMismatch(f"expected (n, d, d) matrix stack, got {mats.shape}")
        return cls(
            dim=mats.shape[1],
            rule=lambda n: mats[n],
            label=label,
            length=mats.shape[0],
            block=lambda a, b: mats[a:b],
        )

    # -- access ---------------------------------------------------------------

    def matrices(self, start: int, stop: int, check: bool = True) -> np.ndarray:
        """Stack of ``A_start, ..., A_{stop-1}``, invertibility checked."""
        if start < 0 or stop < start:
            raise OutOfRange(f"bad index range [{start}, {stop})")
        if self.length is not None and stop > self.length:
            raise OutOfRange(f"{self.label}: index {stop - 1} beyond stored length {self.length}")
        if self.block is not None:
            mats = np.asarray(self.block(start, stop), dtype=float)
        else:
            mats = np.array([self.rule(n) for n in range(start, stop)], dtype=float).reshape(
                stop - start, self.dim, self.dim
            )
        if check and len(mats):
            if self.constant is not None:
                _check_invertible(self.constant[None], start)
            else:
                _check_invertible(mats, start)
        return mats

    def matrix_at(self, n: int) -> np.ndarray:
        return self.matrices(n, n + 1)[0]

    # -- transformations ------------------------------------------------------

    def shifted(self, k: int) -> "SystemSpec":
        """System ``n -> A_{n+k}``."""
        if k == 0:
            return self
        length = None if self.length is None else self.length - k
        blk = self.block
        return SystemSpec(
            dim=self.dim,
            rule=lambda n: self.rule(n + k),
            label=f"{self.label}[+{k}]",
            length=length,
            block=None if blk is None else (lambda a, b: blk(a + k, b + k)),
            constant=self.constant,
        )

    def scaled(self, c) -> "SystemSpec":
        """System ``n -> c_n A_n`` for a scalar or a rule ``n -> c_n``."""
        cf = c if callable(c) else (lambda n, c=float(c): c)

        def block(a, b):
            cs = np.array([cf(n) for n in range(a, b)], dtype=float)
            return cs[:, None, None] * self.matrices(a, b, check=False)

        const = None if (callable(c) or self.constant is None) else float(c) * self.constant
        return SystemSpec(self.dim, lambda n: cf(n) * self.rule(n), f"{c}*{self.label}", self.length, block, const)

    def conjugated(self, Q) -> "SystemSpec":
        """Kinematic similarity with a constant matrix: ``n -> Q A_n Q^{-1}``."""
        Q = np.asarray(Q, dtype=float)
        Qi = np.linalg.inv(Q)

        def block(a, b):
            return Q @ self.matrices(a, b, check=False) @ Qi

        const = None if self.constant is None else Q @ self.constant @ Qi
        return SystemSpec(self.dim, lambda n: Q @ self.rule(n) @ Qi, f"Q{self.label}Q^-1", self.length, block, const)


def _check_invertible(mats: np.ndarray, start: int):
    sv = np.linalg.svd(mats, compute_uv=False)
    bad = sv[:, -1] <= INVERTIBILITY_TOL * sv[:, 0]
    if bad.any():
        n = start + int(np.argmax(bad))
        raise SingularMatrix(f"A_{n} is numerically singular")


@dataclass(frozen=True)
class PerturbedSystem(SystemSpec):
    """``A_n + E_n``; keeps the perturbation rule for l1 diagnostics."""

    perturbation: Optional[MatrixRule] = field(default=None, repr=False)

    def l1_norm(self, N: int) -> float:
        """Partial l1 norm ``sum_{n<N} ||E_n||_2``."""
        return float(sum(np.linalg.norm(self.perturbation(n), 2) for n in range(N)))


def perturb_l1(base: SystemSpec, perturbation: MatrixRule) -> PerturbedSystem:
    def rule(n):
        return base.rule(n) + np.asarray(perturbation(n), dtype=float)

    def block(a, b):
        return base.matrices(a, b, check=False) + np.array([perturbation(n) for n in range(a, b)], dtype=float)

    return PerturbedSystem(
        dim=base.dim,
        rule=rule,
        label=f"{base.label}+E",
        length=base.length,
        block=block,
        perturbation=perturbation,
    )


# -- propagation ---------------------------------------------------------------


@dataclass(frozen=True)
class PropagatedFrame:
    step: int
    frame: Subspace
    log_scale: float


@dataclass(frozen=True, eq=False)
class AngleSeries:
    """``values[j-1] = angle(Phi(j-1,0) V, Phi(j,0) V)`` for ``j = 1..N``."""

    values: np.ndarray
    start_space: Optional[Subspace] = None

    def __len__(self):
        return len(self.values)

    def running_mean(self) -> np.ndarray:
        """All averages ``alpha_1, ..., alpha_N`` at once."""
        return np.cumsum(self.values) / np.arange(1, len(self.values) + 1)


def iterate_frames(sys: SystemSpec, V: Subspace, N: int) -> Iterator[PropagatedFrame]:
    """Yield the orthonormalized frames of ``Phi(n,0) V`` for ``n = 0..N``."""
    X = V.basis
    log_scale = 0.0
    yield PropagatedFrame(0, V, 0.0)
    for c0 in range(0, N, CHUNK):
        for j, A in enumerate(sys.matrices(c0, min(N, c0 + CHUNK))):
            q, r = np.linalg.qr(A @ X)
            log_scale += float(np.sum(np.log(np.abs(np.diag(r)))))
            X = q
            yield PropagatedFrame(c0 + j + 1, Subspace(q), log_scale)


def angle_series_batch(sys: SystemSpec, bases, N: int) -> np.ndarray:
    """Angle series for a batch of start spaces.

    Args:
        bases: orthonormal bases stacked as (B, d, s).
        N: number of steps.

    Returns:
        array (B, N) of successive maximal principal angles.
    """
    X = np.array(bases, dtype=float)
    if X.ndim == 2:
        X = X[None]
    B, d, s = X.shape
    if d != sys.dim:
        raise DimensionMismatch(f"start spaces live in R^{d}, system in R^{sys.dim}")
    if N < 1:
        raise OutOfRange("N must be >= 1")
    out = np.empty((B, N))
    if s == 1:
        x = np.ascontiguousarray(X[:, :, 0])
        for c0 in range(0, N, CHUNK):
            n = min(N, c0 + CHUNK) - c0
            if sys.constant is not None:
                mats = np.broadcast_to(sys.constant, (n,) + sys.constant.shape)
            else:
                mats = sys.matrices(c0, c0 + n)
            out[:, c0 : c0 + n] = _line_series(np.ascontiguousarray(mats), x)
        return out
    for c0 in range(0, N, CHUNK):
        mats = sys.matrices(c0, min(N, c0 + CHUNK))
        for j, A in enumerate(mats):
            Y, _ = np.linalg.qr(A @ X)
            m = np.swapaxes(X, 1, 2) @ Y
            cos_min = np.linalg.svd(m, compute_uv=False)[:, -1]
            sin_max = np.linalg.svd(Y - X @ m, compute_uv=False)[:, 0]
            out[:, c0 + j] = np.arctan2(sin_max, cos_min)
            X = Y
    return out


@njit(cache=True)
def _line_series(mats, x):
    """Angles between successive images of lines; advances ``x`` in place."""
    B, d = x.shape
    n = mats.shape[0]
    out = np.empty((B, n))
    y = np.empty(d)
    for b in range(B):
        for j in range(n):
            A = mats[j]
            nn = 0.0
            for i in range(d):
                acc = 0.0
                for k in range(d):
                    acc += A[i, k] * x[b, k]
                y[i] = acc
                nn += acc * acc
            nn = np.sqrt(nn)
            c = 0.0
            for i in range(d):
                y[i] /= nn
                c += x[b, i] * y[i]
            r = 0.0
            for i in range(d):
                t = y[i] - c * x[b, i]
                r += t * t
                x[b, i] = y[i]
            out[b, j] = np.arctan2(np.sqrt(r), abs(c))
    return out


def propagate(sys: SystemSpec, V: Subspace, N: int) -> AngleSeries:
    """Angle series ``b_1..b_N`` of the start space ``V`` under ``sys``."""
    if V.dim_ambient != sys.dim:
        raise DimensionMismatch(f"V lives in R^{V.dim_ambient}, system in R^{sys.dim}")
    values = angle_series_batch(sys, V.basis[None], N)[0]
    return AngleSeries(values, V)


def alpha(series: AngleSeries, n: int) -> float:
    """Average ``(1/n) sum_{j<=n} b_j``."""
    if not 1 <= n <= len(series):
        raise OutOfRange(f"n={n} outside [1, {len(series)}]")
    return float(np.mean(series.values[:n]))


def alpha_window(series: AngleSeries, n: int, k: int = 0) -> float:
    """Windowed average ``(1/n) sum_{j=k+1}^{k+n} b_j``."""
    if n < 1 or k < 0 or k + n > len(series):
        raise OutOfRange(f"window [{k + 1}, {k + n}] outside [1, {len(series)}]")
    return float(np.mean(series.values[k : k + n]))


def window_means(series: AngleSeries, n: int) -> np.ndarray:
    """``alpha_{n,k}`` for every admissible offset ``k = 0..N-n``."""
    if not 1 <= n <= len(series):
        raise OutOfRange(f"n={n} outside [1, {len(series)}]")
    c = np.concatenate([[0.0], np.cumsum(series.values)])
    return (c[n:] - c[:-n]) / n


def dense_product_span(sys: SystemSpec, V: Subspace, N: int) -> Subspace:
    """Oracle: span of ``Phi(N,0) V`` from the plain product with per-step norm scaling."""
    P = np.eye(sys.dim)
    for A in sys.matrices(0, N):
        P = A @ P
        P /= np.linalg.norm(P, 2)
    return orthonormalize(P @ V.basis)

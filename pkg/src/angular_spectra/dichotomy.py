"""Dichotomy (Sacker-Sell) spectrum, spectral bundles and trace spaces.

The spectrum is approximated by the discrete QR method: along a QR sweep
``A_j Q_j = Q_{j+1} R_j`` the windowed averages of ``log |R_j[i, i]|``
are finite-time growth rates of the i-th Gram-Schmidt direction; their
ranges over all window positions give candidate intervals which are
merged where they overlap.  Growth is only ever handled through logs.

Spectral bundles at a time ``origin`` are intersections of the fast flag
(forward sweep from the past) with the slow flag (backward sweep with
inverses from the future).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .errors import DegenerateWindow, NotSupported, RateAmbiguous
from .grassmann import Subspace, orthonormalize
from .system import CHUNK, SystemSpec

DEFAULT_STRIDE = 1
PROBE_DIVISOR = 4
MERGE_RTOL = 1e-3
AMBIGUITY_RTOL = 1e-3
FRAME_SEED = 0


def generic_frame(d: int) -> np.ndarray:
    """Fixed pseudo-random orthogonal matrix.

    Fallback start for forward sweeps: coordinate frames are special for
    block-diagonal systems, where ``e1`` may never leave an invariant
    plane and its Gram-Schmidt flag misses the fast directions.
    """
    q, r = np.linalg.qr(np.random.default_rng(FRAME_SEED).standard_normal((d, d)))
    return q * np.sign(np.diag(r))


@dataclass(frozen=True)
class SpectralIntervals:
    """Spectral intervals in descending order (index 0 holds the fastest rates).

    ``dims[k]`` is the number of Gram-Schmidt directions whose rates fell
    into interval ``k``; ``gap_points[k]`` lies strictly between interval
    ``k`` and ``k + 1``.
    """

    intervals: tuple
    dims: tuple
    gap_points: tuple
    full_rates: tuple = ()

    def __post_init__(self):
        iv = self.intervals
        for (lo, hi) in iv:
            if not 0 < lo <= hi:
                raise ValueError(f"bad interval [{lo}, {hi}]")
        for (lo1, _), (_, hi2), g in zip(iv, iv[1:], self.gap_points):
            if not hi2 < g < lo1:
                raise ValueError("intervals overlap or gap point misplaced")

    @property
    def count(self) -> int:
        return len(self.intervals)

    def contains(self, rate: float, tol: float = 0.0) -> bool:
        return any(lo - tol <= rate <= hi + tol for lo, hi in self.intervals)

    def scaled(self, c: float) -> "SpectralIntervals":
        c = abs(c)
        return SpectralIntervals(
            tuple((c * lo, c * hi) for lo, hi in self.intervals),
            self.dims,
            tuple(c * g for g in self.gap_points),
            tuple(c * r for r in self.full_rates),
        )

    def to_dict(self):
        return {
            "intervals": [list(map(float, iv)) for iv in self.intervals],
            "dims": list(self.dims),
            "gap_points": [float(g) for g in self.gap_points],
        }


def qr_sweep(sys: SystemSpec, start: int, stop: int, Q0=None, backward: bool = False):
    """Discrete QR method over ``[start, stop)``.

    Forward: ``A_j Q_j = Q_{j+1} R_j`` for ``j = start..stop-1``.
    Backward: ``A_j^{-1} Q_{j+1} = Q_j R_j`` for ``j = stop-1..start``.

    Returns:
        (logdiag, Q) with ``logdiag`` of shape (stop - start, d) in time
        order and the final orthogonal factor ``Q``.
    """
    d = sys.dim
    Q = np.eye(d) if Q0 is None else np.array(Q0, dtype=float)
    L = stop - start
    logdiag = np.empty((L, d))
    chunks = [(a, min(stop, a + CHUNK)) for a in range(start, stop, CHUNK)]
    if backward:
        chunks = chunks[::-1]
    for a, b in chunks:
        mats = sys.matrices(a, b)
        if backward:
            inv = np.linalg.inv(mats)
            for j in range(b - a - 1, -1, -1):
                Q, R = np.linalg.qr(inv[j] @ Q)
                Q, R = _fix_signs(Q, R)
                logdiag[a - start + j] = np.log(np.diag(R))
        else:
            for j in range(b - a):
                Q, R = np.linalg.qr(mats[j] @ Q)
                Q, R = _fix_signs(Q, R)
                logdiag[a - start + j] = np.log(np.diag(R))
    return logdiag, Q


def _fix_signs(Q, R):
    s = np.sign(np.diag(R))
    s[s == 0] = 1.0
    return Q * s, R * s[:, None]


def window_rates(logdiag: np.ndarray, window: int, stride: int = 1) -> np.ndarray:
    """Rates ``exp(mean log|R_ii|)`` for windows ``[m, m + window)``, shape (n_windows, d)."""
    L = logdiag.shape[0]
    if window > L:
        raise DegenerateWindow(f"window {window} longer than data {L}")
    c = np.vstack([np.zeros((1, logdiag.shape[1])), np.cumsum(logdiag, axis=0)])
    starts = np.arange(0, L - window + 1, stride)
    return np.exp((c[starts + window] - c[starts]) / window)


def approx_spectrum(
    sys: SystemSpec,
    N: int,
    window: Optional[int] = None,
    stride: int = DEFAULT_STRIDE,
    start: int = 0,
    skip: int = 0,
    merge_rtol: float = MERGE_RTOL,
    probe: Optional[int] = PROBE_DIVISOR,
) -> SpectralIntervals:
    """Approximate the dichotomy spectrum from data on ``[start, start + N)``.

    Each QR direction contributes the range of its windowed rates.  The
    default window is half the usable horizon.  A gap between neighbouring
    directions is only accepted if it persists for windows ``probe`` times
    shorter as well; a separation that needs long averaging to show up means
    a dichotomy constant too large to certify on this horizon.  ``probe=None``
    disables the check.  ``skip`` leading steps are excluded from the windows.
    """
    usable = N - skip
    if window is None:
        window = usable // 2
    if window < sys.dim:
        raise DegenerateWindow(f"window {window} shorter than dimension {sys.dim}")
    if window > usable:
        raise DegenerateWindow(f"window {window} longer than usable horizon {usable}")
    logdiag, _ = qr_sweep(sys, start, start + N)
    ld = logdiag[skip:]
    rates = window_rates(ld, window, stride)
    full = tuple(float(r) for r in np.exp(ld.mean(axis=0)))
    short = None
    if probe and window // probe >= sys.dim:
        short = window_rates(ld, window // probe, stride)
    return intervals_from_rates(rates, merge_rtol, full, short)


def intervals_from_rates(rates: np.ndarray, merge_rtol: float = MERGE_RTOL, full_rates=(), probe_rates=None) -> SpectralIntervals:
    """Merge per-direction candidate intervals ``[min_m r_i, max_m r_i]``.

    Directions are grouped in descending order; a new group starts only if
    the gap exceeds ``merge_rtol`` and, when ``probe_rates`` are given, the
    probe ranges of the two sides do not overlap either.
    """
    lo, hi = rates.min(axis=0), rates.max(axis=0)
    if probe_rates is None:
        plo, phi = lo, hi
    else:
        plo, phi = probe_rates.min(axis=0), probe_rates.max(axis=0)
    order = np.argsort(-(lo + hi), kind="stable")
    groups: list = []
    for i in order:
        if groups:
            g = groups[-1]
            glo = min(lo[j] for j in g)
            gplo = min(plo[j] for j in g)
            if hi[i] * (1.0 + merge_rtol) >= glo or phi[i] >= gplo:
                g.append(i)
                continue
        groups.append([i])
    merged = tuple((float(min(lo[j] for j in g)), float(max(hi[j] for j in g))) for g in groups)
    dims = tuple(len(g) for g in groups)
    gaps = tuple(float(np.sqrt(merged[k][0] * merged[k + 1][1])) for k in range(len(merged) - 1))
    return SpectralIntervals(merged, dims, gaps, tuple(full_rates))


# -- spectral bundles ----------------------------------------------------------


def qr_frames(sys: SystemSpec, start: int, stop: int, Q0=None, backward: bool = False, with_logdiag: bool = False):
    """Orthogonal QR factors at every time in ``[start, stop]``, shape (stop - start + 1, d, d).

    Forward: entry ``j`` is the frame after sweeping ``[start, start + j)``.
    Backward: entry ``j`` is the frame at time ``start + j`` of the sweep
    coming down from ``stop``.  ``with_logdiag`` also returns the forward
    ``log |diag R|`` history.
    """
    d = sys.dim
    Q = np.eye(d) if Q0 is None else np.array(Q0, dtype=float)
    L = stop - start
    out = np.empty((L + 1, d, d))
    logd = np.empty((L, d))
    if backward:
        out[L] = Q
        for a in range(stop, start, -CHUNK):
            b0 = max(start, a - CHUNK)
            inv = np.linalg.inv(sys.matrices(b0, a))
            for j in range(a - b0 - 1, -1, -1):
                Q, R = _fix_signs(*np.linalg.qr(inv[j] @ Q))
                out[b0 - start + j] = Q
    else:
        out[0] = Q
        for a in range(start, stop, CHUNK):
            mats = sys.matrices(a, min(stop, a + CHUNK))
            for j in range(len(mats)):
                Q, R = _fix_signs(*np.linalg.qr(mats[j] @ Q))
                out[a - start + j + 1] = Q
                logd[a - start + j] = np.log(np.diag(R))
    return (out, logd) if with_logdiag else out


def _flag_is_ordered(logd: np.ndarray, dims) -> bool:
    """True if the Gram-Schmidt columns grow in the order of the spectral groups."""
    r = logd[len(logd) // 2 :].mean(axis=0)
    edges = np.cumsum(dims)[:-1]
    return all(r[:e].min() > r[e:].max() for e in edges)


@dataclass(frozen=True, eq=False)
class BundleSet:
    """Spectral bundles, fastest first.

    ``fields[k]`` holds orthonormal bases of ``W^k_n`` for the analysis
    times ``n = origin, ..., origin + N`` (shape (N + 1, d, dim_k)); the
    bundles at the origin are ``fields[k][0]``.
    """

    bundles: tuple  # of (k, Subspace)
    spectrum: SpectralIntervals | None = None
    fields: tuple = field(default=(), repr=False)
    origin: int = 0

    @property
    def dims(self) -> tuple:
        return tuple(W.dim_sub for _, W in self.bundles)

    @property
    def dim(self) -> int:
        return self.bundles[0][1].dim_ambient

    @property
    def horizon(self) -> int:
        return len(self.fields[0]) - 1 if self.fields else 0

    def subspace(self, k: int) -> Subspace:
        return self.bundles[k][1]

    def stacked(self) -> np.ndarray:
        return np.hstack([W.basis for _, W in self.bundles])

    def transversality(self) -> float:
        """Smallest singular value of the stacked bundle bases."""
        return float(np.linalg.svd(self.stacked(), compute_uv=False)[-1])

    @classmethod
    def constant(cls, bases, spectrum=None, N: int = 0) -> "BundleSet":
        """Time-independent bundles (eigenspaces of an autonomous system)."""
        subs = [orthonormalize(b) for b in bases]
        fields = tuple(np.broadcast_to(W.basis, (N + 1,) + W.basis.shape) for W in subs)
        return cls(tuple(enumerate(subs)), spectrum, fields, 0)


def _intersect_flags(F: np.ndarray, S_perp: np.ndarray, dk: int) -> np.ndarray:
    """Batched ``span(F) cap span(S_perp)^perp``; F (T, d, a), S_perp (T, d, d - b)."""
    if S_perp.shape[2] == 0:
        return F
    M = np.swapaxes(S_perp, 1, 2) @ F
    _, _, vt = np.linalg.svd(M)
    basis = F @ np.swapaxes(vt[:, -dk:, :], 1, 2)
    q, _ = np.linalg.qr(basis)
    return q


def spectral_bundles(
    sys: SystemSpec,
    spec: SpectralIntervals,
    N: int,
    origin: int = 0,
    stop: int | None = None,
    check_ambiguity: bool = True,
) -> BundleSet:
    """Spectral bundles along ``[origin, origin + N]``.

    Slow flags come from a backward sweep with inverses that starts at
    ``stop`` (default: end of stored data, else ``origin + N + max(origin, 100)``);
    fast flags from a forward sweep over ``[0, origin + N)``.  Bundle ``k``
    is the intersection of the fast flag spanned by bundles ``0..k`` with
    the slow flag spanned by bundles ``k..``.  Without past data
    (``origin == 0``) the forward sweep starts from the orthogonal
    complement of the slow flag, i.e. from right singular subspaces of
    the transition matrix.
    """
    d = sys.dim
    dims = spec.dims
    if sum(dims) != d:
        raise ValueError(f"bundle dimensions {dims} do not add up to {d}")
    if stop is None:
        stop = sys.length if sys.length is not None else origin + N + max(origin, 100)
    if stop < origin + N:
        raise ValueError("backward sweep must start beyond the analysis window")
    Qb = qr_frames(sys, origin, stop, backward=True)[: N + 1]
    if check_ambiguity and spec.gap_points:
        logb, _ = qr_sweep(sys, origin, stop, backward=True)
        fwd_rates = np.exp(-logb.mean(axis=0))
        for r in fwd_rates:
            for g in spec.gap_points:
                if abs(r - g) <= AMBIGUITY_RTOL * g:
                    raise RateAmbiguous(f"finite-time rate {r:.6g} within 1e-3 of gap point {g:.6g}; increase N")
    if origin > 0:
        # Q_0 = I as usual; a coordinate start that cannot see a fast
        # direction shows up as unordered column rates
        Qf, logd = qr_frames(sys, 0, origin + N, with_logdiag=True)
        if not _flag_is_ordered(logd, dims):
            Qf = qr_frames(sys, 0, origin + N, Q0=generic_frame(d))
        Qf = Qf[origin:]
    else:
        Qf = qr_frames(sys, 0, N, Q0=Qb[0][:, ::-1])
    fields = []
    for k, dk in enumerate(dims):
        a = sum(dims[: k + 1])  # fast flag: bundles 0..k
        b = sum(dims[k:])  # slow flag: bundles k..end
        fields.append(_intersect_flags(Qf[:, :, :a], Qb[:, :, b:], dk))
    bundles = tuple((k, orthonormalize(f[0])) for k, f in enumerate(fields))
    return BundleSet(bundles, spec, tuple(fields), origin)


# -- trace spaces --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TraceFamily:
    """Trace spaces sharing one composition signature.

    ``signature[k]`` is the dimension drawn from bundle ``k``.  Bundles in
    ``fixed`` enter completely; every bundle in ``free`` is two-dimensional
    and contributes the line ``cos(beta) b1 + sin(beta) b2`` with its own
    angle ``beta`` in ``[0, pi)``.
    """

    signature: tuple
    fixed: tuple
    free: tuple
    bundles: BundleSet = field(repr=False)

    @property
    def n_params(self) -> int:
        return len(self.free)

    @property
    def s(self) -> int:
        return sum(self.signature)

    def fixed_basis(self, j: int = 0) -> np.ndarray:
        d = self.bundles.dim
        cols = [self.bundles.fields[k][j] for k in self.fixed]
        return np.hstack(cols) if cols else np.zeros((d, 0))

    def pieces(self, params, j: int = 0) -> np.ndarray:
        """Free direction vectors at time ``j``, shape (B, n_free, d)."""
        params = np.asarray(params, dtype=float).reshape(-1, self.n_params)
        out = np.empty((params.shape[0], self.n_params, self.bundles.dim))
        for i, k in enumerate(self.free):
            P = self.bundles.fields[k][j]
            out[:, i] = np.cos(params[:, i])[:, None] * P[:, 0] + np.sin(params[:, i])[:, None] * P[:, 1]
        return out

    def bases(self, params) -> np.ndarray:
        """Orthonormal bases at the origin for a batch of parameters, shape (B, d, s)."""
        params = np.asarray(params, dtype=float).reshape(-1, self.n_params)
        B = params.shape[0]
        fx = self.fixed_basis(0)
        raw = np.concatenate(
            [np.broadcast_to(fx, (B,) + fx.shape), np.swapaxes(self.pieces(params, 0), 1, 2)], axis=2
        )
        q, _ = np.linalg.qr(raw)
        return q

    def basis(self, params=()) -> np.ndarray:
        return self.bases(np.asarray(params, dtype=float).reshape(1, -1))[0]

    def subspace(self, params=()) -> Subspace:
        return Subspace(self.basis(params))


def trace_spaces(bundles: BundleSet, s: int) -> Iterator[TraceFamily]:
    """Enumerate trace-space families of dimension ``s``."""
    dims = bundles.dims
    if any(dk > 2 for dk in dims):
        raise NotSupported(f"bundle dimensions {dims}: only dimensions 1 and 2 are supported")
    if not 1 <= s <= sum(dims):
        raise ValueError(f"s={s} outside [1, {sum(dims)}]")
    for sig in itertools.product(*[range(dk + 1) for dk in dims]):
        if sum(sig) != s:
            continue
        fixed = tuple(k for k, c in enumerate(sig) if c and c == dims[k])
        free = tuple(k for k, c in enumerate(sig) if c and c < dims[k])
        yield TraceFamily(tuple(sig), fixed, free, bundles)

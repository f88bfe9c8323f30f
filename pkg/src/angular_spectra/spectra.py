"""Finite-time outer angular spectra over trace spaces.

Trace spaces are direct sums of pieces drawn from the spectral bundles.
Pushing such a piece forward naively is unstable whenever a faster bundle
exists (rounding errors grow at the rate ratio), so every propagated piece
is projected back onto the bundle field ``W^k_n`` after each step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .dichotomy import BundleSet, TraceFamily, trace_spaces
from .errors import ConfigError, EmptySet, NonIntegralStepCount, OutOfRange
from .grassmann import batched_max_angle
from .optim import grid_extrema
from .system import CHUNK, SystemSpec, angle_series_batch

COLLAPSE_TOL = 1e-6
MERGE_TOL = 1e-6
GRID_1D = 64
GRID_2D = 8
N_REFINE = 3


# -- result type ---------------------------------------------------------------


@dataclass(frozen=True)
class AngularSpectrumSet:
    """Finite union of points and closed intervals in ``[0, pi/2]``."""

    points: tuple = ()
    intervals: tuple = ()
    provenance: tuple = field(default=(), compare=False)

    @classmethod
    def from_elements(cls, elements, provenance=(), collapse_tol=COLLAPSE_TOL, merge_tol=MERGE_TOL):
        """Build from ``(lo, hi)`` pairs: collapse thin intervals, merge overlaps."""
        els = []
        for lo, hi in elements:
            lo, hi = float(min(lo, hi)), float(max(lo, hi))
            if hi - lo < collapse_tol:
                lo = hi = 0.5 * (lo + hi)
            els.append([lo, hi])
        els.sort()
        merged: list = []
        for lo, hi in els:
            if merged and lo <= merged[-1][1] + merge_tol:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        pts = tuple(lo for lo, hi in merged if hi - lo < collapse_tol)
        ivs = tuple((lo, hi) for lo, hi in merged if hi - lo >= collapse_tol)
        return cls(pts, ivs, tuple(provenance))

    @property
    def elements(self):
        """Points (as degenerate intervals) and intervals, sorted."""
        return sorted([(p, p) for p in self.points] + list(self.intervals))

    def min(self) -> float:
        if not self.elements:
            raise EmptySet("empty spectrum")
        return self.elements[0][0]

    def max(self) -> float:
        if not self.elements:
            raise EmptySet("empty spectrum")
        return max(hi for _, hi in self.elements)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return any(lo - tol <= x <= hi + tol for lo, hi in self.elements)

    def union(self, other: "AngularSpectrumSet") -> "AngularSpectrumSet":
        return AngularSpectrumSet.from_elements(self.elements + other.elements, self.provenance + other.provenance)

    def is_empty(self) -> bool:
        return not self.points and not self.intervals

    def to_dict(self):
        return {
            "points": [float(p) for p in self.points],
            "intervals": [[float(a), float(b)] for a, b in self.intervals],
            "provenance": list(self.provenance),
        }


# -- propagation inside bundles ------------------------------------------------


def family_series(sys: SystemSpec, family: TraceFamily, params, N: int) -> np.ndarray:
    """Angle series of the trace spaces ``family(params)``, shape (B, N).

    Step ``j`` uses ``A_{origin + j}`` where ``origin`` is the time at which
    the bundles were computed.
    """
    bs = family.bundles
    if N > bs.horizon:
        raise OutOfRange(f"N={N} beyond the bundle horizon {bs.horizon}")
    params = _as_params(params, family.n_params)
    B = params.shape[0]
    if not family.free:
        # fixed bundles only: the subspaces are the fields themselves
        Y = np.concatenate([bs.fields[k][: N + 1] for k in family.fixed], axis=2)
        Y, _ = np.linalg.qr(Y)
        ang = batched_max_angle(Y[:-1], Y[1:])
        return np.broadcast_to(ang, (B, N)).copy()
    X = family.pieces(params, 0)  # (B, p, d)
    nfix = sum(bs.dims[k] for k in family.fixed)
    out = np.empty((B, N))
    prev = _frame(family, X, 0, nfix)
    o = bs.origin
    for c0 in range(0, N, CHUNK):
        mats = sys.matrices(o + c0, o + min(N, c0 + CHUNK))
        for jj, A in enumerate(mats):
            j = c0 + jj
            X = X @ A.T
            for i, k in enumerate(family.free):
                E = bs.fields[k][j + 1]
                v = (X[:, i] @ E) @ E.T
                X[:, i] = v / np.linalg.norm(v, axis=1)[:, None]
            cur = _frame(family, X, j + 1, nfix)
            out[:, j] = batched_max_angle(prev, cur)
            prev = cur
    return out


def _as_params(params, p: int) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    if p == 0:
        return np.zeros((params.shape[0] if params.ndim == 2 else 1, 0))
    return params.reshape(-1, p)


def _frame(family: TraceFamily, X: np.ndarray, j: int, nfix: int) -> np.ndarray:
    B = X.shape[0]
    if nfix == 0 and X.shape[1] == 1:
        return np.swapaxes(X, 1, 2)
    fx = family.fixed_basis(j)
    raw = np.concatenate([np.broadcast_to(fx, (B,) + fx.shape), np.swapaxes(X, 1, 2)], axis=2)
    q, _ = np.linalg.qr(raw)
    return q


def family_alpha(sys, family, params, N) -> np.ndarray:
    return family_series(sys, family, params, N).mean(axis=1)


# -- optimization --------------------------------------------------------------


def _optimize_1d(f, grid: int = GRID_1D, n_refine: int = N_REFINE):
    """Global min and max of a pi-periodic function via grid plus golden polish."""
    r = grid_extrema(f, 0.0, np.pi, grid, n_refine)
    return {k: (v, (x,)) for k, (v, x) in r.items()}


def _optimize_2d(f, grid: int = GRID_2D, n_refine: int = N_REFINE):
    b = np.linspace(0.0, np.pi, grid, endpoint=False)
    P = np.array([(x, y) for x in b for y in b])
    vals = f(P)
    res = {}
    for sign, key in ((1.0, "min"), (-1.0, "max")):
        best = None
        for i in np.argsort(sign * vals, kind="stable")[:n_refine]:
            r = minimize(
                lambda p: sign * float(f(np.mod(np.asarray(p)[None], np.pi))[0]),
                P[i],
                method="Nelder-Mead",
                options={"xatol": 1e-7, "fatol": 1e-12, "initial_simplex": P[i] + np.array([[0, 0], [0.2, 0], [0, 0.2]])},
            )
            cand = (float(r.fun), tuple(np.mod(r.x, np.pi)))
            if sign * vals[i] < cand[0]:
                cand = (float(sign * vals[i]), tuple(P[i]))
            if best is None or cand < best:
                best = cand
        res[key] = (sign * best[0], best[1])
    return res


def _multiscale_probe(f, r: dict, grid: int, decades: int, per_decade: int = 4) -> dict:
    """Improve 1D extrema with probes at ``beta_i +- 10^-j`` around every grid node.

    Directions close to an invariant line can have averages that differ
    from the rest of the circle only inside an exponentially thin cone; a
    uniform grid never lands there.
    """
    nodes = np.linspace(0.0, np.pi, grid, endpoint=False)
    offs = 10.0 ** -(np.arange(1, decades * per_decade + 1) / per_decade)
    P = np.mod((nodes[:, None] + np.concatenate([offs, -offs])[None, :]).ravel(), np.pi)
    vals = f(P)
    out = dict(r)
    i, j = int(np.argmin(vals)), int(np.argmax(vals))
    if vals[i] < r["min"][0]:
        out["min"] = (float(vals[i]), (float(P[i]),))
    if vals[j] > r["max"][0]:
        out["max"] = (float(vals[j]), (float(P[j]),))
    return out


def _optimize_local(f, p: int, xtol: float = 1e-8):
    """Single local search per extremum: bounded Brent on [0, pi] or Nelder-Mead from 0.

    Cheaper than the global search and blind to narrow spikes away from the
    basin it starts in.
    """
    res = {}
    for sign, key in ((1.0, "min"), (-1.0, "max")):
        if p == 1:
            r = minimize_scalar(lambda b: sign * float(f(np.array([[b]]))[0]), bounds=(0.0, np.pi),
                                method="bounded", options={"xatol": xtol})
            x = (float(r.x),)
        else:
            r = minimize(lambda q: sign * float(f(np.mod(np.asarray(q)[None], np.pi))[0]), np.zeros(p),
                         method="Nelder-Mead", options={"xatol": xtol, "fatol": 1e-12})
            x = tuple(np.mod(r.x, np.pi))
        res[key] = (sign * float(r.fun), x)
    return res


METHODS = ("global", "local")


def sigma_finite(sys: SystemSpec, bundles: BundleSet, s: int, N: int, grid_1d: int = GRID_1D, grid_2d: int = GRID_2D,
                 n_refine: int = N_REFINE, method: str = "global", decades: int = 0) -> AngularSpectrumSet:
    """Finite-time spectrum ``{alpha_N(V) : V a trace space of dimension s}``.

    ``method="global"`` scans a grid and polishes the best cells,
    ``method="local"`` runs one bounded local search per family and
    extremum.  ``decades > 0`` adds geometric probes down to offsets
    ``10^-decades`` around each 1D grid node.
    """
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}; expected one of {METHODS}")
    elements, prov = [], []
    for fam in trace_spaces(bundles, s):
        f = lambda p, fam=fam: family_alpha(sys, fam, p, N)
        if fam.n_params == 0:
            v = float(f(np.zeros((1, 0)))[0])
            elements.append((v, v))
            prov.append({"signature": list(fam.signature), "value": v})
            continue
        if method == "local":
            r = _optimize_local(f, fam.n_params)
        elif fam.n_params == 1:
            r = _optimize_1d(lambda b: f(np.asarray(b)[:, None]), grid_1d, n_refine)
            if decades:
                r = _multiscale_probe(lambda b: f(np.asarray(b)[:, None]), r, grid_1d, decades)
        elif fam.n_params == 2:
            r = _optimize_2d(f, grid_2d, n_refine)
        else:
            r = _optimize_nd(f, fam.n_params, n_refine)
        elements.append((r["min"][0], r["max"][0]))
        prov.append({"signature": list(fam.signature), "argmin": list(r["min"][1]), "argmax": list(r["max"][1]),
                     "min": r["min"][0], "max": r["max"][0]})
    return AngularSpectrumSet.from_elements(elements, prov)


def _optimize_nd(f, p: int, n_refine: int = N_REFINE, samples: int = 256, seed: int = 0):
    rng = np.random.default_rng(seed)
    P = rng.uniform(0, np.pi, (samples, p))
    vals = f(P)
    res = {}
    for sign, key in ((1.0, "min"), (-1.0, "max")):
        best = None
        for i in np.argsort(sign * vals, kind="stable")[:n_refine]:
            r = minimize(lambda q: sign * float(f(np.mod(np.asarray(q)[None], np.pi))[0]), P[i], method="Nelder-Mead",
                         options={"xatol": 1e-7, "fatol": 1e-12})
            cand = (float(r.fun), tuple(np.mod(r.x, np.pi)))
            if best is None or cand < best:
                best = cand
        res[key] = (sign * best[0], best[1])
    return res


def sigma1_finite(sys, bundles, N, **kw) -> AngularSpectrumSet:
    return sigma_finite(sys, bundles, 1, N, **kw)


def sigma2_finite(sys, bundles, N, **kw) -> AngularSpectrumSet:
    return sigma_finite(sys, bundles, 2, N, **kw)


def grid_values(sys, bundles, s, N, grid: int = 720, grid_2d: int = 72) -> list:
    """Brute-force ``alpha_N`` on a parameter grid per family (``grid`` points, or ``grid_2d`` squared)."""
    out = []
    for fam in trace_spaces(bundles, s):
        if fam.n_params == 0:
            P = np.zeros((1, 0))
        elif fam.n_params == 1:
            P = np.linspace(0, np.pi, grid, endpoint=False)[:, None]
        else:
            g = np.linspace(0, np.pi, grid_2d, endpoint=False)
            P = np.array(np.meshgrid(*([g] * fam.n_params), indexing="ij")).reshape(fam.n_params, -1).T
        out.append((fam, family_alpha(sys, fam, P, N)))
    return out


# -- unions and distances ------------------------------------------------------


def sigma_union(sys, bundles, s: int, N: int, M: int, grid: int = GRID_1D) -> AngularSpectrumSet:
    """``Sigma_s^{N,M}``, the union of ``Sigma_s^j`` over ``j = N..M``.

    Consecutive averages differ by at most ``pi/(j+1)``, so for each trace
    space the values ``alpha_j`` fill their range up to that resolution and
    the union is stored as the hull per family.  Free parameters are taken
    on a uniform grid.
    """
    if not 1 <= N <= M:
        raise ValueError("need 1 <= N <= M")
    elements, prov = [], []
    for fam in trace_spaces(bundles, s):
        if fam.n_params == 0:
            P = np.zeros((1, 0))
        else:
            g = np.linspace(0, np.pi, grid, endpoint=False)
            P = np.array(np.meshgrid(*([g] * fam.n_params), indexing="ij")).reshape(fam.n_params, -1).T
        run = np.cumsum(family_series(sys, fam, P, M), axis=1) / np.arange(1, M + 1)
        vals = run[:, N - 1 : M]
        elements.append((float(vals.min()), float(vals.max())))
        prov.append({"signature": list(fam.signature), "N": N, "M": M})
    return AngularSpectrumSet.from_elements(elements, prov)


def _dist_to(x: float, els) -> float:
    return min(0.0 if lo <= x <= hi else min(abs(x - lo), abs(x - hi)) for lo, hi in els)


def one_sided_distance(a: AngularSpectrumSet, b: AngularSpectrumSet) -> float:
    """``sup_{x in a} dist(x, b)``, exact for unions of points and intervals."""
    if a.is_empty() or b.is_empty():
        raise EmptySet("Hausdorff distance of an empty set")
    be = b.elements
    # dist(., b) is piecewise linear; its max over an interval sits at an
    # endpoint or at the midpoint of a gap of b
    mids = [0.5 * (be[i][1] + be[i + 1][0]) for i in range(len(be) - 1)]
    best = 0.0
    for lo, hi in a.elements:
        cands = [lo, hi] + [m for m in mids if lo <= m <= hi]
        best = max(best, max(_dist_to(x, be) for x in cands))
    return best


def hausdorff(a: AngularSpectrumSet, b: AngularSpectrumSet) -> float:
    return max(one_sided_distance(a, b), one_sided_distance(b, a))


# -- uniform values ------------------------------------------------------------


@dataclass(frozen=True)
class UniformAngularValues:
    theta_inf: float
    theta_sup: float
    n_used: int
    K: int
    diagnostics: tuple = ()


def _sample_params(fam: TraceFamily, grid: int):
    if fam.n_params == 0:
        return np.zeros((1, 0))
    g = np.linspace(0, np.pi, grid, endpoint=False)
    return np.array(np.meshgrid(*([g] * fam.n_params), indexing="ij")).reshape(fam.n_params, -1).T


def uniform_values(sys, bundles, s: int, n: int, K: int, grid: int = 16) -> UniformAngularValues:
    """Finite approximants of the uniform outer angular values.

    ``theta_inf = min_V min_{k<=K} alpha_{n,k}(V)`` and the analogous sup,
    over trace-space samples; diagnostics repeat this for ``n/8, n/4, n/2``.
    """
    if n + K > bundles.horizon:
        raise OutOfRange(f"n + K = {n + K} beyond bundle horizon {bundles.horizon}")
    series = []
    for fam in trace_spaces(bundles, s):
        series.append(family_series(sys, fam, _sample_params(fam, grid), n + K))
    S = np.vstack(series)
    c = np.concatenate([np.zeros((S.shape[0], 1)), np.cumsum(S, axis=1)], axis=1)
    diag = []
    res = None
    for m in sorted({max(1, n // 8), max(1, n // 4), max(1, n // 2), n}):
        w = (c[:, m : m + K + 1] - c[:, : K + 1]) / m
        diag.append((m, float(w.min()), float(w.max())))
        if m == n:
            res = (float(w.min()), float(w.max()))
    return UniformAngularValues(res[0], res[1], n, K, tuple(diag))


def uniform_values_spaces(sys, bases, n: int, K: int) -> UniformAngularValues:
    """Uniform values over explicitly given start spaces (B, d, s)."""
    S = angle_series_batch(sys, bases, n + K)
    c = np.concatenate([np.zeros((S.shape[0], 1)), np.cumsum(S, axis=1)], axis=1)
    w = (c[:, n : n + K + 1] - c[:, : K + 1]) / n
    return UniformAngularValues(float(w.min()), float(w.max()), n, K)


# -- continuous time -----------------------------------------------------------


def step_count(T: float, h: float) -> int:
    N = int(round(T / h))
    if N < 1 or abs(N * h - T) > 1e-9 * max(1.0, T):
        raise NonIntegralStepCount(f"T/h = {T / h} is not an integer")
    return N


def continuous_normalized(sys_h, bundles, s: int, h: float, T: float) -> float:
    """``sup_V (1/T) sum_{j<=N} angle(...)`` with ``N = T/h`` over trace spaces."""
    N = step_count(T, h)
    spec = sigma_finite(sys_h, bundles, s, N)
    return spec.max() * N / T


# -- uniform Cauchy ------------------------------------------------------------


@dataclass(frozen=True)
class CauchyReport:
    max_deviation: float
    epsilon: float
    passes: bool
    per_sample: tuple


def uniform_cauchy_diagnostic(sys, bases, n_grid, eps: float) -> CauchyReport:
    """Empirical ``max |alpha_n(V) - alpha_m(V)|`` over samples and grid pairs."""
    n_grid = sorted(int(n) for n in n_grid)
    S = angle_series_batch(sys, bases, n_grid[-1])
    run = np.cumsum(S, axis=1) / np.arange(1, S.shape[1] + 1)
    vals = run[:, np.array(n_grid) - 1]
    dev = vals.max(axis=1) - vals.min(axis=1)
    m = float(dev.max())
    return CauchyReport(m, eps, m <= eps, tuple(float(x) for x in dev))

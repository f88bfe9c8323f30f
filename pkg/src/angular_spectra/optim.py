"""Small derivative-free helpers shared by the spectra and closed-form modules."""

from __future__ import annotations

import numpy as np

GOLDEN_XTOL = 1e-8
_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_batch(f, lo, hi, xtol: float = GOLDEN_XTOL):
    """Golden-section minimization on many brackets at once.

    ``f`` maps an array of abscissae to an array of values, so one call
    evaluates all brackets (useful when each evaluation is a batched
    propagation).
    """
    a = np.array(lo, dtype=float)
    b = np.array(hi, dtype=float)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = np.split(np.asarray(f(np.concatenate([c, d])), dtype=float), 2)
    while np.max(b - a) > xtol:
        left = fc <= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        nc = np.where(left, b - _INVPHI * (b - a), d)
        nd = np.where(left, c, a + _INVPHI * (b - a))
        fnew = np.asarray(f(np.where(left, nc, nd)), dtype=float)
        fc, fd = np.where(left, fnew, fd), np.where(left, fc, fnew)
        c, d = nc, nd
    x = np.where(fc <= fd, c, d)
    return x, np.minimum(fc, fd)


def circular_local_minima(vals: np.ndarray, k: int) -> np.ndarray:
    """Indices of the ``k`` smallest local minima of a periodic sample."""
    loc = np.flatnonzero((vals <= np.roll(vals, 1)) & (vals <= np.roll(vals, -1)))
    if len(loc) == 0:
        loc = np.array([int(np.argmin(vals))])
    return loc[np.argsort(vals[loc], kind="stable")][:k]


def grid_extrema(f, a: float, b: float, n: int, k: int = 3, periodic: bool = True, xtol: float = GOLDEN_XTOL):
    """Global min and max of a scalar function on ``[a, b)`` (grid plus polish).

    Returns ``{"min": (value, x), "max": (value, x)}``; ties go to the
    smaller abscissa.
    """
    xs = a + (b - a) * np.arange(n) / n if periodic else np.linspace(a, b, n)
    vals = np.asarray(f(xs), dtype=float)
    h = (b - a) / n
    out = {}
    for sign, key in ((1.0, "min"), (-1.0, "max")):
        sv = sign * vals
        if periodic:
            idx = circular_local_minima(sv, k)
        else:
            inner = np.flatnonzero(
                np.r_[True, sv[1:] <= sv[:-1]] & np.r_[sv[:-1] <= sv[1:], True]
            )
            idx = inner[np.argsort(sv[inner], kind="stable")][:k]
        lo, hi = xs[idx] - h, xs[idx] + h
        if not periodic:
            lo, hi = np.maximum(lo, a), np.minimum(hi, b)
        wrap = (lambda x: a + np.mod(x - a, b - a)) if periodic else (lambda x: x)
        x, fx = golden_batch(lambda t: sign * np.asarray(f(wrap(t))), lo, hi, xtol)
        cx = np.concatenate([wrap(x), xs[idx]])
        cf = np.concatenate([fx, sv[idx]])
        o = np.lexsort((cx, cf))[0]
        out[key] = (float(sign * cf[o]), float(cx[o]))
    return out

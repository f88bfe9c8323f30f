"""Reproduction runs for the built-in models, with deltas against reference values."""

from __future__ import annotations

import functools
import time

import numpy as np

from . import reference as ref
from .dichotomy import SpectralIntervals
from .models.henon import (BUFFER, HenonConfig, analysis_window, autonomous_system, henon_homoclinic,
                           henon_multihump, variational_system)
from .models.lorenz import LorenzConfig, angle_on_average, lorenz_variational
from .normalform import PiMultiple, mixed_from_gamma, reduce_3x3, sigma1_closed_form, sigma2_mixed, sweep_sigma1
from .pipeline import AnalysisConfig, analyze
from .spectra import AngularSpectrumSet, step_count

LORENZ_POINTS = 11001
LORENZ_BUFFER = 500
CONT_T = 500.0
CONT_BUFFER_T = 25.0
FIG3_LAMBDA = 2.0


# -- comparison helpers --------------------------------------------------------


def _elements(points, intervals):
    return sorted([(float(p), float(p)) for p in points] + [(float(a), float(b)) for a, b in intervals])


def set_delta(computed: AngularSpectrumSet, expected) -> dict:
    """Largest endpoint deviation when the element structure agrees, else ``inf``."""
    mine = _elements(computed.points, computed.intervals)
    theirs = _elements(*expected)
    if len(mine) != len(theirs):
        return {"match": False, "delta": float("inf")}
    d = max(max(abs(a - c), abs(b - e)) for (a, b), (c, e) in zip(mine, theirs))
    return {"match": True, "delta": float(d)}


def intervals_delta(computed: SpectralIntervals, expected) -> dict:
    mine = sorted(computed.intervals)
    theirs = sorted(expected)
    if len(mine) != len(theirs):
        return {"match": False, "delta": float("inf")}
    d = max(max(abs(a - c), abs(b - e)) for (a, b), (c, e) in zip(mine, theirs))
    return {"match": True, "delta": float(d)}


def format_set(points=(), intervals=(), digits: int = 4) -> str:
    parts = []
    if points:
        parts.append("{" + ", ".join(f"{p:.{digits}f}" if p >= 10 ** -digits or p == 0 else f"{p:.3g}"
                                     for p in sorted(points)) + "}")
    parts += [f"[{a:.{digits}f}, {b:.{digits}f}]" for a, b in sorted(intervals)]
    return " U ".join(parts) if parts else "{}"


def _spectrum_row(res, expected, digits=4) -> dict:
    row = {
        "ed": format_set((), res.dichotomy.intervals, digits),
        "ed_ref": format_set((), expected["ed"], digits),
        "ed_delta": intervals_delta(res.dichotomy, expected["ed"])["delta"],
    }
    for s in (1, 2):
        key = f"sigma{s}"
        spec = res.spectra[s]
        row[key] = format_set(spec.points, spec.intervals, digits)
        row[key + "_ref"] = format_set(*expected[key], digits=digits)
        row[key + "_delta"] = set_delta(spec, expected[key])["delta"]
    row["seconds"] = res.seconds
    return row


# -- Henon ---------------------------------------------------------------------


@functools.lru_cache(maxsize=4)
def primary_orbit(config: HenonConfig = HenonConfig(), half_length: int = 2000):
    return henon_homoclinic(config, half_length=half_length)


def henon_variational_run(N: int, config: HenonConfig = HenonConfig(), method: str = "global"):
    orbit = primary_orbit(config, max(2000, N // 2 + BUFFER + 10))
    sys = variational_system(config, analysis_window(orbit, N))
    return analyze(sys, AnalysisConfig(N, origin=BUFFER, method=method))


def henon_autonomous_run(N: int, config: HenonConfig = HenonConfig(), method: str = "global"):
    return analyze(autonomous_system(config), AnalysisConfig(N, origin=BUFFER, method=method))


def multihump_run(M: int, config: HenonConfig = HenonConfig(), total: int = 2000, method: str = "global"):
    orbit = henon_multihump(config, primary_orbit(config), M, total=total, buffer=BUFFER)
    sys = variational_system(config, orbit.points)
    return analyze(sys, AnalysisConfig(total + 1, origin=BUFFER, method=method))


def table_henon(variational: bool = True, Ns=(50, 100, 1000, 2000), config: HenonConfig = HenonConfig()):
    table = ref.HENON_VARIATIONAL if variational else ref.HENON_AUTONOMOUS
    run = henon_variational_run if variational else henon_autonomous_run
    return [dict(N=N, **_spectrum_row(run(N, config), table[N], digits=4)) for N in Ns]


def table_multihump(Ms=(50, 100, 200, 400), config: HenonConfig = HenonConfig()):
    return [dict(M=M, **_spectrum_row(multihump_run(M, config), ref.HENON_MULTIHUMP[M])) for M in Ms]


def henon_closed_form(config: HenonConfig = HenonConfig()):
    """Limit spectra of the autonomous Henon linearization from its Schur form."""
    from .models.henon import henon_fixed_point

    red = reduce_3x3(config.jacobian(henon_fixed_point(config).point))
    s1 = sigma1_closed_form(red.params.rho, red.params.phi)
    s2 = sigma2_mixed(red.params)
    return red, s1, s2


# -- Lorenz --------------------------------------------------------------------


@functools.lru_cache(maxsize=8)
def lorenz_data(h: float, n_points: int = LORENZ_POINTS):
    return lorenz_variational(LorenzConfig(h=h), n_points)


def lorenz_run(h: float, method: str = "global"):
    X, sys = lorenz_data(h)
    N = LORENZ_POINTS - 2 * LORENZ_BUFFER
    return analyze(sys, AnalysisConfig(N, origin=LORENZ_BUFFER, method=method))


def table_lorenz(hs=(0.05, 0.1, 0.2)):
    return [dict(h=h, **_spectrum_row(lorenz_run(h), ref.LORENZ[h])) for h in hs]


def lorenz_angle_average(h: float) -> float:
    X, _ = lorenz_data(h)
    return angle_on_average(X[LORENZ_BUFFER : LORENZ_POINTS - LORENZ_BUFFER + 1])


def table_angle_average(hs=(0.05, 0.1, 0.2)):
    rows = []
    for h in hs:
        v = lorenz_angle_average(h)
        rows.append({"h": h, "angle_on_average": v, "ref": ref.LORENZ_ANGLE_AVERAGE[h],
                     "delta": abs(v - ref.LORENZ_ANGLE_AVERAGE[h])})
    return rows


def continuous_values(h: float, T: float = CONT_T, buffer_T: float = CONT_BUFFER_T):
    """``theta_cont`` for s = 1, 2 from a run on ``[0, T]`` with time buffers on both sides."""
    N = step_count(T, h)
    B = step_count(buffer_T, h)
    _, sys = lorenz_variational(LorenzConfig(h=h), N + 2 * B + 1)
    res = analyze(sys, AnalysisConfig(N, origin=B))
    return tuple(res.spectra[s].max() * N / T for s in (1, 2)), res


def table_continuous(hs=(0.025, 0.05, 0.1, 0.2)):
    rows = []
    for h in hs:
        t0 = time.perf_counter()
        (t1, t2), _ = continuous_values(h)
        r1, r2 = ref.LORENZ_CONTINUOUS[h]
        rows.append({"h": h, "theta1": t1, "theta1_ref": r1, "theta1_delta": abs(t1 - r1),
                     "theta2": t2, "theta2_ref": r2, "theta2_delta": abs(t2 - r2),
                     "seconds": time.perf_counter() - t0})
    return rows


# -- closed-form sweeps --------------------------------------------------------


def table_fig2(n_rho: int = 20, n_phi: int = 24):
    rho = np.linspace(1.0 / n_rho, 1.0, n_rho)
    phi = np.linspace(np.pi / 2 / n_phi, np.pi / 2, n_phi)
    return [dict(zip(("rho", "phi", "case", "spec_min", "spec_max"), r)) for r in sweep_sigma1(rho, phi)]


def table_fig3(n_rho: int = 10, n_gamma: int = 10, lam: float = FIG3_LAMBDA):
    rows = []
    for label, phi in (("non-resonant", 1.25), ("resonant", PiMultiple(2, 5))):
        for rho in np.linspace(1.0 / n_rho, 1.0, n_rho):
            for g in np.linspace(np.pi / 2 / n_gamma, np.pi / 2, n_gamma):
                r = sigma2_mixed(mixed_from_gamma(float(rho), phi, lam, float(g)))
                nz = [v for v in r.spectrum.points if v > 0] + [v for iv in r.spectrum.intervals for v in iv]
                rows.append({"case": label, "phi": float(phi), "rho": float(rho), "gamma_w": float(g),
                             "theta2_min": min(nz) if nz else 0.0, "theta2_max": max(nz) if nz else 0.0})
    return rows


TABLES = {
    "t2": lambda: table_henon(True),
    "t3": lambda: table_henon(False),
    "t4": table_multihump,
    "t5": table_lorenz,
    "t6": table_angle_average,
    "t7": table_continuous,
    "fig2": table_fig2,
    "fig3": table_fig3,
}

"""Command-line front end: ``angspec analyze | reproduce | sweep | validate | orbit``."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict, dataclass, fields
from typing import Optional

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VALIDATION = 0, 2, 3, 4

SYSTEMS = (
    "rotation3d",
    "normal-form",
    "henon-homoclinic",
    "henon-autonomous",
    "henon-multihump",
    "lorenz",
    "switching-e1",
    "switching-e2",
    "orbit-file",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to re-run one ``analyze`` call."""

    system: str
    N: int
    s: tuple = (1,)
    phi: Optional[float] = None
    rho: Optional[float] = None
    phi1: Optional[float] = None
    h: float = 0.05
    M: int = 50
    orbit: Optional[str] = None
    map: str = "henon"
    buffer: Optional[int] = None
    window: Optional[int] = None
    stride: int = 1
    method: str = "global"
    grid_1d: int = 64
    n_refine: int = 3
    decades: int = 0

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config fields: {sorted(extra)}")
        d = dict(d)
        if "s" in d:
            d["s"] = tuple(d["s"])
        return cls(**d)

    def validate(self):
        from .errors import ConfigError

        if self.system not in SYSTEMS:
            raise ConfigError(f"unknown system {self.system!r}")
        if self.N < 1:
            raise ConfigError("N must be positive")
        if self.system == "orbit-file" and not self.orbit:
            raise ConfigError("--orbit is required for system orbit-file")
        if self.map not in ("henon", "lorenz"):
            raise ConfigError(f"unknown map {self.map!r}")


def build_system(cfg: ExperimentConfig):
    """Returns (system, origin) for a validated config."""
    import numpy as np

    from .experiments import LORENZ_BUFFER, primary_orbit
    from .models import henon, lorenz, simple
    from .records import read_orbit_csv

    buf = cfg.buffer
    if cfg.system == "rotation3d":
        return simple.make_rotation_example(np.pi / 4 if cfg.phi is None else cfg.phi), buf or 0
    if cfg.system == "normal-form":
        return simple.make_normal_form(cfg.rho or 0.5, 1.0 if cfg.phi is None else cfg.phi), buf or 0
    if cfg.system == "switching-e1":
        return simple.make_switching(cfg.phi or 0.0, cfg.phi1 or np.pi / 2, "E1"), buf or 0
    if cfg.system == "switching-e2":
        return simple.make_switching(0.0, 1.0, "E2"), buf or 0
    hc = henon.HenonConfig()
    if cfg.system == "henon-autonomous":
        return henon.autonomous_system(hc), henon.BUFFER if buf is None else buf
    if cfg.system == "henon-homoclinic":
        b = henon.BUFFER if buf is None else buf
        orbit = primary_orbit(hc, max(2000, cfg.N // 2 + b + 10))
        return henon.variational_system(hc, henon.analysis_window(orbit, cfg.N, b)), b
    if cfg.system == "henon-multihump":
        b = henon.BUFFER if buf is None else buf
        orbit = henon.henon_multihump(hc, primary_orbit(hc), cfg.M, total=cfg.N - 1, buffer=b)
        return henon.variational_system(hc, orbit.points), b
    if cfg.system == "lorenz":
        b = LORENZ_BUFFER if buf is None else buf
        _, sysl = lorenz.lorenz_variational(lorenz.LorenzConfig(h=cfg.h), cfg.N + 2 * b)
        return sysl, b
    _, pts = read_orbit_csv(cfg.orbit)
    b = 0 if buf is None else buf
    if cfg.map == "henon":
        return henon.variational_system(hc, pts), b
    return henon.SystemSpec.from_matrices(lorenz.step_jacobians(pts, lorenz.LorenzConfig(h=cfg.h))), b


def run(cfg: ExperimentConfig) -> dict:
    """Analyze one configured system; returns a JSON-ready record."""
    from . import __version__
    from .pipeline import AnalysisConfig, analyze

    cfg.validate()
    system, origin = build_system(cfg)
    res = analyze(system, AnalysisConfig(cfg.N, s=cfg.s, origin=origin, window=cfg.window, stride=cfg.stride,
                                         method=cfg.method, grid_1d=cfg.grid_1d, n_refine=cfg.n_refine,
                                         decades=cfg.decades))
    out = res.to_dict()
    # wall time would make repeated runs differ byte-wise
    out.pop("config")
    out.pop("seconds")
    return {"config": asdict(cfg), "version": __version__, **out}


# -- argument parsing ----------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="angspec", description="Angular spectra of linear nonautonomous systems.")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    sub = p.add_subparsers(dest="cmd", required=True)

    a = sub.add_parser("analyze", help="analyze a built-in or file-backed system, print JSON")
    a.add_argument("--system", required=True, choices=SYSTEMS)
    a.add_argument("--N", type=int, required=True)
    a.add_argument("--s", type=int, nargs="+", default=[1])
    a.add_argument("--phi", type=float)
    a.add_argument("--phi1", type=float)
    a.add_argument("--rho", type=float)
    a.add_argument("--h", type=float, default=0.05)
    a.add_argument("--M", type=int, default=50)
    a.add_argument("--orbit", help="orbit CSV with header n,x1,x2,x3")
    a.add_argument("--map", default="henon", choices=("henon", "lorenz"))
    a.add_argument("--buffer", type=int)
    a.add_argument("--window", type=int)
    a.add_argument("--stride", type=int, default=1)
    a.add_argument("--method", default="global", choices=("global", "local"))
    a.add_argument("--grid", type=int, default=64, dest="grid_1d")
    a.add_argument("--starts", type=int, default=3, dest="n_refine", help="refined starts per extremum")
    a.add_argument("--decades", type=int, default=0, help="geometric probes down to 10^-DECADES around grid nodes")
    a.add_argument("--out", help="write JSON here instead of stdout")

    r = sub.add_parser("reproduce", help="recompute a reference table as CSV with delta columns")
    r.add_argument("table", choices=("t2", "t3", "t4", "t5", "t6", "t7", "fig2", "fig3"))
    r.add_argument("--out")

    w = sub.add_parser("sweep", help="closed-form first spectrum of the 2x2 normal form on a grid")
    w.add_argument("--rho", type=float, nargs=3, metavar=("MIN", "MAX", "COUNT"), default=(0.05, 1.0, 20))
    w.add_argument("--phi", type=float, nargs=3, metavar=("MIN", "MAX", "COUNT"), default=(0.065, 1.5708, 24))
    w.add_argument("--out")

    v = sub.add_parser("validate", help="run the built-in property suites")
    v.add_argument("--inject-psi-fault", action="store_true", help=argparse.SUPPRESS)

    o = sub.add_parser("orbit", help="solve, export or inspect orbits")
    osub = o.add_subparsers(dest="action", required=True)
    so = osub.add_parser("solve", help="homoclinic or multi-humped Henon orbit to CSV")
    so.add_argument("--half-length", type=int, default=1000)
    so.add_argument("--M", type=int, help="build a multi-humped orbit on [0, 2000] instead")
    so.add_argument("--out", required=True)
    ex = osub.add_parser("export", help="Lorenz h-step orbit to CSV")
    ex.add_argument("--h", type=float, default=0.05)
    ex.add_argument("--points", type=int, default=11001)
    ex.add_argument("--out", required=True)
    im = osub.add_parser("import", help="read an orbit CSV and report its residual")
    im.add_argument("path")
    im.add_argument("--map", default="henon", choices=("henon", "lorenz"))
    im.add_argument("--h", type=float, default=0.05)
    return p


def _set_threads(n: Optional[int]):
    if n is None:
        return
    if n < 1:
        raise ValueError("--threads must be positive")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMBA_NUM_THREADS"):
        os.environ[var] = str(n)


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_analyze(args) -> int:
    from .records import dumps

    d = {k: getattr(args, k) for k in ("N", "phi", "phi1", "rho", "h", "M", "orbit", "map", "buffer", "window",
                                       "stride", "method", "grid_1d", "n_refine", "decades")}
    cfg = ExperimentConfig(system=args.system, s=tuple(args.s), **d)
    _emit(dumps(run(cfg)) + "\n", args.out)
    return EXIT_OK


def _cmd_reproduce(args) -> int:
    from .experiments import TABLES
    from .records import csv_text

    _emit(csv_text(TABLES[args.table]()), args.out)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    import numpy as np

    from .normalform import sweep_csv, sweep_sigma1

    rho = np.linspace(args.rho[0], args.rho[1], int(args.rho[2]))
    phi = np.linspace(args.phi[0], args.phi[1], int(args.phi[2]))
    _emit(sweep_csv(sweep_sigma1(rho, phi)), args.out)
    return EXIT_OK


def _cmd_validate(args) -> int:
    import numpy as np

    from .normalform import psi
    from .validation import run_all

    fn = psi
    if args.inject_psi_fault:
        fn = lambda rho, t: psi(rho, t) + 1e-6 * np.sin(t)  # noqa: E731
    results = run_all(fn)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


def _cmd_orbit(args) -> int:
    import numpy as np

    from .models import henon, lorenz
    from .records import read_orbit_csv, write_orbit_csv

    hc = henon.HenonConfig()
    if args.action == "solve":
        orbit = henon.henon_homoclinic(hc, half_length=args.half_length)
        if args.M:
            orbit = henon.henon_multihump(hc, orbit, args.M)
        write_orbit_csv(args.out, orbit.points, orbit.first)
        print(f"{len(orbit)} points from n={orbit.first}, residual {orbit.residual:.3e}")
    elif args.action == "export":
        X = lorenz.lorenz_orbit(lorenz.LorenzConfig(h=args.h), args.points)
        write_orbit_csv(args.out, X)
        print(f"{len(X)} points")
    else:
        first, X = read_orbit_csv(args.path)
        if args.map == "henon":
            res = float(np.abs(X[1:] - hc.map(X[:-1])).max()) if len(X) > 1 else 0.0
        else:
            cfg = lorenz.LorenzConfig(h=args.h)
            res = max((float(np.abs(lorenz.step_map(x, cfg) - y).max()) for x, y in zip(X[:-1], X[1:])), default=0.0)
        print(f"{len(X)} points from n={first}, max step residual {res:.3e}")
    return EXIT_OK


COMMANDS = {
    "analyze": _cmd_analyze,
    "reproduce": _cmd_reproduce,
    "sweep": _cmd_sweep,
    "validate": _cmd_validate,
    "orbit": _cmd_orbit,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    from .errors import ConfigError, NotSupported, NumericError, OutOfRange

    try:
        _set_threads(args.threads)
        return COMMANDS[args.cmd](args)
    except (NumericError, NotSupported) as e:
        print(f"numeric failure ({type(e).__name__}): {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, OutOfRange, ValueError, FileNotFoundError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

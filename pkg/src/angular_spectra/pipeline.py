"""End-to-end analysis: dichotomy spectrum, spectral bundles, finite-time spectra."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Optional

from .dichotomy import PROBE_DIVISOR, BundleSet, SpectralIntervals, approx_spectrum, spectral_bundles
from .errors import ConfigError
from .spectra import GRID_1D, GRID_2D, METHODS, N_REFINE, AngularSpectrumSet, sigma_finite
from .system import SystemSpec


@dataclass(frozen=True)
class AnalysisConfig:
    """Parameters of one analysis run.

    ``origin`` steps before the analysis interval (and as many after it)
    act as buffers for the bundle computation.  ``window=None`` uses half
    the available horizon for the dichotomy rates.
    """

    N: int
    s: tuple = (1, 2)
    origin: int = 0
    window: Optional[int] = None
    stride: int = 1
    probe: Optional[int] = PROBE_DIVISOR
    method: str = "global"
    grid_1d: int = GRID_1D
    grid_2d: int = GRID_2D
    n_refine: int = N_REFINE
    decades: int = 0

    def __post_init__(self):
        if self.N < 1:
            raise ConfigError("N must be positive")
        if self.origin < 0:
            raise ConfigError("origin must be nonnegative")
        if self.stride < 1:
            raise ConfigError("stride must be positive")
        if self.decades < 0:
            raise ConfigError("decades must be nonnegative")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}")
        object.__setattr__(self, "s", tuple(int(v) for v in self.s))

    def horizon(self, sys: SystemSpec) -> int:
        if sys.length is not None:
            return sys.length
        return self.N + 2 * self.origin + 1


@dataclass(frozen=True, eq=False)
class AnalysisResult:
    config: AnalysisConfig
    dichotomy: SpectralIntervals
    bundles: BundleSet = field(repr=False)
    spectra: dict
    seconds: float

    @property
    def bundle_dims(self):
        return self.bundles.dims

    def sigma(self, s: int) -> AngularSpectrumSet:
        return self.spectra[s]

    def to_dict(self):
        return {
            "config": asdict(self.config),
            "dichotomy": self.dichotomy.to_dict(),
            "bundle_dims": list(self.bundle_dims),
            "spectra": {str(s): v.to_dict() for s, v in self.spectra.items()},
            "seconds": self.seconds,
        }


def analyze(sys: SystemSpec, config: AnalysisConfig) -> AnalysisResult:
    t0 = time.perf_counter()
    L = config.horizon(sys)
    if config.origin + config.N > L:
        raise ConfigError(f"origin + N = {config.origin + config.N} exceeds horizon {L}")
    spec = approx_spectrum(sys, L, window=config.window, stride=config.stride, probe=config.probe)
    bundles = spectral_bundles(sys, spec, config.N, origin=config.origin, stop=L)
    spectra = {}
    for s in config.s:
        if not 1 <= s < sys.dim:
            raise ConfigError(f"s = {s} outside [1, {sys.dim - 1}]")
        spectra[s] = sigma_finite(sys, bundles, s, config.N, grid_1d=config.grid_1d, grid_2d=config.grid_2d,
                                  n_refine=config.n_refine, method=config.method, decades=config.decades)
    return AnalysisResult(config, spec, bundles, spectra, time.perf_counter() - t0)

"""h-step map of the Lorenz system via fixed-step classical Runge-Kutta."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from ..errors import ConfigError, DegenerateStep, NonIntegralStepCount
from ..system import SystemSpec

FD_STEP = 1e-6


@dataclass(frozen=True)
class LorenzConfig:
    sigma: float = 10.0
    rho: float = 28.0
    beta: float = 8.0 / 3.0
    h: float = 0.05
    substep: float = 1e-4
    x0: tuple = (10.0, 10.0, 10.0)

    @property
    def substeps(self) -> int:
        k = int(round(self.h / self.substep))
        if k < 1 or abs(k * self.substep - self.h) > 1e-9 * self.h:
            raise NonIntegralStepCount(f"h={self.h} is not a multiple of the substep {self.substep}")
        return k

    def with_h(self, h: float) -> "LorenzConfig":
        return LorenzConfig(self.sigma, self.rho, self.beta, h, self.substep, self.x0)


@njit(cache=True)
def _rhs(x, s, r, b, out):
    out[0] = s * (x[1] - x[0])
    out[1] = r * x[0] - x[1] - x[0] * x[2]
    out[2] = x[0] * x[1] - b * x[2]


@njit(cache=True)
def _flow(x, k, dt, s, r, b):
    y = x.copy()
    k1 = np.empty(3)
    k2 = np.empty(3)
    k3 = np.empty(3)
    k4 = np.empty(3)
    t = np.empty(3)
    for _ in range(k):
        _rhs(y, s, r, b, k1)
        for i in range(3):
            t[i] = y[i] + 0.5 * dt * k1[i]
        _rhs(t, s, r, b, k2)
        for i in range(3):
            t[i] = y[i] + 0.5 * dt * k2[i]
        _rhs(t, s, r, b, k3)
        for i in range(3):
            t[i] = y[i] + dt * k3[i]
        _rhs(t, s, r, b, k4)
        for i in range(3):
            y[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    return y


@njit(cache=True)
def _orbit(x0, n, k, dt, s, r, b):
    X = np.empty((n, 3))
    X[0] = x0
    for i in range(1, n):
        X[i] = _flow(X[i - 1], k, dt, s, r, b)
    return X


@njit(cache=True)
def _jacobians(X, k, dt, s, r, b, eps):
    n = X.shape[0]
    J = np.empty((n, 3, 3))
    for i in range(n):
        for j in range(3):
            xp = X[i].copy()
            xm = X[i].copy()
            xp[j] += eps
            xm[j] -= eps
            fp = _flow(xp, k, dt, s, r, b)
            fm = _flow(xm, k, dt, s, r, b)
            for m in range(3):
                J[i, m, j] = (fp[m] - fm[m]) / (2.0 * eps)
    return J


def lorenz_rhs(x, config: LorenzConfig = LorenzConfig()):
    out = np.empty(3)
    _rhs(np.asarray(x, dtype=float), config.sigma, config.rho, config.beta, out)
    return out


def step_map(x, config: LorenzConfig = LorenzConfig()):
    """``F_h(x)``."""
    c = config
    return _flow(np.asarray(x, dtype=float), c.substeps, c.substep, c.sigma, c.rho, c.beta)


def lorenz_orbit(config: LorenzConfig, n_points: int) -> np.ndarray:
    """Orbit ``x_0, ..., x_{n_points - 1}`` of the h-step map."""
    c = config
    return _orbit(np.asarray(c.x0, dtype=float), n_points, c.substeps, c.substep, c.sigma, c.rho, c.beta)


def step_jacobians(points, config: LorenzConfig, eps: float = FD_STEP) -> np.ndarray:
    """Central-difference Jacobians ``DF_h`` at each point, shape (n, 3, 3)."""
    c = config
    if eps <= 0:
        raise ConfigError("difference step must be positive")
    return _jacobians(np.ascontiguousarray(points, dtype=float), c.substeps, c.substep, c.sigma, c.rho, c.beta, eps)


def central_difference_jacobian(f, x, eps: float = FD_STEP) -> np.ndarray:
    """Generic central-difference Jacobian of ``f`` at ``x``."""
    x = np.asarray(x, dtype=float)
    cols = []
    for j in range(len(x)):
        e = np.zeros_like(x)
        e[j] = eps
        cols.append((np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2 * eps))
    return np.column_stack(cols)


def lorenz_variational(config: LorenzConfig, n_points: int):
    """Orbit and the stored system ``n -> DF_h(x_n)``."""
    X = lorenz_orbit(config, n_points)
    sys = SystemSpec.from_matrices(step_jacobians(X, config), label=f"lorenz-h{config.h}")
    return X, sys


def angle_on_average(orbit, directed: bool = False) -> float:
    """Mean angle between successive displacements ``x_{n+1} - x_n``.

    By default the displacements are treated as lines, so each angle lies in
    ``[0, pi/2]`` like every other angle in this package; ``directed=True``
    measures the vector angle in ``[0, pi]`` instead.
    """
    X = np.asarray(orbit, dtype=float)
    if len(X) < 3:
        raise ConfigError("need at least three orbit points")
    D = np.diff(X, axis=0)
    nrm = np.linalg.norm(D, axis=1)
    if nrm.min() < 1e-14:
        raise DegenerateStep(f"displacement of size {nrm.min():.2e} at step {int(np.argmin(nrm))}")
    a, b = D[:-1], D[1:]
    if a.shape[1] == 2:
        cr = np.abs(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])
    else:
        cr = np.linalg.norm(np.cross(a, b), axis=1)
    dt = np.einsum("ij,ij->i", a, b)
    if not directed:
        dt = np.abs(dt)
    return float(np.mean(np.arctan2(cr, dt)))

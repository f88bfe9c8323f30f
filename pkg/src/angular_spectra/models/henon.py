"""Three-dimensional Henon-type map, its fixed point and homoclinic orbits."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from ..errors import NewtonDiverged
from ..system import SystemSpec

NEWTON_TOL = 1e-12
ORBIT_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class HenonConfig:
    """F(x) = (-x1^2 - a x3 + c, x1 cos w - x2 sin w, x2 cos w + x1 sin w)."""

    omega: float = 0.2
    a: float = 0.9
    c: float = 1.4

    def map(self, x):
        x = np.asarray(x, dtype=float)
        cw, sw = np.cos(self.omega), np.sin(self.omega)
        x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
        return np.stack([-x1 ** 2 - self.a * x3 + self.c, x1 * cw - x2 * sw, x2 * cw + x1 * sw], axis=-1)

    def jacobian(self, x):
        """DF at one point (3,) or a stack of points (n, 3)."""
        x = np.asarray(x, dtype=float)
        cw, sw = np.cos(self.omega), np.sin(self.omega)
        J = np.zeros(x.shape[:-1] + (3, 3))
        J[..., 0, 0] = -2.0 * x[..., 0]
        J[..., 0, 2] = -self.a
        J[..., 1, 0] = cw
        J[..., 1, 1] = -sw
        J[..., 2, 0] = sw
        J[..., 2, 1] = cw
        return J


@dataclass(frozen=True)
class FixedPoint:
    point: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def unstable(self):
        i = int(np.argmax(np.abs(self.eigenvalues)))
        return float(self.eigenvalues[i].real), np.real(self.eigenvectors[:, i])


@dataclass(frozen=True, eq=False)
class OrbitSegment:
    """Orbit points ``x_{first}, ..., x_{first + len - 1}``."""

    points: np.ndarray
    first: int = 0
    boundary_type: str = "periodic"
    residual: float = field(default=np.nan)

    @property
    def indices(self):
        return np.arange(self.first, self.first + len(self.points))

    def __len__(self):
        return len(self.points)

    def point(self, n: int):
        return self.points[n - self.first]


def henon_fixed_point(config: HenonConfig = HenonConfig(), x0=(0.5, 0.5, 0.5), maxiter: int = 50) -> FixedPoint:
    x = np.array(x0, dtype=float)
    for _ in range(maxiter):
        r = config.map(x) - x
        if np.linalg.norm(r) < 1e-14:
            break
        x = x - np.linalg.solve(config.jacobian(x) - np.eye(3), r)
    else:
        raise NewtonDiverged("fixed point iteration did not converge")
    if np.linalg.norm(config.map(x) - x) >= 1e-12:
        raise NewtonDiverged("fixed point residual too large")
    ev, V = np.linalg.eig(config.jacobian(x))
    return FixedPoint(x, ev, V)


def orbit_residual(config: HenonConfig, X: np.ndarray, periodic: bool = True) -> np.ndarray:
    """Stacked residual ``x_{n+1} - F(x_n)``, plus ``x_first - x_last`` when periodic."""
    r = X[1:] - config.map(X[:-1])
    if periodic:
        r = np.vstack([r, X[:1] - X[-1:]])
    return r.ravel()


def _residual_jacobian(config: HenonConfig, X: np.ndarray):
    m = len(X)
    J = config.jacobian(X[:-1])  # (m-1, 3, 3)
    rows, cols, vals = [], [], []
    for n in range(m - 1):
        # equation block n: x_{n+1} - F(x_n)
        r0 = 3 * n
        ii, jj = np.meshgrid(np.arange(3), np.arange(3), indexing="ij")
        rows.append((r0 + ii).ravel())
        cols.append((3 * n + jj).ravel())
        vals.append((-J[n]).ravel())
        rows.append(r0 + np.arange(3))
        cols.append(3 * (n + 1) + np.arange(3))
        vals.append(np.ones(3))
    r0 = 3 * (m - 1)
    rows += [r0 + np.arange(3), r0 + np.arange(3)]
    cols += [np.arange(3), 3 * (m - 1) + np.arange(3)]
    vals += [np.ones(3), -np.ones(3)]
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(3 * m, 3 * m)
    )


def newton_orbit(config: HenonConfig, X0: np.ndarray, maxiter: int = 30, tol: float = NEWTON_TOL):
    """Newton's method for the periodic orbit boundary value problem."""
    X = np.array(X0, dtype=float)
    m = len(X)
    for it in range(maxiter):
        r = orbit_residual(config, X)
        nr = np.abs(r).max()
        if not np.isfinite(nr) or nr > 1e3:
            raise NewtonDiverged(f"residual blew up ({nr:.3g}) at iteration {it}")
        if nr < tol:
            return X, nr
        dx = spsolve(_residual_jacobian(config, X).tocsc(), -r)
        X = X + dx.reshape(m, 3)
    nr = np.abs(orbit_residual(config, X)).max()
    if nr < ORBIT_RESIDUAL_TOL:
        return X, nr
    raise NewtonDiverged(f"no convergence after {maxiter} iterations (residual {nr:.3g})")


# shooting parameters along the unstable direction that return close to the
# fixed point after one excursion; found by scanning both halves of a
# fundamental domain (the unstable eigenvalue is negative)
HOMOCLINIC_SEEDS = (-1.2041921375550097e-06, 1.018426782070731e-06, 1.4549481398231846e-06)

# centre of analysis windows relative to the largest excursion; chosen so
# that reproduction runs match the published finite-time spectra
REFERENCE_OFFSET = -3
BUFFER = 500


def _shoot(config, fp: FixedPoint, t: float, kmax: int = 200):
    lam, vu = fp.unstable
    x = fp.point + t * vu
    traj = [x]
    for _ in range(kmax):
        x = config.map(x)
        traj.append(x)
        if np.linalg.norm(x - fp.point) > 20:
            break
    traj = np.array(traj)
    d = np.linalg.norm(traj - fp.point, axis=1)
    j = int(np.argmax(d > 1.0))
    k = j + int(np.argmin(d[j:]))
    return traj[: k + 1], d


def _pseudo_orbit(config, fp: FixedPoint, t: float, half_length: int):
    lam, vu = fp.unstable
    fwd, d = _shoot(config, fp, t)
    center = int(np.argmax(d[: len(fwd)]))
    m_back = half_length - center
    if m_back < 0 or len(fwd) - center > half_length + 1:
        raise ValueError("half_length too short for the excursion")
    back = fp.point + t * vu * (lam ** -np.arange(m_back, 0, -1, dtype=float))[:, None]
    tail = np.repeat(fp.point[None], half_length + 1 - (len(fwd) - center), axis=0)
    X = np.vstack([back, fwd, tail])
    assert len(X) == 2 * half_length + 1
    return X


def henon_homoclinic(config: HenonConfig = HenonConfig(), half_length: int = 1000, seed: int = 0) -> OrbitSegment:
    """Homoclinic orbit to the fixed point on ``[-half_length, half_length]``.

    The main excursion (largest distance from the fixed point) sits at n = 0.
    """
    fp = henon_fixed_point(config)
    seeds = list(HOMOCLINIC_SEEDS)
    order = [seeds[seed % len(seeds)]] + [s for i, s in enumerate(seeds) if i != seed % len(seeds)]
    last = None
    for t in order:
        try:
            X, res = newton_orbit(config, _pseudo_orbit(config, fp, t, half_length))
        except NewtonDiverged as e:
            last = e
            continue
        d = np.linalg.norm(X - fp.point, axis=1)
        c = int(np.argmax(d))
        if c != half_length:
            X = np.roll(X[:-1], half_length - c, axis=0)
            X = np.vstack([X, X[:1]])
            X, res = newton_orbit(config, X)
        return OrbitSegment(X, -half_length, "periodic", float(np.abs(orbit_residual(config, X, False)).max()))
    raise NewtonDiverged(f"homoclinic Newton failed for all seeds: {last}")


def henon_multihump(config: HenonConfig, primary: OrbitSegment, M: int, total: int = 2000, buffer: int = 0) -> OrbitSegment:
    """Orbit on ``[-buffer, total + buffer]`` built from copies of the primary's center part.

    Whole copies of ``x_{-M/2}, ..., x_{M/2 - 1}`` are placed back to back,
    centred in the window, the remainder is padded with the fixed point, and
    Newton repairs the seams.
    """
    if not 0 < M < total:
        raise ValueError("need 0 < M < total")
    fp = henon_fixed_point(config)
    h = M // 2
    piece = np.array([primary.point(n) for n in range(-h, M - h)])
    length = total + 1 + 2 * buffer
    copies = length // M
    body = np.vstack([piece] * copies)
    pad = length - len(body)
    left = pad // 2
    X = np.vstack(
        [np.repeat(fp.point[None], left, axis=0), body, np.repeat(fp.point[None], pad - left, axis=0)]
    )
    X, _ = newton_orbit(config, X)
    return OrbitSegment(X, -buffer, "periodic", float(np.abs(orbit_residual(config, X, False)).max()))


def analysis_window(orbit: OrbitSegment, N: int, buffer: int = BUFFER, offset: int = REFERENCE_OFFSET) -> np.ndarray:
    """Points ``x_{c-N/2-buffer}, ..., x_{c+N/2+buffer}`` with ``c = offset``.

    Feeding these to :func:`variational_system` puts the main excursion at
    ``N/2`` of the analysis interval ``[buffer, buffer + N]``.
    """
    lo = offset - N // 2 - buffer
    hi = offset + N // 2 + buffer
    if lo < orbit.first or hi > orbit.first + len(orbit) - 1:
        raise ValueError(f"orbit {orbit.first}..{orbit.first + len(orbit) - 1} too short for [{lo}, {hi}]")
    return orbit.points[lo - orbit.first : hi - orbit.first + 1]


def variational_system(config: HenonConfig, points: np.ndarray, label: str = "henon-variational") -> SystemSpec:
    """``n -> DF(points[n])`` as a stored system."""
    return SystemSpec.from_matrices(config.jacobian(points), label=label)


def autonomous_system(config: HenonConfig = HenonConfig()) -> SystemSpec:
    fp = henon_fixed_point(config)
    return SystemSpec.autonomous(config.jacobian(fp.point), label="henon-autonomous")

"""Closed-form angular spectra of the rotation normal form and the mixed 3x3 case.

``A(rho, phi) = [[cos phi, -sin(phi)/rho], [rho sin phi, cos phi]]`` is the
rotation ``T_phi`` seen through ``D = diag(1, rho)``; a line at angle
``theta`` corresponds to the angle ``Psi_{1/rho}(theta)`` in rotated
coordinates.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np
import scipy.linalg
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import ConfigError, RationalityUndecided, SingularMatrix
from .optim import grid_extrema
from .spectra import AngularSpectrumSet

Q_MAX = 64
RATIONAL_TOL = 1e-12
QUAD_TOL = 1e-9  # absolute tolerance of the delta integral
ROOT_TOL = 1e-12
G_GRID = 4096
ERGODIC_POINTS = 2 ** 14


@dataclass(frozen=True)
class PiMultiple:
    """An exact angle ``(p/q) * pi``."""

    frac: Fraction

    def __init__(self, p, q=1):
        object.__setattr__(self, "frac", Fraction(p, q))

    def __float__(self):
        return float(self.frac) * np.pi

    @property
    def p(self):
        return self.frac.numerator

    @property
    def q(self):
        return self.frac.denominator


Angle = Union[float, PiMultiple]


def classify_angle(phi: Angle, q_max: int = Q_MAX) -> Fraction | None:
    """``phi/pi`` as a reduced fraction, or ``None`` for a float taken as irrational.

    Raises:
        RationalityUndecided: a float within 1e-12 of ``p/q * pi`` with ``q <= q_max``.
    """
    if isinstance(phi, PiMultiple):
        return phi.frac
    x = float(phi) / np.pi
    f = Fraction(x).limit_denominator(q_max)
    if abs(float(f) - x) < RATIONAL_TOL:
        raise RationalityUndecided(
            f"phi/pi = {x!r} is within {RATIONAL_TOL} of {f}; pass PiMultiple({f.numerator}, {f.denominator}) "
            "or perturb phi"
        )
    return None


# -- elementary functions ------------------------------------------------------


def psi(rho, theta):
    """``Psi_rho(theta) = arctan(rho tan theta)`` continued by ``Psi(theta + n pi) = Psi(theta) + n pi``."""
    theta = np.asarray(theta, dtype=float)
    n = np.floor((theta + np.pi / 2) / np.pi)
    r = theta - n * np.pi  # in [-pi/2, pi/2)
    with np.errstate(over="ignore", invalid="ignore"):
        v = np.arctan(rho * np.tan(r))
    v = np.where(r == -np.pi / 2, -np.pi / 2, v)
    out = v + n * np.pi
    return float(out) if out.ndim == 0 else out


def psi_inv(rho, theta):
    return psi(1.0 / rho, theta)


def skewness(rho: float, phi: Angle) -> float:
    return 0.5 * (rho + 1.0 / rho) * np.sin(float(phi))


def normal_form_matrix(rho: float, phi: Angle) -> np.ndarray:
    c, s = np.cos(float(phi)), np.sin(float(phi))
    return np.array([[c, -s / rho], [rho * s, c]])


def _check_params(rho, phi):
    if not rho > 0:
        raise ConfigError(f"rho must be positive, got {rho}")
    if not 0 < float(phi) < np.pi:
        raise ConfigError(f"phi must lie in (0, pi), got {float(phi)}")


def _reduce(rho: float, phi: Angle):
    """Map to ``0 < rho <= 1`` and ``0 < phi <= pi/2`` without changing the spectrum."""
    _check_params(rho, phi)
    if rho > 1:
        rho = 1.0 / rho  # A(rho, phi) is orthogonally similar to A(1/rho, phi)
    if isinstance(phi, PiMultiple):
        if phi.frac > Fraction(1, 2):
            phi = PiMultiple(1 - phi.frac)
    elif phi > np.pi / 2:
        phi = np.pi - phi
    return rho, phi


def delta(rho, phi, theta):
    """``delta(theta) = 2 Psi(theta) - 2 Psi(theta + phi) + pi``."""
    return 2 * psi(rho, theta) - 2 * psi(rho, np.asarray(theta) + phi) + np.pi


def G(rho, phi, q: int, theta):
    """Average line angle over one period of a rational rotation, see ``sigma1_closed_form``."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    x0 = psi_inv(rho, theta)
    th = np.array([psi(rho, j * phi + x0) for j in range(q + 1)])
    inc = np.diff(th, axis=0)
    out = np.minimum(inc, th[:-1] + np.pi - th[1:]).mean(axis=0)
    return out


# -- Sigma_1 of A(rho, phi) ----------------------------------------------------


@dataclass(frozen=True)
class ClosedFormResult:
    spectrum: AngularSpectrumSet
    case: str  # "sk<=1", "irrational", "rational"
    rho: float
    phi: float
    sk: float


def _negative_part_integral(rho, phi, tol=QUAD_TOL, n_scan=G_GRID):
    """``int_{[0, pi], delta < 0} delta``, splitting at bisection-refined sign changes."""
    f = lambda t: delta(rho, phi, t)
    xs = np.linspace(0.0, np.pi, n_scan + 1)
    v = f(xs)
    cuts = [0.0]
    for i in np.flatnonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0):
        cuts.append(brentq(f, xs[i], xs[i + 1], xtol=ROOT_TOL))
    cuts.append(np.pi)
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        m = 0.5 * (a + b)
        if f(m) < 0:
            val, _ = quad(f, a, b, epsabs=tol, epsrel=0, limit=200)
            total += val
    return total


def sigma1_closed_form(rho: float, phi: Angle, q_max: int = Q_MAX, tol: float = QUAD_TOL, grid: int = G_GRID) -> ClosedFormResult:
    """First outer angular spectrum of ``u_{n+1} = A(rho, phi) u_n``."""
    rho, phi = _reduce(rho, phi)
    frac = classify_angle(phi, q_max)
    ph = float(phi)
    sk = skewness(rho, ph)
    if sk <= 1.0:
        return ClosedFormResult(AngularSpectrumSet.from_elements([(ph, ph)]), "sk<=1", rho, ph, sk)
    if frac is None:
        v = ph + _negative_part_integral(rho, ph, tol) / np.pi
        return ClosedFormResult(AngularSpectrumSet.from_elements([(v, v)]), "irrational", rho, ph, sk)
    q = frac.denominator
    r = grid_extrema(lambda t: G(rho, ph, q, t), 0.0, np.pi / 2, grid, periodic=False, xtol=1e-12)
    spec = AngularSpectrumSet.from_elements(
        [(r["min"][0], r["max"][0])],
        [{"argmin": r["min"][1], "argmax": r["max"][1], "q": q}],
    )
    return ClosedFormResult(spec, "rational", rho, ph, sk)


# -- mixed 3x3 case ------------------------------------------------------------


@dataclass(frozen=True)
class MixedParams:
    """``A = [[B, b], [0, lam]]`` with ``B = A(rho, phi)``."""

    rho: float
    phi: Angle
    lam: float
    b: tuple

    def __post_init__(self):
        _check_params(self.rho, self.phi)
        if abs(abs(self.lam) - 1.0) < 1e-12:
            raise ConfigError("|lambda| must differ from 1")

    @property
    def B(self):
        return normal_form_matrix(self.rho, self.phi)

    @property
    def w(self):
        M = self.lam * np.eye(2) - self.B
        if abs(np.linalg.det(M)) < 1e-14:
            raise SingularMatrix("lambda I - B is singular")
        return np.linalg.solve(M, np.asarray(self.b, dtype=float))

    @property
    def matrix(self):
        A = np.zeros((3, 3))
        A[:2, :2] = self.B
        A[:2, 2] = self.b
        A[2, 2] = self.lam
        return A

    @property
    def Q(self):
        w = self.w
        return np.vstack([(1 + w @ w) * np.eye(2) - np.outer(w, w), -w[None, :]])


def _line_angle_rows(X, Y):
    c = np.abs(np.einsum("ij,ij->i", X, Y))
    s = np.linalg.norm(np.cross(X, Y), axis=1)
    return np.arctan2(s, c)


def T_map(rho, phi, eta):
    return psi(rho, phi + psi_inv(rho, eta))


def g_mixed(params: MixedParams, eta):
    """``g(eta) = angle(Q r(T eta), Q r(eta))``."""
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    Q = params.Q
    te = T_map(params.rho, float(params.phi), eta)
    X = np.stack([np.cos(eta), np.sin(eta)], axis=1) @ Q.T
    Y = np.stack([np.cos(te), np.sin(te)], axis=1) @ Q.T
    return _line_angle_rows(Y, X)


def theta2_orbit(params: MixedParams, eta, q: int):
    """``(1/q) sum_{l<q} g(T^l eta)``: the angle average of ``span((w, 1), (r(eta), 0))`` over one period."""
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    tot = np.zeros_like(eta)
    e = eta
    for _ in range(q):
        tot += g_mixed(params, e)
        e = T_map(params.rho, float(params.phi), e)
    return tot / q


@dataclass(frozen=True)
class MixedResult:
    spectrum: AngularSpectrumSet
    case: str
    theta2: float | None = None
    error_estimate: float | None = None


def sigma2_mixed(params: MixedParams, q_max: int = Q_MAX, points: int = ERGODIC_POINTS, grid: int = G_GRID) -> MixedResult:
    """Second outer angular spectrum of the mixed system."""
    frac = classify_angle(params.phi, q_max)
    rho, ph = params.rho, float(params.phi)
    if frac is None:
        # periodic integrand: composite trapezoid, compared against half the points
        def trap(n):
            xi = 2 * np.pi * np.arange(n) / n
            return float(g_mixed(params, psi(rho, xi)).mean())

        fine, coarse = trap(points), trap(points // 2)
        th = fine
        return MixedResult(AngularSpectrumSet.from_elements([(0.0, 0.0), (th, th)]), "irrational", th, abs(fine - coarse))
    q = frac.denominator
    r = grid_extrema(lambda eta: theta2_orbit(params, eta, q), 0.0, np.pi, grid, xtol=1e-12)
    spec = AngularSpectrumSet.from_elements([(0.0, 0.0), (r["min"][0], r["max"][0])],
                                            [{"argmin": r["min"][1], "argmax": r["max"][1], "q": q}])
    return MixedResult(spec, "rational")


def mixed_from_gamma(rho: float, phi: Angle, lam: float, gamma_w: float) -> MixedParams:
    """Mixed system whose eigenvector ``(w, 1)`` makes the angle ``gamma_w`` with the plane, ``w`` along e1."""
    wn = 0.0 if gamma_w >= np.pi / 2 else 1.0 / np.tan(gamma_w)
    w = np.array([wn, 0.0])
    b = (lam * np.eye(2) - normal_form_matrix(rho, phi)) @ w
    return MixedParams(rho, phi, lam, tuple(b))


# -- reduction of a 3x3 matrix ------------------------------------------------


@dataclass(frozen=True)
class SchurReduction:
    params: MixedParams
    scale: float
    transform: np.ndarray  # orthogonal U with U^T A U = scale * params.matrix


def normal_form_2x2(B: np.ndarray):
    """Orthogonal ``U`` and ``(r, rho, phi)`` with ``U^T B U = r A(rho, phi)``, ``rho <= 1``."""
    B = np.asarray(B, dtype=float)
    ev = np.linalg.eigvals(B)
    if abs(ev[0].imag) < 1e-14:
        raise ConfigError("block has real eigenvalues")
    r = abs(ev[0])
    t = 0.5 * np.arctan2(-(B[0, 0] - B[1, 1]), B[0, 1] + B[1, 0])
    U = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
    M = U.T @ B @ U
    if M[1, 0] < 0:
        F = np.diag([1.0, -1.0])
        U = U @ F
        M = F @ M @ F
    p, q = -M[0, 1], M[1, 0]
    if q > p:
        S = np.array([[0.0, 1.0], [1.0, 0.0]]) @ np.diag([1.0, -1.0])
        U = U @ S
        M = S.T @ M @ S
        p, q = -M[0, 1], M[1, 0]
    rho = np.sqrt(q / p)
    phi = float(np.arctan2(np.sqrt(p * q), 0.5 * (M[0, 0] + M[1, 1])))
    return U, r, rho, phi


def reduce_3x3(A) -> SchurReduction:
    """Bring a real 3x3 matrix with one complex pair into the mixed normal form."""
    A = np.asarray(A, dtype=float)
    T, Z, sdim = scipy.linalg.schur(A, output="real", sort=lambda re, im: abs(im) > 0)
    if sdim != 2:
        raise ConfigError("matrix needs exactly one complex conjugate pair")
    U2, r, rho, phi = normal_form_2x2(T[:2, :2])
    U = np.eye(3)
    U[:2, :2] = U2
    M = U.T @ T @ U / r
    Z = Z @ U
    params = MixedParams(rho, phi, float(M[2, 2]), (float(M[0, 2]), float(M[1, 2])))
    return SchurReduction(params, r, Z)


# -- parameter sweeps ----------------------------------------------------------


def sweep_sigma1(rho_grid, phi_grid, q_max: int = Q_MAX, snap_rational: bool = True):
    """Closed-form ``Sigma_1`` on a grid; rows ``(rho, phi, case_label, spec_min, spec_max)``.

    With ``snap_rational`` a float angle indistinguishable from a low
    denominator multiple of pi is evaluated as that exact multiple.
    """
    rows = []
    for rho in rho_grid:
        for phi in phi_grid:
            try:
                res = sigma1_closed_form(rho, phi, q_max)
            except RationalityUndecided:
                if not snap_rational:
                    raise
                f = Fraction(float(phi) / np.pi).limit_denominator(q_max)
                res = sigma1_closed_form(rho, PiMultiple(f.numerator, f.denominator), q_max)
            label = {"sk<=1": "point-sk", "irrational": "point", "rational": "interval"}[res.case]
            if res.case == "rational" and not res.spectrum.intervals:
                label = "point-rational"
            rows.append((float(rho), float(phi), label, res.spectrum.min(), res.spectrum.max()))
    return rows


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rho", "phi", "case_label", "spec_min", "spec_max"])
    for r in rows:
        w.writerow([repr(r[0]), repr(r[1]), r[2], repr(r[3]), repr(r[4])])
    return buf.getvalue()

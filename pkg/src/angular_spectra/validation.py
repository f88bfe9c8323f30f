"""In-process property suites behind ``angspec validate``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grassmann import (Subspace, batched_max_angle, grassmann_distance, max_angle, orthonormalize,
                        random_subspace)
from .normalform import psi
from .system import SystemSpec, dense_product_span, iterate_frames, propagate

C_PI = np.pi / 2 + np.sqrt(np.pi ** 2 / 4 + 1)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    samples: int
    worst: float
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<28} n={self.samples:<6} worst={self.worst:.3e} {self.detail}"


def _rng(seed):
    return np.random.default_rng(seed)


def psi_identities(psi_fn: Callable = psi, n: int = 10_000, seed: int = 0) -> SuiteResult:
    """``Psi(t + pi) - Psi(t) = pi`` and ``Psi_rho(Psi_{1/rho}(t)) = t``."""
    rng = _rng(seed)
    rho = rng.uniform(0.05, 1.0, n)
    t = rng.uniform(-10, 10, n)
    e1 = np.abs(psi_fn(rho, t + np.pi) - psi_fn(rho, t) - np.pi)
    e2 = np.abs(psi_fn(rho, psi_fn(1.0 / rho, t)) - t)
    worst = float(max(e1.max(), e2.max()))
    return SuiteResult("psi identities", worst <= 1e-12, n, worst)


def metric_axioms(n: int = 1000, seed: int = 1) -> SuiteResult:
    """Symmetry, identity, triangle inequality, basis invariance and the sin sandwich."""
    rng = _rng(seed)
    worst = 0.0
    ok = True
    for _ in range(n):
        d = int(rng.integers(2, 7))
        s = int(rng.integers(1, d))
        U, V, W = (random_subspace(d, s, rng) for _ in range(3))
        uv, vw, uw = max_angle(U, V), max_angle(V, W), max_angle(U, W)
        sym = abs(uv - max_angle(V, U))
        tri = uw - uv - vw
        Q, _ = np.linalg.qr(rng.standard_normal((s, s)))
        inv = abs(max_angle(Subspace(U.basis @ Q), V) - uv)
        ident = max_angle(U, U)
        dist = grassmann_distance(U, V)
        sandwich = max(uv / np.pi - dist, dist - uv)
        ok &= sym <= 1e-12 and tri <= 1e-10 and inv <= 1e-12 and ident <= 1e-12 and sandwich <= 1e-15
        worst = max(worst, sym, tri, inv, ident, sandwich)
    return SuiteResult("grassmann metric", bool(ok), n, worst)


def _cond_matrix(rng, d):
    while True:
        S = rng.standard_normal((d, d))
        if np.linalg.cond(S) < 50:
            return S


def perturbation_inequalities(n: int = 1000, seed: int = 2) -> SuiteResult:
    """``d(SV, SW) <= pi k (1 + k) d(V, W)`` and ``|<(SV, W) - <(V, W)| <= C_pi ||S - I||``."""
    rng = _rng(seed)
    worst = -np.inf
    for _ in range(n):
        d = int(rng.integers(2, 6))
        s = int(rng.integers(1, d))
        V, W = random_subspace(d, s, rng), random_subspace(d, s, rng)
        S = _cond_matrix(rng, d)
        k = np.linalg.cond(S)
        lhs = grassmann_distance(orthonormalize(S @ V.basis), orthonormalize(S @ W.basis))
        r1 = lhs - np.pi * k * (1 + k) * grassmann_distance(V, W)
        E = rng.standard_normal((d, d)) * rng.uniform(1e-4, 0.3)
        S2 = np.eye(d) + E
        r2 = abs(max_angle(orthonormalize(S2 @ V.basis), W) - max_angle(V, W)) - C_PI * np.linalg.norm(E, 2)
        worst = max(worst, r1, r2)
    return SuiteResult("angle perturbation bounds", worst <= 1e-12, n, float(worst), "(worst = max lhs - rhs)")


def drift_bound(n: int = 1000, seed: int = 3) -> SuiteResult:
    """``|alpha_n - alpha_{n+1}| <= pi / (n + 1)`` on random nonautonomous systems."""
    rng = _rng(seed)
    worst = -np.inf
    for _ in range(n // 20):
        d = int(rng.integers(2, 5))
        s = int(rng.integers(1, d))
        mats = rng.standard_normal((60, d, d)) + 2 * np.eye(d)
        sys = SystemSpec.from_matrices(mats)
        V = random_subspace(d, s, rng)
        a = propagate(sys, V, 60).running_mean()
        idx = rng.integers(1, 60, 20)
        viol = np.abs(a[idx - 1] - a[idx]) - np.pi / (idx + 1)
        worst = max(worst, float(viol.max()))
    return SuiteResult("average drift bound", worst <= 0.0, n, worst, "(worst = max lhs - rhs)")


def maxmin_oracle(n: int = 100, seed: int = 4, outer: int = 1024, inner: int = 4096) -> SuiteResult:
    """Maximal principal angle against a grid max-min over unit vectors in G(2, 4)."""
    rng = _rng(seed)
    a = np.linspace(0, np.pi, outer, endpoint=False)
    b = np.linspace(0, np.pi, inner, endpoint=False)
    ca, cb = np.stack([np.cos(a), np.sin(a)]), np.stack([np.cos(b), np.sin(b)])
    worst = 0.0
    for _ in range(n):
        V, W = random_subspace(4, 2, rng), random_subspace(4, 2, rng)
        v = (V.basis @ ca).T
        w = (W.basis @ cb).T
        c = np.clip(np.abs(v @ w.T), 0, 1)
        grid = float(np.max(np.min(np.arccos(c), axis=1)))
        worst = max(worst, abs(grid - max_angle(V, W)))
    return SuiteResult("max-min oracle", worst <= 1e-3, n, worst)


def propagation_oracle(n: int = 50, seed: int = 5) -> SuiteResult:
    """QR propagation against the plain matrix product for horizons up to 50.

    The product side loses accuracy in proportion to the conditioning of
    ``Phi(N, 0) V``, so each sample is judged relative to that.
    """
    rng = _rng(seed)
    worst = 0.0
    for _ in range(n):
        d = int(rng.integers(2, 6))
        s = int(rng.integers(1, d))
        N = int(rng.integers(1, 51))
        mats = rng.standard_normal((N, d, d)) + 1.5 * np.eye(d)
        sys = SystemSpec.from_matrices(mats)
        V = random_subspace(d, s, rng)
        *_, last = iterate_frames(sys, V, N)
        P = np.eye(d)
        for A in mats:
            P = A @ P
        kappa = np.linalg.cond(P @ V.basis)
        err = float(batched_max_angle(last.frame.basis[None], dense_product_span(sys, V, N).basis[None])[0])
        worst = max(worst, err / (1e-12 * (1.0 + kappa)))
    return SuiteResult("propagation oracle", worst <= 1.0, n, worst, "(worst = error / (1e-12 (1 + cond)))")


def run_all(psi_fn: Callable = psi) -> list:
    return [
        psi_identities(psi_fn),
        metric_axioms(),
        perturbation_inequalities(),
        drift_bound(),
        maxmin_oracle(),
        propagation_oracle(),
    ]

"""Small model systems with known angular behaviour."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from ..system import SystemSpec


def rotation(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def make_rotation_example(phi: float = np.pi / 4) -> SystemSpec:
    """Autonomous ``diag(T_phi, 2)`` in R^3."""
    if not 0 < phi <= np.pi / 2:
        raise ConfigError("phi must lie in (0, pi/2]")
    A = np.zeros((3, 3))
    A[:2, :2] = rotation(phi)
    A[2, 2] = 2.0
    return SystemSpec.autonomous(A, label=f"rotation3d({phi:.6g})")


def make_normal_form(rho: float, phi: float) -> SystemSpec:
    from ..normalform import normal_form_matrix

    return SystemSpec.autonomous(normal_form_matrix(rho, phi), label=f"normal-form({rho:.6g},{phi:.6g})")


# -- switching schedules ---------------------------------------------------


def _bit_length(n: np.ndarray) -> np.ndarray:
    """Bit length of nonnegative integers (exact below 2**53)."""
    n = np.asarray(n, dtype=np.int64)
    e = np.frexp(n.astype(float))[1]
    return np.where(n == 0, 0, e)


def e1_uses_phi0(n) -> np.ndarray:
    """``n = 0`` or ``n`` in some ``[2^(2l-1), 2^(2l) - 1]``: even bit length."""
    b = _bit_length(n)
    return (np.asarray(n) == 0) | (b % 2 == 0)


def e2_flip(n) -> np.ndarray:
    """``n`` in some ``[2 * 2^l - 4, 3 * 2^l - 5]`` with ``l >= 1``."""
    n = np.atleast_1d(np.asarray(n, dtype=np.int64))
    out = np.zeros(n.shape, dtype=bool)
    top = int(n.max()) if n.size else 0
    l = 1
    while 2 * 2 ** l - 4 <= top:
        out |= (n >= 2 * 2 ** l - 4) & (n <= 3 * 2 ** l - 5)
        l += 1
    return out


def make_switching(phi0: float, phi1: float, schedule: str = "E1") -> SystemSpec:
    """Switching systems on dyadic blocks.

    ``E1`` alternates the rotations ``T_phi0`` and ``T_phi1`` on blocks of
    doubling length.  ``E2`` uses the reflection ``diag(-1, 1)`` on the
    flip blocks and ``diag(1, 1/2)`` elsewhere; ``phi0``, ``phi1`` are
    ignored there.
    """
    if schedule == "E1":
        if not 0 <= phi0 < phi1 <= np.pi / 2:
            raise ConfigError("need 0 <= phi0 < phi1 <= pi/2")
        T0, T1 = rotation(phi0), rotation(phi1)

        def block(a, b):
            m = e1_uses_phi0(np.arange(a, b))
            return np.where(m[:, None, None], T0, T1)

        label = f"switching-E1({phi0:.6g},{phi1:.6g})"
    elif schedule == "E2":
        F, C = np.diag([-1.0, 1.0]), np.diag([1.0, 0.5])

        def block(a, b):
            m = e2_flip(np.arange(a, b))
            return np.where(m[:, None, None], F, C)

        label = "switching-E2"
    else:
        raise ConfigError(f"unknown schedule {schedule!r}")
    return SystemSpec(2, lambda n: block(n, n + 1)[0], label, None, block)


def e1_limits(phi0: float, phi1: float):
    """(liminf, limsup) of the angle averages for E1."""
    return (2 * phi0 + phi1) / 3, (phi0 + 2 * phi1) / 3


# -- counterexamples -------------------------------------------------------


def make_jordan() -> SystemSpec:
    return SystemSpec.autonomous([[1.0, 1.0], [0.0, 1.0]], label="jordan")


def make_scalar(a: float = 1.5) -> SystemSpec:
    """``a_n = a (1 + 1/n)`` with ``a_0 = 2a``; the perturbation is not summable."""

    def block(lo, hi):
        n = np.arange(lo, hi, dtype=float)
        f = np.where(n == 0, 2.0, 1.0 + 1.0 / np.maximum(n, 1.0))
        return (a * f)[:, None, None]

    return SystemSpec(1, lambda n: block(n, n + 1)[0], f"scalar({a})", None, block)


J2 = np.array([[0.0, -1.0], [1.0, 0.0]])
BLOCK_D = np.kron(np.eye(2), J2)
BLOCK_X = np.block([[np.zeros((2, 2)), np.eye(2)], [np.eye(2), np.zeros((2, 2))]])
BLOCK_S = np.eye(4) + np.outer(np.eye(4)[2], np.eye(4)[3])


def block_uses_x(n) -> np.ndarray:
    """``n = 2^(k+2) + k - 2`` for some ``k >= 0`` (2, 7, 16, 33, ...)."""
    n = np.atleast_1d(np.asarray(n, dtype=np.int64))
    out = np.zeros(n.shape, dtype=bool)
    k = 0
    top = int(n.max()) if n.size else 0
    while 2 ** (k + 2) + k - 2 <= top:
        out |= n == 2 ** (k + 2) + k - 2
        k += 1
    return out


def make_block_system(transformed: bool = False) -> SystemSpec:
    """``D``/``X`` switching in R^4; ``transformed`` conjugates with ``S``."""

    def block(a, b):
        m = block_uses_x(np.arange(a, b))
        return np.where(m[:, None, None], BLOCK_X, BLOCK_D)

    sys = SystemSpec(4, lambda n: block(n, n + 1)[0], "block-DX", None, block)
    return sys.conjugated(BLOCK_S) if transformed else sys


def make_jordan_and_scalar_counterexamples():
    return [make_jordan(), make_scalar(), make_block_system(), make_block_system(transformed=True)]

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from angular_spectra.errors import ConfigError, NonIntegralStepCount
from angular_spectra.grassmann import vector_line_angle
from angular_spectra.models import henon, lorenz, simple
from angular_spectra.models.henon import HenonConfig
from angular_spectra.models.lorenz import LorenzConfig

HC = HenonConfig()


@pytest.fixture(scope="module")
def orbit():
    return henon.henon_homoclinic(HC, half_length=1000)


# -- Henon ---------------------------------------------------------------------


def test_fixed_point_spectrum():
    fp = henon.henon_fixed_point(HC)
    np.testing.assert_allclose(HC.map(fp.point), fp.point, atol=1e-14)
    mags = np.sort(np.abs(fp.eigenvalues))
    assert mags[0] == pytest.approx(mags[1]) and mags[1] < 1 < mags[2]
    lam, v = fp.unstable
    np.testing.assert_allclose(HC.jacobian(fp.point) @ v, lam * v, atol=1e-12)


def test_homoclinic_orbit(orbit):
    assert orbit.residual < 1e-10
    assert np.abs(henon.orbit_residual(HC, orbit.points, periodic=True)).max() < 1e-10
    xi = henon.henon_fixed_point(HC).point
    dev = np.linalg.norm(orbit.points - xi, axis=1)
    assert dev[0] < 1e-10 and dev[-1] < 1e-10
    peak = orbit.indices[np.argmax(dev)]
    assert peak == 0 and dev.max() > 0.1
    assert np.all(np.abs(np.linalg.det(HC.jacobian(orbit.points))) > 1e-12)


def test_perturbation_is_summable(orbit):
    xi = henon.henon_fixed_point(HC).point
    d = np.linalg.norm(HC.jacobian(orbit.points) - HC.jacobian(xi), axis=(1, 2))
    n = orbit.indices
    tail = d[np.abs(n) > 200].sum()
    assert tail < 1e-8
    partial = np.cumsum(d[n >= 0])
    assert partial[-1] - partial[200] < 1e-8


def test_analysis_window(orbit):
    long = henon.henon_homoclinic(HC, half_length=2000)
    pts = henon.analysis_window(long, 100)
    assert len(pts) == 100 + 2 * henon.BUFFER + 1
    np.testing.assert_array_equal(pts[0], long.point(henon.REFERENCE_OFFSET - 50 - henon.BUFFER))
    sys = henon.variational_system(HC, pts)
    np.testing.assert_allclose(sys.matrix_at(3), HC.jacobian(pts[3]))
    with pytest.raises(ValueError):
        henon.analysis_window(orbit, 4000)


def test_multihump(orbit):
    mh = henon.henon_multihump(HC, henon.henon_homoclinic(HC, half_length=2000), 100, total=1000, buffer=50)
    assert mh.first == -50 and len(mh) == 1101
    assert mh.residual < 1e-10
    xi = henon.henon_fixed_point(HC).point
    dev = np.linalg.norm(mh.points - xi, axis=1)
    humps = mh.indices[(dev > 0.5 * dev.max()) & (dev >= np.roll(dev, 1)) & (dev >= np.roll(dev, -1))]
    assert len(humps) >= 9
    assert np.all(np.isin(np.diff(humps), [99, 100, 101]))


def test_central_difference_matches_analytic_jacobian():
    rng = np.random.default_rng(3)
    for x in rng.uniform(-1.5, 1.5, (50, 3)):
        J = lorenz.central_difference_jacobian(HC.map, x)
        np.testing.assert_allclose(J, HC.jacobian(x), atol=1e-7)


# -- Lorenz --------------------------------------------------------------------


def test_lorenz_config_validation():
    assert LorenzConfig(h=0.05).substeps == 500
    assert LorenzConfig().with_h(0.2).substeps == 2000
    with pytest.raises(NonIntegralStepCount):
        LorenzConfig(h=0.00015).substeps


@settings(max_examples=20)
@given(st.tuples(*[st.floats(-15, 15)] * 2, st.floats(5, 40)))
def test_lorenz_semigroup(x):
    x = np.array(x)
    c = LorenzConfig(h=0.05)
    two = lorenz.step_map(x, c.with_h(0.1))
    np.testing.assert_allclose(two, lorenz.step_map(lorenz.step_map(x, c), c), atol=1e-9)


def test_lorenz_rhs_and_orbit():
    c = LorenzConfig()
    np.testing.assert_allclose(lorenz.lorenz_rhs([1.0, 2.0, 3.0], c), [10.0, 28 - 3 - 2, 2 - 8.0], atol=1e-14)
    X = lorenz.lorenz_orbit(c, 200)
    assert X.shape == (200, 3)
    np.testing.assert_array_equal(X[0], c.x0)
    np.testing.assert_allclose(X[1], lorenz.step_map(X[0], c), atol=1e-12)
    assert np.abs(X).max() < 60


def test_lorenz_jacobians():
    c = LorenzConfig(h=0.05)
    X, sys = lorenz.lorenz_variational(c, 30)
    x = X[7]
    J = sys.matrix_at(7)
    dx = 1e-7 * np.array([1.0, -2.0, 0.5])
    np.testing.assert_allclose(lorenz.step_map(x + dx, c) - lorenz.step_map(x - dx, c), 2 * J @ dx, atol=1e-9)
    # phase-volume contraction exp(-(sigma + 1 + beta) h)
    assert np.linalg.det(J) == pytest.approx(np.exp(-(10 + 1 + 8 / 3) * 0.05), rel=1e-6)


def test_angle_on_average_uses_lines():
    X = np.array([[0, 0, 0], [1, 0, 0], [0, 0, 0], [1, 1, 0.0]])
    # steps: +e1, -e1, (1, 1, 0): line angles 0 and pi/4
    assert lorenz.angle_on_average(X) == pytest.approx(np.pi / 8)
    assert lorenz.angle_on_average(X, directed=True) == pytest.approx((np.pi + 3 * np.pi / 4) / 2)


# -- toy systems ---------------------------------------------------------------


def _dyadic_members(lo_fn, hi_fn, top):
    out = set()
    l = 1
    while lo_fn(l) < top:
        out.update(range(lo_fn(l), min(hi_fn(l), top - 1) + 1))
        l += 1
    return out


def test_e1_schedule_first_64():
    phi0 = {0} | _dyadic_members(lambda l: 2 ** (2 * l - 1), lambda l: 2 ** (2 * l) - 1, 64)
    expected = [n in phi0 for n in range(64)]
    assert simple.e1_uses_phi0(np.arange(64)).tolist() == expected
    assert expected[:9] == [True, False, True, True, False, False, False, False, True]


def test_e2_schedule_first_64():
    flip = _dyadic_members(lambda l: 2 * 2 ** l - 4, lambda l: 3 * 2 ** l - 5, 64)
    assert simple.e2_flip(np.arange(64)).tolist() == [n in flip for n in range(64)]
    assert sorted(flip)[:8] == [0, 1, 4, 5, 6, 7, 12, 13]


def test_switching_systems():
    s = simple.make_switching(0.1, 0.5, "E1")
    np.testing.assert_allclose(s.matrix_at(0), simple.rotation(0.1))
    np.testing.assert_allclose(s.matrix_at(1), simple.rotation(0.5))
    np.testing.assert_allclose(s.matrices(2, 4), [simple.rotation(0.1)] * 2)
    e2 = simple.make_switching(0, 1, "E2")
    np.testing.assert_allclose(e2.matrix_at(0), np.diag([-1.0, 1.0]))
    np.testing.assert_allclose(e2.matrix_at(2), np.diag([1.0, 0.5]))
    assert simple.e1_limits(0.0, 0.9) == pytest.approx((0.3, 0.6))
    with pytest.raises(ConfigError):
        simple.make_switching(0.5, 0.1)
    with pytest.raises(ConfigError):
        simple.make_switching(0.1, 0.5, "E3")


def test_rotation_example():
    s = simple.make_rotation_example(np.pi / 4)
    assert np.sort(np.abs(np.linalg.eigvals(s.matrix_at(0)))) == pytest.approx([1, 1, 2])
    with pytest.raises(ConfigError):
        simple.make_rotation_example(2.0)


def test_counterexamples():
    jordan, scalar, blocks, blocks_t = simple.make_jordan_and_scalar_counterexamples()
    A = jordan.matrix_at(0)
    for n in (1, 4, 12):
        v = np.array([-n + 1.0, 1.0])
        a = np.linalg.matrix_power(A, n - 1) @ v
        assert vector_line_angle(a, A @ a) == pytest.approx(np.pi / 4, abs=1e-12)
    a = scalar.matrices(1, 10001)[:, 0, 0]
    assert np.sum(np.abs(a - 1.5)) == pytest.approx(1.5 * np.sum(1.0 / np.arange(1, 10001)))
    uses = simple.block_uses_x(np.arange(70))
    assert np.flatnonzero(uses).tolist() == [2, 7, 16, 33, 66]
    np.testing.assert_allclose(blocks.matrix_at(7), simple.BLOCK_X)
    np.testing.assert_allclose(blocks.matrix_at(8), simple.BLOCK_D)
    S = simple.BLOCK_S
    np.testing.assert_allclose(blocks_t.matrix_at(7), S @ simple.BLOCK_X @ np.linalg.inv(S), atol=1e-12)

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from angular_spectra.dichotomy import (BundleSet, SpectralIntervals, approx_spectrum, intervals_from_rates, qr_frames,
                                        qr_sweep, spectral_bundles, trace_spaces, window_rates)
from angular_spectra.errors import NotSupported
from angular_spectra.grassmann import Subspace, max_angle, orthonormalize, random_subspace, span
from angular_spectra.models.simple import make_rotation_example
from angular_spectra.system import SystemSpec, propagate

seeds = st.integers(0, 2 ** 32 - 1)


def conjugated_diag(rng, lams):
    d = len(lams)
    S = np.eye(d) + 0.4 * rng.standard_normal((d, d))
    return S @ np.diag(lams) @ np.linalg.inv(S), S


def test_rotation_example_has_two_intervals():
    sys = make_rotation_example(np.pi / 4)
    spec = approx_spectrum(sys, 400)
    assert spec.dims == (1, 2)
    assert spec.contains(2.0, 1e-9) and spec.contains(1.0, 1e-9)
    (a, b), (c, e) = spec.intervals
    assert a == pytest.approx(2.0, rel=1e-9) and e == pytest.approx(1.0, rel=1e-9)
    assert spec.gap_points[0] > 1.0 and spec.gap_points[0] < 2.0


def test_diagonal_bundles_are_eigenlines(rng):
    A, S = conjugated_diag(rng, [3.0, 1.0, 0.4])
    sys = SystemSpec.autonomous(A)
    spec = approx_spectrum(sys, 300)
    assert spec.dims == (1, 1, 1)
    for (lo, hi), lam in zip(spec.intervals, [3.0, 1.0, 0.4]):
        assert lo - 1e-2 <= lam <= hi + 1e-2
    b = spectral_bundles(sys, spec, 100, origin=50)
    for k in range(3):
        assert max_angle(b.subspace(k), span(S[:, k])) < 1e-8
    assert b.transversality() > 0.1


def test_window_rates_of_constant_growth():
    logd = np.log(np.array([[2.0, 0.5]] * 20))
    r = window_rates(logd, 5)
    np.testing.assert_allclose(r, [[2.0, 0.5]] * 16)


def test_qr_sweep_backward_inverts():
    A = np.array([[2.0, 1.0], [0.0, 0.5]])
    sys = SystemSpec.autonomous(A)
    logf, _ = qr_sweep(sys, 0, 200)
    logb, _ = qr_sweep(sys, 0, 200, backward=True)
    np.testing.assert_allclose(np.sort(np.exp(logf.mean(0))), [0.5, 2.0], rtol=1e-2)
    np.testing.assert_allclose(np.sort(np.exp(-logb.mean(0))), [0.5, 2.0], rtol=1e-2)
    Q = qr_frames(sys, 0, 10)
    assert Q.shape == (11, 2, 2)
    np.testing.assert_allclose(np.swapaxes(Q, 1, 2) @ Q, np.broadcast_to(np.eye(2), Q.shape), atol=1e-13)


def test_rate_merging():
    # two directions with overlapping ranges collapse into one interval
    rates = np.array([[1.5, 1.0, 0.99, 0.3], [1.52, 1.01, 1.0, 0.31]])
    spec = intervals_from_rates(rates)
    assert spec.dims == (1, 2, 1)
    assert spec.intervals[1] == (pytest.approx(0.99), pytest.approx(1.01))


def test_probe_rates_veto_a_gap():
    rates = np.array([[1.0, 0.8], [1.01, 0.81]])
    probe = np.array([[1.0, 0.8], [1.01, 1.05]])
    assert intervals_from_rates(rates).dims == (1, 1)
    assert intervals_from_rates(rates, probe_rates=probe).dims == (2,)


def test_interval_validation():
    with pytest.raises(ValueError):
        SpectralIntervals(((1.0, 2.0), (1.5, 3.0)), (1, 1), (1.7,))
    with pytest.raises(ValueError):
        SpectralIntervals(((0.0, 1.0),), (1,), ())


def test_trace_space_enumeration():
    b = BundleSet.constant([np.eye(3)[:, :1], np.eye(3)[:, 1:]], N=5)
    s1 = list(trace_spaces(b, 1))
    assert [f.signature for f in s1] == [(0, 1), (1, 0)]
    assert [f.n_params for f in s1] == [1, 0]
    s2 = list(trace_spaces(b, 2))
    assert sorted((f.signature, f.n_params) for f in s2) == [((0, 2), 0), ((1, 1), 1)]
    with pytest.raises(NotSupported):
        list(trace_spaces(BundleSet.constant([np.eye(3)], N=1), 1))


@given(seeds, st.floats(0, np.pi), st.floats(0, np.pi))
def test_trace_bases_are_orthonormal_and_in_bundles(seed, b1, b2):
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    bs = BundleSet.constant([Q[:, :2], Q[:, 2:]], N=3)
    fam = [f for f in trace_spaces(bs, 2) if f.n_params == 2][0]
    X = fam.basis([b1, b2])
    np.testing.assert_allclose(X.T @ X, np.eye(2), atol=1e-12)
    W0, W1 = Subspace(Q[:, :2]), Subspace(Q[:, 2:])
    V = Subspace(X)
    assert sum(W.contains(V.basis[:, i]) for W in (W0, W1) for i in range(2)) <= 2
    # the span meets each bundle in a line
    P = np.column_stack([W0.projector() @ X, W1.projector() @ X])
    assert np.linalg.matrix_rank(P, tol=1e-8) == 2


@given(seeds, st.floats(0.05, 20.0))
def test_scaled_spectrum(seed, c):
    rng = np.random.default_rng(seed)
    A, _ = conjugated_diag(rng, [2.5, 1.0, 0.3])
    sys = SystemSpec.autonomous(A)
    ref = approx_spectrum(sys, 200).scaled(c)
    got = approx_spectrum(sys.scaled(-c), 200)
    assert got.dims == ref.dims
    for (a, b), (x, y) in zip(got.intervals, ref.intervals):
        assert abs(a - x) <= 1e-3 * x and abs(b - y) <= 1e-3 * y


# pushing the slowest bundle forward amplifies roundoff by (2 / 0.5)^n,
# so n stays where 4^n * eps is far below the tolerance
@given(seeds, st.integers(1, 10))
def test_bundle_invariance(seed, n):
    rng = np.random.default_rng(seed)
    A, _ = conjugated_diag(rng, [2.0, 1.0, 0.5])
    sys = SystemSpec.autonomous(A)
    spec = approx_spectrum(sys, 200)
    b0 = spectral_bundles(sys, spec, 40, origin=20)
    bn = spectral_bundles(sys, spec, 40, origin=20 + n)
    for k in range(len(spec.dims)):
        moved = orthonormalize(np.linalg.matrix_power(A, n) @ b0.subspace(k).basis)
        assert max_angle(moved, bn.subspace(k)) < 1e-4


def test_fields_follow_the_dynamics(rng):
    A, _ = conjugated_diag(rng, [2.0, 0.9, 0.5])
    sys = SystemSpec.autonomous(A)
    b = spectral_bundles(sys, approx_spectrum(sys, 200), 30, origin=20)
    for k in range(3):
        W = b.fields[k]
        for j in (1, 10, 30):
            assert max_angle(orthonormalize(A @ W[j - 1]), Subspace(W[j])) < 1e-8


@given(seeds)
def test_mixed_directions_align_with_dominant_axis(seed):
    rng = np.random.default_rng(seed)
    sys = make_rotation_example(np.pi / 4)
    v = rng.standard_normal(3)
    v[2] = np.sign(v[2] or 1.0) * max(abs(v[2]), 0.1)
    ser = propagate(sys, span(v), 10 ** 4)
    assert abs(ser.values.mean() - propagate(sys, span([0.0, 0.0, 1.0]), 10 ** 4).values.mean()) <= 1e-3

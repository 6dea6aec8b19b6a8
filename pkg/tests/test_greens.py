import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gamma

from fracmix import greens
from fracmix.errors import DomainError, InvalidParams
from fracmix.greens import ProblemParams
from fracmix.spectrum import principal_mixed_eigenvalue


def lam_zero_kernel(alpha, t, s):
    t, s = np.broadcast_arrays(np.asarray(t, float), np.asarray(s, float))
    tail = np.where(s <= t, np.clip(t - s, 0, None) ** (alpha - 1), 0.0)
    return (t ** (alpha - 1) * (1 - s) ** (alpha - 2) - tail) / gamma(alpha)


def test_boundary_zeros():
    p = ProblemParams(1.5, -0.4)
    s = np.linspace(0, 0.99, 50)
    np.testing.assert_array_equal(greens.green_eval(p, 0.0, s), 0.0)
    np.testing.assert_allclose(greens.green_eval(p, s[1:], 0.0), 0.0, atol=1e-15)


def test_order_two_is_min():
    p = ProblemParams(2.0, 0.0)
    t, s = np.meshgrid(np.linspace(0, 1, 41), np.linspace(0, 0.99, 41), indexing="ij")
    np.testing.assert_allclose(greens.green_eval(p, t, s), np.minimum(t, s), atol=1e-15)


def test_order_two_oscillatory_kernel():
    # u'' + u + y = 0, u(0) = 0, u'(1) = 0
    p = ProblemParams(2.0, -1.0)
    t, s = np.meshgrid(np.linspace(0, 1, 21), np.linspace(0, 0.95, 21), indexing="ij")
    expected = np.sin(t) * np.cos(1 - s) / np.cos(1) - np.where(s <= t, np.sin(t - s), 0.0)
    np.testing.assert_allclose(greens.green_eval(p, t, s), expected, atol=1e-13)


@given(st.floats(1.05, 1.99), st.floats(0.0, 1.0), st.floats(0.0, 0.999))
@settings(max_examples=60, deadline=None)
def test_lam_zero_closed_form(alpha, t, s):
    got = greens.green_eval(ProblemParams(alpha, 0.0), t, s)
    ref = float(lam_zero_kernel(alpha, t, s))
    assert got == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_derivative_order_two():
    p = ProblemParams(2.0, 0.0)
    assert greens.green_dt(p, 0.3, 0.6) == pytest.approx(1.0, abs=1e-14)
    assert greens.green_dt(p, 0.7, 0.2) == pytest.approx(0.0, abs=1e-14)


def test_derivative_vanishes_at_right_end():
    for alpha, lam in [(1.5, -0.5), (1.2, 0.3), (1.9, -1.0)]:
        s = np.linspace(0, 0.95, 30)
        np.testing.assert_allclose(greens.green_dt(ProblemParams(alpha, lam), 1.0, s), 0.0, atol=1e-12)


def test_weighted_derivative_finite_difference():
    p = ProblemParams(1.5, -0.3)
    h = 1e-5
    w = lambda t: t ** (2 - 1.5) * greens.green_eval(p, t, 0.7)
    fd = (w(0.4 + h) - w(0.4 - h)) / (2 * h)
    assert greens.green_dt_weighted(p, 0.4, 0.7) == pytest.approx(fd, abs=1e-6)


def test_derivative_finite_difference():
    p = ProblemParams(1.7, -0.8)
    h = 1e-6
    fd = (greens.green_eval(p, 0.55 + h, 0.3) - greens.green_eval(p, 0.55 - h, 0.3)) / (2 * h)
    assert greens.green_dt(p, 0.55, 0.3) == pytest.approx(fd, abs=1e-7)


def test_interval_scaling():
    p = ProblemParams(1.6, -0.5, interval=(1.0, 3.0))
    u = p.unit()
    assert u.lam == pytest.approx(-0.5 * 2**1.6)
    got = greens.green_eval(p, 2.0, 1.5)
    ref = greens.green_unit(1.6, u.lam, 0.5, 0.25) * 2 ** 0.6
    assert got == pytest.approx(ref, rel=1e-14)


def test_domain_errors():
    p = ProblemParams(1.5, 0.0)
    with pytest.raises(DomainError):
        greens.green_eval(p, 1.2, 0.5)
    with pytest.raises(DomainError):
        greens.green_eval(p, 0.5, 1.0)


def test_eigenvalue_rejected():
    lam1 = principal_mixed_eigenvalue(1.5).value
    with pytest.raises(InvalidParams):
        greens.green_eval(ProblemParams(1.5, lam1), 0.5, 0.5)


def test_invalid_params():
    with pytest.raises(InvalidParams):
        ProblemParams(2.5, 0.0)
    with pytest.raises(InvalidParams):
        ProblemParams(1.5, 0.0, interval=(1.0, 1.0))
    with pytest.raises(InvalidParams):
        ProblemParams(1.5, math.inf)


def test_h_at_zero_order_two():
    p = ProblemParams(2.0, 0.0)
    t = np.linspace(0.05, 1, 20)
    np.testing.assert_allclose(greens.h_tilde(p, t, 0.0), 1.0, atol=1e-10)
    s = np.linspace(0.1, 0.9, 9)
    np.testing.assert_allclose(greens.h_tilde(p, 0.5, s), np.minimum(0.5, s) / s, atol=1e-14)
    assert greens.h_tilde(p, 0.0, 0.3) == 0.0


def test_limit_ladder_is_self_consistent():
    a = greens.richardson_limit(1.5, -0.3, 0.6)
    b = greens.richardson_limit(1.5, -0.3, 0.6, s0=greens.LADDER_START / 2)
    assert a[0] == pytest.approx(b[0], abs=1e-8)
    closed = greens.l_closed_form(ProblemParams(1.5, -0.3), 0.6)
    assert a[0] == pytest.approx(closed, abs=1e-8)


def test_envelope_order_two():
    env = greens.bounds_envelope(ProblemParams(2.0, 0.0))
    assert env.M == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(env.m_grid, env.t_grid, atol=1e-10)
    env = greens.bounds_envelope(ProblemParams(2.0, 0.0), c1=0.25)
    assert env.m0 == pytest.approx(0.25, abs=1e-10)


@pytest.mark.parametrize("alpha, lam", [(1.5, -0.5), (1.8, 0.0)])
def test_envelope_sandwich(alpha, lam):
    p = ProblemParams(alpha, lam)
    env = greens.bounds_envelope(p)
    rng = np.random.default_rng(7)
    t, s = rng.random(10_000), rng.random(10_000) * 0.999
    H = greens.h_tilde(p, t, s)
    slack = 1e-6 + env.allowance
    assert np.all(H <= env.M + slack)
    assert np.all(H >= env.m(t) - slack)


def test_envelope_rejects_bad_arguments():
    with pytest.raises(InvalidParams):
        greens.bounds_envelope(ProblemParams(1.5, 0.0), grid_n=10)
    with pytest.raises(InvalidParams):
        greens.bounds_envelope(ProblemParams(1.5, 0.0), c1=1.0)
    with pytest.raises(InvalidParams):
        greens.bounds_envelope(ProblemParams(1.5, -5.0))


@pytest.mark.parametrize("alpha", [1.3, 1.7])
def test_positivity_threshold(alpha):
    lam1 = principal_mixed_eigenvalue(alpha).value
    assert greens.positivity_report(ProblemParams(alpha, lam1 + 0.1)).all_positive
    rep = greens.positivity_report(ProblemParams(alpha, lam1 - 0.5))
    assert not rep.all_positive
    assert any(t < s for t, s in rep.witnesses)


def test_positivity_order_two():
    rep = greens.positivity_report(ProblemParams(2.0, 0.0))
    assert rep.all_positive
    assert rep.min_value > 0


def test_v1_weighted_limit():
    p = ProblemParams(1.5, -0.4)
    t = 1e-8
    assert t ** (2 - 1.5) * greens.v1_eval(p, t) == pytest.approx(1.0, abs=1e-6)
    assert greens.v1_deriv(p, 1.0) == pytest.approx(0.0, abs=1e-12)


def test_v2_boundary_data():
    p = ProblemParams(1.5, -0.4)
    assert greens.v2_deriv(p, 1.0) == pytest.approx(1.0, abs=1e-14)
    assert greens.w2_unit(p, 0.0) == 0.0


def test_v2_order_two_oscillatory():
    p = ProblemParams(2.0, -1.0)
    t = np.linspace(0, 1, 11)
    np.testing.assert_allclose(greens.v2_eval(p, t), np.sin(t) / np.cos(1), atol=1e-14)
    assert greens.v2_eval(p, 1.0) == pytest.approx(math.tan(1.0), abs=1e-14)
    np.testing.assert_allclose(greens.v1_eval(p, t), np.cos(t) + np.tan(1) * np.sin(t), atol=1e-14)


@given(st.floats(1.05, 2.0), st.floats(0.0, 1.0))
@settings(max_examples=40, deadline=None)
def test_v_positive_above_threshold(alpha, frac):
    lam1 = principal_mixed_eigenvalue(alpha).value
    lam = lam1 * 0.98 * frac
    p = ProblemParams(alpha, lam)
    t = np.linspace(0.01, 1, 50)
    assert np.all(greens.v1_eval(p, t) > 0)
    assert np.all(greens.v2_eval(p, t) > 0)


@given(st.floats(1.05, 1.99), st.floats(0.02, 0.98))
@settings(max_examples=30, deadline=None)
def test_blow_up_rate(alpha, t):
    # (1-s)^(2-a) G(t, s) has a finite limit as s -> 1
    p = ProblemParams(alpha, -0.2)
    s = 1 - np.array([1e-5, 1e-6, 1e-7])
    vals = (1 - s) ** (2 - alpha) * greens.green_eval(p, t, s)
    assert np.all(np.isfinite(vals))
    assert abs(vals[-1] - vals[-2]) <= 1e-4 * max(1.0, abs(vals[-1]))

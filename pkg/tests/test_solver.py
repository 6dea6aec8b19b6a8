import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracmix import exprlang, greens, solver
from fracmix.errors import InvalidParams, MaxIterExceeded, OrderViolation
from fracmix.greens import ProblemParams
from fracmix.solver import WGridFunction
from fracmix.spectrum import principal_mixed_eigenvalue

one = lambda t, w: np.ones_like(np.asarray(t, dtype=float) + w)
example2 = exprlang.to_callable(exprlang.builtin("example2"))


def test_chebyshev_grid_endpoints():
    g = solver.chebyshev_grid(9)
    assert g[0] == 0.0 and g[-1] == 1.0
    assert np.all(np.diff(g) > 0)


def test_grid_function_validation():
    with pytest.raises(InvalidParams):
        WGridFunction(np.array([0.0, 0.5]), np.array([1.0, 2.0]), 1.5)
    with pytest.raises(InvalidParams):
        WGridFunction(np.array([0.0, 0.5, 0.4]), np.zeros(3), 1.5)


def test_grid_function_values():
    u = WGridFunction.from_u(lambda t: t ** (1.5 - 2) * (1 + t), 1.5, n_points=33)
    np.testing.assert_allclose(u.w_values, 1 + u.grid, atol=1e-12)
    assert u.norm == pytest.approx(2.0)
    assert u.u_values[0] == math.inf
    assert u(0.37) == pytest.approx(1.37, abs=1e-12)
    rows = u.to_rows()
    assert rows.shape == (33, 3)


def test_linear_order_two():
    u = solver.solve_linear(ProblemParams(2.0, 0.0), np.ones_like)
    t = u.grid
    np.testing.assert_allclose(u.w_values, t - t**2 / 2, atol=1e-12)
    np.testing.assert_allclose(u.u_values, u.w_values)


def test_linear_zero_source():
    u = solver.solve_linear(ProblemParams(1.5, -0.3), np.zeros_like)
    assert np.all(u.w_values == 0.0)


def test_linear_homogeneous_is_v1():
    p = ProblemParams(1.5, -0.3, A=1.0)
    u = solver.solve_linear(p, np.zeros_like)
    np.testing.assert_allclose(u.w_values, greens.w1_unit(p, u.grid), atol=1e-12)


def test_linear_positive_solution():
    u = solver.solve_linear(ProblemParams(1.5, -0.3), lambda t: 1 + np.sin(3 * t) ** 2)
    assert np.all(u.w_values[1:] > 0)


def test_linear_solution_satisfies_equation():
    p = ProblemParams(1.6, -0.4, A=0.3, B=-0.1)
    y = lambda t: np.exp(-t)
    u = solver.solve_linear(p, y)
    from fracmix.fracoracle import ode_residual

    rep = ode_residual(u, p, lambda t, w: y(t))
    assert rep.max_interior < 1e-4


@given(
    st.floats(1.1, 2.0),
    st.floats(0.0, 0.95),
    st.floats(-2.0, 2.0),
    st.floats(-2.0, 2.0),
)
@settings(max_examples=8, deadline=None)
def test_linear_boundary_data(alpha, frac, A, B):
    lam = principal_mixed_eigenvalue(alpha).value * frac
    u = solver.solve_linear(ProblemParams(alpha, lam, A=A, B=B), lambda t: 1 + t)
    assert abs(u.w_values[0] - A) <= 1e-8
    assert abs(u.meta["slope"] - B) <= 1e-6


def test_picard_constant_nonlinearity():
    rep = solver.picard_solve(ProblemParams(2.0, 0.0), one)
    # the first iterate is already the fixed point; the second step confirms it
    assert rep.iterations <= 2
    assert rep.step_norms[-1] <= 1e-12
    t = rep.solution.grid
    np.testing.assert_allclose(rep.solution.w_values, t - t**2 / 2, atol=1e-12)


def test_picard_affine_nonlinearity():
    # -u'' = u/4 + 1, u(0) = 0, u'(1) = 0
    rep = solver.picard_solve(ProblemParams(2.0, 0.0), lambda t, w: w / 4 + 1)
    t = rep.solution.grid
    exact = 4 * np.cos(t / 2) + 4 * np.tan(0.5) * np.sin(t / 2) - 4
    np.testing.assert_allclose(rep.solution.w_values, exact, atol=1e-9)
    assert rep.converged


def test_picard_rational_example():
    rep = solver.picard_solve(ProblemParams(5 / 3, 0.0), example2, K=0.25)
    assert rep.converged
    assert rep.residual_fp <= 1e-8
    assert rep.residual_ode <= 0.01
    assert max(rep.ratios) <= rep.certificate_q + 0.05
    d = rep.to_dict(include_solution=False)
    assert {"iterations", "certificate_q", "residual_fp", "M"} <= set(d)


def test_picard_rejects_kernel_sign_change():
    lam = principal_mixed_eigenvalue(1.5).value - 0.2
    with pytest.raises(InvalidParams):
        solver.picard_solve(ProblemParams(1.5, lam), one)


def test_picard_max_iter():
    with pytest.raises(MaxIterExceeded) as err:
        solver.picard_solve(ProblemParams(1.5, 0.0), lambda t, w: 2 * w + 1, max_iter=5)
    assert len(err.value.step_norms) == 5
    assert isinstance(err.value.last_iterate, WGridFunction)


def test_certificate_values():
    env2 = greens.bounds_envelope(ProblemParams(2.0, 0.0))
    q, ok = solver.contraction_certificate(ProblemParams(2.0, 0.0), 0.25, env2)
    assert q == pytest.approx(0.125, abs=1e-10) and ok
    assert solver.contraction_certificate(ProblemParams(2.0, 0.0), 0.0, env2) == (0.0, True)
    p = ProblemParams(5 / 3, 0.0)
    env = greens.bounds_envelope(p)
    q, ok = solver.contraction_certificate(p, 0.25, env)
    assert q == pytest.approx(0.225 * env.M, rel=1e-12)
    with pytest.raises(InvalidParams):
        solver.contraction_certificate(p, -1.0, env)


def test_monotone_exact_bracket():
    p = ProblemParams(2.0, 0.0)
    lower = WGridFunction.from_w(np.zeros_like, 2.0)
    upper = WGridFunction.from_w(lambda t: t, 2.0)
    rep = solver.monotone_solve(p, one, lower, upper)
    t = rep.solution.grid
    np.testing.assert_allclose(rep.solution.w_values, t - t**2 / 2, atol=1e-10)
    assert rep.details["in_bracket"]
    assert rep.details["bracket_excess"] == 0.0


def test_monotone_degenerate_bracket():
    p = ProblemParams(2.0, 0.0)
    exact = WGridFunction.from_w(lambda t: t - t**2 / 2, 2.0)
    rep = solver.monotone_solve(p, one, exact, exact)
    assert rep.iterations == 0
    np.testing.assert_allclose(rep.solution.w_values, exact.w_values, atol=1e-12)
    assert rep.residual_fp <= 1e-10


def test_monotone_order_violation():
    p = ProblemParams(2.0, 0.0)
    lower = WGridFunction.from_w(lambda t: t, 2.0)
    upper = WGridFunction.from_w(lambda t: t - 0.1, 2.0)
    with pytest.raises(OrderViolation):
        solver.monotone_solve(p, one, lower, upper)


def test_lower_solution_power():
    # gamma = -t^a: D^a gamma = -Gamma(a+1)
    alpha = 1.5
    p = ProblemParams(alpha, 0.0, B=-alpha / 2)
    f = exprlang.to_callable(exprlang.builtin("example3", p=2.0, lam=0.0, alpha=alpha))
    gamma_c = WGridFunction.from_w(lambda t: -t**2, alpha)
    rep = solver.check_lower_upper(gamma_c, p, f, "lower")
    assert rep.passed
    assert rep.worst_margin < 0


def test_upper_solution_zero():
    alpha = 1.5
    p = ProblemParams(alpha, 0.0, B=-alpha / 2)
    f = exprlang.to_callable(exprlang.builtin("example3", p=2.0, lam=0.0, alpha=alpha))
    rep = solver.check_lower_upper(WGridFunction.from_w(np.zeros_like, alpha), p, f, "upper")
    assert rep.passed


def test_zero_as_lower_solution_depends_on_sign():
    p = ProblemParams(1.5, 0.0)
    zero = WGridFunction.from_w(np.zeros_like, 1.5)
    bad = solver.check_lower_upper(zero, p, one, "lower")
    assert not bad.passed
    assert bad.worst_margin == pytest.approx(1.0, abs=1e-12)
    good = solver.check_lower_upper(zero, p, lambda t, w: -one(t, w), "lower")
    assert good.passed


def test_lower_upper_kind_validated():
    with pytest.raises(InvalidParams):
        solver.check_lower_upper(WGridFunction.from_w(np.zeros_like, 1.5), ProblemParams(1.5, 0), one, "middle")


def test_growth_first_example():
    g = solver.growth_diagnostics(exprlang.to_callable(exprlang.builtin("example1a")))
    assert g["heuristic"]
    assert g["f_0"]["trend"] == "inf"
    assert g["f^inf"]["trend"] == "zero"


def test_growth_second_example():
    g = solver.growth_diagnostics(exprlang.to_callable(exprlang.builtin("example1b", a=2.0)))
    assert g["f^0"]["trend"] == "zero"
    assert g["f_inf"]["trend"] == "inf"


def test_growth_linear():
    g = solver.growth_diagnostics(lambda t, u: u + 0 * t)
    for key in ("f_0", "f^0", "f_inf", "f^inf"):
        assert g[key]["trend"] == "finite"
        assert g[key]["value"] == pytest.approx(1.0)


def test_growth_ladder_validated():
    with pytest.raises(InvalidParams):
        solver.growth_diagnostics(lambda t, u: u, ladder=[1.0, 2.0])


def test_cones():
    p = ProblemParams(5 / 3, 0.0)
    env = greens.bounds_envelope(p)
    zero = WGridFunction.from_w(np.zeros_like, 5 / 3)
    c = solver.cone_membership(zero, env)
    assert c.in_Pu0 and c.in_Pstar
    neg = WGridFunction.from_w(lambda t: -np.ones_like(t), 5 / 3)
    c = solver.cone_membership(neg, env)
    assert not c.in_Pu0
    assert len(c.witnesses) == neg.grid.size
    rep = solver.picard_solve(p, example2)
    assert solver.cone_membership(rep.solution, env).in_Pu0


@given(st.floats(1.2, 2.0), st.floats(0.0, 0.9))
@settings(max_examples=5, deadline=None)
def test_iterates_stay_nonnegative(alpha, frac):
    lam = principal_mixed_eigenvalue(alpha).value * frac
    p = ProblemParams(alpha, lam)
    rep = solver.picard_solve(p, example2, n_points=129, oracle=False)
    assert rep.solution.w_values.min() >= -1e-14


@given(st.floats(1.2, 2.0))
@settings(max_examples=5, deadline=None)
def test_observed_rate_below_certificate(alpha):
    p = ProblemParams(alpha, 0.0)
    rep = solver.picard_solve(p, example2, K=0.25, n_points=129, oracle=False)
    steps = np.asarray(rep.step_norms)
    ratios = steps[1:] / steps[:-1]
    significant = steps[:-1] > 1e-11
    assert np.all(ratios[significant] <= rep.certificate_q + 0.05)

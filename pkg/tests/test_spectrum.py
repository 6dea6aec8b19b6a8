import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracmix import ml_eval, spectrum
from fracmix.errors import InvalidParams

REFERENCE = [
    (1.1, -0.104812),
    (1.2, -0.221832),
    (1.3, -0.355588),
    (1.4, -0.511676),
    (1.5, -0.697078),
    (1.6, -0.920556),
    (1.7, -1.19319),
    (1.8, -1.52904),
    (1.9, -1.9461),
    (2.0, -2.4674),
]

# roots located with mpmath (50 digits) by scanning and refining the series
MPMATH_ROOTS = {
    ("mixed", 1.1): -0.10481217867411264,
    ("mixed", 1.3): -0.35558780155992143,
    ("mixed", 1.5): -0.69707766694689636,
    ("mixed", 1.7): -1.1931875535785044,
    ("mixed", 1.9): -1.9460971999572293,
    ("dirichlet", 1.5): -5.0754300295434217,
    ("dirichlet", 1.9): -8.404229631878923,
    ("subinterval", 1.6, 0.3): -2.157464120439069,
}


def last_sign_change(values, grid):
    s = np.sign(values)
    idx = np.nonzero(s[1:] * s[:-1] < 0)[0]
    a, b = grid[idx[0]], grid[idx[0] + 1]
    return min(a, b), max(a, b)


@pytest.mark.parametrize("alpha, value", REFERENCE)
def test_mixed_matches_printed_values(alpha, value):
    tol = 1e-4 if alpha >= 1.9 else 1e-5
    assert spectrum.principal_mixed_eigenvalue(alpha).value == pytest.approx(value, abs=tol)


@pytest.mark.parametrize("key, value", sorted(MPMATH_ROOTS.items(), key=str))
def test_against_high_precision_roots(key, value):
    if key[0] == "mixed":
        got = spectrum.principal_mixed_eigenvalue(key[1]).value
    elif key[0] == "dirichlet":
        got = spectrum.principal_dirichlet_eigenvalue(key[1]).value
    else:
        got = spectrum.subinterval_eigenvalue(key[1], key[2]).value
    assert got == pytest.approx(value, abs=1e-11)


def test_order_two_closed_forms():
    assert spectrum.principal_mixed_eigenvalue(2.0).value == pytest.approx(-math.pi**2 / 4, abs=1e-10)
    assert spectrum.principal_dirichlet_eigenvalue(2.0).value == pytest.approx(-math.pi**2, abs=1e-10)


@pytest.mark.parametrize("t0, expected", [(0.5, -math.pi**2), (0.75, -4 * math.pi**2)])
def test_subinterval_order_two(t0, expected):
    assert spectrum.subinterval_eigenvalue(2.0, t0).value == pytest.approx(expected, abs=1e-9)


def test_dirichlet_below_mixed_at_1_9():
    assert spectrum.principal_dirichlet_eigenvalue(1.9).value < -1.9461


def test_dirichlet_dense_scan():
    grid = -np.arange(0, 200001) * 1e-4
    vals = ml_eval(1.5, 1.5, grid)
    lo, hi = last_sign_change(vals, grid)
    got = spectrum.principal_dirichlet_eigenvalue(1.5).value
    assert hi >= got >= lo


def test_subinterval_dense_scan():
    grid = -np.arange(1, 60001) * 1e-3
    vals = spectrum.subinterval_characteristic(1.6, 0.3, grid)
    lo, hi = last_sign_change(vals, grid)
    got = spectrum.subinterval_eigenvalue(1.6, 0.3).value
    assert hi >= got >= lo


def test_result_fields():
    res = spectrum.principal_mixed_eigenvalue(1.5)
    lo, hi = res.bracket
    assert lo <= res.value <= hi
    assert abs(res.residual) < 1e-12
    assert res.kind == "mixed"
    assert set(res.to_dict()) >= {"alpha", "value", "bracket", "residual", "iterations"}


@pytest.mark.parametrize("alpha", [1.0, 0.5, 2.1, float("nan")])
def test_invalid_order(alpha):
    with pytest.raises(InvalidParams):
        spectrum.principal_mixed_eigenvalue(alpha)


@pytest.mark.parametrize("t0", [0.0, 1.0, -0.2])
def test_invalid_t0(t0):
    with pytest.raises(InvalidParams):
        spectrum.subinterval_eigenvalue(1.5, t0)


def test_scan_closed_form_row():
    (row,) = spectrum.eigen_scan([2.0], [0.5])
    expected = (2.0, 0.5, -math.pi**2, -math.pi**2 / 4, -math.pi**2)
    np.testing.assert_allclose(row.as_tuple(), expected, atol=1e-9)


def test_scan_without_t0():
    alphas = np.round(np.arange(1.1, 2.01, 0.1), 10)
    rows = spectrum.eigen_scan(alphas, [])
    assert len(rows) == 10
    for row, (_, value) in zip(rows, REFERENCE):
        tol = 1e-4 if row.alpha >= 1.9 else 1e-5
        assert row.lambda_mixed == pytest.approx(value, abs=tol)


def test_scan_rows_ordered():
    rows = spectrum.eigen_scan([1.5], np.round(np.arange(0.1, 0.91, 0.1), 10))
    assert len(rows) == 9
    assert all(r.lambda_sub < r.lambda_mixed for r in rows)
    assert all(r.ordered for r in rows)


@given(st.floats(1.02, 2.0))
@settings(max_examples=25, deadline=None)
def test_root_is_a_sign_change(alpha):
    lam = spectrum.principal_mixed_eigenvalue(alpha).value
    d = 1e-7 * max(1.0, abs(lam))
    left = spectrum.mixed_characteristic(alpha, lam - d)
    right = spectrum.mixed_characteristic(alpha, lam + d)
    assert left * right <= 0
    # nothing between the root and zero
    grid = np.linspace(lam + d, -1e-9, 400)
    assert np.all(spectrum.mixed_characteristic(alpha, grid) > 0)


@given(st.floats(1.05, 2.0), st.floats(0.05, 0.95))
@settings(max_examples=20, deadline=None)
def test_subinterval_below_mixed(alpha, t0):
    assert spectrum.subinterval_eigenvalue(alpha, t0).value < spectrum.principal_mixed_eigenvalue(alpha).value


@given(st.floats(1.05, 1.95))
@settings(max_examples=15, deadline=None)
def test_step_halving_is_stable(alpha):
    a = spectrum.principal_mixed_eigenvalue(alpha).value
    b = spectrum.principal_mixed_eigenvalue(alpha, step=spectrum.SCAN_STEP / 2).value
    assert a == pytest.approx(b, abs=1e-12)

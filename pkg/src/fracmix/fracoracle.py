"""Discrete Riemann-Liouville operators used as an independent check.

``D^a u = d^2/dt^2 I^(2-a) u`` for ``1 < a <= 2``. Before discretising, the
part of ``u`` that the operator annihilates is removed: writing
``w = t^(2-a) u = c2 + c1 t + o(t)``, the remainder
``v = u - c2 t^(a-2) - c1 t^(a-1) = t^(a-2) (w - c2 - c1 t)`` is continuous
with ``v(0) = 0``, and ``D^a u = D^a v``.

Two schemes for ``D^a v`` on a uniform grid of step ``h``:

* ``L1``: product-trapezoid ``I^(2-a) v`` (exact integration of the piecewise
  linear interpolant) followed by a central second difference; O(h^2) in the
  interior for smooth ``v``;
* ``GL``: Grunwald-Letnikov sum ``h^-a sum_k g_k v_{n-k}``; O(h).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import fftconvolve
from scipy.special import gamma, rgamma

from .errors import GridMismatch, SingularPartUnresolved
from .quad import graded_rule

DEFAULT_H = 1.0 / 2048
# remainder of the linear fit near 0, relative to max(1, max|w|)
SPLIT_TOL = 1e-2
SPLIT_POINTS = 8
WINDOW = (0.05, 0.95)
# exponent of the substitution s = t x^m in the callable fractional integral
POWER_MAP = 8


@dataclass(frozen=True)
class RLScheme:
    """Uniform grid on ``[0, 1]`` and the discretisation of ``D^alpha``."""

    order: float
    h: float = DEFAULT_H
    kind: str = "L1"
    singular_split: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("h must be positive")
        n = round(1.0 / self.h)
        if abs(n * self.h - 1.0) > 1e-12:
            raise GridMismatch(f"1/h must be an integer, got h={self.h}")
        if self.kind not in ("L1", "GL"):
            raise ValueError(f"unknown scheme kind {self.kind!r}")

    @property
    def n(self):
        return round(1.0 / self.h)

    @property
    def grid(self):
        return np.arange(self.n + 1) * self.h

    def index_of(self, t):
        """Grid indices of ``t``; :class:`GridMismatch` if ``t`` is off the grid."""
        t = np.asarray(t, dtype=float)
        k = np.rint(t / self.h).astype(int)
        if np.any(np.abs(k * self.h - t) > 1e-9 * self.h) or np.any((k < 0) | (k > self.n)):
            raise GridMismatch("evaluation point is not on the scheme grid")
        return k


# ---------------------------------------------------------------- integrals


def trapezoid_weights(alpha_int, n):
    """Product-trapezoid coefficients, ``I(t_m) = h^a/Gamma(a+2) sum_j c_{j,m} f_j``.

    Returns the Toeplitz sequence ``inner[m-j] = c_{j,m}`` for ``0 < j < m``
    and ``first[m] = c_{0,m}``; the last weight ``c_{m,m}`` is 1.
    """
    k = np.arange(n + 2, dtype=float)
    p = k ** (alpha_int + 1.0)
    # a_k for k = m - j >= 1
    inner = np.zeros(n + 1)
    inner[1:] = p[2 : n + 2] - 2.0 * p[1 : n + 1] + p[0:n]
    m = np.arange(n + 1, dtype=float)
    first = np.clip(m - 1.0, 0.0, None) ** (alpha_int + 1.0) - (m - alpha_int - 1.0) * m**alpha_int
    first[0] = 0.0
    return inner, first


def rl_integral_grid(values, alpha_int, h):
    """``I^alpha_int f`` at every node of a uniform grid (product trapezoid)."""
    f = np.asarray(values, dtype=float)
    n = f.size - 1
    inner, first = trapezoid_weights(alpha_int, n)
    conv = fftconvolve(f, inner)[: n + 1]
    # the Toeplitz sum above covers j = 0..m-1 with a_{m-j}; fix j = 0 and add j = m
    out = conv - inner[np.arange(n + 1)] * f[0] + first * f[0] + f
    out[0] = 0.0
    return out * h**alpha_int * rgamma(alpha_int + 2.0)


def rl_integral(f, alpha_int, t, scheme=None):
    """``I^alpha_int f (t)``.

    ``f`` is either a vectorised callable or samples on the uniform grid of
    ``scheme`` (product trapezoid). A callable is integrated after
    ``s = t x^m``, which turns ``s^beta`` into ``x^(m(beta+1)-1)``, with a
    rule graded toward both ends; power singularities ``s^beta`` with
    ``beta >= -0.9`` are resolved to near machine precision.
    """
    if not alpha_int > 0:
        raise ValueError("order of integration must be positive")
    if callable(f):
        t = np.asarray(t, dtype=float)
        m = POWER_MAP
        rule = graded_rule(alpha_int - 1.0, n=16, levels=40, left_levels=60)
        x = rule.nodes
        # (1 - x^m)^(a-1) = (1 - x)^(a-1) (1 + x + ... + x^(m-1))^(a-1)
        geo = np.polynomial.polynomial.polyval(x, np.ones(m))
        weights = rule.weights * m * x ** (m - 1) * geo ** (alpha_int - 1.0)
        sigma = x**m
        tt = np.atleast_1d(t)
        vals = np.array([np.dot(weights, f(v * sigma)) for v in tt])
        out = tt**alpha_int * rgamma(alpha_int) * vals
        return float(out[0]) if t.ndim == 0 else out
    if scheme is None:
        raise GridMismatch("grid samples need a scheme to define the grid")
    values = np.asarray(f, dtype=float)
    if values.size != scheme.n + 1:
        raise GridMismatch(f"expected {scheme.n + 1} samples, got {values.size}")
    k = scheme.index_of(t)
    out = rl_integral_grid(values, alpha_int, scheme.h)[k]
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------- derivatives


def _grid_w(u, scheme):
    """Weighted samples of ``u`` on the scheme grid (resampling if needed)."""
    grid = np.asarray(u.grid, dtype=float)
    w = np.asarray(u.w_values, dtype=float)
    target = scheme.grid
    if grid.size == target.size and np.allclose(grid, target, atol=1e-14):
        return w.copy()
    return CubicSpline(grid, w)(target)


def fit_singular_part(w, h):
    """``(c1, c2)`` with ``w ~ c2 + c1 t`` near 0; raises if the fit is poor."""
    c2 = w[0]
    c1 = (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * h)
    k = np.arange(1, SPLIT_POINTS + 1)
    resid = np.abs(w[k] - c2 - c1 * k * h).max()
    scale = max(1.0, float(np.abs(w).max()))
    if not np.isfinite(resid) or resid > SPLIT_TOL * scale:
        raise SingularPartUnresolved(
            f"weighted function is not c2 + c1 t near 0 (fit residual {resid:.3e})"
        )
    return float(c1), float(c2)


def gl_weights(alpha, n):
    g = np.empty(n + 1)
    g[0] = 1.0
    for k in range(1, n + 1):
        g[k] = g[k - 1] * (1.0 - (alpha + 1.0) / k)
    return g


def _derivative_grid(v, alpha, h, kind):
    n = v.size - 1
    if kind == "GL":
        return fftconvolve(v, gl_weights(alpha, n))[: n + 1] * h**-alpha
    if alpha == 2.0:
        J = v
    else:
        J = rl_integral_grid(v, 2.0 - alpha, h)
    out = np.full(n + 1, np.nan)
    out[1:-1] = (J[2:] - 2.0 * J[1:-1] + J[:-2]) / h**2
    return out


def rl_derivative_grid(u, scheme=None):
    """``D^alpha u`` at every scheme node (NaN where the stencil does not fit).

    Returns ``(values, scheme)`` where the scheme records the fitted split.
    """
    alpha = float(u.alpha)
    if scheme is None:
        scheme = RLScheme(alpha)
    w = _grid_w(u, scheme)
    c1, c2 = fit_singular_part(w, scheme.h)
    t = scheme.grid
    v = np.zeros_like(w)
    r = w[1:] - c2 - c1 * t[1:]
    v[1:] = t[1:] ** (alpha - 2.0) * r
    out = _derivative_grid(v, alpha, scheme.h, scheme.kind)
    out[:3] = np.nan
    return out, RLScheme(alpha, scheme.h, scheme.kind, (c1, c2))


def rl_derivative(u, scheme=None, t=None):
    """``D^alpha u(t)`` for a weighted grid function ``u`` (``grid``, ``w_values``, ``alpha``).

    ``t`` must be a scheme node with ``t >= 3h``.
    """
    vals, scheme = rl_derivative_grid(u, scheme)
    k = scheme.index_of(t)
    if np.any(k < 3) or np.any(k > scheme.n - 1):
        raise GridMismatch("rl_derivative needs 3h <= t <= 1 - h")
    out = vals[k]
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------- residuals


def right_slope(grid, w, alpha, origin=0.0):
    """``u'`` at the right end from ``u = (t-origin)^(a-2) w``, with a three-point one-sided ``w'``."""
    x0, x1, x2 = grid[-3], grid[-2], grid[-1]
    h1, h2 = x1 - x0, x2 - x1
    dw = (
        w[-3] * h2 / (h1 * (h1 + h2))
        - w[-2] * (h1 + h2) / (h1 * h2)
        + w[-1] * (h1 + 2.0 * h2) / (h2 * (h1 + h2))
    )
    length = x2 - origin
    return (alpha - 2.0) * length ** (alpha - 3.0) * w[-1] + length ** (alpha - 2.0) * dw


@dataclass(frozen=True)
class ResidualReport:
    max_interior: float
    argmax: float
    boundary_left: float
    boundary_right: float
    h: float
    kind: str

    def to_dict(self):
        return asdict(self)


def ode_residual(u, params, f, scheme=None, window=WINDOW):
    """``max |D^a u - lam u + f(t, w)|`` over scheme nodes in ``window`` and the two boundary residuals.

    ``u`` lives on ``params.interval``; the check runs on the unit interval,
    where ``D^a`` picks up the factor ``(b-a)^-a``.
    """
    alpha = float(params.alpha)
    a0, length = params.interval
    length = length - a0
    grid = (np.asarray(u.grid, dtype=float) - a0) / length
    w_unit = np.asarray(u.w_values, dtype=float) * length ** (alpha - 2.0)
    unit_u = _Unit(grid, w_unit, alpha)
    if scheme is None:
        scheme = RLScheme(alpha)
    d, scheme = rl_derivative_grid(unit_u, scheme)
    tau = scheme.grid
    w = _grid_w(unit_u, scheme)
    inside = (tau >= window[0] - 1e-12) & (tau <= window[1] + 1e-12)
    tt = tau[inside]
    with np.errstate(divide="ignore"):
        uu = tt ** (alpha - 2.0) * w[inside]
    # back in physical units: u(a + L tau) = uu(tau) and D^a u = L^-a D^a_tau uu
    t_phys = a0 + length * tt
    w_phys = w[inside] / length ** (alpha - 2.0)
    res = (
        d[inside] * length**-alpha
        - params.lam * uu
        + np.asarray(f(t_phys, w_phys), dtype=float) * np.ones_like(tt)
    )
    k = int(np.argmax(np.abs(res)))
    w_src = np.asarray(u.w_values, dtype=float)
    slope = right_slope(np.asarray(u.grid, dtype=float), w_src, alpha, origin=a0)
    return ResidualReport(
        max_interior=float(np.abs(res[k])),
        argmax=float(t_phys[k]),
        boundary_left=float(abs(w_src[0] - params.A)),
        boundary_right=float(abs(slope - params.B)),
        h=scheme.h,
        kind=scheme.kind,
    )


@dataclass(frozen=True)
class _Unit:
    grid: np.ndarray
    w_values: np.ndarray
    alpha: float


def power_rule_integral(beta, alpha_int, t):
    """``I^a t^b = Gamma(b+1)/Gamma(b+1+a) t^(b+a)``."""
    return gamma(beta + 1.0) * rgamma(beta + 1.0 + alpha_int) * t ** (beta + alpha_int)

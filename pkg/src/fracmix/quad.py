"""Quadrature against the endpoint weights ``(1-s)^(a-2)`` and ``(1-s)^(a-1)``.

Two rule families on ``[0, 1]``, both carrying the weight ``(1-s)^e``:

* ``jacobi``: Gauss-Jacobi from the Golub-Welsch eigenproblem;
* ``graded``: Gauss-Legendre panels on ``[1-2^-k, 1-2^-(k+1)]`` (optionally
  mirrored toward 0), closed by a Gauss-Jacobi panel on the last sliver.

Rules store ``1 - s`` separately, computed without cancellation, because the
integrands evaluate functions of ``(1-s)^a`` right up to ``s = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import eigh_tridiagonal
from scipy.special import betaln

from .errors import ToleranceNotMet
from .mlf import ml_eval

DEFAULT_NODES = 64
PANEL_NODES = 16
LEVELS = 40


@dataclass(frozen=True)
class QuadRule:
    """Nodes and weights for ``int_0^1 f(s) (1-s)^exponent ds``."""

    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    complement: np.ndarray = field(repr=False)
    kind: str
    exponent: float
    n: int
    # polynomial degree integrated exactly against the weight (jacobi only)
    degree: int
    levels: int = 0
    left_levels: int = 0

    def integrate(self, f):
        return float(np.dot(self.weights, f(self.nodes)))

    def refined(self):
        """Same family with twice the nodes per panel."""
        return make_rule(self.kind, self.exponent, 2 * self.n, self.levels, self.left_levels)


def _jacobi_unit(n, a, b=0.0):
    """Golub-Welsch nodes/weights on [-1, 1] for ``(1-x)^a (1+x)^b``."""
    k = np.arange(n, dtype=float)
    ab = a + b
    diag = np.empty(n)
    diag[0] = (b - a) / (ab + 2.0)
    kk = k[1:]
    diag[1:] = (b * b - a * a) / ((2 * kk + ab) * (2 * kk + ab + 2.0))
    kk = np.arange(1, n, dtype=float)
    num = 4.0 * kk * (kk + a) * (kk + b) * (kk + ab)
    den = (2 * kk + ab) ** 2 * (2 * kk + ab + 1.0) * (2 * kk + ab - 1.0)
    off = np.sqrt(num / den)
    x, vec = eigh_tridiagonal(diag, off)
    mu0 = np.exp((ab + 1.0) * np.log(2.0) + betaln(a + 1.0, b + 1.0))
    return x, mu0 * vec[0, :] ** 2


@lru_cache(maxsize=128)
def _jacobi_cached(n, exponent):
    x, w = _jacobi_unit(n, exponent)
    s = 0.5 * (1.0 + x)
    comp = 0.5 * (1.0 - x)
    return s, w * 2.0 ** (-exponent - 1.0), comp


def gauss_jacobi(n, exponent):
    """``n``-point Gauss rule for the weight ``(1-s)^exponent`` on ``[0, 1]``."""
    if not exponent > -1.0:
        raise ValueError("weight exponent must exceed -1")
    s, w, comp = _jacobi_cached(int(n), float(exponent))
    return QuadRule(s, w, comp, "jacobi", float(exponent), int(n), 2 * int(n) - 1)


@lru_cache(maxsize=128)
def _graded_cached(exponent, n, levels, left_levels):
    gx, gw = np.polynomial.legendre.leggauss(n)
    s_parts, c_parts, w_parts = [], [], []

    def panel(lo, hi):
        # panel in the complement variable r = 1 - s, lo < r <= hi
        r = 0.5 * (hi - lo) * gx[::-1] + 0.5 * (hi + lo)
        c_parts.append(r)
        s_parts.append(1.0 - r)
        w_parts.append(0.5 * (hi - lo) * gw[::-1] * r**exponent)

    def panel_s(lo, hi):
        s = 0.5 * (hi - lo) * gx + 0.5 * (hi + lo)
        s_parts.append(s)
        c_parts.append(1.0 - s)
        w_parts.append(0.5 * (hi - lo) * gw * (1.0 - s) ** exponent)

    # toward 0: [0, 2^-L], [2^-L, 2^-(L-1)], ..., [1/4, 1/2]
    if left_levels:
        edges = [0.0] + [2.0**-k for k in range(left_levels, 0, -1)]
        for lo, hi in zip(edges[:-1], edges[1:]):
            panel_s(lo, hi)
    else:
        panel_s(0.0, 0.5)
    # toward 1 in r = 1 - s: [1/4, 1/2], [1/8, 1/4], ...
    for k in range(1, levels):
        panel(2.0 ** -(k + 1), 2.0**-k)
    # last sliver r in [0, delta]: Gauss-Jacobi absorbs r^exponent exactly
    delta = 2.0**-levels
    x, w = _jacobi_unit(n, exponent)
    r = delta * 0.5 * (1.0 - x)
    s_parts.append(1.0 - r)
    c_parts.append(r)
    w_parts.append(w * 2.0 ** (-exponent - 1.0) * delta ** (exponent + 1.0))
    return np.concatenate(s_parts), np.concatenate(w_parts), np.concatenate(c_parts)


def graded_rule(exponent, n=PANEL_NODES, levels=LEVELS, left_levels=0):
    """Composite rule graded geometrically (ratio 1/2) toward ``s = 1``.

    With ``left_levels > 0`` the panel ``[0, 1/2]`` is also split geometrically
    toward 0, for integrands with fractional-power behaviour there.
    """
    if not exponent > -1.0:
        raise ValueError("weight exponent must exceed -1")
    s, w, c = _graded_cached(float(exponent), int(n), int(levels), int(left_levels))
    return QuadRule(s, w, c, "graded", float(exponent), int(n), 0, int(levels), int(left_levels))


def make_rule(kind, exponent, n, levels=LEVELS, left_levels=0):
    if kind == "jacobi":
        return gauss_jacobi(n, exponent)
    if kind == "graded":
        return graded_rule(exponent, n, levels, left_levels)
    raise ValueError(f"unknown rule kind {kind!r}")


def integrate_weighted(f, alpha, rule=None, tol=1e-10, full_output=False):
    """``int_0^1 f(s) (1-s)^(alpha-2) ds``.

    The result from ``rule`` is compared with its refinement; the refined
    value is returned, and :class:`ToleranceNotMet` is raised when the two
    differ by more than ``tol`` relative to ``int |f| w``.
    """
    exponent = alpha - 2.0
    if rule is None:
        rule = gauss_jacobi(DEFAULT_NODES, exponent)
    elif abs(rule.exponent - exponent) > 1e-15:
        raise ValueError(f"rule weight exponent {rule.exponent} does not match alpha-2")
    fine = rule.refined()
    coarse_val = rule.integrate(f)
    fv = np.asarray(f(fine.nodes), dtype=float)
    value = float(np.dot(fine.weights, fv))
    scale = float(np.dot(fine.weights, np.abs(fv)))
    err = abs(value - coarse_val)
    if err > tol * max(scale, np.finfo(float).tiny):
        raise ToleranceNotMet(
            f"weighted integral unresolved: estimate {err:.3e} > {tol:g} x {scale:.3e}",
            value,
            err,
        )
    return (value, err) if full_output else value


# ---------------------------------------------------------------- Green's operator


def green_rules(alpha, n=PANEL_NODES, levels=LEVELS, left_levels=20):
    """The two rules used to apply the kernel: weights ``(1-s)^(a-2)`` and ``(1-s)^(a-1)``."""
    return (
        graded_rule(alpha - 2.0, n, levels, left_levels),
        graded_rule(alpha - 1.0, n, levels, left_levels),
    )


def _as_callable(y):
    if callable(y):
        return y
    grid, values = y
    spline = CubicSpline(np.asarray(grid, dtype=float), np.asarray(values, dtype=float))
    return spline


def _apply_unit(alpha, lam, E, y, tau, rules):
    """``int_0^1 G(tau, s) y(s) ds`` on the unit interval.

    ``G`` splits into ``psi(tau)/E * (1-s)^(a-2) E_{a,a-1}(lam (1-s)^a)`` over
    all of ``[0, 1]`` and ``(tau-s)^(a-1) E_{a,a}(lam (tau-s)^a)`` over
    ``[0, tau]``; the second piece is written with ``s = tau sigma``.
    """
    upper, lower = rules
    i1 = np.dot(upper.weights * ml_eval(alpha, alpha - 1.0, lam * upper.complement**alpha), y(upper.nodes))
    psi = tau ** (alpha - 1.0) * ml_eval(alpha, alpha, lam * tau**alpha)
    ta = tau**alpha
    kern = ml_eval(alpha, alpha, lam * ta[:, None] * lower.complement[None, :] ** alpha)
    vals = y(tau[:, None] * lower.nodes[None, :])
    i2 = ta * np.sum(kern * vals * lower.weights[None, :], axis=1)
    return psi / E * i1 - i2


def apply_green(params, y, t, n=PANEL_NODES, tol=1e-9, full_output=False):
    """``int G(t, s) y(s) ds`` over ``params.interval``.

    ``y`` is a vectorised callable or a ``(grid, values)`` pair (cubic spline).
    Computed with ``n`` and ``2n`` nodes per panel; the finer value is
    returned and :class:`ToleranceNotMet` raised if they disagree by more
    than ``tol * max(1, |value|)``.
    """
    params.require_valid()
    u = params.unit()
    f = _as_callable(y)
    a0, h = params.interval[0], params.length
    ys = lambda s: np.asarray(f(a0 + h * s), dtype=float) * np.ones_like(s)
    tau = np.atleast_1d(params.to_unit(t))
    scale = h**params.alpha
    coarse = _apply_unit(u.alpha, u.lam, u.char_value, ys, tau, green_rules(u.alpha, n)) * scale
    fine = _apply_unit(u.alpha, u.lam, u.char_value, ys, tau, green_rules(u.alpha, 2 * n)) * scale
    err = np.abs(fine - coarse)
    if np.any(err > tol * np.maximum(1.0, np.abs(fine))):
        k = int(np.argmax(err))
        raise ToleranceNotMet(
            f"Green's operator unresolved at t={float(np.atleast_1d(t)[k]):g}: estimate {err[k]:.3e}",
            fine,
            err,
        )
    if np.ndim(t) == 0:
        fine, err = float(fine[0]), float(err[0])
    return (fine, err) if full_output else fine

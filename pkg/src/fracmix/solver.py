"""Linear and nonlinear solvers for the mixed problem.

Everything works with the weighted values ``w = (t-a)^(2-alpha) u`` on a
Chebyshev-Lobatto grid. The fixed-point map

    w  ->  t^(2-a) int_0^1 G(t, s) f(s, w(s)) ds  +  A w1(t) + B w2(t)

is discretised once per ``(alpha, lam)`` as a dense Nystrom matrix: the
kernel integrals use the same graded rules as :func:`fracmix.quad.apply_green`
and the integrand is read off the grid by barycentric interpolation.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from . import fracoracle
from .errors import InvalidParams, MaxIterExceeded, OrderViolation
from .greens import (
    BoundsEnvelope,
    ProblemParams,
    bounds_envelope,
    green_dt,
    v1_deriv,
    v2_deriv,
    w1_unit,
    w2_unit,
)
from .mlf import ml_eval
from .quad import apply_green, graded_rule

DEFAULT_GRID = 513
DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 200
ORACLE_TOL = 1e-2
# panel size and grading of the rules behind the Nystrom matrix
NYSTROM_NODES = 8
NYSTROM_LEVELS = 24
NYSTROM_LEFT = 16
_ROW_CHUNK = 8


# ---------------------------------------------------------------- grid functions


def chebyshev_grid(n_points=DEFAULT_GRID):
    """``(1 - cos(pi j / N)) / 2`` for ``j = 0..N``, endpoints exact."""
    if n_points < 3:
        raise InvalidParams("the grid needs at least 3 points")
    n = n_points - 1
    t = 0.5 * (1.0 - np.cos(np.pi * np.arange(n + 1) / n))
    t[0], t[-1] = 0.0, 1.0
    return t


@dataclass(frozen=True, eq=False)
class WGridFunction:
    """Samples of ``w = (t-a)^(2-alpha) u`` on an increasing grid over ``[a, b]``."""

    grid: np.ndarray
    w_values: np.ndarray
    alpha: float
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        w = np.asarray(self.w_values, dtype=float)
        if g.ndim != 1 or g.shape != w.shape or g.size < 3:
            raise InvalidParams("grid and w_values must be 1-d arrays of equal length >= 3")
        if np.any(np.diff(g) <= 0):
            raise InvalidParams("grid must be strictly increasing")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "w_values", w)

    @property
    def interval(self):
        return float(self.grid[0]), float(self.grid[-1])

    @property
    def norm(self):
        """``||u||_{2-alpha} = max |w|``."""
        return float(np.abs(self.w_values).max())

    @property
    def u_values(self):
        """``u = (t-a)^(alpha-2) w``; infinite at ``t = a`` when ``w(a) != 0`` and ``alpha < 2``."""
        x = self.grid - self.grid[0]
        with np.errstate(divide="ignore", invalid="ignore"):
            u = x ** (self.alpha - 2.0) * self.w_values
        if self.alpha == 2.0:
            return self.w_values.copy()
        u[0] = 0.0 if self.w_values[0] == 0.0 else math.copysign(math.inf, self.w_values[0])
        return u

    def __call__(self, t):
        """Weighted value at arbitrary points (cubic interpolation)."""
        return CubicSpline(self.grid, self.w_values)(t)

    def resample(self, grid):
        grid = np.asarray(grid, dtype=float)
        if grid.shape == self.grid.shape and np.array_equal(grid, self.grid):
            return self
        return WGridFunction(grid, self(grid), self.alpha)

    def right_slope(self):
        return fracoracle.right_slope(self.grid, self.w_values, self.alpha, origin=self.grid[0])

    @classmethod
    def from_u(cls, u, alpha, interval=(0.0, 1.0), n_points=DEFAULT_GRID):
        """Sample a callable ``u``; the value at ``t = a`` is the limit of ``(t-a)^(2-alpha) u``,
        taken from the callable ``u`` evaluated at ``a`` when ``alpha = 2``, else extrapolated."""
        a, b = interval
        grid = a + (b - a) * chebyshev_grid(n_points)
        x = grid - a
        w = np.empty_like(grid)
        w[1:] = x[1:] ** (2.0 - alpha) * np.asarray(u(grid[1:]), dtype=float)
        if alpha == 2.0:
            w[0] = float(np.asarray(u(grid[:1]), dtype=float)[0])
        else:
            # quadratic extrapolation from the next three points
            w[0] = _extrapolate_left(x[1:4], w[1:4])
        return cls(grid, w, float(alpha))

    @classmethod
    def from_w(cls, w, alpha, interval=(0.0, 1.0), n_points=DEFAULT_GRID):
        a, b = interval
        grid = a + (b - a) * chebyshev_grid(n_points)
        return cls(grid, np.asarray(w(grid), dtype=float) * np.ones_like(grid), float(alpha))

    def to_rows(self):
        return np.column_stack([self.grid, self.w_values, self.u_values])


def _extrapolate_left(x, w):
    c = np.polyfit(x, w, 2)
    return float(np.polyval(c, 0.0))


# ---------------------------------------------------------------- Nystrom operator


def _bary_weights(n_points):
    bw = (-1.0) ** np.arange(n_points)
    bw[0] *= 0.5
    bw[-1] *= 0.5
    return bw


def _bary_matrix(grid, bw, x):
    """Rows interpolate grid values at the points ``x`` (any shape)."""
    x = np.asarray(x, dtype=float)
    d = x[..., None] - grid
    hit = d == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        c = bw / d
    rows = hit.any(axis=-1)
    if rows.any():
        c[rows] = hit[rows].astype(float)
    return c / c.sum(axis=-1, keepdims=True)


@dataclass(frozen=True)
class _Nystrom:
    grid: np.ndarray
    matrix: np.ndarray
    w1: np.ndarray
    w2: np.ndarray


@lru_cache(maxsize=16)
def _nystrom(alpha, lam, n_points):
    """Matrix ``K`` with ``(K g)_i ~ t_i^(2-a) int_0^1 G(t_i, s) g(s) ds`` for grid samples ``g``."""
    unit = ProblemParams(alpha, lam).require_valid()
    E = unit.char_value
    t = chebyshev_grid(n_points)
    bw = _bary_weights(n_points)
    up = graded_rule(alpha - 2.0, NYSTROM_NODES, NYSTROM_LEVELS, NYSTROM_LEFT)
    lo = graded_rule(alpha - 1.0, NYSTROM_NODES, NYSTROM_LEVELS, NYSTROM_LEFT)

    # first piece: t E_{a,a}(lam t^a)/E times a fixed row functional
    r1 = (up.weights * ml_eval(alpha, alpha - 1.0, lam * up.complement**alpha)) @ _bary_matrix(
        t, bw, up.nodes
    )
    col = t * ml_eval(alpha, alpha, lam * t**alpha) / E
    K = np.outer(col, r1)

    # second piece: t^2 int_0^1 (1-sigma)^(a-1) E_{a,a}(lam t^a (1-sigma)^a) g(t sigma) dsigma
    ca = lo.complement**alpha
    for start in range(1, n_points, _ROW_CHUNK):
        rows = slice(start, min(start + _ROW_CHUNK, n_points))
        ti = t[rows]
        kern = ml_eval(alpha, alpha, lam * ti[:, None] ** alpha * ca[None, :]) * lo.weights
        P = _bary_matrix(t, bw, ti[:, None] * lo.nodes[None, :])
        K[rows] -= ti[:, None] ** 2 * np.einsum("ij,ijk->ik", kern, P)
    w1 = np.asarray(w1_unit(unit, t), dtype=float) * np.ones_like(t)
    w2 = np.asarray(w2_unit(unit, t), dtype=float) * np.ones_like(t)
    for arr in (K, w1, w2):
        arr.setflags(write=False)
    return _Nystrom(t, K, w1, w2)


class _Problem:
    """The discrete fixed-point map ``w -> K f(t, w) + A w1 + B w2`` in physical units."""

    def __init__(self, params, f, n_points=DEFAULT_GRID):
        self.params = params
        self.unit = params.unit()
        self.f = f
        self.alpha = float(params.alpha)
        ny = _nystrom(self.alpha, float(self.unit.lam), int(n_points))
        a0, L = params.interval[0], params.length
        self.L = L
        self.tau = ny.grid
        self.t = a0 + L * ny.grid
        self.K = ny.matrix
        # unit weighted value w~ = L^(a-2) w; source picks up L^a
        self.scale_w = L ** (2.0 - self.alpha)
        self.boundary = (self.unit.A * ny.w1 + self.unit.B * ny.w2) * self.scale_w

    def source(self, w):
        return np.asarray(self.f(self.t, w), dtype=float) * np.ones_like(self.t)

    def apply(self, w):
        g = self.source(w) * self.L**self.alpha
        return (self.K @ g) * self.scale_w + self.boundary

    def wrap(self, w):
        return WGridFunction(self.t.copy(), np.asarray(w, dtype=float), self.alpha)


# ---------------------------------------------------------------- linear problem


def _as_source(y):
    if callable(y):
        return y
    grid, values = y
    return CubicSpline(np.asarray(grid, dtype=float), np.asarray(values, dtype=float))


def solve_linear(params: ProblemParams, y, n_points=DEFAULT_GRID, tol=1e-9):
    """``u = int G y + A v1 + B v2`` as a weighted grid function.

    ``y`` is a vectorised callable of ``t`` or a ``(grid, values)`` pair.
    The returned object's ``meta`` holds the boundary data recovered from the
    closed forms: ``w0`` and ``slope`` (``u'(b)``).
    """
    params.require_valid()
    src = _as_source(y)
    unit = params.unit()
    alpha = float(params.alpha)
    a0, L = params.interval[0], params.length
    tau = chebyshev_grid(n_points)
    t = a0 + L * tau
    green = np.asarray(apply_green(params, src, t, tol=tol), dtype=float)
    w = np.empty_like(t)
    w[1:] = (t[1:] - a0) ** (2.0 - alpha) * green[1:]
    w[0] = 0.0
    w += (unit.A * w1_unit(unit, tau) + unit.B * w2_unit(unit, tau)) * L ** (2.0 - alpha)

    # u'(b) from d/dt of each summand; G_t(b, s) carries (b-s)^(a-2)
    rule = graded_rule(alpha - 2.0, 16, 40, 20)
    s_phys = a0 + L * rule.nodes
    with np.errstate(divide="ignore", invalid="ignore"):
        gt = np.asarray(green_dt(params, params.interval[1], s_phys), dtype=float)
        gt = gt / (L * rule.complement) ** (alpha - 2.0)
    vals = np.asarray(src(s_phys), dtype=float) * np.ones_like(s_phys)
    ok = np.isfinite(gt)
    slope = L ** (alpha - 1.0) * float(np.dot(rule.weights[ok], (gt * vals)[ok]))
    b = params.interval[1]
    slope += params.A * float(v1_deriv(params, b)) + params.B * float(v2_deriv(params, b))
    meta = {"w0": float(w[0]), "slope": slope}
    return WGridFunction(t, w, alpha, meta)


# ---------------------------------------------------------------- reports


@dataclass(frozen=True, eq=False)
class SolverReport:
    solution: WGridFunction
    iterations: int
    step_norms: list
    certificate_q: float | None
    residual_fp: float
    residual_ode: float | None
    converged: bool
    tol: float = DEFAULT_TOL
    method: str = "picard"
    # extra diagnostics: bracket distance, boundary values, oracle argmax
    details: dict = field(default_factory=dict)

    @property
    def ratios(self):
        s = np.asarray(self.step_norms, dtype=float)
        if s.size < 2:
            return []
        with np.errstate(divide="ignore", invalid="ignore"):
            return (s[1:] / s[:-1]).tolist()

    def to_dict(self, include_solution=True):
        d = {
            "method": self.method,
            "iterations": self.iterations,
            "step_norms": [float(x) for x in self.step_norms],
            "ratios": [float(x) for x in self.ratios],
            "certificate_q": self.certificate_q,
            "residual_fp": self.residual_fp,
            "residual_ode": self.residual_ode,
            "converged": self.converged,
            "tol": self.tol,
            "norm": self.solution.norm,
        }
        d.update(self.details)
        if include_solution:
            d["solution"] = {
                "alpha": self.solution.alpha,
                "t": self.solution.grid.tolist(),
                "w": self.solution.w_values.tolist(),
            }
        return d

    def to_json(self, include_solution=True, **kw):
        return json.dumps(self.to_dict(include_solution), allow_nan=True, **kw)


def contraction_certificate(params: ProblemParams, K, envelope: BoundsEnvelope):
    """``q = K M / (alpha (alpha - 1))`` and whether ``q < 1``."""
    if K < 0:
        raise InvalidParams("the Lipschitz constant must be non-negative")
    a = float(params.alpha)
    q = float(K) * envelope.M / (a * (a - 1.0))
    return q, bool(q < 1.0)


def _oracle(params, f, sol):
    try:
        rep = fracoracle.ode_residual(sol, params, f)
    except fracoracle.SingularPartUnresolved:
        return None, {}
    return rep.max_interior, {"ode_argmax": rep.argmax}


def _iterate(prob, w, tol, max_iter, on_iterate=None):
    steps = []
    for k in range(1, max_iter + 1):
        nxt = prob.apply(w)
        step = float(np.abs(nxt - w).max())
        steps.append(step)
        w = nxt
        if on_iterate is not None:
            on_iterate(w)
        if not math.isfinite(step):
            break
        if step <= tol:
            return w, steps, k
    raise MaxIterExceeded(
        f"no convergence in {max_iter} iterations (last step {steps[-1]:.3e})",
        prob.wrap(w),
        steps,
    )


def picard_solve(
    params: ProblemParams,
    f,
    u_start: WGridFunction | None = None,
    tol=DEFAULT_TOL,
    max_iter=DEFAULT_MAX_ITER,
    n_points=DEFAULT_GRID,
    K=None,
    envelope=None,
    oracle=True,
):
    """Iterate ``w_{k+1} = T w_k`` from ``u_start`` (zero by default) until the step is below ``tol``.

    ``f(t, w)`` takes the weighted value ``w = (t-a)^(2-alpha) u``. With a
    Lipschitz constant ``K`` the contraction certificate is attached
    (the envelope is computed if not supplied).
    """
    if max_iter < 1 or not tol > 0:
        raise InvalidParams("need max_iter >= 1 and tol > 0")
    params.require_positive_kernel()
    prob = _Problem(params, f, n_points)
    w0 = np.zeros_like(prob.t) if u_start is None else u_start.resample(prob.t).w_values
    w, steps, iters = _iterate(prob, w0, tol, max_iter)
    return _finish(prob, params, f, w, steps, iters, tol, K, envelope, oracle, "picard")


def _finish(prob, params, f, w, steps, iters, tol, K, envelope, oracle, method, details=None):
    fp = float(np.abs(prob.apply(w) - w).max())
    sol = prob.wrap(w)
    q = None
    details = dict(details or {})
    if K is not None:
        env = envelope if envelope is not None else bounds_envelope(params)
        q, _ = contraction_certificate(params, K, env)
        details["M"] = env.M
        details["m0"] = env.m0
    ode = None
    if oracle:
        ode, extra = _oracle(params, f, sol)
        details.update(extra)
    details["w_left"] = float(w[0])
    details["slope_right"] = float(sol.right_slope())
    return SolverReport(sol, iters, steps, q, fp, ode, bool(fp <= tol), tol, method, details)


# ---------------------------------------------------------------- lower and upper solutions


def monotone_solve(
    params: ProblemParams,
    f,
    gamma: WGridFunction,
    delta: WGridFunction,
    tol=DEFAULT_TOL,
    max_iter=DEFAULT_MAX_ITER,
    n_points=DEFAULT_GRID,
    oracle=True,
):
    """Picard iteration for ``f(t, p(t, w))`` from ``gamma``, where
    ``p(t, x) = max(w_gamma(t), min(x, w_delta(t)))``.

    Raises :class:`OrderViolation` if ``w_gamma > w_delta`` anywhere on either
    the input grids or the solver grid.
    """
    params.require_positive_kernel()
    prob = _Problem(params, f, n_points)
    lo = gamma.resample(prob.t).w_values
    hi = delta.resample(prob.t).w_values
    bad = [float(x) for x in prob.t[lo > hi]]
    if gamma.grid.shape == delta.grid.shape and np.array_equal(gamma.grid, delta.grid):
        bad += [float(x) for x in gamma.grid[gamma.w_values > delta.w_values]]
    if bad:
        raise OrderViolation(f"lower candidate exceeds upper at {len(bad)} points", sorted(set(bad)))

    truncated = _Problem(params, lambda t, x: f(t, np.clip(x, lo, hi)), n_points)
    spread = {"bracket_excess": 0.0}

    def watch(w):
        excess = max(float((lo - w).max()), float((w - hi).max()), 0.0)
        spread["bracket_excess"] = max(spread["bracket_excess"], excess)

    if np.array_equal(lo, hi):
        steps, iters, w = [], 0, lo.copy()
    else:
        w, steps, iters = _iterate(truncated, lo.copy(), tol, max_iter, watch)
    # the truncated problem always has a fixed point; whether it lies in the
    # bracket is what the lower/upper pair is supposed to guarantee
    final = max(float((lo - w).max()), float((w - hi).max()), 0.0)
    spread["final_excess"] = final
    spread["in_bracket"] = bool(final <= tol)
    return _finish(truncated, params, f, w, steps, iters, tol, None, None, oracle, "monotone", spread)


@dataclass(frozen=True)
class LowerUpperReport:
    kind: str
    passed: bool
    # signed: the largest value of the residual in the forbidden direction
    worst_margin: float
    argworst: float
    interior_ok: bool
    left_value: float
    left_ok: bool
    right_slope: float
    right_ok: bool
    slack: float

    def to_dict(self):
        return asdict(self)


def check_lower_upper(candidate: WGridFunction, params: ProblemParams, f, kind="lower", slack=1e-6,
                      window=fracoracle.WINDOW, scheme=None):
    """Check ``D^a c - lam c + f(t, w_c)`` and the boundary inequalities.

    A lower solution needs the residual ``<= 0``, ``w(a) <= A`` and
    ``c'(b) <= B``; an upper solution the reverse. Interior values come from
    the discrete operator in :mod:`fracmix.fracoracle`, so ``slack`` absorbs
    its truncation error. ``c'(b)`` uses three one-sided points.
    """
    if kind not in ("lower", "upper"):
        raise InvalidParams("kind must be 'lower' or 'upper'")
    sign = 1.0 if kind == "lower" else -1.0
    alpha = float(params.alpha)
    a0, L = params.interval
    L -= a0
    unit_c = fracoracle._Unit((candidate.grid - a0) / L, candidate.w_values * L ** (alpha - 2.0), alpha)
    d, sch = fracoracle.rl_derivative_grid(unit_c, scheme)
    tau = sch.grid
    inside = (tau >= window[0] - 1e-12) & (tau <= window[1] + 1e-12)
    tt = tau[inside]
    w_unit = fracoracle._grid_w(unit_c, sch)[inside]
    t_phys = a0 + L * tt
    w_phys = w_unit / L ** (alpha - 2.0)
    u_phys = (t_phys - a0) ** (alpha - 2.0) * w_phys
    res = d[inside] * L**-alpha - params.lam * u_phys + np.asarray(f(t_phys, w_phys), dtype=float)
    signed = sign * res
    k = int(np.argmax(signed))
    left = float(candidate.w_values[0])
    slope = float(candidate.right_slope())
    interior_ok = bool(signed[k] <= slack)
    left_ok = bool(sign * (left - params.A) <= 1e-8)
    right_ok = bool(sign * (slope - params.B) <= 1e-6)
    return LowerUpperReport(
        kind=kind,
        passed=interior_ok and left_ok and right_ok,
        worst_margin=float(signed[k]),
        argworst=float(t_phys[k]),
        interior_ok=interior_ok,
        left_value=left,
        left_ok=left_ok,
        right_slope=slope,
        right_ok=right_ok,
        slack=float(slack),
    )


# ---------------------------------------------------------------- growth and cones

LADDER = np.geomspace(1e-6, 1e6, 13)
GROWTH_T_POINTS = 101


def _trend(values):
    """Classify the last three ladder values (ordered toward the limit)."""
    v = np.asarray(values[-3:], dtype=float)
    if not np.all(np.isfinite(v)):
        return "inconclusive"
    spread = np.abs(v - v[-1]).max()
    if spread <= 1e-2 * max(abs(v[-1]), 1e-12) or spread <= 1e-12:
        return "finite"
    if v[0] < v[1] < v[2] and v[2] >= 2.0 * max(v[0], 1e-300):
        return "inf"
    if abs(v[0]) > abs(v[1]) > abs(v[2]) and abs(v[2]) <= 0.5 * abs(v[0]):
        return "zero"
    return "inconclusive"


def growth_diagnostics(f, t_window=(0.0, 1.0), ladder=None, t_points=GROWTH_T_POINTS):
    """Heuristic estimates of the four limits of ``min/max_t f(t, u)/u``.

    ``f0``/``f^0`` use the small end of ``ladder``, ``f_inf``/``f^inf`` the
    large end. Each limit gets the last sampled value and a trend label
    (``zero``, ``inf``, ``finite`` or ``inconclusive``) from the last three
    samples. Finite samples cannot prove a limit.
    """
    u = np.sort(np.asarray(LADDER if ladder is None else ladder, dtype=float))
    if u.size < 3 or np.any(u <= 0):
        raise InvalidParams("the ladder needs at least three positive values")
    t = np.linspace(t_window[0], t_window[1], t_points)
    ratio = np.asarray(f(t[None, :], u[:, None]), dtype=float) / u[:, None]
    lo, hi = ratio.min(axis=1), ratio.max(axis=1)
    out = {"heuristic": True, "ladder": u.tolist(), "t_window": [float(t[0]), float(t[-1])]}
    for name, seq in (("f_0", lo[::-1]), ("f^0", hi[::-1]), ("f_inf", lo), ("f^inf", hi)):
        label = _trend(seq)
        est = float(seq[-1])
        out[name] = {"trend": label, "estimate": est, "value": _limit_value(label, est)}
    return out


def _limit_value(label, est):
    if label == "zero":
        return 0.0
    if label == "inf":
        return math.inf
    if label == "finite":
        return est
    return None


@dataclass(frozen=True)
class ConeCheck:
    in_Pu0: bool
    in_Pstar: bool
    witnesses: list

    def to_dict(self):
        return asdict(self)


def cone_membership(u: WGridFunction, envelope: BoundsEnvelope, rtol=1e-12):
    """Check ``w >= (m(t)/M) ||u||`` everywhere and ``u >= 0``, ``w >= (m0/M) ||u||`` on ``[c1, 1]``.

    ``u`` may live on any interval; it is compared on the unit interval with
    the envelope's ``m``. ``rtol`` (relative to ``||u||``) absorbs rounding.
    """
    a0, b0 = u.interval
    tau = (u.grid - a0) / (b0 - a0)
    w = u.w_values
    norm = u.norm
    eps = rtol * max(norm, 1e-300)
    first = w < envelope.m(tau) / envelope.M * norm - eps
    negative = (tau > 0) & (w < -eps)
    tail = (tau >= envelope.c1) & (w < envelope.m0 / envelope.M * norm - eps)
    second = negative | tail
    bad = first | second
    return ConeCheck(
        in_Pu0=bool(not first.any()),
        in_Pstar=bool(not second.any()),
        witnesses=[float(x) for x in u.grid[bad]],
    )

"""Green's function of the mixed problem and the quantities built from it.

The linear problem on ``(0, 1)`` is::

    D^a u - lam u + y = 0,   t^(2-a) u(t) -> A (t -> 0+),   u'(1) = B,

with ``1 < a <= 2``. With ``psi(t) = t^(a-1) E_{a,a}(lam t^a)`` and
``E = E_{a,a-1}(lam)`` the kernel is::

    G(t,s) = psi(t) E_{a,a-1}(lam (1-s)^a) (1-s)^(a-2) / E
             - (t-s)^(a-1) E_{a,a}(lam (t-s)^a) [s <= t]

Everything below is vectorised over ``t`` and ``s`` with numpy broadcasting.
A general interval ``(a, b)`` is reduced to ``(0, 1)`` by ``t = a + (b-a) tau``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import gamma

from .errors import DomainError, InvalidParams
from .mlf import ml_deriv, ml_eval
from .spectrum import check_order, principal_mixed_eigenvalue

# refuse lam whose Newton distance to a zero of E_{a,a-1} is below this
EIGEN_PROXIMITY = 1e-10
LADDER_START = 1e-3
LADDER_LEVELS = 6


@dataclass(frozen=True)
class ProblemParams:
    """Order, spectral parameter, interval and boundary data."""

    alpha: float
    lam: float
    interval: tuple = (0.0, 1.0)
    A: float = 0.0
    B: float = 0.0

    def __post_init__(self):
        check_order(self.alpha)
        a, b = self.interval
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise InvalidParams(f"interval must satisfy a < b, got {self.interval}")
        for name in ("lam", "A", "B"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParams(f"{name} must be finite")

    @property
    def length(self):
        return self.interval[1] - self.interval[0]

    @property
    def lam_unit(self):
        """Spectral parameter of the equivalent problem on ``(0, 1)``."""
        return self.lam * self.length**self.alpha

    @cached_property
    def char_value(self):
        return ml_eval(self.alpha, self.alpha - 1.0, self.lam_unit)

    @cached_property
    def eigen_distance(self):
        """Newton estimate of the distance from ``lam_unit`` to a zero of ``E_{a,a-1}``."""
        d = ml_deriv(self.alpha, self.alpha - 1.0, self.lam_unit)
        if d == 0.0:
            return math.inf if self.char_value != 0.0 else 0.0
        return abs(self.char_value / d)

    @property
    def valid(self):
        return self.char_value != 0.0 and self.eigen_distance >= EIGEN_PROXIMITY

    def require_valid(self):
        if not self.valid:
            raise InvalidParams(
                f"lambda={self.lam} is (numerically) an eigenvalue: "
                f"E_{{a,a-1}}={self.char_value:.3e}, distance {self.eigen_distance:.3e}",
            )
        return self

    def require_positive_kernel(self):
        self.require_valid()
        lam1 = principal_mixed_eigenvalue(self.alpha).value
        if not self.lam_unit > lam1:
            raise InvalidParams(
                f"need lambda (b-a)^alpha > lambda_1* = {lam1:.6g}, got {self.lam_unit:.6g}"
            )
        return self

    def unit(self):
        """The equivalent problem on ``(0, 1)``."""
        if self.interval == (0.0, 1.0):
            return self
        h = self.length
        return ProblemParams(
            self.alpha,
            self.lam_unit,
            (0.0, 1.0),
            self.A / h ** (2.0 - self.alpha),
            self.B * h,
        )

    def to_unit(self, t):
        return (np.asarray(t, dtype=float) - self.interval[0]) / self.length


def _ml(alpha, beta, x):
    return ml_eval(alpha, beta, x)


def _g(alpha, lam, r):
    """``r^(a-1) E_{a,a}(lam r^a)`` for ``r >= 0``."""
    return r ** (alpha - 1.0) * _ml(alpha, alpha, lam * r**alpha)


def _g_prime(alpha, lam, r):
    """Derivative of :func:`_g`: ``r^(a-2) E_{a,a-1}(lam r^a)``; infinite at 0 for a < 2."""
    with np.errstate(divide="ignore"):
        return r ** (alpha - 2.0) * _ml(alpha, alpha - 1.0, lam * r**alpha)


def _upper(alpha, lam, E, s):
    """``E_{a,a-1}(lam (1-s)^a) (1-s)^(a-2) / E``."""
    r = 1.0 - s
    return _ml(alpha, alpha - 1.0, lam * r**alpha) * r ** (alpha - 2.0) / E


def _lower(alpha, lam, t, s):
    r = np.clip(t - s, 0.0, None)
    return np.where(s <= t, _g(alpha, lam, r), 0.0)


def _check_unit_args(t, s, allow_s_one=False):
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any((t < 0) | (t > 1)) or np.any(~np.isfinite(t)):
        raise DomainError("t must lie in [0, 1]")
    bad = (s < 0) | (s > 1) if allow_s_one else (s < 0) | (s >= 1)
    if np.any(bad) or np.any(~np.isfinite(s)):
        raise DomainError("s must lie in [0, 1)" + (" or equal 1" if allow_s_one else ""))
    return t, s


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def green_unit(alpha, lam, t, s):
    """Kernel on ``(0, 1)`` without validation (``s < 1``)."""
    E = _ml(alpha, alpha - 1.0, lam)
    return _g(alpha, lam, t) * _upper(alpha, lam, E, s) - _lower(alpha, lam, t, s)


def green_eval(params: ProblemParams, t, s):
    """``G(t, s)``; ``t`` and ``s`` are in the coordinates of ``params.interval``."""
    params.require_valid()
    u = params.unit()
    t, s = _check_unit_args(params.to_unit(t), params.to_unit(s))
    val = green_unit(u.alpha, u.lam, t, s) * params.length ** (params.alpha - 1.0)
    return _out(val)


def green_dt(params: ProblemParams, t, s):
    """``dG/dt``; vanishes at ``t = 1`` by construction of the kernel."""
    params.require_valid()
    u = params.unit()
    t, s = _check_unit_args(params.to_unit(t), params.to_unit(s))
    a, lam = u.alpha, u.lam
    E = u.char_value
    r = np.clip(t - s, 0.0, None)
    val = _g_prime(a, lam, t) * _upper(a, lam, E, s) - np.where(s < t, _g_prime(a, lam, r), 0.0)
    return _out(val * params.length ** (params.alpha - 2.0))


def green_dt_weighted(params: ProblemParams, t, s):
    """``d/dt [t^(2-a) G(t, s)]`` (unit interval), from the differentiated closed form."""
    params.require_valid()
    u = params.unit()
    t, s = _check_unit_args(params.to_unit(t), params.to_unit(s))
    if np.any(t <= 0):
        raise DomainError("green_dt_weighted needs t > 0")
    a, lam = u.alpha, u.lam
    E = u.char_value
    x = lam * t**a
    # d/dt [t E_{a,a}(lam t^a)] = (2-a) E_{a,a} + E_{a,a-1}
    first = ((2.0 - a) * _ml(a, a, x) + _ml(a, a - 1.0, x)) * _upper(a, lam, E, s)
    r = np.clip(t - s, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        second = (2.0 - a) * t ** (1.0 - a) * _g(a, lam, r) + t ** (2.0 - a) * _g_prime(a, lam, r)
    second = np.where(s < t, second, 0.0)
    return _out(first - second)


# ---------------------------------------------------------------- H and L


def _h_positive_s(alpha, lam, E, t, s):
    """``t^(2-a) (1-s)^(2-a) G(t, s) / s`` for ``s > 0``, without the (1-s)^(a-2) blow-up."""
    first = t * _ml(alpha, alpha, lam * t**alpha) * _ml(alpha, alpha - 1.0, lam * (1.0 - s) ** alpha) / E
    second = t ** (2.0 - alpha) * (1.0 - s) ** (2.0 - alpha) * _lower(alpha, lam, t, s)
    return (first - second) / s


def richardson_limit(alpha, lam, t, s0=LADDER_START, levels=LADDER_LEVELS):
    """``lim_{s->0+} H(t, s)`` by Richardson extrapolation on ``s_k = s0 2^-k``.

    ``H(t, .)`` is smooth on ``[0, t)`` so the error expands in integer powers
    of ``s``. The ladder start is capped at ``t/8`` so it stays below ``s = t``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    E = _ml(alpha, alpha - 1.0, lam)
    out = np.zeros_like(t)
    pos = t > 0
    tp = t[pos]
    start = np.minimum(s0, tp / 8.0)
    table = [_h_positive_s(alpha, lam, E, tp, start * 2.0**-k) for k in range(levels)]
    for j in range(1, levels):
        f = 2.0**j
        table = [(f * table[k] - table[k - 1]) / (f - 1.0) for k in range(1, len(table))]
    out[pos] = table[-1]
    return out


def l_closed_form(params: ProblemParams, t):
    """Closed form of ``lim_{s->0+} H(t, s)`` from differentiating G in s at 0.

    ``L(t) = t E_{a,a}(lam t^a) ((2-a) - a lam E'_{a,a-1}(lam)/E) + E_{a,a-1}(lam t^a)``
    for ``t > 0``; ``L(0) = 0``.
    """
    u = params.unit().require_valid()
    a, lam, E = u.alpha, u.lam, u.char_value
    t = np.asarray(t, dtype=float)
    dE = ml_deriv(a, a - 1.0, lam)
    x = lam * t**a
    val = t * _ml(a, a, x) * ((2.0 - a) - a * lam * dE / E) + _ml(a, a - 1.0, x)
    return _out(np.where(t > 0, val, 0.0))


def l_printed(params: ProblemParams, t):
    """The published expression for the same limit, kept for comparison only."""
    u = params.unit().require_valid()
    a, lam, E = u.alpha, u.lam, u.char_value
    t = np.asarray(t, dtype=float)
    x = lam * t**a
    e_aa = _ml(a, a, x)
    first = (
        t**a * lam * ((a - 1.0) * _ml(a, 2 * a, x) - _ml(a, 2 * a - 1.0, x))
        - ((1.0 - a) + (a - 2.0) * t) * E * e_aa
    ) / E
    second = t * lam * e_aa * (_ml(a, 2 * a - 2.0, lam) - (a - 2.0) * _ml(a, 2 * a - 1.0, lam)) / E
    return _out(first - second)


def h_tilde(params: ProblemParams, t, s):
    """``H(t,s) = t^(2-a) (1-s)^(2-a) G(t,s) / s``, extended to ``s = 0`` by its limit.

    The value at ``s = 0`` comes from :func:`richardson_limit`. Unit interval.
    """
    u = params.unit().require_positive_kernel()
    t, s = _check_unit_args(t, s, allow_s_one=True)
    t, s = np.broadcast_arrays(t, s)
    out = np.empty(t.shape)
    zero = s == 0
    if zero.any():
        out[zero] = richardson_limit(u.alpha, u.lam, t[zero])
    if (~zero).any():
        out[~zero] = _h_positive_s(u.alpha, u.lam, u.char_value, t[~zero], s[~zero])
    return _out(out)


# ---------------------------------------------------------------- envelopes


def bounds_grids(grid_n):
    t = np.linspace(0.0, 1.0, grid_n)
    sigma = np.linspace(0.0, 1.0, grid_n)
    s = 1.0 - (1.0 - sigma) ** 2
    return t, s


@dataclass(frozen=True)
class BoundsEnvelope:
    """Grid approximation of ``m(t) <= H~(t, s) <= M``."""

    alpha: float
    lam: float
    t_grid: np.ndarray = field(repr=False)
    s_grid: np.ndarray = field(repr=False)
    m_grid: np.ndarray = field(repr=False)
    M: float = 0.0
    m0: float = 0.0
    c1: float = 0.5
    # linear-interpolation error estimate (|second difference|/8) of m in t
    # and of H~ around its maximiser: how far the sampled bounds may sit
    # from the true ones
    allowance: float = 0.0

    def m(self, t):
        """Piecewise-linear interpolant of the sampled ``m``."""
        return np.interp(t, self.t_grid, self.m_grid)

    def to_dict(self):
        d = asdict(self)
        for k in ("t_grid", "s_grid", "m_grid"):
            d[k] = d[k].tolist()
        return d


def bounds_envelope(params: ProblemParams, grid_n=257, c1=0.5):
    """Sample ``H~`` on a uniform-t, ``s = 1-(1-sigma)^2`` grid and extract ``m``, ``M``, ``m0``."""
    if grid_n < 64:
        raise InvalidParams("grid_n must be at least 64")
    if not 0.0 < c1 < 1.0:
        raise InvalidParams("c1 must lie in (0, 1)")
    u = params.unit().require_positive_kernel()
    t, s = bounds_grids(grid_n)
    H = np.asarray(h_tilde(u, t[:, None], s[None, :]))
    m = H.min(axis=1)
    m[0] = 0.0
    i, j = np.unravel_index(np.argmax(H), H.shape)
    ri = slice(max(i - 2, 0), i + 3)
    rj = slice(max(j - 2, 0), j + 3)
    curv = [np.abs(np.diff(m, 2)).max()]
    if H[ri, j].size >= 3:
        curv.append(np.abs(np.diff(H[ri, j], 2)).max())
    if H[i, rj].size >= 3:
        curv.append(np.abs(np.diff(H[i, rj], 2)).max())
    jump = max(curv) / 8.0
    return BoundsEnvelope(
        alpha=u.alpha,
        lam=u.lam,
        t_grid=t,
        s_grid=s,
        m_grid=m,
        M=float(H.max()),
        m0=float(m[t >= c1].min()),
        c1=float(c1),
        allowance=float(jump),
    )


@dataclass(frozen=True)
class PositivityReport:
    all_positive: bool
    min_value: float
    argmin: tuple
    negative_count: int
    # up to WITNESS_CAP (t, s) points with G < 0, most negative first
    witnesses: list
    # (t, s) where G changes sign between s-neighbours on the same t row
    sign_change_points: list

    def to_dict(self):
        d = asdict(self)
        d["argmin"] = list(self.argmin)
        return d


WITNESS_CAP = 20


def positivity_report(params: ProblemParams, grid_n=257):
    """Scan ``G`` on the interior grid ``i/(n+1)`` and report its sign."""
    u = params.unit().require_valid()
    x = np.arange(1, grid_n + 1) / (grid_n + 1.0)
    G = green_unit(u.alpha, u.lam, x[:, None], x[None, :])
    i, j = np.unravel_index(np.argmin(G), G.shape)
    neg = np.argwhere(G < 0)
    order = np.argsort(G[neg[:, 0], neg[:, 1]]) if neg.size else np.array([], dtype=int)
    witnesses = [(float(x[a]), float(x[b])) for a, b in neg[order[:WITNESS_CAP]]]
    flips = np.argwhere(np.sign(G[:, 1:]) * np.sign(G[:, :-1]) < 0)
    changes = [(float(x[a]), float(0.5 * (x[b] + x[b + 1]))) for a, b in flips[:WITNESS_CAP]]
    return PositivityReport(
        all_positive=bool(neg.size == 0),
        min_value=float(G[i, j]),
        argmin=(float(x[i]), float(x[j])),
        negative_count=int(len(neg)),
        witnesses=witnesses,
        sign_change_points=changes,
    )


# ---------------------------------------------------------------- v1, v2


def _unit_v(params):
    u = params.unit().require_valid()
    a, lam, E = u.alpha, u.lam, u.char_value
    ratio = ml_eval(a, a - 2.0, lam) / E
    return u, a, lam, E, ratio


def w1_unit(params, tau):
    """``tau^(2-a) v1(tau)`` on the unit interval; continuous up to 0."""
    u, a, lam, E, ratio = _unit_v(params)
    x = lam * tau**a
    return gamma(a - 1.0) * (_ml(a, a - 1.0, x) - ratio * tau * _ml(a, a, x))


def w2_unit(params, tau):
    u, a, lam, E, _ = _unit_v(params)
    return tau * _ml(a, a, lam * tau**a) / E


def v1_eval(params: ProblemParams, t):
    """Homogeneous solution with weighted value 1 at the left end and zero slope at the right.

    ``v1 = Gamma(a-1) [t^(a-2) E_{a,a-1}(lam t^a) - E_{a,a-2}(lam)/E_{a,a-1}(lam) t^(a-1) E_{a,a}(lam t^a)]``
    """
    u, a, lam, E, ratio = _unit_v(params)
    tau = params.to_unit(t)
    with np.errstate(divide="ignore"):
        val = gamma(a - 1.0) * (_g_prime(a, lam, tau) - ratio * _g(a, lam, tau))
    return _out(val / params.length ** (2.0 - a))


def v2_eval(params: ProblemParams, t):
    u, a, lam, E, _ = _unit_v(params)
    tau = params.to_unit(t)
    return _out(_g(a, lam, tau) / E * params.length)


def v1_deriv(params: ProblemParams, t):
    u, a, lam, E, ratio = _unit_v(params)
    tau = params.to_unit(t)
    with np.errstate(divide="ignore"):
        # d/dt [t^(a-2) E_{a,a-1}(lam t^a)] = t^(a-3) E_{a,a-2}(lam t^a)
        d = tau ** (a - 3.0) * _ml(a, a - 2.0, lam * tau**a) - ratio * _g_prime(a, lam, tau)
    return _out(gamma(a - 1.0) * d / params.length ** (3.0 - a))


def v2_deriv(params: ProblemParams, t):
    u, a, lam, E, _ = _unit_v(params)
    tau = params.to_unit(t)
    return _out(_g_prime(a, lam, tau) / E)

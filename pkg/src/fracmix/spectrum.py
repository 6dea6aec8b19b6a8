"""Eigenvalues that control the sign of the mixed-problem Green's function.

* ``lambda_mixed``: largest negative zero of ``E_{a,a-1}``.
* ``lambda_dirichlet``: largest negative zero of ``E_{a,a}``.
* ``lambda_sub(t0)``: largest zero of the 2x2 determinant for the problem on
  ``(t0, 1)`` with ``V(t0) = V'(1) = 0``::

      E_{a,a-1}(l) E_{a,a-1}(l t0^a) - t0 E_{a,a}(l t0^a) E_{a,a-2}(l)

Roots are located by scanning downward from ``lambda = 0`` until the first
sign change, which guarantees the largest root is the one returned, then
refined by bisection and a guarded Newton step.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidParams, RootNotFound
from .mlf import ml_deriv, ml_eval

SCAN_STEP = 0.05
# far from the origin the scan step grows to this fraction of |lambda|
SCAN_RELATIVE_STEP = 0.005
SEARCH_MAX = 200.0
_CHUNK = 256
# bracket width at which bisection hands over to Newton
NEWTON_START = 1e-6


@dataclass(frozen=True)
class EigenResult:
    alpha: float
    value: float
    bracket: tuple
    residual: float
    iterations: int
    kind: str = "mixed"
    t0: float | None = None

    def to_dict(self):
        d = asdict(self)
        d["bracket"] = list(self.bracket)
        return d


def check_order(alpha):
    alpha = float(alpha)
    if not 1.0 < alpha <= 2.0:
        raise InvalidParams(f"order alpha must lie in (1, 2], got {alpha}")
    return alpha


def mixed_characteristic(alpha, lam, deriv=False):
    f = ml_deriv if deriv else ml_eval
    return f(alpha, alpha - 1.0, lam)


def dirichlet_characteristic(alpha, lam, deriv=False):
    f = ml_deriv if deriv else ml_eval
    return f(alpha, alpha, lam)


def subinterval_characteristic(alpha, t0, lam, deriv=False):
    lam = np.asarray(lam, dtype=float)
    sc = t0**alpha
    e1 = ml_eval(alpha, alpha - 1.0, lam)
    e2 = ml_eval(alpha, alpha - 1.0, lam * sc)
    e3 = ml_eval(alpha, alpha, lam * sc)
    e4 = ml_eval(alpha, alpha - 2.0, lam)
    if not deriv:
        return e1 * e2 - t0 * e3 * e4
    d1 = ml_deriv(alpha, alpha - 1.0, lam)
    d2 = ml_deriv(alpha, alpha - 1.0, lam * sc) * sc
    d3 = ml_deriv(alpha, alpha, lam * sc) * sc
    d4 = ml_deriv(alpha, alpha - 2.0, lam)
    return d1 * e2 + e1 * d2 - t0 * (d3 * e4 + e3 * d4)


def _scan_points(start, n, step):
    pts = np.empty(n)
    lam = start
    for i in range(n):
        lam = lam - max(step, SCAN_RELATIVE_STEP * abs(lam))
        pts[i] = lam
    return pts


def _bisect(f1, lo, hi, f_lo, width):
    its = 0
    while True:
        goal = max(width, 1e-14, 4.0 * np.spacing(abs(lo)))
        mid = 0.5 * (lo + hi)
        if hi - lo <= goal or not lo < mid < hi:
            return lo, hi, f_lo, its
        f_mid = f1(mid)
        its += 1
        if f_mid == 0.0:
            return mid - goal / 4, mid + goal / 4, f_lo, its
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid


def _newton(f1, df1, lo, hi, max_steps=8):
    """Newton from the bracket midpoint; ``None`` if it leaves ``(lo, hi)``."""
    x = 0.5 * (lo + hi)
    for k in range(max_steps):
        slope = df1(x)
        if slope == 0.0 or not np.isfinite(slope):
            return None, k
        dx = f1(x) / slope
        x -= dx
        if not lo < x < hi:
            return None, k + 1
        if abs(dx) <= 2.0 * np.spacing(abs(x)):
            return x, k + 1
    return x, max_steps


def _largest_negative_root(func, dfunc, *, step, search_max, context):
    """Scan ``func`` from 0 toward ``-search_max``; bisect and polish the first root."""
    prev_lam = 0.0
    prev_val = float(func(np.array([0.0]))[0])
    if prev_val == 0.0:
        raise RootNotFound("characteristic function vanishes at lambda = 0", context)
    iterations = 0
    lo = hi = None
    chunk = 16
    while prev_lam > -search_max:
        pts = _scan_points(prev_lam, chunk, step)
        chunk = min(2 * chunk, _CHUNK)
        pts = pts[pts >= -search_max] if pts[-1] < -search_max else pts
        if pts.size == 0:
            break
        vals = func(pts)
        flips = np.nonzero(np.sign(vals) != np.sign(prev_val))[0]
        if flips.size:
            j = flips[0]
            iterations += j + 1
            hi = pts[j - 1] if j else prev_lam
            f_hi = vals[j - 1] if j else prev_val
            lo, f_lo = pts[j], vals[j]
            break
        iterations += pts.size
        prev_lam, prev_val = pts[-1], vals[-1]
    if lo is None:
        raise RootNotFound(
            f"no sign change of the characteristic function in [{-search_max:g}, 0)",
            context,
        )
    f1 = lambda lam: float(func(np.array([lam]))[0])
    if f_lo == 0.0:
        root = lo
        pad = max(1e-14, 4.0 * np.spacing(abs(root)))
        lo, hi = root - pad, root + pad
    else:
        lo, hi, f_lo, its = _bisect(f1, lo, hi, f_lo, NEWTON_START)
        iterations += its
        root, its = _newton(f1, lambda lam: float(dfunc(np.array([lam]))[0]), lo, hi)
        iterations += its
        bracketed = False
        if root is not None:
            pad = max(1e-14, 4.0 * np.spacing(abs(root)))
            a, b = root - pad, root + pad
            iterations += 2
            if np.sign(f1(a)) != np.sign(f1(b)):
                lo, hi, bracketed = a, b, True
        if not bracketed:
            # Newton did not land; finish by plain bisection
            lo, hi, f_lo, its = _bisect(f1, lo, hi, f_lo, 0.0)
            iterations += its
            root = 0.5 * (lo + hi)
    residual = abs(f1(root))
    return root, (float(lo), float(hi)), residual, iterations


@lru_cache(maxsize=512)
def principal_mixed_eigenvalue(alpha, step=SCAN_STEP, search_max=SEARCH_MAX):
    """Largest negative zero of ``E_{alpha,alpha-1}``."""
    alpha = check_order(alpha)
    root, bracket, res, its = _largest_negative_root(
        lambda lam: mixed_characteristic(alpha, lam),
        lambda lam: mixed_characteristic(alpha, lam, deriv=True),
        step=step,
        search_max=search_max,
        context={"alpha": alpha},
    )
    return EigenResult(alpha, root, bracket, res, its, kind="mixed")


@lru_cache(maxsize=512)
def principal_dirichlet_eigenvalue(alpha, step=SCAN_STEP, search_max=SEARCH_MAX):
    """Largest negative zero of ``E_{alpha,alpha}``."""
    alpha = check_order(alpha)
    root, bracket, res, its = _largest_negative_root(
        lambda lam: dirichlet_characteristic(alpha, lam),
        lambda lam: dirichlet_characteristic(alpha, lam, deriv=True),
        step=step,
        search_max=search_max,
        context={"alpha": alpha},
    )
    return EigenResult(alpha, root, bracket, res, its, kind="dirichlet")


def subinterval_search_max(alpha, t0):
    # roots move out like (1 - t0)**(-alpha)
    return SEARCH_MAX * max(1.0, (1.0 - t0) ** (-alpha))


@lru_cache(maxsize=4096)
def subinterval_eigenvalue(alpha, t0, step=SCAN_STEP, search_max=None):
    """Largest zero of the ``(t0, 1)`` determinant."""
    alpha = check_order(alpha)
    t0 = float(t0)
    if not 0.0 < t0 < 1.0:
        raise InvalidParams(f"t0 must lie in (0, 1), got {t0}")
    if search_max is None:
        search_max = subinterval_search_max(alpha, t0)
    root, bracket, res, its = _largest_negative_root(
        lambda lam: subinterval_characteristic(alpha, t0, lam),
        lambda lam: subinterval_characteristic(alpha, t0, lam, deriv=True),
        step=step,
        search_max=search_max,
        context={"alpha": alpha, "t0": t0},
    )
    return EigenResult(alpha, root, bracket, res, its, kind="subinterval", t0=t0)


@dataclass(frozen=True)
class EigenRow:
    alpha: float
    t0: float
    lambda_sub: float
    lambda_mixed: float
    lambda_dirichlet: float

    def as_tuple(self):
        return (self.alpha, self.t0, self.lambda_sub, self.lambda_mixed, self.lambda_dirichlet)

    @property
    def ordered(self):
        ok = self.lambda_dirichlet < self.lambda_mixed
        if not math.isnan(self.lambda_sub):
            ok = ok and self.lambda_sub < self.lambda_mixed
        return ok


COLUMNS = ("alpha", "t0", "lambda_sub", "lambda_mixed", "lambda_dirichlet")


def eigen_scan(alpha_grid, t0_grid=()):
    """Rows ``(alpha, t0, lambda_sub, lambda_mixed, lambda_dirichlet)``.

    With an empty ``t0_grid`` one row per order is produced with ``t0`` and
    ``lambda_sub`` set to NaN. Ordering violations are kept in the output
    (see :attr:`EigenRow.ordered`), never dropped.
    """
    rows = []
    for alpha in alpha_grid:
        alpha = float(alpha)
        try:
            mixed = principal_mixed_eigenvalue(alpha).value
            dirichlet = principal_dirichlet_eigenvalue(alpha).value
        except RootNotFound as exc:
            exc.context.setdefault("alpha", alpha)
            raise
        if len(t0_grid) == 0:
            rows.append(EigenRow(alpha, math.nan, math.nan, mixed, dirichlet))
            continue
        for t0 in t0_grid:
            try:
                sub = subinterval_eigenvalue(alpha, float(t0)).value
            except RootNotFound as exc:
                exc.context.update(alpha=alpha, t0=float(t0))
                raise
            rows.append(EigenRow(alpha, float(t0), sub, mixed, dirichlet))
    return rows

"""Two-parameter Mittag-Leffler function on the real line.

``E_{a,b}(x) = sum_k x**k / Gamma(a*k + b)`` for any real ``b``: with
``1/Gamma`` in place of a division the series stays entire in ``x`` even for
``b <= 0``.

Two evaluation routes:

* the power series with compensated (Neumaier) accumulation, used while the
  largest term is small enough that cancellation costs at most two digits;
* for ``1/4 <= a <= 2`` and large negative ``x``, the inverse Laplace integral
  ``(1/2 pi i) int t**(a-b) exp(t) / (t**a - x) dt`` over a Hankel contour made
  of the two rays ``r*exp(+-i*theta)``, discretised with a fixed graded
  Gauss-Legendre rule, plus the residues of the two conjugate poles
  ``|x|**(1/a) * exp(+-i*pi/a)`` when they lie to the right of the contour.

The public functions accept a scalar or an array for ``x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, rgamma

from .errors import NonConvergence

MAX_TERMS = 10_000
# The series route is taken while |x|**(1/alpha) <= SERIES_RADIUS (largest term
# about exp(SERIES_RADIUS)).
SERIES_RADIUS = 4.0
# Direct summation loses about eps * (largest term) absolutely; past this peak
# (about 1e-10 absolute) the series route gives up rather than return noise.
MAX_SERIES_PEAK = 1e6
CONTOUR_ORDERS = (0.25, 2.0)
_CHUNK = 1 << 21


@dataclass(frozen=True)
class MLArgs:
    """Arguments of one evaluation ``E_{alpha,beta}(x)``."""

    alpha: float
    beta: float
    x: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")


def recip_gamma(x):
    """``1/Gamma(x)``, exactly zero at the non-positive integers."""
    out = rgamma(x)
    return float(out) if np.ndim(out) == 0 else out


def _unpack(alpha, beta, x):
    if isinstance(alpha, MLArgs):
        return alpha.alpha, alpha.beta, alpha.x
    if beta is None or x is None:
        raise TypeError("expected MLArgs or (alpha, beta, x)")
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return float(alpha), float(beta), x


def _term_matrix(alpha, beta, x, k, deriv):
    """Series terms ``T[i, j]`` for ``x[i]`` and index ``k[j]`` (``k`` consecutive integers)."""
    args = alpha * k + beta
    power = k - 1 if deriv else k
    scale = k if deriv else np.ones_like(k)
    # args increase with k, so the direct block is a prefix
    ns = int(np.count_nonzero(args < 100))
    out = np.empty((x.size, k.size))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if ns:
            # running product of x instead of elementwise pow
            head = out[:, :ns]
            head[:, 0] = x ** power[0]
            head[:, 1:] = x[:, None]
            np.cumprod(head, axis=1, out=head)
            head *= scale[:ns] * rgamma(args[:ns])
        if ns < k.size:
            ax = np.abs(x)[:, None]
            pk = power[ns:]
            log_pow = np.where(pk == 0, 0.0, pk * np.log(ax))
            mag = np.exp(log_pow - gammaln(args[ns:]) + np.log(scale[ns:]))
            sign = np.where(x[:, None] < 0, (-1.0) ** pk, 1.0)
            out[:, ns:] = sign * mag
    return out


def _neumaier_rows(terms):
    s = np.zeros(terms.shape[0])
    comp = np.zeros_like(s)
    for col in terms.T:
        t = s + col
        comp += np.where(np.abs(s) >= np.abs(col), (s - t) + col, (col - t) + s)
        s = t
    return s + comp


def _series(alpha, beta, x, deriv=False):
    """Sum the series (or its termwise derivative); returns (sum, peak term).

    The number of terms is fixed per call: past the largest term, the last
    three must all fall below ``eps * |sum|``, otherwise the count doubles.
    Rows are summed exactly with ``math.fsum`` for small inputs; large inputs
    use plain sums, switching to Neumaier compensation on rows that cancel.
    """
    eps = np.finfo(float).eps
    first = 1 if deriv else 0
    # past the largest term once alpha*k clears |x|**(1/alpha)
    k_peak = float(np.max(np.abs(x))) ** (1.0 / alpha) / alpha + 2.0
    n = int(k_peak) + 32
    while True:
        if n > MAX_TERMS:
            raise NonConvergence(
                f"Mittag-Leffler series did not converge in {MAX_TERMS} terms "
                f"(alpha={alpha}, beta={beta})"
            )
        k = np.arange(first, first + n, dtype=float)
        terms = _term_matrix(alpha, beta, x, k, deriv)
        if x.size <= 4096:
            total = np.array([math.fsum(row) for row in terms])
        else:
            total = terms.sum(axis=1)
            # compensated sums only where cancellation could cost digits
            hard = np.abs(terms).sum(axis=1) > 8.0 * np.abs(total)
            if hard.any():
                total[hard] = _neumaier_rows(terms[hard])
        tail = np.abs(terms[:, -3:])
        if np.all(tail <= eps * np.abs(total)[:, None]):
            return total, np.max(np.abs(terms), axis=1)
        n *= 2


@lru_cache(maxsize=256)
def _contour_rule(alpha, beta):
    """Premultiplied nodes for ``Im sum_j A_j / (B_j - x)`` on the Hankel rays."""
    half_pi = 0.5 * math.pi
    pole_angle = math.pi / alpha
    if pole_angle - half_pi > math.pi - pole_angle:
        theta, residues = 0.5 * (half_pi + pole_angle), False
    else:
        theta, residues = 0.5 * (pole_angle + math.pi), True
    p = alpha - beta  # exponent of r at the origin; > -1 by construction
    c = -math.cos(theta)

    r_parts, w_parts = [], []
    gx, gw = np.polynomial.legendre.leggauss(10)
    for k in range(40):
        lo, hi = 2.0 ** (-k - 1), 2.0 ** (-k)
        r_parts.append(0.5 * (hi - lo) * gx + 0.5 * (hi + lo))
        w_parts.append(0.5 * (hi - lo) * gw)
    # [0, delta]: one node carrying the exact moment of r**p
    delta = 2.0 ** -40
    r_tail = 0.5 * delta
    r_parts.append(np.array([r_tail]))
    w_parts.append(np.array([delta ** (p + 1) / (p + 1) / r_tail**p]))

    q = max(p, 0.0)
    upper = 40.0 / c
    while q * math.log(upper) - c * upper > math.log(1e-20):
        upper *= 1.1
    n_panels = max(1, math.ceil((upper - 1.0) / 2.0))
    edges = np.linspace(1.0, upper, n_panels + 1)
    gx, gw = np.polynomial.legendre.leggauss(16)
    for lo, hi in zip(edges[:-1], edges[1:]):
        r_parts.append(0.5 * (hi - lo) * gx + 0.5 * (hi + lo))
        w_parts.append(0.5 * (hi - lo) * gw)

    r = np.concatenate(r_parts)
    w = np.concatenate(w_parts)
    rot = np.exp(1j * theta)
    tau = r * rot
    coef = w * r**p * np.exp(1j * theta * p) * np.exp(tau) * rot / math.pi
    denom = r**alpha * np.exp(1j * theta * alpha)
    return coef, denom, residues


def _contour(alpha, beta, x):
    """Contour route for ``x < 0``; ``beta`` already reduced below ``alpha + 1``."""
    coef, denom, residues = _contour_rule(alpha, beta)
    out = np.empty_like(x)
    step = max(1, _CHUNK // coef.size)
    for i in range(0, x.size, step):
        xs = x[i : i + step]
        out[i : i + step] = np.imag((coef[None, :] / (denom[None, :] - xs[:, None])).sum(axis=1))
    if residues:
        pole = np.abs(x) ** (1.0 / alpha) * np.exp(1j * math.pi / alpha)
        out += (2.0 / alpha) * np.real(pole ** (1.0 - beta) * np.exp(pole))
    return out


def _use_contour(alpha, x):
    lo, hi = CONTOUR_ORDERS
    if not lo <= alpha <= hi:
        return np.zeros(x.shape, dtype=bool)
    return (x < 0) & (np.abs(x) ** (1.0 / alpha) > SERIES_RADIUS)


def _eval_contour(alpha, beta, x):
    if alpha - beta <= -0.5:
        # E_{a,b}(x) = (E_{a,b-a}(x) - 1/Gamma(b-a)) / x
        lower = _eval_contour(alpha, beta - alpha, x)
        return (lower - rgamma(beta - alpha)) / x
    return _contour(alpha, beta, x)


def _evaluate(alpha, beta, x, deriv):
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(x_arr)):
        raise ValueError("Mittag-Leffler argument must be finite")
    out = np.empty_like(x_arr)
    far = _use_contour(alpha, x_arr)
    near = ~far
    if near.any():
        val, peak = _series(alpha, beta, x_arr[near], deriv=deriv)
        if np.any(peak > MAX_SERIES_PEAK * np.maximum(1.0, np.abs(val))):
            raise NonConvergence(
                f"series cancellation too severe for alpha={alpha}, beta={beta} "
                f"(largest term {float(np.max(peak)):.3g})"
            )
        out[near] = val
    if far.any():
        xf = x_arr[far]
        if deriv:
            # d/dx E_{a,b} = (E_{a,b-1} - (b-1) E_{a,b}) / (a x)
            e0 = _eval_contour(alpha, beta - 1.0, xf)
            e1 = _eval_contour(alpha, beta, xf)
            out[far] = (e0 - (beta - 1.0) * e1) / (alpha * xf)
        else:
            out[far] = _eval_contour(alpha, beta, xf)
    if np.ndim(x) == 0:
        return float(out[0])
    return out.reshape(np.shape(x))


def ml_eval(alpha, beta=None, x=None):
    """Evaluate ``E_{alpha,beta}(x)``.

    Accepts either an :class:`MLArgs` or the three values. Raises
    :class:`NonConvergence` for arguments the available routes cannot resolve
    (large negative ``x`` with ``alpha`` outside ``[1/4, 2]``).
    """
    alpha, beta, x = _unpack(alpha, beta, x)
    return _evaluate(alpha, beta, x, deriv=False)


def ml_deriv(alpha, beta=None, x=None):
    """``d/dx E_{alpha,beta}(x)``."""
    alpha, beta, x = _unpack(alpha, beta, x)
    return _evaluate(alpha, beta, x, deriv=True)

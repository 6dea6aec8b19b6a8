"""Reproduction and self-consistency checks behind ``fracmix verify``.

Each group returns a list of :class:`Check` records; nothing here raises on
a failed check. Random sampling is driven by an explicit seed.
"""

from __future__ import annotations

import io
import math
import time
from contextlib import redirect_stdout
from dataclasses import dataclass

import numpy as np
from scipy.special import betaln, gamma, rgamma

from . import exprlang, fracoracle, greens, quad, solver, spectrum
from .errors import FracMixError
from .mlf import ml_deriv, ml_eval

# Principal mixed eigenvalues as tabulated (value, printed decimals).
TABLE1 = (
    (1.1, -0.104812, 6),
    (1.2, -0.221832, 6),
    (1.3, -0.355588, 6),
    (1.4, -0.511676, 6),
    (1.5, -0.697078, 6),
    (1.6, -0.920556, 6),
    (1.7, -1.19319, 5),
    (1.8, -1.52904, 5),
    (1.9, -1.9461, 4),
    (2.0, -2.4674, 4),
)
ALPHA_GRID = np.round(np.arange(1.05, 2.0001, 0.05), 10)
T0_GRID = np.round(np.arange(0.05, 0.9501, 0.05), 10)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag}  {self.name}  ({self.seconds:.2f}s)  {self.detail}"


def _run(name, fn):
    t0 = time.perf_counter()
    try:
        passed, detail = fn()
    except FracMixError as exc:
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return Check(name, bool(passed), detail, time.perf_counter() - t0)


# ---------------------------------------------------------------- table 1


def table1(tol=1e-5):
    def one(alpha, ref, decimals):
        def fn():
            got = spectrum.principal_mixed_eigenvalue(alpha).value
            allowed = max(tol, 10.0**-decimals)
            return abs(got - ref) <= allowed, f"{got:.8f} vs {ref} (|diff| {abs(got - ref):.2e} <= {allowed:g})"

        return fn

    return [_run(f"table1 alpha={a}", one(a, ref, d)) for a, ref, d in TABLE1]


# ---------------------------------------------------------------- figures


def figures(fast=False):
    alphas = ALPHA_GRID[::3] if fast else ALPHA_GRID
    t0s = T0_GRID[::3] if fast else T0_GRID

    def dirichlet_below_mixed():
        worst = -math.inf
        for a in alphas:
            d = spectrum.principal_dirichlet_eigenvalue(a).value
            m = spectrum.principal_mixed_eigenvalue(a).value
            if not m < 0:
                return False, f"lambda_1*({a}) = {m} is not negative"
            worst = max(worst, d - m)
        return worst < 0, f"max(lambda_1 - lambda_1*) = {worst:.4g} over {len(alphas)} orders"

    def sub_below_mixed():
        rows = spectrum.eigen_scan(alphas, t0s)
        margin = min(r.lambda_mixed - r.lambda_sub for r in rows)
        bad = [(r.alpha, r.t0) for r in rows if not r.lambda_sub < r.lambda_mixed]
        return not bad, f"min margin {margin:.4g} over {len(rows)} (alpha, t0) pairs; violations {bad[:5]}"

    return [
        _run("dirichlet eigenvalue below mixed", dirichlet_below_mixed),
        _run("subinterval eigenvalue below mixed", sub_below_mixed),
    ]


# ---------------------------------------------------------------- invariants


def _mlf_checks(rng, n):
    a = rng.uniform(1.0, 2.0, n)
    a[a == 1.0] = 2.0
    b = rng.uniform(-1.0, 2.0, n)
    x = rng.uniform(-30.0, 5.0, n)

    def at_zero():
        ok = all(ml_eval(ai, bi, 0.0) == rgamma(bi) for ai, bi in zip(a, b))
        return ok, f"{n} random (alpha, beta)"

    def recurrence():
        err = max(
            abs(ml_eval(ai, bi, xi) - xi * ml_eval(ai, ai + bi, xi) - rgamma(bi))
            / max(1.0, abs(ml_eval(ai, bi, xi)))
            for ai, bi, xi in zip(a, b, x)
        )
        return err <= 1e-10, f"max relative defect {err:.2e}"

    def closed_forms():
        xs = np.linspace(-20, 20, 81)
        e1 = np.max(np.abs(ml_eval(1.0, 1.0, xs) - np.exp(xs)) / np.exp(np.abs(xs)))
        ys = np.linspace(0, 100, 201)
        e2 = np.max(np.abs(ml_eval(2.0, 1.0, -ys) - np.cos(np.sqrt(ys))))
        return max(e1, e2) <= 1e-10, f"exp {e1:.1e}, cos {e2:.1e}"

    def derivative():
        h = 1e-3
        err = 0.0
        for ai, bi, xi in zip(a, b, x):
            fd = (
                -ml_eval(ai, bi, xi + 2 * h)
                + 8 * ml_eval(ai, bi, xi + h)
                - 8 * ml_eval(ai, bi, xi - h)
                + ml_eval(ai, bi, xi - 2 * h)
            ) / (12 * h)
            err = max(err, abs(fd - ml_deriv(ai, bi, xi)) / max(1.0, abs(fd)))
        return err <= 1e-6, f"max relative difference {err:.2e}"

    return [
        _run("mlf value at zero", at_zero),
        _run("mlf recurrence", recurrence),
        _run("mlf closed forms", closed_forms),
        _run("mlf derivative vs finite difference", derivative),
    ]


def _spectrum_checks(fast):
    def residuals():
        worst = 0.0
        for a in ALPHA_GRID:
            for r in (spectrum.principal_mixed_eigenvalue(a), spectrum.principal_dirichlet_eigenvalue(a)):
                worst = max(worst, r.residual)
        return worst <= 1e-12, f"max characteristic residual {worst:.1e}"

    def halving():
        worst = 0.0
        for a in ALPHA_GRID[::4]:
            r1 = spectrum.principal_mixed_eigenvalue(a)
            r2 = spectrum.principal_mixed_eigenvalue(a, step=spectrum.SCAN_STEP / 2)
            width = max(r1.bracket[1] - r1.bracket[0], r2.bracket[1] - r2.bracket[0])
            worst = max(worst, abs(r1.value - r2.value) / width)
        return worst <= 1.0, f"max root change / bracket width {worst:.2f}"

    return [_run("spectrum residuals", residuals), _run("spectrum step halving", halving)] + figures(fast)


def _greens_checks(rng):
    cases = [(1.5, -0.5), (1.8, 0.0), (1.3, 0.7)]

    def continuity():
        # the part supported on s < t is only Holder of order alpha-1 at the diagonal
        worst = 0.0
        for a, lam in cases:
            t = np.linspace(0.01, 0.99, 99)
            delta = 1e-12
            diag = greens.green_unit(a, lam, t, t)
            right = np.abs(greens.green_unit(a, lam, t, t + delta) - diag)
            left = np.abs(greens.green_unit(a, lam, t, t - delta) - diag)
            holder = 1.01 * delta ** (a - 1.0) / gamma(a)
            # the smooth part still moves by about delta * (1-s)^(a-3) near s = 1
            scale = 1.0 + np.abs(diag) / (1.0 - t)
            excess = np.maximum(right, left - holder) / scale
            worst = max(worst, float(excess.max()))
        return worst <= 1e-10, f"max scaled excess over the Holder bound {worst:.1e}"

    def boundary():
        worst = 0.0
        s = np.linspace(0.0, 0.99, 100)
        for a, lam in cases:
            p = greens.ProblemParams(a, lam)
            worst = max(
                worst,
                float(np.abs(greens.green_eval(p, 0.0, s)).max()),
                float(np.abs(greens.green_eval(p, s[1:], 0.0)).max()),
                float(np.abs(greens.green_dt(p, 1.0, s)).max()),
            )
        return worst <= 1e-10, f"max |G(0,s)|, |G(t,0)|, |G_t(1,s)| = {worst:.1e}"

    def blowup():
        msgs = []
        ok = True
        for a, lam in cases:
            s = 1 - 10.0 ** -np.arange(2, 9)
            g = np.abs(greens.green_unit(a, lam, 0.5, s))
            scaled = (1 - s) ** (2 - a) * g
            ok &= bool(np.abs(np.diff(scaled[-3:])).max() <= 1e-3 * scaled[-1] and g[-1] > 10 * g[0])
            msgs.append(f"{scaled[-1]:.4g}")
        return ok, "limits of (1-s)^(2-a) G: " + ", ".join(msgs)

    def sandwich():
        worst = -math.inf
        for a, lam in [(1.5, -0.5), (1.8, 0.0)]:
            p = greens.ProblemParams(a, lam)
            env = greens.bounds_envelope(p)
            t = rng.uniform(0, 1, 2000)
            s = rng.uniform(0, 1, 2000)
            H = greens.h_tilde(p, t, s)
            slack = 1e-6 + env.allowance
            worst = max(worst, float(np.max(env.m(t) - H)) - slack, float(np.max(H - env.M)) - slack)
        return worst <= 0, f"largest violation beyond slack {worst:.2e}"

    def threshold():
        bad = []
        for a in (1.3, 1.7):
            lam1 = spectrum.principal_mixed_eigenvalue(a).value
            for off in (-0.5, -0.2, 0.1, 0.5):
                rep = greens.positivity_report(greens.ProblemParams(a, lam1 + off), grid_n=129)
                if rep.all_positive != (off > 0):
                    bad.append((a, off))
        return not bad, f"mismatches {bad}"

    def v_positive():
        t = np.linspace(1e-3, 1, 400)
        worst = math.inf
        for a, lam in cases:
            p = greens.ProblemParams(a, lam)
            worst = min(worst, float(np.min(greens.v1_eval(p, t))), float(np.min(greens.v2_eval(p, t))))
        return worst > 0, f"min of v1, v2 on (0,1] {worst:.3g}"

    return [
        _run("green continuity across diagonal", continuity),
        _run("green boundary identities", boundary),
        _run("green blow-up rate at s=1", blowup),
        _run("green sandwich bounds", sandwich),
        _run("green positivity threshold", threshold),
        _run("v1, v2 positive", v_positive),
    ]


def _quad_checks(rng):
    def beta_exact():
        worst = 0.0
        for a in (1.1, 1.5, 1.9, 2.0):
            for p in range(7):
                v = quad.integrate_weighted(lambda s, p=p: s**p, a)
                ref = math.exp(betaln(p + 1, a - 1))
                worst = max(worst, abs(v - ref) / ref)
        return worst <= 1e-12, f"max relative error {worst:.1e}"

    def refinement():
        f = lambda s: np.exp(s) * np.sqrt(s + 0.1)
        ok = True
        for a in (1.2, 1.7):
            rule = quad.gauss_jacobi(16, a - 2)
            v16, e16 = quad.integrate_weighted(f, a, rule=rule, tol=1.0, full_output=True)
            v64 = quad.integrate_weighted(f, a)
            ok &= abs(v64 - v16) <= e16 + 1e-15
        return ok, "doubling stays within the reported estimate"

    def linearity():
        p = greens.ProblemParams(1.6, -0.3)
        t = np.linspace(0, 1, 11)
        y1, y2 = (lambda s: np.cos(3 * s)), (lambda s: s**2 + 1)
        c1, c2 = rng.normal(size=2)
        lhs = quad.apply_green(p, lambda s: c1 * y1(s) + c2 * y2(s), t)
        rhs = c1 * quad.apply_green(p, y1, t) + c2 * quad.apply_green(p, y2, t)
        err = float(np.abs(lhs - rhs).max())
        return err <= 1e-12, f"max defect {err:.1e}"

    return [
        _run("quad Beta integrals", beta_exact),
        _run("quad refinement estimate", refinement),
        _run("quad linearity of Green operator", linearity),
    ]


def _oracle_checks():
    def semigroup():
        sch = fracoracle.RLScheme(1.5, h=1 / 1024)
        t = sch.grid
        once = fracoracle.rl_integral_grid(t, 0.5, sch.h)
        twice = fracoracle.rl_integral_grid(once, 0.7, sch.h)
        ref = fracoracle.power_rule_integral(1.0, 1.2, t)
        err = float(np.abs(twice - ref).max())
        return err <= 1e-6, f"max difference {err:.1e}"

    def inverse():
        a = 1.6
        sch = fracoracle.RLScheme(a)
        t = sch.grid
        f = np.cos(t)
        u = fracoracle.rl_integral_grid(f, a, sch.h)
        w = t ** (2 - a) * u
        vals, _ = fracoracle.rl_derivative_grid(fracoracle._Unit(t, w, a), sch)
        k = (t >= 0.05) & (t <= 0.95)
        err = float(np.abs(vals[k] - f[k]).max())
        return err <= 1e-4, f"max defect {err:.1e}"

    def kernel():
        worst = 0.0
        for a in (1.2, 1.5, 1.9):
            sch = fracoracle.RLScheme(a)
            t = sch.grid
            for w in (t.copy(), np.ones_like(t), 2.0 - 3.0 * t):
                vals, _ = fracoracle.rl_derivative_grid(fracoracle._Unit(t, w, a), sch)
                worst = max(worst, float(np.nanmax(np.abs(vals))))
        return worst <= 1e-10, f"max |D^a| on the kernel {worst:.1e}"

    def power():
        worst = 0.0
        for a in (1.3, 1.7):
            sch = fracoracle.RLScheme(a)
            t = sch.grid
            vals, _ = fracoracle.rl_derivative_grid(fracoracle._Unit(t, t**2, a), sch)
            k = (t >= 0.05) & (t <= 0.95)
            worst = max(worst, float(np.abs(vals[k] - gamma(a + 1)).max()))
        return worst <= 1e-2, f"max |D^a t^a - Gamma(a+1)| {worst:.1e}"

    def power_integral():
        t = np.array([0.1, 0.5, 1.0])
        worst = 0.0
        for b in (0.0, 0.5, 2.0):
            for ai in (0.3, 0.5, 1.5):
                got = fracoracle.rl_integral(lambda s, b=b: s**b, ai, t)
                worst = max(worst, float(np.abs(got - fracoracle.power_rule_integral(b, ai, t)).max()))
        return worst <= 1e-8, f"max error {worst:.1e}"

    def refinement():
        a = 1.5
        p = greens.ProblemParams(a, 0.0)
        f = lambda t, w: -gamma(a + 2) * t
        ratios = []
        errs = []
        for h in (1 / 256, 1 / 512):
            g = np.linspace(0, 1, 2049)
            u = solver.WGridFunction(g, g**3, a)
            rep = fracoracle.ode_residual(u, p, f, fracoracle.RLScheme(a, h))
            errs.append(rep.max_interior)
        ratios = errs[0] / errs[1]
        return ratios >= 1.5, f"residual ratio {ratios:.2f} ({errs[0]:.1e} -> {errs[1]:.1e})"

    return [
        _run("oracle semigroup", semigroup),
        _run("oracle inverse property", inverse),
        _run("oracle kernel annihilated", kernel),
        _run("oracle power rule", power),
        _run("oracle power-rule integrals", power_integral),
        _run("oracle grid refinement", refinement),
    ]


_CORPUS = (
    "t", "u", "1", "2.5", "-u", "--u", "u+t", "u-t", "u*t", "u/(t+1)", "u^2", "u^t^2",
    "-u^2", "(-u)^2", "(u+1)*(t-1)", "u-(t-1)", "u-t-1", "u/t/2", "u/(t/2)", "2^-u",
    "exp(-t)", "log(2+u)", "sqrt(t)", "abs(u-1)", "gamma(t+1)", "min(u, t)",
    "max(u, t, 1)", "phi_p(2; u)", "phi_p(1.5; u - t)", "(1+t)*log(2+u)", "(2-t)*u^2",
    "t*(u+1)/(u+2)", "phi_p(2; u) - 0.5*t^1.5", "1e-3*u", "3.25e2+t", "-(u+t)",
    "u*-t", "-u*t", "u^(1/2)", "(u^2)^3", "exp(log(1+u))", "1-(1-t)^2", "min(max(u,0),1)",
    "t^2*u^2+1", "u/(1+u^2)", "--(t)", "abs(-t)", "gamma(1.5)", "2*t-u/3", "((u))",
)


def _expr_checks(rng):
    def roundtrip():
        bad = [s for s in _CORPUS if exprlang.parse(exprlang.to_text(exprlang.parse(s))) != exprlang.parse(s)]
        return not bad, f"{len(_CORPUS)} expressions, failures {bad}"

    def builtins():
        t = rng.uniform(0, 1, 1000)
        u = rng.uniform(-2, 2, 1000)
        up = np.abs(u)
        refs = {
            "example1a": (exprlang.builtin("example1a"), lambda t, u: (1 + t) * np.log(2 + u), up),
            "example1b": (exprlang.builtin("example1b", a=2.0), lambda t, u: (2 - t) * u**2.0, up),
            "example2": (exprlang.builtin("example2"), lambda t, u: t * (u + 1) / (u + 2), up),
            "example3": (
                exprlang.builtin("example3", p=2.0, lam=-0.4, alpha=1.5),
                lambda t, u: u * np.abs(u) - (-0.4) * t**1.5,
                u,
            ),
        }
        worst = 0.0
        for node, ref, uu in refs.values():
            got = exprlang.evaluate(node, t, uu)
            want = ref(t, uu)
            worst = max(worst, float(np.max(np.abs(got - want) / np.maximum(1.0, np.abs(want)))))
        return worst <= 1e-14, f"max relative difference {worst:.1e}"

    def phi_total():
        x = np.array([-1e-300, -1e-12, 0.0, 1e-12, 1e-300])
        ok = True
        for p in (1.01, 1.5, 2.0, 3.0):
            v = exprlang.phi_p(p, x)
            ok &= bool(v[2] == 0.0 and np.all(np.abs(v) <= np.abs(x)))
        return ok, "phi_p(p; 0) = 0 and |phi_p(x)| <= |x| near 0"

    return [
        _run("exprlang round trip", roundtrip),
        _run("exprlang builtins", builtins),
        _run("exprlang phi_p at zero", phi_total),
    ]


def _solver_checks(rng, fast):
    def banach():
        p = greens.ProblemParams(5.0 / 3.0, 0.0)
        f = exprlang.to_callable(exprlang.builtin("example2"))
        rep = solver.picard_solve(p, f, K=0.25)
        r = rep.ratios[1:]
        return rep.certificate_q < 1 and max(r) <= rep.certificate_q + 0.05, (
            f"q={rep.certificate_q:.4f}, max ratio {max(r):.4f}"
        )

    def positivity():
        p = greens.ProblemParams(1.4, -0.3)
        f = lambda t, w: t * (1 + np.abs(np.sin(3 * w))) / (2 + w * w)
        worst = [math.inf]

        prob = solver._Problem(p, f)
        w = np.zeros_like(prob.t)
        for _ in range(15):
            w = prob.apply(w)
            worst[0] = min(worst[0], float(w.min()))
        return worst[0] >= 0, f"min iterate value {worst[0]:.2e}"

    def bracket():
        p = greens.ProblemParams(2.0, 0.0)
        lo = solver.WGridFunction.from_w(lambda t: 0 * t, 2.0)
        hi = solver.WGridFunction.from_w(lambda t: t, 2.0)
        rep = solver.monotone_solve(p, lambda t, w: np.ones_like(t), lo, hi, oracle=False)
        return rep.details["bracket_excess"] <= rep.tol, f"excess {rep.details['bracket_excess']:.1e}"

    def boundary():
        worst_w, worst_s = 0.0, 0.0
        for _ in range(3 if fast else 8):
            a = rng.uniform(1.1, 2.0)
            lam1 = spectrum.principal_mixed_eigenvalue(a).value
            lam = rng.uniform(lam1 + 0.05, 3.0)
            A, B = rng.uniform(-2, 2, 2)
            s = solver.solve_linear(greens.ProblemParams(a, lam, A=A, B=B), lambda t: 1 + np.sin(4 * t))
            worst_w = max(worst_w, abs(s.meta["w0"] - A))
            worst_s = max(worst_s, abs(s.meta["slope"] - B))
        return worst_w <= 1e-8 and worst_s <= 1e-6, f"|w(0)-A| {worst_w:.1e}, |u'(1)-B| {worst_s:.1e}"

    def consistency():
        p = greens.ProblemParams(5.0 / 3.0, 0.0)
        f = exprlang.to_callable(exprlang.builtin("example2"))
        rep = solver.picard_solve(p, f)
        return rep.converged and rep.residual_ode <= solver.ORACLE_TOL, f"residual_ode {rep.residual_ode:.2e}"

    return [
        _run("solver Banach rate", banach),
        _run("solver positivity propagation", positivity),
        _run("solver monotone bracket", bracket),
        _run("solver boundary exactness", boundary),
        _run("solver fixed point vs ODE residual", consistency),
    ]


def _cli_checks():
    def determinism():
        from .cli import main

        outs = []
        for _ in range(2):
            buf = io.StringIO()
            with redirect_stdout(buf):
                code = main(["spectrum", "scan", "--alpha-range", "1.5:1.7:0.1", "--t0-range", "0.3:0.5:0.2"])
            outs.append((code, buf.getvalue()))
        return outs[0] == outs[1] and outs[0][0] == 0, f"{len(outs[0][1])} bytes"

    return [_run("cli determinism", determinism)]


def invariants(fast=False, seed=0):
    rng = np.random.default_rng(seed)
    n = 60 if fast else 200
    return (
        _mlf_checks(rng, n)
        + _spectrum_checks(fast)
        + _greens_checks(rng)
        + _quad_checks(rng)
        + _oracle_checks()
        + _expr_checks(rng)
        + _solver_checks(rng, fast)
        + _cli_checks()
    )


# ---------------------------------------------------------------- worked examples


def example1():
    def fn():
        a = solver.growth_diagnostics(exprlang.to_callable(exprlang.builtin("example1a")))
        b = solver.growth_diagnostics(exprlang.to_callable(exprlang.builtin("example1b", a=2.0)))
        ok = (
            a["f_0"]["trend"] == "inf"
            and a["f^inf"]["trend"] == "zero"
            and b["f^0"]["trend"] == "zero"
            and b["f_inf"]["trend"] == "inf"
        )
        return ok, (
            f"(1+t)log(2+u): f_0 {a['f_0']['trend']}, f^inf {a['f^inf']['trend']}; "
            f"(2-t)u^2: f^0 {b['f^0']['trend']}, f_inf {b['f_inf']['trend']}"
        )

    return _run("example 1 growth limits", fn)


def example2():
    def fn():
        p = greens.ProblemParams(5.0 / 3.0, 0.0)
        f = exprlang.to_callable(exprlang.builtin("example2"))
        env = greens.bounds_envelope(p)
        rep = solver.picard_solve(p, f, K=0.25, envelope=env)
        ratios = rep.ratios[1:]
        cone = solver.cone_membership(rep.solution, env)
        ok = (
            rep.converged
            and rep.residual_fp <= 1e-8
            and max(ratios) <= rep.certificate_q + 0.05
            and rep.residual_ode <= solver.ORACLE_TOL
            and cone.in_Pu0
        )
        return ok, (
            f"iterations {rep.iterations}, residual_fp {rep.residual_fp:.1e}, q {rep.certificate_q:.4f} "
            f"(M {env.M:.4f}), max ratio {max(ratios):.4f}, residual_ode {rep.residual_ode:.1e}, "
            f"in P_u0 {cone.in_Pu0}"
        )

    return _run("example 2 contraction pipeline", fn)


def example3(alpha=1.5):
    def fn():
        lam1 = spectrum.principal_mixed_eigenvalue(alpha).value
        msgs = []
        ok = True
        for lam in (0.0, lam1 / 2):
            p = greens.ProblemParams(alpha, lam, A=0.0, B=-alpha / 2)
            f = exprlang.to_callable(exprlang.builtin("example3", p=2.0, lam=lam, alpha=alpha))
            g = solver.WGridFunction.from_w(lambda t: -(t**2), alpha)
            d = solver.WGridFunction.from_w(lambda t: 0.0 * t, alpha)
            lower = solver.check_lower_upper(g, p, f, "lower")
            upper = solver.check_lower_upper(d, p, f, "upper")
            rep = solver.monotone_solve(p, f, g, d)
            t = rep.solution.grid[1:]
            u = rep.solution.u_values[1:]
            below = float(np.max(-(t**alpha) - u))
            above = float(np.max(u))
            inside = below <= 1e-6 and above <= 1e-6
            ok &= lower.passed and upper.passed and inside
            msgs.append(
                f"lam={lam:.4f}: lower {lower.passed}, upper {upper.passed}, "
                f"max(-t^a-u) {below:.3g}, max u {above:.3g}"
            )
        return ok, "; ".join(msgs)

    return _run(f"example 3 lower/upper pipeline (alpha={alpha})", fn)


def examples():
    return [example1(), example2(), example3()]

"""Execute the checks of one scenario and turn them into report rows."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .calibration import run_calibration
from .config import Scenario, parse_ball, parse_kv
from .errors import BudgetExceededError, ConditionCError, LelongError
from .forms import HermitianForm, mixed_wedge_by_permutations, mixed_wedge_coeff
from .identities import (additivity_check, comparison_check, condition_c, g_profile, k0_identity,
                         lelong_jensen_residual, nondecreasing, nu_at, scaling_check)
from .limits import NuVerdict, nu_limit
from .oracles import oracle
from .quadrature import radial_profile

COLUMNS = ("scenario", "check", "r", "value", "error", "verdict", "evals", "ms")


@dataclass
class ReportRow:
    scenario: str
    check: str
    r: float | None
    value: float | None
    error: float | None
    verdict: str
    evals: int = 0
    ms: float | None = None

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def cells(self, timings: bool = False) -> list:
        def num(x):
            return "" if x is None else repr(float(x))

        ms = f"{self.ms:.1f}" if timings and self.ms is not None else ""
        return [self.scenario, self.check, num(self.r), num(self.value), num(self.error), self.verdict,
                str(self.evals), ms]


@dataclass
class ScenarioResult:
    name: str
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    budget_exhausted: bool = False

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


def _verdict(ok: bool, bound: str) -> str:
    return "pass" if ok else f"fail: {bound}"


def _verdict_dict(v: NuVerdict) -> dict:
    return {"kind": v.kind, "value": v.value, "uncertainty": v.uncertainty, "rate": v.rate,
            "model": v.model, "residual": v.residual}


def random_psd(rng: np.random.Generator, N: int) -> np.ndarray:
    A = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    return A @ A.conj().T


class _Context:
    """Objects shared by the checks of one scenario (built once, profiles cached)."""

    def __init__(self, sc: Scenario):
        self.sc = sc
        self.phi = sc.build_weight()
        self.T = sc.build_current() if sc.current else None
        self.B = sc.build_ball()
        self.grid = np.asarray(sc.grid, dtype=float)
        self._profile = None

    def profile(self):
        if self._profile is None:
            self._profile = radial_profile(self.T, self.phi, self.B, self.grid, self.sc.tol, self.sc.seed)
        return self._profile


def _check_nu_at(ctx, sc):
    points = [float(x) for x in sc.params["nu_at.points"].replace(",", " ").split()]
    expect = sc.float_param("nu_at.expect")
    atol = sc.float_param("nu_at.atol")
    rows = []
    for r in points:
        est = nu_at(ctx.T, ctx.phi, ctx.B, r, sc.tol, sc.seed)
        if expect is None:
            verdict = "pass"
        else:
            bound = atol if atol is not None else 3 * est.error
            dev = abs(est.value - expect)
            verdict = _verdict(dev <= bound, f"|nu - {expect:g}| = {dev:.3g} > {bound:.3g}")
        rows.append(("nu_at", r, est.value, est.error, verdict, est.evaluations))
    return rows, {}


def _check_profile(ctx, sc):
    prof = ctx.profile()
    name = sc.param("profile.oracle")
    ref = oracle(name, **parse_kv(sc.param("profile.oracle_params", ""))) if name else None
    rtol = sc.float_param("profile.rtol", 1e-2)
    monotone = sc.param("profile.monotone", "no").lower() in ("yes", "true", "1")
    rows = []
    each = prof.evaluations // len(prof)
    for j, r in enumerate(prof.grid):
        ok, bound = True, ""
        if ref is not None:
            o = ref(float(r))
            rel = abs(prof.nu[j] - o) / abs(o)
            ok, bound = rel <= rtol, f"|nu - oracle|/|oracle| = {rel:.3g} > {rtol:g} (oracle {o:.6g})"
        if ok and monotone and j > 0:
            slack = 3 * (prof.errors[j] + prof.errors[j - 1])
            ok, bound = prof.nu[j] <= prof.nu[j - 1] + slack, "profile decreases as r grows"
        rows.append(("profile", float(r), prof.nu[j], prof.errors[j], _verdict(ok, bound), each))
    return rows, {"label": prof.label, "nu": list(map(float, prof.nu)), "grid": list(map(float, prof.grid))}


def _check_limit(ctx, sc):
    v = nu_limit(ctx.profile())
    expect = sc.param("limit.expect")
    value = sc.float_param("limit.value")
    atol = sc.float_param("limit.atol", 2e-2)
    if expect is None:
        verdict = "inconclusive" if v.kind == "inconclusive" else "pass"
    elif v.kind != expect:
        verdict = f"fail: expected {expect}, got {v.describe()}"
    elif expect == "converged" and value is not None:
        dev = abs(v.value - value)
        verdict = _verdict(dev <= atol, f"|limit - {value:g}| = {dev:.3g} > {atol:g}")
    else:
        verdict = "pass"
    val = v.value if v.converged else None
    return [("limit", None, val, v.uncertainty, verdict, 0)], _verdict_dict(v)


def _check_condition_c(ctx, sc):
    rep = condition_c(ctx.T, ctx.phi, ctx.B, ctx.grid, sc.tol, sc.seed)
    expect = sc.param("condition_c.expect")
    if expect is None:
        verdict = "inconclusive" if rep.verdict == "inconclusive" else "pass"
    else:
        verdict = _verdict(rep.verdict == expect, f"expected {expect}, got {rep.verdict}")
    exp = None if math.isnan(rep.exponent) else rep.exponent
    summary = {"verdict": rep.verdict, "exponent": exp, "coefficient": rep.coefficient,
               "residual": rep.residual, "tail_integral": rep.tail_integral,
               "partial_sums": list(map(float, rep.partial_sums))}
    return [("condition_c", None, exp, rep.residual, verdict, rep.profile.evaluations)], summary


def _check_g_monotone(ctx, sc):
    rep = condition_c(ctx.T, ctx.phi, ctx.B, ctx.grid, sc.tol, sc.seed)
    if not rep.satisfied:
        return [("g_monotone", None, None, None, f"error: Condition (C) {rep.verdict}", 0)], \
            {"condition_c": rep.verdict}
    gs = g_profile(ctx.T, ctx.phi, ctx.B, ctx.grid, sc.tol, sc.seed, condition=rep)
    rows = []
    for j, (r, g) in enumerate(zip(ctx.grid, gs)):
        ok = True
        if j > 0:
            ok = nondecreasing([gs[j - 1].value, g.value], [gs[j - 1].error, g.error])
        rows.append(("g_monotone", float(r), g.value, g.error,
                     _verdict(ok, f"g({r:g}) exceeds g({ctx.grid[j - 1]:g}) beyond 3x error"), g.evaluations))
    return rows, {"g": [g.value for g in gs]}


def _check_lelong_jensen(ctx, sc):
    r1, r2 = (float(x) for x in sc.param("lelong_jensen.radii", "0.04 0.25").replace(",", " ").split())
    factor = sc.float_param("lelong_jensen.factor", 3.0)
    rows, summary = [], {}
    for pair in sc.param("lelong_jensen.pairs", "1:0").split():
        p, q = (int(x) for x in pair.split(":"))
        chk = lelong_jensen_residual(ctx.T, ctx.phi, ctx.B, r1, r2, p, q, sc.tol, sc.seed)
        evals = chk.lhs.evaluations + chk.rhs.evaluations
        rows.append((f"lelong_jensen(p={p},q={q})", None, chk.residual, chk.error,
                     _verdict(chk.passes(factor), f"|residual| = {abs(chk.residual):.3g} > "
                                                  f"{factor:g} x {chk.error:.3g}"), evals))
        summary[f"{p}:{q}"] = {"lhs": chk.lhs.value, "rhs": chk.rhs.value, "residual": chk.residual,
                               "error": chk.error}
    return rows, summary


def _check_scaling(ctx, sc):
    p = sc.float_param("scaling.p", 2.0)
    factor = sc.float_param("scaling.factor", 3.0)
    rep = scaling_check(ctx.T, ctx.phi, ctx.B, p, ctx.grid, sc.tol, sc.seed)
    rows = []
    for r, c in zip(rep.grid, rep.checks):
        rows.append((f"scaling(p={p:g})", float(r), c.residual, c.error,
                     _verdict(c.passes(factor), f"|residual| = {abs(c.residual):.3g} > {factor:g} x {c.error:.3g}"),
                     c.rhs.evaluations))
    atol = sc.float_param("scaling.atol", 2e-2)
    lim = rep.lhs_limit
    if lim.converged and rep.predicted is not None:
        dev = abs(lim.value - rep.predicted)
        verdict = _verdict(dev <= atol, f"|limit - predicted {rep.predicted:.6g}| = {dev:.3g} > {atol:g}")
        expect = sc.float_param("scaling.limit")
        if verdict == "pass" and expect is not None and abs(lim.value - expect) > atol:
            verdict = f"fail: |limit - {expect:g}| = {abs(lim.value - expect):.3g} > {atol:g}"
    else:
        verdict = "inconclusive"
    rows.append((f"scaling_limit(p={p:g})", None, lim.value, lim.uncertainty, verdict, 0))
    naive_expect = sc.float_param("scaling.naive")
    if rep.naive is not None:
        verdict = "pass" if naive_expect is None else _verdict(
            abs(rep.naive - naive_expect) <= atol, f"|naive - {naive_expect:g}| > {atol:g}")
        rows.append((f"scaling_naive(p={p:g})", None, rep.naive, None, verdict, 0))
    summary = {"lhs_limit": _verdict_dict(lim), "nu_limit": _verdict_dict(rep.nu_limit),
               "ddc_limit": _verdict_dict(rep.ddc_limit), "predicted": rep.predicted, "naive": rep.naive,
               "max_residual": rep.max_residual}
    return rows, summary


def _check_comparison(ctx, sc):
    psi = sc.build_psi()
    ell = sc.float_param("comparison.ell", 1.0)
    atol = sc.float_param("comparison.atol", 2e-2)
    try:
        rep = comparison_check(ctx.T, ctx.phi, psi, ell, ctx.B, ctx.grid, sc.tol, sc.seed)
    except ConditionCError as exc:
        return [("comparison", None, None, None, "error: Condition (C) fails for psi", 0)], \
            {"error": str(exc)}
    if not (rep.nu_phi.converged and rep.nu_psi.converged):
        return [("comparison", None, None, None, "inconclusive", 0)], \
            {"nu_phi": _verdict_dict(rep.nu_phi), "nu_psi": _verdict_dict(rep.nu_psi)}
    ratio = rep.ratio
    ok = ratio >= rep.bound * (1 - atol)
    bound = f"ratio {ratio:.6g} below {rep.bound:g}"
    expect = sc.float_param("comparison.ratio")
    if ok and expect is not None:
        ok, bound = abs(ratio - expect) <= atol, f"|ratio - {expect:g}| = {abs(ratio - expect):.3g} > {atol:g}"
    summary = {"nu_phi": _verdict_dict(rep.nu_phi), "nu_psi": _verdict_dict(rep.nu_psi), "ratio": ratio,
               "bound": rep.bound}
    return [("comparison", None, ratio, rep.ratio_error, _verdict(ok, bound), 0)], summary


def _check_k0(ctx, sc):
    rep = k0_identity(ctx.T, ctx.B, ctx.grid, sc.tol, sc.seed, phi=ctx.phi)
    atol = sc.float_param("k0.atol", 2e-3)
    if not rep.first.converged:
        return [("k0", None, None, None, f"fail: profile limit {rep.first.describe()}", 0)], {}
    dev = abs(rep.difference)
    rows = [("k0_limit", None, rep.first.value, rep.first.uncertainty, "pass", 0),
            ("k0_direct", None, rep.second.value, rep.second.error,
             _verdict(dev <= atol, f"|limit - direct| = {dev:.3g} > {atol:g}"), rep.second.evaluations)]
    return rows, {"limit": _verdict_dict(rep.first), "direct": rep.second.value}


def _check_additivity(ctx, sc):
    both = parse_ball(sc.param("additivity.balls"))
    B1, B2 = (type(both)((part,)) for part in both.parts)
    rep = additivity_check(ctx.T, B1, B2, ctx.phi, ctx.grid, sc.tol, sc.seed)
    ok = rep.passes()
    row = ("additivity", None, rep.difference if ok or rep.union.converged else None, rep.error,
           _verdict(ok, f"|nu(B1 u B2) - nu(B1) - nu(B2)| beyond 3 x {rep.error:.3g}"), 0)
    return [row], {"parts": [_verdict_dict(p) for p in rep.parts], "union": _verdict_dict(rep.union)}


def _check_wedge_oracle(ctx, sc):
    rng = np.random.default_rng(sc.seed)
    count = int(sc.float_param("wedge_oracle.instances", 100))
    max_dim = int(sc.float_param("wedge_oracle.max_dim", 3))
    atol = sc.float_param("wedge_oracle.atol", 1e-10)
    worst = 0.0
    for i in range(count):
        N = 1 + i % max_dim
        forms = [HermitianForm(random_psd(rng, N)) for _ in range(N)]
        a, b = mixed_wedge_coeff(forms), mixed_wedge_by_permutations(forms)
        worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    return [("wedge_oracle", None, worst, None, _verdict(worst <= atol, f"max deviation {worst:.3g} > {atol:g}"),
             count)], {"max_relative_deviation": worst}


def _check_calibration(ctx, sc):
    rows = []
    tol = sc.float_param("calibration.tol", 1e-4)
    for res in run_calibration(tol, sc.seed):
        rows.append((f"calibration[{res.name}]", None, res.estimate.value, res.estimate.error,
                     _verdict(res.honest, f"true error {res.true_error:.3g} > 3 x {res.estimate.error:.3g}"),
                     res.estimate.evaluations))
    return rows, {}


CHECK_FUNCS = {
    "nu_at": _check_nu_at,
    "profile": _check_profile,
    "limit": _check_limit,
    "condition_c": _check_condition_c,
    "g_monotone": _check_g_monotone,
    "lelong_jensen": _check_lelong_jensen,
    "scaling": _check_scaling,
    "comparison": _check_comparison,
    "k0": _check_k0,
    "additivity": _check_additivity,
    "wedge_oracle": _check_wedge_oracle,
    "calibration": _check_calibration,
}


def run_scenario(sc: Scenario) -> ScenarioResult:
    """Run every check of ``sc``; failures become rows, never exceptions."""
    result = ScenarioResult(sc.name)
    ctx = _Context(sc)
    for check in sc.checks:
        t0 = time.perf_counter()
        try:
            produced, summary = CHECK_FUNCS[check](ctx, sc)
        except BudgetExceededError as exc:
            result.budget_exhausted = True
            produced, summary = [(check, None, exc.best.value if exc.best else None, None,
                                  f"error: budget exhausted ({exc})", 0)], {"error": str(exc)}
        except ConditionCError as exc:
            produced, summary = [(check, None, None, None, f"error: {exc}", 0)], {"error": str(exc)}
        except (LelongError, ArithmeticError) as exc:
            produced, summary = [(check, None, None, None, f"error: {type(exc).__name__}: {exc}", 0)], \
                {"error": str(exc)}
        ms = (time.perf_counter() - t0) * 1e3 / max(1, len(produced))
        for name, r, value, err, verdict, evals in produced:
            result.rows.append(ReportRow(sc.name, name, r, value, err, verdict, int(evals), ms))
        summary = dict(summary)
        summary["verdict"] = "pass" if all(r.passed for r in result.rows[-len(produced):]) else "fail"
        result.summary[check] = summary
    return result

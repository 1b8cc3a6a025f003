"""Normalized masses and the identities they satisfy.

Every ``ds``-integral of a sublevel mass is rewritten with Fubini as a single
integral of ``dd^c T`` against a kernel of the weight value:

    int_a^b w(s) M(s) ds = int F(x) W(phi(x)),   W(phi) = int_{max(phi, a)}^b w(s) ds,

where ``M(s) = int_{B_phi(s) x B} F``.  The kernels are closed-form, so each
identity reduces to a handful of independent quadratures whose error bounds
simply add.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .currents import ModelCurrent, WeightedCurrent, Zero, ddc
from .errors import ConditionCError, ContractError, UnsupportedOperationError
from .limits import NuVerdict, nu_limit
from .quadrature import Estimate, RadialProfile, bidegree_gap, current_mass, radial_profile
from .weights import DirectionalBall, Weight, power_weight


@dataclass(frozen=True)
class IdentityCheck:
    """``lhs`` versus ``rhs`` with the summed error bound of both sides."""

    lhs: Estimate
    rhs: Estimate
    terms: dict = field(default_factory=dict)

    @property
    def residual(self) -> float:
        return self.lhs.value - self.rhs.value

    @property
    def error(self) -> float:
        return self.lhs.error + self.rhs.error

    def passes(self, factor: float = 3.0) -> bool:
        return abs(self.residual) <= factor * self.error


def _ddc_or_zero(T: ModelCurrent) -> ModelCurrent:
    try:
        return ddc(T)
    except UnsupportedOperationError:
        if isinstance(T, Zero):
            return Zero(T.split, T.k + 1)
        raise


def nu_at(T: ModelCurrent, phi: Weight, B: DirectionalBall, r: float, tol: float = 1e-6, seed: int = 0,
          *, v: Weight | None = None, budget: int | None = None) -> Estimate:
    """``r^{-(n-k)} int_{B_phi(r) x B} T ^ beta_phi^{n-k} ^ beta_v^m``."""
    d = bidegree_gap(T)
    if d < 0:
        raise ContractError(f"{T.name} has bidegree {T.k} > n = {T.split[0]}")
    scale = r ** d
    return current_mass(T, phi, B, r, v=v, tol=tol * scale, seed=seed, budget=budget) / scale


# ---------------------------------------------------------------------------
# Condition (C)
# ---------------------------------------------------------------------------

HOLDS_EXPONENT = 0.2
HOLDS_RESIDUAL = 0.1
FAILS_EXPONENT = 0.05


@dataclass(frozen=True)
class ConditionCReport:
    verdict: str  # "holds" | "fails" | "trivially-holds" | "inconclusive"
    exponent: float
    coefficient: float
    residual: float
    tail_integral: float
    partial_sums: np.ndarray
    profile: RadialProfile

    @property
    def satisfied(self) -> bool:
        return self.verdict in ("holds", "trivially-holds")


def _log_trapezoid_partials(s, y):
    """Cumulative ``int_{s_j}^{s_0} y(s) ds / s`` (trapezoid in ``log s``)."""
    ls = np.log(s)
    steps = 0.5 * (y[1:] + y[:-1]) * (ls[:-1] - ls[1:])
    return np.concatenate([[0.0], np.cumsum(steps)])


def condition_c(T: ModelCurrent, phi: Weight, B: DirectionalBall, grid, tol: float = 1e-5, seed: int = 0,
                *, v: Weight | None = None, budget: int | None = None) -> ConditionCReport:
    """Measure integrability of ``s -> nu(dd^c T, phi, B, s) / s`` at 0 from a fitted power law."""
    D = _ddc_or_zero(T)
    if bidegree_gap(D) < 0:
        raise ContractError(f"dd^c {T.name} has no test-form room (n - k - 1 < 0)")
    grid = np.asarray(grid, dtype=float)
    prof = radial_profile(D, phi, B, grid, tol, seed, v=v, budget=budget)
    y, err = prof.nu, prof.errors
    partial = _log_trapezoid_partials(grid, y)
    floor = max(3 * float(np.max(err)), 1e-12)
    if np.max(np.abs(y)) <= floor:
        return ConditionCReport("trivially-holds", math.nan, 0.0, 0.0, 0.0, partial, prof)

    sign = np.sign(y[np.argmax(np.abs(y))])
    usable = (sign * y > 3 * err) & (sign * y > 0)
    if usable.sum() < 3:
        return ConditionCReport("inconclusive", math.nan, 0.0, math.inf, math.nan, partial, prof)
    ls, ly = np.log(grid[usable]), np.log(sign * y[usable])
    alpha, logc = np.polyfit(ls, ly, 1)
    c = sign * math.exp(logc)
    model = c * grid ** alpha
    residual = float(np.sqrt(np.mean((y - model) ** 2)) / np.max(np.abs(y)))
    bounded_away = bool(np.all(sign * y > 3 * err))
    if alpha >= HOLDS_EXPONENT and residual < HOLDS_RESIDUAL:
        verdict = "holds"
        tail = float(partial[-1] + c * grid[-1] ** alpha / alpha)
    elif abs(alpha) < FAILS_EXPONENT and bounded_away:
        verdict, tail = "fails", math.inf * sign
    else:
        verdict, tail = "inconclusive", math.nan
    return ConditionCReport(verdict, float(alpha), float(c), residual, tail, partial, prof)


# ---------------------------------------------------------------------------
# g and its monotonicity
# ---------------------------------------------------------------------------

def _power_antiderivative(e: float):
    """``s -> int s^{-e} ds``."""
    if e == 1:
        return np.log
    return lambda s: np.asarray(s, dtype=float) ** (1 - e) / (1 - e)


def g_function(T: ModelCurrent, phi: Weight, B: DirectionalBall, r: float, grid=None, tol: float = 1e-6,
               seed: int = 0, *, condition: ConditionCReport | None = None, v: Weight | None = None,
               budget: int | None = None) -> Estimate:
    """``g(r) = nu(r) + int_0^r (s^d / r^d - 1) nu(dd^c T, s) / s ds`` with ``d = n - k``.

    ``grid`` (values below ``r``) is used only to decide Condition (C) when no
    report is passed in.
    """
    if condition is None:
        if grid is None:
            grid = r * 0.5 ** np.arange(1, 9)
        condition = condition_c(T, phi, B, grid, tol, seed, v=v, budget=budget)
    if not condition.satisfied:
        raise ConditionCError(f"Condition (C) {condition.verdict} for {T.name}: g is not defined",
                              report=condition)
    d = bidegree_gap(T)
    nu = nu_at(T, phi, B, r, tol / 2, seed, v=v, budget=budget)
    D = _ddc_or_zero(T)
    F = _power_antiderivative(d)

    def kernel(p):
        p = np.asarray(p, dtype=float)
        return (r - p) / r ** d - (F(r) - F(p))

    integral = current_mass(D, phi, B, r, kernel=kernel, v=v, tol=tol / 2, seed=seed, budget=budget)
    return nu + integral


def g_profile(T, phi, B, grid, tol=1e-6, seed=0, *, condition=None, v=None, budget=None) -> list:
    """``g`` at every grid value (decreasing)."""
    grid = np.asarray(grid, dtype=float)
    if condition is None:
        condition = condition_c(T, phi, B, grid, tol, seed, v=v, budget=budget)
    return [g_function(T, phi, B, float(r), tol=tol, seed=seed, condition=condition, v=v, budget=budget)
            for r in grid]


def nondecreasing(values, errors, factor: float = 3.0) -> bool:
    """``values`` given on a decreasing grid: each is >= the next one up to combined error."""
    values, errors = np.asarray(values), np.asarray(errors)
    drop = values[1:] - values[:-1]  # value at smaller r minus value at larger r
    return bool(np.all(drop <= factor * (errors[1:] + errors[:-1]) + 1e-12 * np.max(np.abs(values))))


# ---------------------------------------------------------------------------
# Lelong-Jensen
# ---------------------------------------------------------------------------

def lelong_jensen_residual(T: ModelCurrent, phi: Weight, B: DirectionalBall, r1: float, r2: float,
                           p: int, q: int, tol: float = 1e-6, seed: int = 0, *, v: Weight | None = None,
                           budget: int | None = None) -> IdentityCheck:
    """Both sides of the two-radius identity for sublevel masses with ``alpha_phi`` insertions.

    lhs = A(r2)/r2^{q+1} - A(r1)/r1^{q+1},  A(r) = int_{B(r)} T ^ alpha^{p-q-1} ^ beta^{d-p+q+1}
    rhs = int_{B(r1,r2)} T ^ alpha^p ^ beta^{d-p}
          + int_{r1}^{r2} (s^{-q-1} - r2^{-q-1}) M(s) ds + (r1^{-q-1} - r2^{-q-1}) int_0^{r1} M(s) ds
    with ``M(s) = int_{B(s)} dd^c T ^ alpha^{p-q-1} ^ beta^{d-p+q}``.
    """
    d = bidegree_gap(T)
    if not 0 < r1 < r2 < phi.R:
        raise ContractError("need 0 < r1 < r2 < R(phi)")
    if not (1 <= p <= d and 0 <= q < p):
        raise ContractError(f"need 1 <= p <= n-k = {d} and 0 <= q < p, got p={p}, q={q}")
    smooth = isinstance(T, Zero) or T.smooth
    if not smooth and q != p - 1:
        raise ContractError(f"{T.name} is singular: the identity is only valid for q = p - 1")
    share = tol / 5
    kw = dict(v=v, seed=seed, budget=budget)
    a = p - q - 1
    A2 = current_mass(T, phi, B, r2, alphas=a, tol=share * r2 ** (q + 1), **kw)
    A1 = current_mass(T, phi, B, r1, alphas=a, tol=share * r1 ** (q + 1), **kw)
    lhs = A2 / r2 ** (q + 1) - A1 / r1 ** (q + 1)

    annulus = current_mass(T, phi, B, r2, r_in=r1, alphas=p, tol=share, **kw)
    F = _power_antiderivative(q + 1)
    c2 = r2 ** -(q + 1)
    c1 = r1 ** -(q + 1)

    def kernel(x):
        x = np.asarray(x, dtype=float)
        lo = np.maximum(x, r1)
        w = (F(r2) - F(lo)) - c2 * (r2 - lo)
        return w + (c1 - c2) * np.clip(r1 - x, 0.0, None)

    D = _ddc_or_zero(T)
    dterm = current_mass(D, phi, B, r2, alphas=a, kernel=kernel, breaks=(r1,), tol=2 * share, **kw)
    rhs = annulus + dterm
    return IdentityCheck(lhs, rhs, {"A(r2)": A2, "A(r1)": A1, "annulus": annulus, "ddc": dterm})


# ---------------------------------------------------------------------------
# scaling law for phi^p
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingReport:
    p: float
    grid: np.ndarray
    checks: list  # IdentityCheck per grid value
    lhs_limit: NuVerdict
    nu_limit: NuVerdict
    ddc_limit: NuVerdict | None
    predicted: float | None
    naive: float | None

    @property
    def max_residual(self) -> float:
        return max(abs(c.residual) for c in self.checks)

    def passes(self, factor: float = 3.0) -> bool:
        return all(c.passes(factor) for c in self.checks)


def scaling_check(T: ModelCurrent, phi: Weight, B: DirectionalBall, p: float, grid, tol: float = 1e-6,
                  seed: int = 0, *, v: Weight | None = None, budget: int | None = None) -> ScalingReport:
    """Compare ``nu(T, phi^p, B, r^p)`` with ``p^d (nu(T, phi, B, r) + int_0^r ...)`` on a grid.

    The left side uses the genuine weight ``phi^p``: its own sublevel sets and
    its own ``dd^c``.
    """
    d = bidegree_gap(T)
    if d < 1:
        raise ContractError("scaling needs n - k >= 1")
    grid = np.asarray(grid, dtype=float)
    psi = power_weight(phi, p)
    D = _ddc_or_zero(T)
    kw = dict(v=v, seed=seed, budget=budget)
    lhs_prof = radial_profile(T, psi, B, grid ** p, tol, **kw)
    nu_prof = radial_profile(T, phi, B, grid, tol, **kw)
    e = d * (p - 1) + 1
    checks = []
    for j, r in enumerate(grid):
        def kernel(x, r=r):
            x = np.asarray(x, dtype=float)
            return (r - x) / r ** d - (r ** e - x ** e) / (e * r ** (d * p))

        K = current_mass(D, phi, B, float(r), kernel=kernel, tol=tol, **kw)
        lhs = Estimate(float(lhs_prof.nu[j]), float(lhs_prof.errors[j]))
        nu = Estimate(float(nu_prof.nu[j]), float(nu_prof.errors[j]))
        checks.append(IdentityCheck(lhs, (nu + K) * p ** d, {"nu": nu, "ddc": K}))

    lhs_lim = nu_limit(lhs_prof)
    nu_lim = nu_limit(nu_prof)
    if isinstance(D, Zero):
        ddc_lim = NuVerdict("converged", 0.0, 0.0, model="constant", residual=0.0)
    else:
        ddc_lim = nu_limit(radial_profile(D, phi, B, grid, tol, **kw))
    predicted = naive = None
    if nu_lim.converged:
        naive = p ** d * nu_lim.value
        if ddc_lim.converged:
            predicted = p ** d * (nu_lim.value + (p - 1) / (p * d) * ddc_lim.value)
    return ScalingReport(p, grid, checks, lhs_lim, nu_lim, ddc_lim, predicted, naive)


# ---------------------------------------------------------------------------
# comparison of weights, k = 0, additivity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComparisonReport:
    nu_phi: NuVerdict
    nu_psi: NuVerdict
    ell: float
    exponent: int

    @property
    def ratio(self) -> float:
        return self.nu_psi.value / self.nu_phi.value

    @property
    def ratio_error(self) -> float:
        a, b = self.nu_psi, self.nu_phi
        return abs(self.ratio) * (a.uncertainty / abs(a.value) + b.uncertainty / abs(b.value))

    @property
    def bound(self) -> float:
        return self.ell ** self.exponent


def comparison_check(T: ModelCurrent, phi: Weight, psi: Weight, ell: float, B: DirectionalBall, grid,
                     tol: float = 1e-5, seed: int = 0, *, v: Weight | None = None,
                     budget: int | None = None) -> ComparisonReport:
    """Directional numbers of ``T`` for two weights; requires Condition (C) for ``(T, psi, B)``."""
    grid = np.asarray(grid, dtype=float)
    cond = condition_c(T, psi, B, grid, tol, seed, v=v, budget=budget)
    if not cond.satisfied:
        raise ConditionCError(f"comparison hypothesis violated: Condition (C) {cond.verdict} for "
                              f"({T.name}, {psi.name})", report=cond)
    kw = dict(v=v, budget=budget)
    nphi = nu_limit(radial_profile(T, phi, B, grid, tol, seed, **kw))
    npsi = nu_limit(radial_profile(T, psi, B, grid, tol, seed, **kw))
    return ComparisonReport(nphi, npsi, ell, bidegree_gap(T))


@dataclass(frozen=True)
class PairReport:
    first: NuVerdict
    second: Estimate
    label: str = ""

    @property
    def difference(self) -> float:
        return self.first.value - self.second.value

    @property
    def error(self) -> float:
        return self.first.uncertainty + self.second.error


def k0_identity(h: WeightedCurrent, B: DirectionalBall, grid, tol: float = 1e-6, seed: int = 0,
                *, phi: Weight | None = None, v: Weight | None = None, budget: int | None = None) -> PairReport:
    """Limit of the profile of a function current against ``int_B h(0, t) omega_t^m``."""
    from .weights import euclid

    if not isinstance(h, WeightedCurrent) or h.k != 0 or h.J:
        raise ContractError("k0_identity needs a function current (bidegree 0, no slice)")
    phi = phi or euclid()
    grid = np.asarray(grid, dtype=float)
    lim = nu_limit(radial_profile(h, phi, B, grid, tol, seed, v=v, budget=budget))
    n = h.split[0]
    axis = replace(h, name=f"{h.name}(0,t)", J=tuple(range(n)), ddc_desc=None, annotations=())
    direct = current_mass(axis, phi, B, float(grid[0]), v=v, tol=tol, seed=seed, budget=budget)
    return PairReport(lim, direct, f"k=0 identity for {h.name}")


@dataclass(frozen=True)
class AdditivityReport:
    parts: tuple  # NuVerdict per ball
    union: NuVerdict

    @property
    def difference(self) -> float:
        return self.union.value - sum(p.value for p in self.parts)

    @property
    def error(self) -> float:
        return self.union.uncertainty + sum(p.uncertainty for p in self.parts)

    def passes(self, factor: float = 3.0) -> bool:
        if not (self.union.converged and all(p.converged for p in self.parts)):
            return False
        return abs(self.difference) <= factor * self.error + 1e-12


def additivity_check(T: ModelCurrent, B1: DirectionalBall, B2: DirectionalBall, phi: Weight, grid,
                     tol: float = 1e-6, seed: int = 0, *, v: Weight | None = None,
                     budget: int | None = None) -> AdditivityReport:
    """``nu(T, B1 u B2)`` against ``nu(T, B1) + nu(T, B2)`` for disjoint balls."""
    union = B1 | B2
    grid = np.asarray(grid, dtype=float)
    kw = dict(v=v, budget=budget)
    if isinstance(T, Zero):
        zero = NuVerdict("converged", 0.0, 0.0, model="constant", residual=0.0)
        return AdditivityReport((zero, zero), zero)
    parts = tuple(nu_limit(radial_profile(T, phi, B, grid, tol, seed, **kw)) for B in (B1, B2))
    whole = nu_limit(radial_profile(T, phi, union, grid, tol, seed, **kw))
    return AdditivityReport(parts, whole)

"""Deterministic integration of current densities over ``B_phi(r) x B``.

The z-part of a region is the sublevel set of a homogeneous weight restricted to
the effective domain (the slice ``z_J = 0`` for slice currents).  It is
integrated in polar form ``z = rho u``: the sublevel boundary along ``u`` is
``rho = (r / phi(u))^{1/(2 gamma)}``, so the region is represented exactly.
Directions use simplex coordinates ``x_j = |u_j|^2`` (collapsed Gauss-Legendre)
times a shifted trapezoid rule for the phases; radii use composite
Gauss-Legendre on dyadically graded cells toward the polar centre, which
absorbs the log and ``dist^{-alpha}`` kernels of every catalog singularity
(all of them pass through ``z = 0`` or the ball centre).  The t-part is a
euclidean ball handled the same way.

Resolution is refined one coordinate group at a time (radial, simplex,
phase, for z and t separately); the reported error is the sum of the changes
produced by refining each group once from the returned level.  Weights
without homogeneity fall back to scrambled Sobol sampling with indicator
membership.
"""

from __future__ import annotations

import functools
import math
import os
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.stats import qmc

from .currents import ModelCurrent, Zero, _leaf_density, leaves
from .errors import BudgetExceededError, ContractError, IntegrabilityError, RangeError
from .weights import DirectionalBall, Weight, alpha_matrix, beta_matrix, beta_v_matrix, euclid_t

DEFAULT_BUDGET = 10_000_000
MAX_LEVEL = 10
CHUNK = 1 << 16


def default_budget() -> int:
    env = os.environ.get("LELONG_BUDGET")
    return int(float(env)) if env else DEFAULT_BUDGET


@dataclass(frozen=True)
class Estimate:
    value: float
    error: float
    evaluations: int = 0
    strategy: str = ""

    def __add__(self, other: "Estimate") -> "Estimate":
        strategy = "+".join(sorted({s for s in (self.strategy, other.strategy) if s}))
        return Estimate(self.value + other.value, self.error + other.error,
                        self.evaluations + other.evaluations, strategy)

    def __sub__(self, other: "Estimate") -> "Estimate":
        return self + other * -1.0

    def __mul__(self, a: float) -> "Estimate":
        return Estimate(a * self.value, abs(a) * self.error, self.evaluations, self.strategy)

    __rmul__ = __mul__

    def __truediv__(self, a: float) -> "Estimate":
        return self * (1.0 / a)

    @classmethod
    def zero(cls) -> "Estimate":
        return cls(0.0, 0.0, 0, "")


@dataclass(frozen=True)
class Region:
    """``{r_in <= phi < r_out}`` on the slice ``z_J = 0`` times a euclidean t-ball."""

    weight: Weight
    r_out: float
    split: tuple
    J: tuple = ()
    center: tuple = ()
    radius: float = 1.0
    r_in: float = 0.0
    breaks: tuple = ()

    def __post_init__(self):
        if not 0 < self.r_out < self.weight.R:
            raise RangeError(f"level {self.r_out:g} not in (0, R) with R({self.weight.name}) = {self.weight.R:g}")
        if not 0 <= self.r_in < self.r_out:
            raise ContractError("need 0 <= r_in < r_out")
        if len(self.center) != self.split[1]:
            raise ContractError("t-ball centre does not match m")
        object.__setattr__(self, "breaks",
                           tuple(sorted(b for b in set(self.breaks) if self.r_in < b < self.r_out)))

    @property
    def free(self) -> np.ndarray:
        return np.array([j for j in range(self.split[0]) if j not in self.J], dtype=int)

    @property
    def a(self) -> int:
        return self.split[0] - len(self.J)

    @property
    def dim(self) -> int:
        return 2 * self.a + 2 * self.split[1]


# ---------------------------------------------------------------------------
# one-dimensional and directional rules
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _gauss01(g: int):
    x, w = np.polynomial.legendre.leggauss(g)
    return 0.5 * (x + 1.0), 0.5 * w


def _cells_rule(edges, g):
    x, w = _gauss01(g)
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1, None], edges[1:, None]
    return (lo + (hi - lo) * x).ravel(), ((hi - lo) * w).ravel()


def radial_rule(pieces, level: int, graded_first: bool):
    """Composite Gauss-Legendre on consecutive pieces ``[e_0, e_1], [e_1, e_2], ...``.

    The first piece is dyadically graded toward ``e_0 = 0`` when ``graded_first``.
    """
    g = 4 + 2 * level
    nodes, weights = [], []
    for i in range(len(pieces) - 1):
        lo, hi = pieces[i], pieces[i + 1]
        if i == 0 and graded_first:
            depth = 4 + 4 * level
            edges = np.concatenate([[0.0], hi * 2.0 ** -np.arange(depth, -1, -1)])
        else:
            edges = np.linspace(lo, hi, 2 + level)
        x, w = _cells_rule(edges, g)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def _phase_count(level: int) -> int:
    return 2 ** level + 1


def ball_directions(a: int, level_simplex: int, level_phase: int, shifts):
    """Unit vectors ``U`` in ``C^a`` and weights with ``sum w = |S^{2a-1}|``.

    ``int_{C^a} f = int_0^inf rho^{2a-1} sum_k w_k f(rho U_k) d rho``.
    """
    nth = _phase_count(level_phase)
    th = 2 * np.pi * np.arange(nth) / nth
    if a == 1:
        theta = th + shifts[0]
        return np.exp(1j * theta)[:, None], np.full(nth, 2 * np.pi / nth)
    gs = 3 + 2 * level_simplex
    u, wu = _gauss01(gs)
    grids = np.meshgrid(*([u] * (a - 1)), indexing="ij")
    wgrids = np.meshgrid(*([wu] * (a - 1)), indexing="ij")
    us = [g.ravel() for g in grids]
    w = np.prod([g.ravel() for g in wgrids], axis=0)
    xs, rest = [], np.ones_like(us[0])
    for i, ui in enumerate(us):
        xs.append(rest * ui)
        rest = rest * (1 - ui)
        if i < a - 2:
            w = w * rest
    xs.append(rest)
    X = np.stack(xs, axis=-1)
    phase_grids = np.meshgrid(*[th + s for s in shifts[:a]], indexing="ij")
    phases = np.stack([p.ravel() for p in phase_grids], axis=-1)
    U = np.sqrt(X)[:, None, :] * np.exp(1j * phases)[None, :, :]
    W = (2.0 ** (1 - a)) * w[:, None] * (2 * np.pi / nth) ** a * np.ones(len(phases))[None, :]
    return U.reshape(-1, a), W.ravel()


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------

def check_integrable(region: Region, annotations):
    for ann in annotations:
        if not ann.integrable(region.J):
            raise IntegrabilityError(
                f"kernel {ann.kernel}{'' if ann.kernel == 'log' else f'({ann.alpha:g})'} on locus "
                f"{ann.locus} has real codimension {ann.real_codim(region.J)} in the integration domain")


def _groups(region: Region):
    a, m = region.a, region.split[1]
    gs = []
    if a >= 1:
        gs += ["zr", "za"] + (["zs"] if a >= 2 else [])
    if m >= 1:
        gs += ["tr", "ta"] + (["ts"] if m >= 2 else [])
    return gs


class _PolarRule:
    def __init__(self, region: Region, integrand: Callable, seed: int):
        self.region = region
        self.integrand = integrand
        rng = np.random.default_rng(seed)
        self.zshift = rng.uniform(0, 2 * np.pi, size=max(region.a, 1))
        self.tshift = rng.uniform(0, 2 * np.pi, size=max(region.split[1], 1))
        self.cache = {}
        self.evaluations = 0

    def _zpart(self, lv):
        R = self.region
        a = R.a
        if a == 0:
            if R.r_in > 0:
                return np.zeros((0, 0), dtype=complex), np.zeros(0)
            return np.zeros((1, 0), dtype=complex), np.ones(1)
        gamma = R.weight.homogeneity
        U, wdir = ball_directions(a, lv.get("zs", 0), lv["za"], self.zshift)
        full = np.zeros((len(U), R.split[0]), dtype=complex)
        full[:, R.free] = U
        lam = np.asarray(R.weight(full), dtype=float) ** (-1.0 / (2 * gamma))
        levels = [R.r_in, *R.breaks, R.r_out]
        sig_edges = [c ** (1.0 / (2 * gamma)) for c in levels]
        sig, wsig = radial_rule(sig_edges, lv["zr"], graded_first=R.r_in == 0)
        rho = lam[:, None] * sig[None, :]
        pts = rho[:, :, None] * U[:, None, :]
        W = wdir[:, None] * rho ** (2 * a - 1) * lam[:, None] * wsig[None, :]
        return pts.reshape(-1, a), W.ravel()

    def _tpart(self, lv):
        R = self.region
        m = R.split[1]
        if m == 0:
            return np.zeros((1, 0), dtype=complex), np.ones(1)
        V, wdir = ball_directions(m, lv.get("ts", 0), lv["ta"], self.tshift)
        s, ws = radial_rule([0.0, R.radius], lv["tr"], graded_first=True)
        pts = np.asarray(R.center)[None, None, :] + s[None, :, None] * V[:, None, :]
        W = wdir[:, None] * s[None, :] ** (2 * m - 1) * ws[None, :]
        return pts.reshape(-1, m), W.ravel()

    def __call__(self, lv: dict):
        key = tuple(sorted(lv.items()))
        if key in self.cache:
            return self.cache[key]
        R = self.region
        n, m = R.split
        zp, wz = self._zpart(lv)
        tp, wt = self._tpart(lv)
        total, abs_total = 0.0, 0.0
        if len(zp) and len(tp):
            step = max(1, CHUNK // len(tp))
            for i in range(0, len(zp), step):
                zc, wzc = zp[i:i + step], wz[i:i + step]
                x = np.zeros((len(zc), len(tp), n + m), dtype=complex)
                x[:, :, R.free] = zc[:, None, :]
                x[:, :, n:] = tp[None, :, :]
                x = x.reshape(-1, n + m)
                phi = np.asarray(R.weight(x[:, :n]), dtype=float)
                f = np.asarray(self.integrand(x, phi), dtype=float)
                if not np.all(np.isfinite(f)):
                    raise ArithmeticError("non-finite integrand value inside the region")
                wf = (wzc[:, None] * wt[None, :]).ravel() * f
                total += float(np.sum(wf))
                abs_total += float(np.sum(np.abs(wf)))
        self.evaluations += len(zp) * len(tp)
        self.cache[key] = (total, abs_total)
        return total, abs_total


def _polar_integrate(region, integrand, tol, seed, budget):
    rule = _PolarRule(region, integrand, seed)
    groups = _groups(region)
    levels = {g: 0 for g in groups}
    while True:
        base, base_abs = rule(levels)
        deltas = {}
        for g in groups:
            up = dict(levels)
            up[g] += 1
            deltas[g] = abs(rule(up)[0] - base)
        floor = 1e-13 * base_abs
        err = sum(deltas.values()) + floor
        est = Estimate(base, err, rule.evaluations, "polar-product")
        if err <= tol or not deltas or max(deltas.values()) == 0.0:
            return est
        g = max(groups, key=lambda k: deltas[k])
        if rule.evaluations > budget or levels[g] >= MAX_LEVEL:
            raise BudgetExceededError(
                f"tolerance {tol:g} not reached within {rule.evaluations} evaluations "
                f"(estimate {base:.6g} +/- {err:.2g})", best=est)
        levels[g] += 1


def _qmc_integrate(region, integrand, tol, seed, budget, replicates=8):
    """Scrambled Sobol replicates over the bounding box, indicator membership."""
    R = region
    n, m = R.split
    a = R.a
    if R.weight.bound_radius is None:
        raise ContractError(f"weight {R.weight.name} is not homogeneous and declares no bound_radius")
    rz = float(R.weight.bound_radius(R.r_out))
    d = 2 * a + 2 * m
    if d == 0:
        x = np.zeros((1, n + m), dtype=complex)
        phi = np.asarray(R.weight(x[:, :n]))
        val = float(integrand(x, phi)[0]) if R.r_in <= phi[0] < R.r_out else 0.0
        return Estimate(val, 0.0, 1, "qmc")
    vol = (2 * rz) ** (2 * a) * (2 * R.radius) ** (2 * m)
    log2n = 10
    evals = 0
    while True:
        means = []
        for rep in range(replicates):
            u = qmc.Sobol(d, scramble=True, seed=seed * 7919 + rep).random_base2(log2n)
            y = 2 * u - 1
            x = np.zeros((len(u), n + m), dtype=complex)
            x[:, R.free] = rz * (y[:, :a] + 1j * y[:, a:2 * a])
            t = R.radius * (y[:, 2 * a:2 * a + m] + 1j * y[:, 2 * a + m:])
            x[:, n:] = np.asarray(R.center) + t
            phi = np.asarray(R.weight(x[:, :n]), dtype=float)
            inside = (phi >= R.r_in) & (phi < R.r_out) & (np.linalg.norm(t, axis=-1) < R.radius)
            f = np.zeros(len(u))
            if inside.any():
                f[inside] = integrand(x[inside], phi[inside])
            means.append(vol * float(np.mean(f)))
            evals += len(u)
        means = np.array(means)
        value = float(np.mean(means))
        err = 3.0 * float(np.std(means, ddof=1)) / math.sqrt(replicates)
        est = Estimate(value, err, evals, "qmc")
        if err <= tol:
            return est
        if evals > budget or log2n >= 24:
            raise BudgetExceededError(f"qmc tolerance {tol:g} not reached ({value:.6g} +/- {err:.2g})", best=est)
        log2n += 1


def integrate(region: Region, integrand: Callable, tol: float = 1e-4, seed: int = 0,
              annotations=(), budget: int | None = None) -> Estimate:
    """Integrate ``integrand(x, phi(x))`` against Lebesgue measure on ``region``.

    ``integrand`` receives full points ``(M, N)`` (zeros at the slice indices)
    and the weight values ``(M,)``.  Identical arguments give bit-identical
    results.
    """
    if tol <= 0:
        raise ContractError("tol must be positive")
    check_integrable(region, annotations)
    budget = default_budget() if budget is None else budget
    if region.weight.homogeneity is None and region.a > 0:
        return _qmc_integrate(region, integrand, tol, seed, budget)
    return _polar_integrate(region, integrand, tol, seed, budget)


# ---------------------------------------------------------------------------
# masses of currents
# ---------------------------------------------------------------------------

def bidegree_gap(T: ModelCurrent) -> int:
    """``n - k``: the number of z-directions left for test forms."""
    return T.split[0] - T.k


def current_mass(T: ModelCurrent, phi: Weight, B: DirectionalBall, r_out: float, *,
                 r_in: float = 0.0, alphas: int = 0, kernel: Callable | None = None,
                 breaks=(), v: Weight | None = None, tol: float = 1e-6, seed: int = 0,
                 budget: int | None = None) -> Estimate:
    """``int_{B_phi(r_in, r_out) x B} T ^ alpha_phi^a ^ beta_phi^{n-k-a} ^ beta_v^m * kernel(phi)``."""
    n, m = T.split
    nb = bidegree_gap(T) - alphas
    if alphas < 0 or nb < 0:
        raise ContractError(f"{T.name}: cannot place {alphas} alpha factors with n-k = {bidegree_gap(T)}")
    if m and B.m != m:
        raise ContractError(f"ball lives in C^{B.m} but the current has m = {m}")
    if isinstance(T, Zero):
        Region(phi, r_out, (n, m), center=(0j,) * m, r_in=r_in)
        return Estimate.zero()
    v = v or euclid_t()
    parts = B.parts if m else [((), 1.0)]
    lv = leaves(T)
    share = tol / max(1, sum(abs(c) for c, _ in lv) * len(parts))
    total = Estimate.zero()
    for coef, leaf in lv:
        def integrand(x, phival, leaf=leaf):
            forms = []
            if nb:
                forms += [beta_matrix(phi, x, n)] * nb
            if alphas:
                forms += [alpha_matrix(phi, x, n)] * alphas
            if m:
                forms += [beta_v_matrix(v, x, n)] * m
            val = _leaf_density(leaf, x, forms)
            return val * kernel(phival) if kernel is not None else val

        for center, radius in parts:
            region = Region(phi, r_out, (n, m), leaf.J, tuple(center), radius, r_in, tuple(breaks))
            total = total + coef * integrate(region, integrand, share, seed, leaf.annotations, budget)
    return total


@dataclass(frozen=True)
class RadialProfile:
    """Sampled ``r -> nu(T, phi, B, r)`` on a decreasing grid (weight-value units)."""

    grid: np.ndarray
    nu: np.ndarray
    errors: np.ndarray
    masses: np.ndarray
    exponent: int
    evaluations: int = 0
    label: str = ""

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 1 or np.any(np.diff(g) >= 0) or np.any(g <= 0):
            raise ContractError("profile grid must be positive and strictly decreasing")

    @property
    def r_euclid(self) -> np.ndarray:
        """Grid expressed as euclidean radii when the weight is ``|z|^2``."""
        return np.sqrt(self.grid)

    def __len__(self):
        return len(self.grid)


def geometric_grid(r_max: float, ratio: float, count: int) -> np.ndarray:
    if not 0 < ratio < 1 or count < 1 or r_max <= 0:
        raise ContractError("grid needs r_max > 0, 0 < ratio < 1, count >= 1")
    return r_max * ratio ** np.arange(count)


def radial_profile(T: ModelCurrent, phi: Weight, B: DirectionalBall, grid, tol: float = 1e-4,
                   seed: int = 0, *, alphas: int = 0, v: Weight | None = None,
                   budget: int | None = None) -> RadialProfile:
    """``nu(T, phi, B, r_j) = r_j^{-(n-k)} int_{B_phi(r_j) x B} T ^ beta^{n-k} ^ beta_v^m``.

    Masses are assembled from the innermost ball plus the annuli between
    consecutive grid values, each integrated once.
    """
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) >= 0):
        raise ContractError("grid must be strictly decreasing")
    d = bidegree_gap(T)
    count = len(grid)
    kw = dict(alphas=alphas, v=v, seed=seed, budget=budget)
    pieces = [current_mass(T, phi, B, grid[-1], tol=tol * grid[-1] ** d / 2, **kw)]
    for j in range(count - 2, -1, -1):
        pieces.append(current_mass(T, phi, B, grid[j], r_in=grid[j + 1],
                                   tol=tol * grid[j + 1] ** d / (2 * count), **kw))
    cum = list(np.cumsum([p.value for p in pieces]))
    cum_err = list(np.cumsum([p.error for p in pieces]))
    masses = np.array(cum[::-1])
    errs = np.array(cum_err[::-1])
    scale = grid ** d
    return RadialProfile(grid=grid, nu=masses / scale, errors=errs / scale, masses=masses, exponent=d,
                         evaluations=sum(p.evaluations for p in pieces),
                         label=f"nu({T.name}, {phi.name}, {B.describe()})")

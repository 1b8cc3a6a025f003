"""Semi-exhaustive weights on the z-block, their forms, powers and sublevel geometry."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .errors import ContractError, DomainError, RangeError
from .forms import CPoint, HermitianForm, embed_block, fd_gradient, fd_hessian, gradient_outer, hermitize


@dataclass(frozen=True, eq=False)
class Weight:
    """A C^2 psh weight ``phi`` with ``log phi`` psh, acting on one coordinate block.

    ``homogeneity`` is ``gamma`` in ``phi(lambda z) = |lambda|^{2 gamma} phi(z)``
    (``None`` when not homogeneous).  ``R`` is the validity radius in units of
    the weight value.  Non-homogeneous weights must supply ``bound_radius``.
    """

    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray] | None = None
    hessian: Callable[[np.ndarray], np.ndarray] | None = None
    homogeneity: float | None = None
    R: float = 1.0
    name: str = "phi"
    params: dict = field(default_factory=dict)
    sphere_min: Callable[[int], float] | None = None
    bound_radius: Callable[[float], float] | None = None
    dim: int | None = None

    def __call__(self, z):
        return self.value(np.asarray(z, dtype=complex))

    def grad(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return self.gradient(z) if self.gradient is not None else fd_gradient(self.value, z)

    def hess(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return hermitize(self.hessian(z) if self.hessian is not None else fd_hessian(self.value, z))

    def describe(self) -> str:
        hom = "none" if self.homogeneity is None else f"{self.homogeneity:g}"
        return f"{self.name} homogeneity {hom} R {self.R:g}"


# ---------------------------------------------------------------------------
# catalog weights
# ---------------------------------------------------------------------------

def _sq(z):
    return np.sum(np.abs(z) ** 2, axis=-1)


def euclid(R: float = 1.0) -> Weight:
    """``|z|^2``."""
    return Weight(
        value=_sq,
        gradient=lambda z: np.conj(z),
        hessian=lambda z: np.broadcast_to(np.eye(z.shape[-1], dtype=complex), z.shape + (z.shape[-1],)),
        homogeneity=1.0, R=R, name="euclid |z|^2",
        sphere_min=lambda n: 1.0,
    )


def anisotropic(lams, R: float | None = None) -> Weight:
    """``sum_j lambda_j |z_j|^2`` with all ``lambda_j > 0``."""
    lam = np.asarray(lams, dtype=float)
    if lam.ndim != 1 or np.any(lam <= 0):
        raise ContractError("anisotropic weight needs positive coefficients")
    return Weight(
        value=lambda z: np.sum(lam * np.abs(z) ** 2, axis=-1),
        gradient=lambda z: lam * np.conj(z),
        hessian=lambda z: np.broadcast_to(np.diag(lam).astype(complex), z.shape + (z.shape[-1],)),
        homogeneity=1.0, R=float(lam.min()) if R is None else R,
        name="anisotropic " + " + ".join(f"{l:g}|z{j + 1}|^2" for j, l in enumerate(lam)),
        params={"lambdas": tuple(lam)}, sphere_min=lambda n: float(lam.min()), dim=len(lam),
    )


def scaled(c: float, R: float | None = None) -> Weight:
    """``c |z|^2``."""
    if c <= 0:
        raise ContractError("scale must be positive")
    return Weight(
        value=lambda z: c * _sq(z),
        gradient=lambda z: c * np.conj(z),
        hessian=lambda z: np.broadcast_to(c * np.eye(z.shape[-1], dtype=complex), z.shape + (z.shape[-1],)),
        homogeneity=1.0, R=c if R is None else R, name=f"scaled {c:g}|z|^2",
        params={"c": c}, sphere_min=lambda n: c,
    )


def power_weight(phi: Weight, p: float) -> Weight:
    """``phi^p`` for ``p >= 2`` with chain-rule gradient and Hessian."""
    if p < 2:
        raise ContractError(f"power must be >= 2 for a C^2 weight, got {p}")

    def value(z):
        return phi(z) ** p

    def gradient(z):
        return (p * phi(z) ** (p - 1))[..., None] * phi.grad(z)

    def hessian(z):
        f = phi(z)
        g = phi.grad(z)
        return (p * f ** (p - 1))[..., None, None] * phi.hess(z) \
            + (p * (p - 1) * f ** (p - 2))[..., None, None] * gradient_outer(g)

    smin = None if phi.sphere_min is None else (lambda n: phi.sphere_min(n) ** p)
    bound = None if phi.bound_radius is None else (lambda r: phi.bound_radius(r ** (1.0 / p)))
    return Weight(
        value=value, gradient=gradient, hessian=hessian,
        homogeneity=None if phi.homogeneity is None else p * phi.homogeneity,
        R=phi.R ** p, name=f"({phi.name})^{p:g}", params={"base": phi.name, "p": p},
        sphere_min=smin, bound_radius=bound, dim=phi.dim,
    )


WEIGHT_FACTORIES = {
    "euclid": euclid,
    "anisotropic": anisotropic,
    "scaled": scaled,
}


def weight_from_spec(name: str, **params) -> Weight:
    """Build a catalog weight from a name and parameters (used by scenario configs)."""
    key = name.strip().lower()
    p = params.pop("p", None)
    if key == "power":
        base = weight_from_spec(params.pop("base", "euclid"), **params)
        return power_weight(base, float(p if p is not None else 2))
    if key not in WEIGHT_FACTORIES:
        raise ContractError(f"unknown weight {name!r}; available: euclid, anisotropic, scaled, power")
    w = WEIGHT_FACTORIES[key](**params)
    return power_weight(w, float(p)) if p is not None and float(p) != 1 else w


# ---------------------------------------------------------------------------
# forms
# ---------------------------------------------------------------------------

def _points(p) -> np.ndarray:
    return p.coords if isinstance(p, CPoint) else np.asarray(p, dtype=complex)


def beta_matrix(phi: Weight, x: np.ndarray, n: int) -> np.ndarray:
    """Batched ``dd^c phi(z)`` embedded in ``N x N`` with zero t-block."""
    return embed_block(phi.hess(x[..., :n]), x.shape[-1], 0)


def alpha_matrix(phi: Weight, x: np.ndarray, n: int) -> np.ndarray:
    """Batched ``dd^c log phi(z) = Hess/phi - g g^*/phi^2`` embedded in ``N x N``."""
    z = x[..., :n]
    f = np.asarray(phi(z), dtype=float)
    if np.any(f <= 0):
        raise DomainError(f"{phi.name} must be positive to form dd^c log phi")
    H = phi.hess(z) / f[..., None, None] - gradient_outer(phi.grad(z)) / (f * f)[..., None, None]
    return embed_block(H, x.shape[-1], 0)


def beta_v_matrix(v: Weight, x: np.ndarray, n: int) -> np.ndarray:
    """Batched ``dd^c v(t)`` embedded in ``N x N`` with zero z-block."""
    return embed_block(v.hess(x[..., n:]), x.shape[-1], n)


def beta(phi: Weight, p: CPoint) -> HermitianForm:
    return HermitianForm(beta_matrix(phi, p.coords, p.n), check=False)


def alpha(phi: Weight, p: CPoint) -> HermitianForm:
    return HermitianForm(alpha_matrix(phi, p.coords, p.n), check=False)


def beta_v(v: Weight, p: CPoint) -> HermitianForm:
    return HermitianForm(beta_v_matrix(v, p.coords, p.n), check=False)


# ---------------------------------------------------------------------------
# sublevel geometry
# ---------------------------------------------------------------------------

def _check_level(phi: Weight, r: float):
    if not 0 < r < phi.R:
        raise RangeError(f"level {r:g} not in (0, R) with R({phi.name}) = {phi.R:g}")


def sublevel_contains(phi: Weight, r: float, z) -> np.ndarray:
    """Membership in ``B_phi(r) = {phi < r}``."""
    _check_level(phi, r)
    return np.asarray(phi(_points(z))) < r


def sphere_minimum(phi: Weight, n: int, samples: int = 4096, seed: int = 0) -> float:
    """Minimum of ``phi`` on the unit sphere of ``C^n``: dense sampling, then local refinement."""
    if phi.sphere_min is not None:
        return float(phi.sphere_min(n))
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((samples, 2 * n))
    u /= np.linalg.norm(u, axis=1, keepdims=True)

    def f(v):
        v = v / np.linalg.norm(v)
        return float(phi(v[:n] + 1j * v[n:]))

    vals = phi(u[:, :n] + 1j * u[:, n:])
    best = []
    for i in np.argsort(vals)[:8]:
        res = minimize(f, u[i], method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
        best.append(res.fun)
    return float(min(min(best), vals.min()))


def sublevel_bound(phi: Weight, r: float, n: int | None = None) -> float:
    """Euclidean radius of a ball containing ``{phi < r}``."""
    _check_level(phi, r)
    if phi.homogeneity is None:
        if phi.bound_radius is None:
            raise ContractError(f"non-homogeneous weight {phi.name} needs a bound_radius")
        return float(phi.bound_radius(r))
    n = n or phi.dim or 1
    return (r / sphere_minimum(phi, n)) ** (1.0 / (2.0 * phi.homogeneity))


# ---------------------------------------------------------------------------
# directional balls
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirectionalBall:
    """An open ball of ``C^m`` or a disjoint union of such balls, stored as parts."""

    parts: tuple

    def __post_init__(self):
        norm = []
        for center, radius in self.parts:
            c = tuple(complex(x) for x in np.atleast_1d(np.asarray(center, dtype=complex)))
            if radius <= 0:
                raise ContractError("ball radius must be positive")
            norm.append((c, float(radius)))
        dims = {len(c) for c, _ in norm}
        if len(dims) > 1:
            raise ContractError("all parts of a union must live in the same C^m")
        object.__setattr__(self, "parts", tuple(norm))
        for i in range(len(norm)):
            for j in range(i + 1, len(norm)):
                (c1, r1), (c2, r2) = norm[i], norm[j]
                gap = np.linalg.norm(np.subtract(c1, c2)) - r1 - r2
                if gap < -1e-12:
                    raise ContractError("union parts must be disjoint")

    @classmethod
    def disc(cls, center=0.0, radius=1.0) -> "DirectionalBall":
        return cls(((center, radius),))

    @classmethod
    def whole(cls) -> "DirectionalBall":
        """The trivial factor for ``m = 0``."""
        return cls((((), 1.0),))

    @property
    def m(self) -> int:
        return len(self.parts[0][0])

    def __or__(self, other: "DirectionalBall") -> "DirectionalBall":
        return DirectionalBall(self.parts + other.parts)

    def mass(self) -> float:
        """``int_B omega_t^m`` (unit-normalised: a ball of radius rho has mass rho^{2m})."""
        return float(sum(r ** (2 * self.m) for _, r in self.parts))

    def contains(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=complex)
        inside = np.zeros(t.shape[:-1], dtype=bool)
        for c, r in self.parts:
            inside |= np.linalg.norm(t - np.asarray(c), axis=-1) < r
        return inside

    def describe(self) -> str:
        if self.m == 0:
            return "point"
        return " | ".join(
            "D(" + ",".join(f"{x.real:g}{x.imag:+g}j" if x.imag else f"{x.real:g}" for x in c) + f"; {r:g})"
            for c, r in self.parts)


def euclid_t() -> Weight:
    """The directional weight ``v = |t|^2`` used by every scenario."""
    w = euclid(R=math.inf)
    return Weight(value=w.value, gradient=w.gradient, hessian=w.hessian, homogeneity=1.0,
                  R=math.inf, name="|t|^2", sphere_min=w.sphere_min)

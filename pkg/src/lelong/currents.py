"""Model positive currents: slices, factored forms, scaled sums, with attached dd^c."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import CatalogLookupError, ContractError, SingularEvaluationError, UnsupportedOperationError
from .forms import HermitianForm, ScalarField, gradient_outer, mixed_wedge, restrict_matrix

MONOTONICITY = ("psh", "prh", "closed", "none")
POSITIVITY = ("positive", "negative-of-positive")


# ---------------------------------------------------------------------------
# potentials on the full space C^N
# ---------------------------------------------------------------------------

def norm_sq(indices: Sequence[int], name: str | None = None) -> ScalarField:
    """``sum_{i in I} |x_i|^2`` on ``C^N``."""
    idx = np.asarray(indices, dtype=int)

    def value(x):
        return np.sum(np.abs(x[..., idx]) ** 2, axis=-1)

    def gradient(x):
        g = np.zeros(x.shape, dtype=complex)
        g[..., idx] = np.conj(x[..., idx])
        return g

    def hessian(x):
        H = np.zeros(x.shape + (x.shape[-1],), dtype=complex)
        H[..., idx, idx] = 1.0
        return H

    return ScalarField(value, gradient, hessian, name=name or f"|x{tuple(idx)}|^2")


def log_norm_sq(indices: Sequence[int], name: str | None = None) -> ScalarField:
    """``log sum_{i in I} |x_i|^2`` on ``C^N``; singular on ``{x_I = 0}``."""
    idx = np.asarray(indices, dtype=int)

    def s(x):
        return np.sum(np.abs(x[..., idx]) ** 2, axis=-1)

    def value(x):
        return np.log(s(x))

    def gradient(x):
        g = np.zeros(x.shape, dtype=complex)
        g[..., idx] = np.conj(x[..., idx]) / s(x)[..., None]
        return g

    def hessian(x):
        S = s(x)
        xi = x[..., idx]
        H = np.zeros(x.shape + (x.shape[-1],), dtype=complex)
        block = -np.conj(xi)[..., :, None] * xi[..., None, :] / (S * S)[..., None, None]
        block[..., np.arange(len(idx)), np.arange(len(idx))] += 1.0 / S[..., None]
        H[..., idx[:, None], idx[None, :]] = block
        return H

    return ScalarField(value, gradient, hessian, name=name or f"log|x{tuple(idx)}|^2")


@dataclass(frozen=True)
class GradientFactor:
    """The (1,1)-form ``du ^ d^c u``."""

    potential: ScalarField

    def matrix(self, x):
        return gradient_outer(self.potential.grad(x))

    def describe(self):
        return f"d({self.potential.name})^d^c({self.potential.name})"


@dataclass(frozen=True)
class HessianFactor:
    """The (1,1)-form ``dd^c u``."""

    potential: ScalarField

    def matrix(self, x):
        return self.potential.hess(x)

    def describe(self):
        return f"dd^c({self.potential.name})"


@dataclass(frozen=True)
class SingularityAnnotation:
    """Singular locus ``{x_i = 0, i in locus}`` with a log or ``dist^{-alpha}`` kernel."""

    locus: tuple
    kernel: str = "log"
    alpha: float = 0.0

    def real_codim(self, J=()) -> int:
        return 2 * len(set(self.locus) - set(J))

    def integrable(self, J=()) -> bool:
        codim = self.real_codim(J)
        if self.kernel == "log":
            return codim > 0
        return self.alpha < codim

    def on_locus(self, x) -> np.ndarray:
        return np.all(x[..., list(self.locus)] == 0, axis=-1)


# ---------------------------------------------------------------------------
# currents
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WeightedCurrent:
    """``f * gamma_1 ^ ... ^ gamma_j ^ [z_J = 0]``.

    With ``J`` empty this is the Factored variant (a smooth form times a scalar
    weight on ``C^N``); with ``J`` non-empty and no factors it is a Slice
    current ``f [z_J = 0]``.  ``weight`` is evaluated on full points ``(..., N)``
    lying in the slice.
    """

    name: str
    split: tuple
    J: tuple = ()
    weight: Callable[[np.ndarray], np.ndarray] | None = None
    factors: tuple = ()
    monotonicity: str = "none"
    positivity: str = "positive"
    ddc_desc: "ModelCurrent | None" = None
    annotations: tuple = ()
    validity_radius: float = math.inf
    weight_name: str = "1"

    def __post_init__(self):
        n, m = self.split
        if any(j < 0 or j >= n for j in self.J) or len(set(self.J)) != len(self.J):
            raise ContractError(f"slice indices {self.J} must be distinct z-block indices (< {n})")
        if self.k > n:
            raise ContractError(f"bidegree {self.k} exceeds n = {n}")
        if self.monotonicity not in MONOTONICITY or self.positivity not in POSITIVITY:
            raise ContractError("invalid monotonicity or positivity flag")
        if self.ddc_desc is not None:
            _check_ddc(self, self.ddc_desc)

    @property
    def variant(self) -> str:
        return "Slice" if self.J else "Factored"

    @property
    def n(self):
        return self.split[0]

    @property
    def m(self):
        return self.split[1]

    @property
    def N(self):
        return self.split[0] + self.split[1]

    @property
    def k(self) -> int:
        return len(self.J) + len(self.factors)

    @property
    def smooth(self) -> bool:
        return not self.J and not self.annotations

    def weight_values(self, x):
        if self.weight is None:
            return np.ones(x.shape[:-1])
        return np.asarray(self.weight(x), dtype=float)


@dataclass(frozen=True, eq=False)
class ScaledSum:
    """Real linear combination of currents of equal bidegree."""

    terms: tuple
    name: str = ""
    monotonicity: str = "none"
    positivity: str = "positive"
    ddc_desc: "ModelCurrent | None" = None
    validity_radius: float = math.inf

    def __post_init__(self):
        if not self.terms:
            raise ContractError("empty scaled sum; use Zero")
        splits = {tuple(c.split) for _, c in self.terms}
        ks = {c.k for _, c in self.terms}
        if len(splits) != 1 or len(ks) != 1:
            raise ContractError("scaled-sum members need equal split and bidegree")
        if self.ddc_desc is not None:
            _check_ddc(self, self.ddc_desc)

    variant = "ScaledSum"

    @property
    def split(self):
        return self.terms[0][1].split

    @property
    def k(self):
        return self.terms[0][1].k

    @property
    def smooth(self):
        return all(c.smooth for _, c in self.terms)

    n = property(lambda self: self.split[0])
    m = property(lambda self: self.split[1])
    N = property(lambda self: sum(self.split))


@dataclass(frozen=True, eq=False)
class Zero:
    split: tuple
    k: int
    name: str = "0"
    monotonicity: str = "closed"
    positivity: str = "positive"
    validity_radius: float = math.inf

    variant = "Zero"
    smooth = True
    n = property(lambda self: self.split[0])
    m = property(lambda self: self.split[1])
    N = property(lambda self: sum(self.split))

    @property
    def ddc_desc(self):
        if self.k + 1 > self.split[0] + self.split[1]:
            return None
        return Zero(self.split, self.k + 1)


ModelCurrent = Union[WeightedCurrent, ScaledSum, Zero]


def _check_ddc(T, D):
    if tuple(D.split) != tuple(T.split) or D.k != T.k + 1:
        raise ContractError(f"declared dd^c of {T.name} must have bidegree ({T.k + 1},{T.k + 1}) on the same split")


def leaves(T: ModelCurrent) -> list:
    """Flatten to ``[(coefficient, WeightedCurrent), ...]``."""
    if isinstance(T, Zero):
        return []
    if isinstance(T, WeightedCurrent):
        return [(1.0, T)]
    out = []
    for c, member in T.terms:
        out.extend((c * c2, leaf) for c2, leaf in leaves(member))
    return out


def _matrix_list(test_forms):
    return [f.matrix if isinstance(f, HermitianForm) else np.asarray(f) for f in test_forms]


def _leaf_density(T: WeightedCurrent, x, mats):
    N = T.N
    if len(mats) + len(T.factors) != N - len(T.J):
        raise ContractError(
            f"{T.name}: {len(mats)} test forms given, {N - len(T.J) - len(T.factors)} required")
    if T.J and np.any(np.abs(x[..., list(T.J)]) > 0):
        raise ContractError(f"{T.name}: point is off the slice z_{[j + 1 for j in T.J]} = 0")
    for ann in T.annotations:
        if np.any(ann.on_locus(x)):
            raise SingularEvaluationError(f"{T.name} evaluated on its singular locus {ann.locus}")
    restricted = {}
    forms = []
    for A in [f.matrix(x) for f in T.factors] + list(mats):
        key = id(A)
        if key not in restricted:
            restricted[key] = restrict_matrix(A, list(T.J))
        forms.append(restricted[key])
    c = mixed_wedge(forms)
    return T.weight_values(x) * c * math.pi ** (-(N - len(T.J)))


def density_at(T: ModelCurrent, p, test_forms) -> np.ndarray:
    """Density of ``T ^ test_forms`` against Lebesgue measure on the effective domain.

    Slice currents are densities on the slice (dimension ``N - |J|``), factored
    currents on ``C^N``.  ``p`` may be a single point ``(N,)`` or a batch
    ``(..., N)``; ``test_forms`` are :class:`HermitianForm` or matching
    batched arrays.
    """
    x = p.coords if hasattr(p, "coords") else np.asarray(p, dtype=complex)
    mats = _matrix_list(test_forms)
    if isinstance(T, Zero):
        if len(mats) != T.N - T.k:
            raise ContractError(f"zero current of bidegree {T.k} needs {T.N - T.k} test forms")
        return np.zeros(x.shape[:-1]) if x.ndim > 1 else 0.0
    if isinstance(T, WeightedCurrent):
        out = _leaf_density(T, x, mats)
    else:
        out = sum(c * density_at(member, x, mats) for c, member in T.terms)
    return out if x.ndim > 1 else float(out)


def ddc(T: ModelCurrent) -> ModelCurrent:
    """The attached analytic ``dd^c T``."""
    if isinstance(T, Zero):
        D = T.ddc_desc
        if D is None:
            raise UnsupportedOperationError("dd^c of a top-degree zero current")
        return D
    if T.ddc_desc is None:
        raise UnsupportedOperationError(f"no dd^c descriptor attached to current {T.name!r}")
    return T.ddc_desc


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def _abs2(x, i):
    return np.abs(x[..., i]) ** 2


def _neg(current, name, monotonicity="closed"):
    return ScaledSum(((-1.0, current),), name=name, monotonicity=monotonicity,
                     positivity="negative-of-positive", ddc_desc=Zero(current.split, current.k + 1)
                     if current.k + 1 <= sum(current.split) else None)


def _t0(split=(2, 0)):
    split = tuple(split)
    if split not in ((2, 0), (1, 1)):
        raise ContractError("T0 lives on C^2 with split (2,0) or (1,1)")
    D = None
    if split == (2, 0):
        point = WeightedCurrent("[z=0]", split, J=(0, 1), monotonicity="closed")
        D = _neg(point, "-[z1=z2=0]")
    return WeightedCurrent(
        "T0", split, J=(0,), weight=lambda x: -np.log(_abs2(x, 1)), monotonicity="prh",
        ddc_desc=D, annotations=(SingularityAnnotation((1,), "log"),),
        validity_radius=1.0, weight_name="-log|z2|^2")


def _t1():
    split = (2, 1)
    w = log_norm_sq((0, 2), name="log(|z1|^2+|z3|^2)")
    inner = WeightedCurrent("dd^c log(|z1|^2+|z3|^2)[z2=0]", split, J=(1,), factors=(HessianFactor(w),),
                            monotonicity="closed", annotations=(SingularityAnnotation((0, 2), "power", 2.0),))
    D = _neg(inner, "-dd^c log(|z1|^2+|z3|^2)^[z2=0]")
    return WeightedCurrent(
        "T1", split, J=(1,), weight=lambda x: -np.log(_abs2(x, 0) + _abs2(x, 2)), monotonicity="prh",
        ddc_desc=D, annotations=(SingularityAnnotation((0, 2), "log"),), validity_radius=0.8,
        weight_name="-log(|z1|^2+|z3|^2)")


def _t2():
    split = (2, 1)
    u = log_norm_sq((0, 1), name="log|z|^2")
    point = WeightedCurrent("[z=0]", split, J=(0, 1), monotonicity="closed")
    D = _neg(point, "-[z=0]")
    return WeightedCurrent(
        "T2", split, factors=(GradientFactor(u),), monotonicity="prh", ddc_desc=D,
        annotations=(SingularityAnnotation((0, 1), "power", 2.0),), weight_name="1")


def _t3():
    split = (2, 1)
    inner = WeightedCurrent("dd^c|t|^2^[z1=0]", split, J=(0,), factors=(HessianFactor(norm_sq((2,), "|t|^2")),),
                            monotonicity="closed")
    return WeightedCurrent(
        "T3", split, J=(0,), weight=lambda x: 1.0 - _abs2(x, 2), monotonicity="prh",
        ddc_desc=_neg(inner, "-dd^c|t|^2^[z1=0]"), validity_radius=1.0, weight_name="1-|t|^2")


def _t4():
    split = (2, 1)
    D = WeightedCurrent("dd^c(|z2|^2+|t|^2)^[z1=0]", split, J=(0,),
                        factors=(HessianFactor(norm_sq((1, 2), "|z2|^2+|t|^2")),), monotonicity="closed",
                        ddc_desc=Zero(split, 3))
    return WeightedCurrent(
        "T4", split, J=(0,), weight=lambda x: _abs2(x, 1) + _abs2(x, 2), monotonicity="psh",
        ddc_desc=D, weight_name="|z2|^2+|t|^2")


def _ts(n=2):
    if n not in (2, 3):
        raise ContractError("TS is provided on C^3 (n=2) and C^4 (n=3)")
    split = (n, 1)
    z = tuple(range(n))
    wz = norm_sq(z, "|z|^2")
    D = WeightedCurrent("dd^c|z|^2^dd^c(|z|^2+|t|^2)", split,
                        factors=(HessianFactor(wz), HessianFactor(norm_sq(tuple(range(n + 1)), "|z|^2+|t|^2"))),
                        monotonicity="closed")
    return WeightedCurrent(
        "TS" if n == 2 else "TS4", split, factors=(HessianFactor(wz),),
        weight=lambda x: 2.0 - np.sum(np.abs(x) ** 2, axis=-1), monotonicity="prh",
        ddc_desc=_neg(D, "-(dd^c|z|^2+dd^c|t|^2)^dd^c|z|^2"), validity_radius=1.0,
        weight_name="2-|z|^2-|t|^2")


def function_current(h: Callable, split=(1, 1), name="h", monotonicity="none", ddc_desc=None,
                     weight_name="h") -> WeightedCurrent:
    """A (0,0)-current given by a function ``h(z, t)``."""
    return WeightedCurrent(name, tuple(split), weight=h, monotonicity=monotonicity, ddc_desc=ddc_desc,
                           weight_name=weight_name)


def _h0(split=(1, 1)):
    split = tuple(split)
    N = sum(split)
    D = WeightedCurrent("dd^c(|z|^2+|t|^2)", split, factors=(HessianFactor(norm_sq(tuple(range(N)))),),
                        monotonicity="closed")
    return function_current(lambda x: 1.0 - np.sum(np.abs(x) ** 2, axis=-1), split, name="H0",
                            monotonicity="prh", ddc_desc=_neg(D, "-(dd^c|z|^2+dd^c|t|^2)"),
                            weight_name="1-|z|^2-|t|^2")


_CATALOG = {
    "T0": (_t0, "-log|z2|^2 [z1=0]"),
    "T1": (_t1, "-log(|z1|^2+|z3|^2) [z2=0]"),
    "T2": (_t2, "dlog|z|^2 ^ d^c log|z|^2"),
    "T3": (lambda: _t3(), "(1-|t|^2) [z1=0]"),
    "T4": (lambda: _t4(), "(|z2|^2+|t|^2) [z1=0]"),
    "TS": (_ts, "(2-|z|^2-|t|^2) dd^c|z|^2 (n=2; n=3 for the C^4 variant)"),
    "H0": (_h0, "function current 1-|z|^2-|t|^2"),
}

CATALOG_NAMES = tuple(_CATALOG)


def catalog(name: str, **options) -> ModelCurrent:
    """Look up a catalog current; options: ``split`` for T0/H0, ``n`` for TS."""
    key = name.strip().upper()
    if key == "TS4":
        key, options = "TS", {**options, "n": 3}
    if key not in _CATALOG:
        raise CatalogLookupError(name, CATALOG_NAMES)
    return _CATALOG[key][0](**options)


def _ddc_label(T) -> str:
    try:
        D = ddc(T)
    except UnsupportedOperationError:
        return "n/a"
    return "0" if isinstance(D, Zero) else D.name


def describe(T: ModelCurrent) -> str:
    n, m = T.split
    r = T.validity_radius
    return (f"{T.name:<4} bidegree ({T.k},{T.k}) on C^{n + m} (n={n}, m={m})  {T.variant:<8} "
            f"{T.monotonicity}  ddc = {_ddc_label(T)}  validity radius {r:g}")


def list_catalog() -> str:
    """Human-readable listing of catalog currents and weights."""
    from .weights import anisotropic, euclid, power_weight, scaled

    lines = ["currents:"]
    for key, (_, formula) in _CATALOG.items():
        lines.append("  " + describe(catalog(key)) + f"   [{formula}]")
    lines.append("  " + describe(catalog("TS", n=3)))
    lines.append("  " + describe(catalog("T0", split=(1, 1))) + "   [directional variant]")
    lines.append("weights:")
    for w in (euclid(), power_weight(euclid(), 2), anisotropic([1.0, 2.0]), scaled(3.0, R=3.0)):
        lines.append("  " + w.describe())
    return "\n".join(lines)

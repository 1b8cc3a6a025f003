"""Limit extraction for radial profiles ``r -> nu(r)`` as ``r -> 0``.

Four models are fitted by least squares:

* ``constant``       nu = a
* ``power``          nu = a + b r^alpha,       0.2 <= alpha <= 4   (converges to a)
* ``log``            nu = a + b log(1/r)                           (diverges)
* ``power-div``      nu = a + b r^(-beta),     0.05 <= beta <= 4   (diverges)

A divergence is declared only when a divergent model fits at least ten times
better than the best convergent one, the profile moves monotonically by more
than its noise over at least five steps, and the divergent fit itself is good.
Otherwise a good convergent fit gives ``converged``; anything else is
``inconclusive``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ContractError
from .quadrature import RadialProfile

FIT_TOL = 1e-2
DIVERGENCE_MARGIN = 0.1
MIN_POINTS = 6


@dataclass(frozen=True)
class NuVerdict:
    kind: str  # "converged" | "diverges" | "inconclusive"
    value: float | None = None
    uncertainty: float | None = None
    rate: str | None = None
    model: str = ""
    residual: float = float("nan")
    diagnostics: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.kind == "converged"

    def describe(self) -> str:
        if self.kind == "converged":
            return f"converged {self.value:.6g} +/- {self.uncertainty:.2g} ({self.model})"
        if self.kind == "diverges":
            return f"diverges ({self.rate})"
        return "inconclusive"


def _linear_fit(basis: np.ndarray, y: np.ndarray):
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    res = y - basis @ coef
    return coef, float(np.sqrt(np.mean(res ** 2)))


def _fit_exponent(r, y, lo, hi, sign):
    """Best ``a + b r^(sign*e)`` over ``e in [lo, hi]``: coarse scan then bounded refinement."""
    lr = np.log(r)

    def rms(e):
        return _linear_fit(np.column_stack([np.ones_like(r), np.exp(sign * e * lr)]), y)[1]

    scan = np.linspace(lo, hi, 96)
    vals = [rms(e) for e in scan]
    i = int(np.argmin(vals))
    a, b = scan[max(i - 1, 0)], scan[min(i + 1, len(scan) - 1)]
    if b > a:
        res = minimize_scalar(rms, bounds=(a, b), method="bounded", options={"xatol": 1e-10})
        e = float(res.x) if res.fun <= vals[i] else float(scan[i])
    else:
        e = float(scan[i])
    coef, err = _linear_fit(np.column_stack([np.ones_like(r), np.exp(sign * e * lr)]), y)
    return e, coef, err


def fit_models(r, y) -> dict:
    r = np.asarray(r, dtype=float)
    y = np.asarray(y, dtype=float)
    out = {}
    a = float(np.mean(y))
    out["constant"] = {"a": a, "rms": float(np.sqrt(np.mean((y - a) ** 2)))}
    e, coef, err = _fit_exponent(r, y, 0.2, 4.0, 1.0)
    out["power"] = {"a": float(coef[0]), "b": float(coef[1]), "alpha": e, "rms": err}
    coef, err = _linear_fit(np.column_stack([np.ones_like(r), np.log(1.0 / r)]), y)
    out["log"] = {"a": float(coef[0]), "b": float(coef[1]), "rms": err}
    e, coef, err = _fit_exponent(r, y, 0.05, 4.0, -1.0)
    out["power-div"] = {"a": float(coef[0]), "b": float(coef[1]), "beta": e, "rms": err}
    return out


def _monotone_run(y, slack) -> int:
    """Length of the longest monotone tail (in steps) of ``y`` ordered by decreasing r."""
    d = np.diff(y)
    direction = np.sign(y[-1] - y[0]) or 1.0
    steps = 0
    for dj in d[::-1]:
        if direction * dj >= -slack:
            steps += 1
        else:
            break
    return steps


def nu_limit(profile: RadialProfile, fit_tol: float = FIT_TOL) -> NuVerdict:
    """Classify ``lim_{r -> 0} nu(r)`` from a sampled profile."""
    r = np.asarray(profile.grid, dtype=float)
    y = np.asarray(profile.nu, dtype=float)
    e = np.asarray(profile.errors, dtype=float)
    if len(r) < MIN_POINTS:
        raise ContractError(f"need at least {MIN_POINTS} grid points for a limit, got {len(r)}")
    scale = max(float(np.max(np.abs(y))), 1e-300)
    noise = float(np.max(e)) + 1e-12 * scale
    spread = float(np.max(y) - np.min(y))
    fits = fit_models(r, y)
    rel = {k: v["rms"] / scale for k, v in fits.items()}
    diag = {"fits": fits, "relative_rms": rel, "noise": noise}

    if spread <= 3 * noise:
        a = fits["constant"]["a"]
        return NuVerdict("converged", a, spread / 2 + noise, model="constant",
                         residual=rel["constant"], diagnostics=diag)

    conv_best = min(rel["constant"], rel["power"])
    div_name = "log" if rel["log"] <= rel["power-div"] else "power-div"
    div_rel = rel[div_name]
    steps = _monotone_run(y, 3 * noise)
    diag["monotone_steps"] = steps
    if (div_rel < DIVERGENCE_MARGIN * max(conv_best, noise / scale) and div_rel <= fit_tol
            and steps >= 5 and spread > 10 * noise):
        rate = "log" if div_name == "log" else f"power({fits['power-div']['beta']:.3g})"
        return NuVerdict("diverges", rate=rate, model=div_name, residual=div_rel, diagnostics=diag)

    if rel["power"] <= fit_tol:
        a = fits["power"]["a"]
        # stability of the extrapolated constant when the coarsest point is dropped
        drop = _fit_exponent(r[1:], y[1:], 0.2, 4.0, 1.0)[1][0] if len(r) > 3 else a
        unc = e[-1] + abs(drop - a) + 2 * fits["power"]["rms"]
        return NuVerdict("converged", a, float(unc), model="power", residual=rel["power"], diagnostics=diag)
    return NuVerdict("inconclusive", model="none", residual=min(conv_best, div_rel), diagnostics=diag)

"""Closed-form and one-dimensional reference values for the catalog currents.

All functions take the level ``r`` in weight units for ``phi = |z|^2``
(so the euclidean radius is ``sqrt(r)``).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

LOG2_HALF_PLUS_QUARTER = math.log(2) / 2 + 0.25


def disc_mass(rho: float, m: int = 1) -> float:
    """``int_{|t| < rho} omega_t^m`` with the unit-mass normalization."""
    return rho ** (2 * m)


def log_disc(rho: float = 0.5) -> float:
    """``int_{D(0, rho)} -log|t|^2 omega_t = rho^2 (1 - 2 log rho)``."""
    return rho ** 2 * (1.0 - 2.0 * math.log(rho))


def t0_full(r: float) -> float:
    """``nu`` of ``-log|z2|^2 [z1=0]`` on ``C^2`` against ``|z|^2``."""
    return 1.0 - math.log(r)


def t1_radial(r: float, rho: float = 0.5, prefactor: float = 4.0) -> float:
    """One-dimensional radial reduction of ``nu(-log(|z1|^2+|t|^2)[z2=0], D(0, rho), r)``.

    ``prefactor / R^2 * int_0^rho (-R^2/2 log(R^2+s^2) + R^2/2 - s^2/2 (log(R^2+s^2) - log s^2)) s ds``
    with ``R = sqrt(r)``.  The unit-mass normalization of the disc gives
    ``prefactor = 4``; the parameter lets other normalizations of the same
    reduction be compared against the quadrature.
    """
    R2 = r

    def inner(s):
        a = R2 + s * s
        tail = 0.0 if s == 0 else s * s / 2 * (math.log(a) - math.log(s * s))
        return (-R2 / 2 * math.log(a) + R2 / 2 - tail) * s

    val, _ = quad(inner, 0.0, rho, epsabs=1e-14, epsrel=1e-13, limit=200)
    return prefactor / R2 * val


def t3(rho: float = 0.5) -> float:
    """``int_{D(0, rho)} (1 - |t|^2) omega_t``; ``7/32`` for ``rho = 1/2``."""
    return rho ** 2 - rho ** 4 / 2


def t4(r: float, rho: float = 0.5) -> float:
    return rho ** 2 * r / 2 + rho ** 4 / 2


def h0(r: float, rho: float = 0.5) -> float:
    return rho ** 2 - rho ** 4 / 2 - rho ** 2 * r / 2


def ts_nu(r: float) -> float:
    """``nu`` of ``(2-|z|^2-|t|^2) dd^c|z|^2`` on ``C^2 x C`` over ``D(0,1)``."""
    return 1.5 * r - 2.0 * r * r / 3.0


def ts_g(r: float) -> float:
    return 1.5 * r - r * r / 2.0


ORACLES = {
    "t0_full": t0_full,
    "t1_radial": t1_radial,
    "t4": t4,
    "h0": h0,
    "ts_nu": ts_nu,
    "constant": lambda r, value=0.0: value,
}


def oracle(name: str, **params):
    """Named reference profile ``r -> value`` (weight units)."""
    if name not in ORACLES:
        raise KeyError(f"unknown oracle {name!r}; available: {', '.join(ORACLES)}")
    f = ORACLES[name]
    return lambda r: f(r, **params)


def t1_profile(grid, rho: float = 0.5, prefactor: float = 4.0) -> np.ndarray:
    return np.array([t1_radial(float(r), rho, prefactor) for r in grid])

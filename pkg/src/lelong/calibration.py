"""Ten integrals with known values, used to validate reported quadrature errors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import oracles
from .currents import SingularityAnnotation, catalog, function_current
from .identities import nu_at
from .quadrature import Estimate, Region, current_mass, integrate
from .weights import DirectionalBall, euclid

HONESTY_FACTOR = 3.0


@dataclass(frozen=True)
class CalibrationCase:
    name: str
    exact: float
    run: Callable[[float, int], Estimate]


@dataclass(frozen=True)
class CalibrationResult:
    name: str
    exact: float
    estimate: Estimate

    @property
    def true_error(self) -> float:
        return abs(self.estimate.value - self.exact)

    @property
    def honest(self) -> bool:
        return self.true_error <= HONESTY_FACTOR * self.estimate.error + 4 * np.finfo(float).eps * abs(self.exact)


def _ball_mass(N: int, r: float):
    unit = function_current(lambda x: np.ones(x.shape[:-1]), split=(N, 0), name="1")
    return lambda tol, seed: current_mass(unit, euclid(), DirectionalBall.whole(), r, tol=tol, seed=seed)


def _inverse_square(r: float):
    region = Region(euclid(), r, (2, 1), center=(0j,), radius=1.0)
    ann = (SingularityAnnotation((0, 1), "power", 2.0),)

    def f(x, phi):
        return math.pi ** -3 / phi

    return lambda tol, seed: integrate(region, f, tol, seed, ann)


def _log_disc(rho: float):
    region = Region(euclid(), 0.5, (1, 1), J=(0,), center=(0j,), radius=rho)
    ann = (SingularityAnnotation((1,), "log"),)

    def f(x, phi):
        return -np.log(np.abs(x[:, 1]) ** 2) / math.pi

    return lambda tol, seed: integrate(region, f, tol, seed, ann)


def _nu(name: str, r: float, B: DirectionalBall):
    T = catalog(name)
    return lambda tol, seed: nu_at(T, euclid(), B, r, tol, seed)


def calibration_suite() -> list:
    half = DirectionalBall.disc(0.0, 0.5)
    cases = [CalibrationCase(f"ball mass C^{N}", 0.3 ** N, _ball_mass(N, 0.3)) for N in range(1, 5)]
    cases.append(CalibrationCase("|z|^-2 kernel on C^2 x D(0,1)", 0.25, _inverse_square(0.25)))
    cases.append(CalibrationCase("-log|t|^2 on D(0,1/2)", oracles.log_disc(0.5), _log_disc(0.5)))
    for re in (0.1, 0.2, 0.4):
        cases.append(CalibrationCase(f"T1 radial at r_euclid={re:g}", oracles.t1_radial(re * re),
                                     _nu("T1", re * re, half)))
    cases.append(CalibrationCase("T0 full at r=1/4", oracles.t0_full(0.25),
                                 _nu("T0", 0.25, DirectionalBall.whole())))
    return cases


def run_calibration(tol: float = 1e-4, seed: int = 0) -> list:
    return [CalibrationResult(c.name, c.exact, c.run(tol, seed)) for c in calibration_suite()]

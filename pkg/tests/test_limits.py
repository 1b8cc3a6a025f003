import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lelong.errors import ContractError
from lelong.limits import nu_limit
from lelong.quadrature import RadialProfile, geometric_grid

GRID = geometric_grid(0.25, 0.5, 10)


def _profile(values, err=1e-10, grid=GRID):
    values = np.asarray(values, dtype=float)
    return RadialProfile(grid=grid, nu=values, errors=np.full(len(grid), err), masses=values * grid, exponent=1)


@given(st.floats(-5, 5).filter(lambda a: abs(a) > 1e-3))
def test_constant_profile_converges(a):
    v = nu_limit(_profile(np.full(len(GRID), a)))
    assert v.kind == "converged" and v.value == pytest.approx(a)


@given(st.floats(0.1, 5), st.floats(-3, 3).filter(lambda b: abs(b) > 1e-2), st.floats(0.5, 3))
def test_power_correction_converges_to_constant(a, b, alpha):
    v = nu_limit(_profile(a + b * GRID ** alpha))
    assert v.kind == "converged"
    assert abs(v.value - a) <= max(v.uncertainty, 1e-9) + 1e-9


@given(st.floats(-2, 2), st.floats(0.05, 3))
def test_log_growth_diverges(a, b):
    v = nu_limit(_profile(a + b * np.log(1 / GRID)))
    assert v.kind == "diverges" and v.rate == "log"


@given(st.floats(0.2, 2))
def test_power_growth_diverges(beta):
    v = nu_limit(_profile(1 + GRID ** -beta))
    assert v.kind == "diverges" and v.rate.startswith("power")


def test_oscillating_profile_is_inconclusive():
    v = nu_limit(_profile(1 + 0.3 * np.sin(7 * np.log(GRID))))
    assert v.kind == "inconclusive" and v.value is None


def test_noisy_constant_within_errors_is_constant():
    rng = np.random.default_rng(0)
    v = nu_limit(_profile(1 + 1e-4 * rng.uniform(-1, 1, len(GRID)), err=1e-4))
    assert v.kind == "converged" and v.model == "constant" and abs(v.value - 1) <= v.uncertainty


def test_growth_hidden_in_noise_is_not_divergence():
    # a log trend smaller than the quadrature error must not be declared divergent
    v = nu_limit(_profile(1 + 1e-6 * np.log(1 / GRID), err=1e-5))
    assert v.kind != "diverges"


def test_needs_six_points():
    with pytest.raises(ContractError):
        nu_limit(_profile(np.ones(5), grid=GRID[:5]))


def test_profile_grid_must_decrease():
    with pytest.raises(ContractError):
        _profile(np.ones(10), grid=GRID[::-1])

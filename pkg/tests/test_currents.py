import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_psd
from lelong.currents import (CATALOG_NAMES, ScaledSum, WeightedCurrent, Zero, catalog, ddc, density_at,
                             function_current, list_catalog)
from lelong.errors import CatalogLookupError, ContractError, SingularEvaluationError, UnsupportedOperationError
from lelong.forms import HermitianForm, fd_hessian, mixed_wedge, restrict_matrix

PRH = ["T1", "T2", "T3", "TS", "TS4", "H0"]
SMOOTH_WEIGHTS = {
    # name -> weight as a function of full points, for the finite-difference dd^c check
    "T3": lambda x: 1.0 - np.abs(x[..., 2]) ** 2,
    "T4": lambda x: np.abs(x[..., 1]) ** 2 + np.abs(x[..., 2]) ** 2,
    "T1": lambda x: -np.log(np.abs(x[..., 0]) ** 2 + np.abs(x[..., 2]) ** 2),
    "TS": lambda x: 2.0 - np.sum(np.abs(x) ** 2, axis=-1),
    "TS4": lambda x: 2.0 - np.sum(np.abs(x) ** 2, axis=-1),
    "H0": lambda x: 1.0 - np.sum(np.abs(x) ** 2, axis=-1),
}


def _point(T, rng, radius=0.4):
    x = radius * (rng.uniform(-1, 1, T.N) + 1j * rng.uniform(-1, 1, T.N)) / math.sqrt(2)
    for j in getattr(T, "J", ()):
        x[j] = 0
    return x


def _tests(T, rng, count):
    return [HermitianForm(random_psd(rng, T.N)) for _ in range(count)]


def test_catalog_names_and_lookup_errors():
    assert set(CATALOG_NAMES) == {"T0", "T1", "T2", "T3", "T4", "TS", "H0"}
    assert catalog("ts4").split == (3, 1)
    with pytest.raises(CatalogLookupError) as info:
        catalog("T9")
    assert "T2" in str(info.value)


@pytest.mark.parametrize("name,k", [("T0", 1), ("T1", 1), ("T2", 1), ("T3", 1), ("T4", 1), ("TS", 1), ("H0", 0)])
def test_bidegrees_and_ddc_bidegree(name, k):
    T = catalog(name)
    assert T.k == k
    assert ddc(T).k == k + 1


def test_directional_t0_has_no_ddc_descriptor():
    with pytest.raises(UnsupportedOperationError):
        ddc(catalog("T0", split=(1, 1)))


@pytest.mark.parametrize("name", ["T1", "T2", "T3", "T4", "TS", "TS4", "H0"])
def test_positive_currents_have_nonnegative_density(name):
    T = catalog(name)
    rng = np.random.default_rng(7)
    for _ in range(20):
        x = _point(T, rng)
        val = density_at(T, x, _tests(T, rng, T.N - T.k))
        assert val >= -1e-12


@pytest.mark.parametrize("name", PRH)
def test_prh_currents_have_nonpositive_ddc(name):
    T = catalog(name)
    D = ddc(T)
    rng = np.random.default_rng(11)
    for _ in range(20):
        x = _point(T, rng)
        if name == "T2":
            x[:2] = 0  # dd^c T2 lives on z = 0
        assert density_at(D, x, _tests(T, rng, T.N - T.k - 1)) <= 1e-12


@pytest.mark.parametrize("name", ["T1", "T3", "T4", "TS", "TS4", "H0"])
def test_declared_ddc_matches_finite_difference_hessian(name):
    T = catalog(name)
    D = ddc(T)
    f = SMOOTH_WEIGHTS[name]
    rng = np.random.default_rng(5)
    for _ in range(5):
        x = _point(T, rng)
        tests = [random_psd(rng, T.N) for _ in range(T.N - T.k - 1)]
        factors = [fd_hessian(f, x)] + [fac.matrix(x) for fac in T.factors]
        mats = [restrict_matrix(A, list(T.J)) for A in factors + tests]
        expected = mixed_wedge(mats) * math.pi ** -(T.N - len(T.J))
        got = density_at(D, x, [HermitianForm(A) for A in tests])
        assert got == pytest.approx(float(expected), rel=1e-5, abs=1e-8)


def test_scaled_sum_is_linear():
    T = catalog("T3")
    S = ScaledSum(((2.0, T), (-0.5, T)))
    rng = np.random.default_rng(2)
    x = _point(T, rng)
    tests = _tests(T, rng, 2)
    assert density_at(S, x, tests) == pytest.approx(1.5 * density_at(T, x, tests))


def test_batched_density_matches_pointwise():
    T = catalog("TS")
    rng = np.random.default_rng(4)
    xs = np.stack([_point(T, rng) for _ in range(6)])
    mats = [np.broadcast_to(random_psd(rng, 3), (6, 3, 3)) for _ in range(2)]
    batched = density_at(T, xs, mats)
    single = [density_at(T, xs[i], [m[i] for m in mats]) for i in range(6)]
    assert np.allclose(batched, single)


def test_slice_and_singularity_contracts():
    T2 = catalog("T2")
    rng = np.random.default_rng(0)
    with pytest.raises(SingularEvaluationError):
        density_at(T2, np.array([0, 0, 0.1j]), _tests(T2, rng, 2))
    T3 = catalog("T3")
    with pytest.raises(ContractError):
        density_at(T3, np.array([0.1, 0.1, 0.1]), _tests(T3, rng, 2))
    with pytest.raises(ContractError):
        density_at(T3, np.array([0, 0.1, 0.1]), _tests(T3, rng, 1))


def test_zero_current():
    Z = Zero((2, 1), 1)
    assert density_at(Z, np.zeros(3), _tests(Z, np.random.default_rng(0), 2)) == 0.0
    assert ddc(Z).k == 2
    with pytest.raises(UnsupportedOperationError):
        ddc(Zero((1, 1), 2))


def test_custom_function_current_and_validation():
    h = function_current(lambda x: np.full(x.shape[:-1], 2.0), split=(1, 1))
    assert density_at(h, np.array([0.1, 0.2]), [HermitianForm(np.eye(2))] * 2) == pytest.approx(2 * 2 / math.pi ** 2)
    with pytest.raises(ContractError):
        WeightedCurrent("bad", (2, 1), J=(2,))
    with pytest.raises(ContractError):
        WeightedCurrent("bad", (2, 1), J=(0,), ddc_desc=Zero((2, 1), 1))


def test_list_catalog_mentions_classes_and_radii():
    text = list_catalog()
    t2 = next(line for line in text.splitlines() if line.strip().startswith("T2"))
    assert "bidegree (1,1)" in t2 and "prh" in t2 and "ddc = -[z=0]" in t2
    assert "euclid |z|^2 homogeneity 1" in text
    t1 = next(line for line in text.splitlines() if line.strip().startswith("T1"))
    assert "validity radius 0.8" in t1


def _mixed2(A, B):
    """Mixed discriminant of two 2 x 2 matrices, written out."""
    return A[0, 0] * B[1, 1] + A[1, 1] * B[0, 0] - A[0, 1] * B[1, 0] - A[1, 0] * B[0, 1]


@given(st.integers(0, 2 ** 32 - 1))
def test_slice_densities_match_hand_reduction(seed):
    rng = np.random.default_rng(seed)
    x = 0.6 * (rng.uniform(-1, 1, 3) + 1j * rng.uniform(-1, 1, 3))

    T0 = catalog("T0")
    A = random_psd(rng, 2)
    p0 = np.array([0, x[1]])
    hand0 = -np.log(abs(x[1]) ** 2) * A[1, 1].real / math.pi
    assert density_at(T0, p0, [HermitianForm(A)]) == pytest.approx(hand0, rel=1e-12, abs=1e-14)

    A, B = random_psd(rng, 3), random_psd(rng, 3)
    free = np.ix_([0, 2], [0, 2])
    p1 = np.array([x[0], 0, x[2]])
    hand1 = -np.log(abs(x[0]) ** 2 + abs(x[2]) ** 2) * _mixed2(A[free], B[free]).real / math.pi ** 2
    got1 = density_at(catalog("T1"), p1, [HermitianForm(A), HermitianForm(B)])
    assert got1 == pytest.approx(hand1, rel=1e-12, abs=1e-14)

    free = np.ix_([1, 2], [1, 2])
    p3 = np.array([0, x[1], x[2]])
    hand3 = (1 - abs(x[2]) ** 2) * _mixed2(A[free], B[free]).real / math.pi ** 2
    got3 = density_at(catalog("T3"), p3, [HermitianForm(A), HermitianForm(B)])
    assert got3 == pytest.approx(hand3, rel=1e-12, abs=1e-14)

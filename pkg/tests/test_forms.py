import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_hermitian, random_psd
from grassmann import top_coefficient
from lelong.errors import ContractError, EvaluationError
from lelong.forms import (CPoint, HermitianForm, ScalarField, complex_hessian, embed_block, fd_gradient,
                          fd_hessian, gradient_form, mixed_wedge, mixed_wedge_by_permutations,
                          mixed_wedge_coeff, restrict_form)

seeds = st.integers(0, 2 ** 32 - 1)
dims = st.integers(1, 4)


def _forms(seed, N, psd=True):
    rng = np.random.default_rng(seed)
    make = random_psd if psd else random_hermitian
    return [HermitianForm(make(rng, N)) for _ in range(N)]


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_wedge_matches_exterior_algebra(N):
    rng = np.random.default_rng(N)
    for _ in range(10):
        mats = [random_hermitian(rng, N) for _ in range(N)]
        expected = top_coefficient(mats)
        assert abs(expected.imag) < 1e-9 * max(1, abs(expected))
        got = mixed_wedge_coeff([HermitianForm(m) for m in mats])
        assert got == pytest.approx(expected.real, rel=1e-10, abs=1e-10)


def test_wedge_of_rank_one_forms_matches_exterior_algebra():
    rng = np.random.default_rng(3)
    mats = [random_psd(rng, 3, rank=1) for _ in range(3)]
    assert mixed_wedge_coeff([HermitianForm(m) for m in mats]) == pytest.approx(
        top_coefficient(mats).real, rel=1e-10)


@given(seeds, dims)
def test_polarization_matches_permutation_expansion(seed, N):
    forms = _forms(seed, N, psd=False)
    a, b = mixed_wedge_coeff(forms), mixed_wedge_by_permutations(forms)
    assert a == pytest.approx(b, rel=1e-9, abs=1e-9)


@given(seeds, dims, st.data())
def test_wedge_symmetric_under_reordering(seed, N, data):
    forms = _forms(seed, N, psd=False)
    perm = data.draw(st.permutations(range(N)))
    assert mixed_wedge_coeff([forms[i] for i in perm]) == pytest.approx(mixed_wedge_coeff(forms), rel=1e-9, abs=1e-9)


@given(seeds, dims, st.floats(-3, 3), st.floats(-3, 3))
def test_wedge_is_multilinear(seed, N, a, b):
    forms = _forms(seed, N + 1, psd=False)[: N + 1]
    rng = np.random.default_rng(seed + 1)
    A, B = HermitianForm(random_hermitian(rng, N)), HermitianForm(random_hermitian(rng, N))
    rest = [HermitianForm(random_hermitian(rng, N)) for _ in range(N - 1)]
    lhs = mixed_wedge_coeff([A * a + B * b] + rest)
    rhs = a * mixed_wedge_coeff([A] + rest) + b * mixed_wedge_coeff([B] + rest)
    scale = 1 + abs(a) * abs(mixed_wedge_coeff([A] + rest)) + abs(b) * abs(mixed_wedge_coeff([B] + rest))
    assert abs(lhs - rhs) <= 1e-9 * scale


@given(seeds, dims)
def test_repeated_form_gives_factorial_determinant(seed, N):
    H = random_hermitian(np.random.default_rng(seed), N)
    expected = math.factorial(N) * np.linalg.det(H).real
    assert mixed_wedge_coeff([HermitianForm(H)] * N) == pytest.approx(expected, rel=1e-9, abs=1e-9)


@given(seeds, dims)
def test_wedge_of_positive_forms_is_nonnegative(seed, N):
    assert mixed_wedge_coeff(_forms(seed, N)) >= -1e-10


def test_batched_wedge_groups_identical_arrays():
    rng = np.random.default_rng(0)
    A = np.stack([random_hermitian(rng, 3) for _ in range(5)])
    B = np.stack([random_hermitian(rng, 3) for _ in range(5)])
    batched = mixed_wedge([A, A, B])
    for i in range(5):
        single = mixed_wedge_by_permutations([HermitianForm(A[i]), HermitianForm(A[i]), HermitianForm(B[i])])
        assert batched[i] == pytest.approx(single, rel=1e-10, abs=1e-10)


def test_unit_forms_give_unit_ball_mass_normalization():
    # omega^N = N! pi^-N Lebesgue and vol(unit ball of C^N) = pi^N / N!
    for N in range(1, 5):
        c = mixed_wedge_coeff([HermitianForm(np.eye(N))] * N)
        assert c * math.pi ** -N * math.pi ** N / math.factorial(N) == pytest.approx(1.0)


def test_wedge_rejects_mismatched_dimensions():
    with pytest.raises(ContractError):
        mixed_wedge_coeff([HermitianForm(np.eye(2))])


def test_hermitian_form_validation():
    with pytest.raises(ContractError):
        HermitianForm(np.array([[1, 1j], [1j, 1]]))
    with pytest.raises(ContractError):
        HermitianForm(np.ones((2, 3)))
    H = HermitianForm(np.diag([1.0, 2.0]))
    assert H.is_psd() and not (H * -1).is_psd()
    assert (H + H).matrix[1, 1] == 4


def test_cpoint_split():
    p = CPoint([1, 2j, 3], 2, 1)
    assert p.z.tolist() == [1, 2j] and p.t.tolist() == [3]
    with pytest.raises(ContractError):
        CPoint([1, 2], 2, 1)


def _quartic():
    def value(x):
        return np.sum(np.abs(x) ** 2, axis=-1) ** 2

    def gradient(x):
        return 2 * np.sum(np.abs(x) ** 2, axis=-1)[..., None] * np.conj(x)

    def hessian(x):
        s = np.sum(np.abs(x) ** 2, axis=-1)
        return 2 * s[..., None, None] * np.eye(x.shape[-1]) + 2 * np.conj(x)[..., :, None] * x[..., None, :]

    return ScalarField(value, gradient, hessian, "|z|^4")


@given(seeds, st.integers(1, 3))
def test_finite_differences_match_analytic_derivatives(seed, N):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    u = _quartic()
    scale = 1 + np.sum(np.abs(x) ** 2)
    assert np.allclose(fd_gradient(u.value, x), u.gradient(x), atol=1e-6 * scale ** 2)
    assert np.allclose(fd_hessian(u.value, x), u.hessian(x), atol=1e-5 * scale ** 2)


def test_fd_hessian_of_mixed_term():
    # u = Re(z1 zbar2) has d^2u/dz1 dzbar2 = 1/2
    u = lambda x: (x[..., 0] * np.conj(x[..., 1])).real
    H = fd_hessian(u, np.array([0.3 + 0.1j, -0.2 + 0.4j]))
    assert np.allclose(H, [[0, 0.5], [0.5, 0]], atol=1e-7)


def test_gradient_form_is_rank_one_outer_product():
    u = _quartic()
    p = np.array([0.5 + 0.5j, -0.25j])
    G = gradient_form(u, p).matrix
    g = u.gradient(p)
    assert np.allclose(G, np.outer(g, g.conj()))
    assert np.linalg.matrix_rank(G, tol=1e-12) == 1
    assert np.allclose(complex_hessian(u, p).matrix, u.hessian(p))


def test_non_finite_derivative_raises_with_coordinate():
    u = ScalarField(lambda x: np.log(np.sum(np.abs(x) ** 2, axis=-1)), name="log")
    with pytest.raises(EvaluationError) as info, np.errstate(all="ignore"):
        u.hess(np.zeros(2, dtype=complex))
    assert info.value.coordinate is not None


def test_restriction_and_embedding():
    H = HermitianForm(np.arange(9).reshape(3, 3) + np.arange(9).reshape(3, 3).T)
    R = restrict_form(H, [1])
    assert R.matrix.tolist() == [[0, 8], [8, 16]]
    E = embed_block(np.eye(2)[None], 4, 2)[0]
    assert E[2, 2] == 1 and E[3, 3] == 1 and E[:2].sum() == 0

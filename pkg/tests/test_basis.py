import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ququat.basis import (
    MIN_ALPHA,
    alpha4_state,
    alpha_j_state,
    c_from_eps,
    decode_info,
    ecs_schmidt,
    ecs_state,
    encode_info,
    info_state,
    make_basis,
)
from ququat.coherent import CoherentSuperposition, inner_product, norm, normalized, project_mod4, tensor
from ququat.errors import DegenerateInputError, SingularityError
from ququat.fock import to_fock

from .strategies import quad

# high-precision Poisson sums (mpmath, 40 digits) at |alpha| = 1
R_AT_1 = [1.2380902648552885593, 1.2181069198020392598, 0.85895463357722613233, 0.49552493928879393105]
A4_AT_1 = 0.12384439757581818724

alphas = st.floats(0.3, 4.0)


def dist_sq(s1, s2):
    d = s1 - s2
    return inner_product(d, d).real


def gram(states):
    return np.array([[inner_product(a, b) for b in states] for a in states])


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 3.2, 1.5 * np.exp(0.7j)])
def test_orthonormality(alpha):
    b = make_basis(alpha)
    g = gram([alpha_j_state(b, j) for j in range(4)])
    assert np.max(np.abs(g - np.eye(4))) < 1e-12


def test_r_values_match_high_precision_oracle(basis_1):
    np.testing.assert_allclose(basis_1.r, R_AT_1, rtol=1e-14)
    r1_closed = np.sqrt(1 - np.exp(-2) + 2 * np.exp(-1) * np.sin(1))
    assert basis_1.r[1] == pytest.approx(r1_closed, rel=1e-14)


def test_a4_matches_oracle(basis_1):
    assert basis_1.a[4] == pytest.approx(A4_AT_1, rel=1e-13)
    assert basis_1.a[4] == pytest.approx(np.sqrt(basis_1.r[0] ** 2 - 4 * basis_1.x) / 2, rel=1e-12)


def test_a0_is_sqrt_x(basis_2):
    assert basis_2.a[0] == pytest.approx(np.sqrt(basis_2.x), rel=1e-15)


@given(alphas)
def test_basis_invariants(alpha):
    b = make_basis(alpha)
    np.testing.assert_allclose(b.r, 1 / (2 * b.N), rtol=1e-15)
    assert np.sum(b.r**2) == pytest.approx(4, abs=1e-12)
    assert np.sum(b.a**2) == pytest.approx(1, abs=1e-12)
    assert np.all(np.isfinite(b.N))


@given(alphas)
def test_beta_block_is_basis_at_beta(alpha):
    b = make_basis(alpha)
    direct = make_basis((1 + 1j) * alpha / 2) if abs((1 + 1j) * alpha / 2) >= MIN_ALPHA else None
    assert b.beta_block.mean_photons == pytest.approx(alpha**2 / 2)
    if direct is not None:
        np.testing.assert_allclose(b.b, direct.a, atol=1e-12)


@pytest.mark.parametrize("alpha", [0.05, 0.0, 0.099])
def test_domain_guard(alpha):
    with pytest.raises(SingularityError):
        make_basis(alpha)


def test_alpha1_coefficient_pattern(basis_1):
    s = alpha_j_state(basis_1, 1)
    np.testing.assert_allclose(s.coeffs, basis_1.N[1] * np.array([1, -1j, -1, 1j]), atol=1e-15)
    np.testing.assert_allclose(s.amps[:, 0], basis_1.alpha * np.array([1, 1j, -1, -1j]), atol=1e-15)


@pytest.mark.parametrize("j", range(4))
def test_normalized_projection_equals_alpha_j(j):
    b = make_basis(1.5)
    p = normalized(project_mod4(CoherentSuperposition.coherent(b.alpha), 0, j))
    assert dist_sq(p, alpha_j_state(b, j)) < 1e-12


def test_alpha4_orthogonal_to_vacuum_and_odd(basis_2):
    s4 = alpha4_state(basis_2)
    assert norm(s4) == pytest.approx(1, abs=1e-12)
    assert abs(inner_product(CoherentSuperposition.coherent(0), s4)) < 1e-12
    for j in (1, 2, 3):
        assert abs(inner_product(alpha_j_state(basis_2, j), s4)) < 1e-12


@pytest.mark.parametrize("k", range(4))
def test_vacuum_separated_expansion(basis_2, k):
    """|i^k alpha> = a_0|0> + sum_j a_j i^(jk)|alpha_j> + a_4|alpha_4>."""
    b = basis_2
    rebuilt = CoherentSuperposition.coherent(0, coeff=b.a[0])
    rebuilt = rebuilt + alpha4_state(b) * b.a[4]
    for j in (1, 2, 3):
        rebuilt = rebuilt + alpha_j_state(b, j) * (b.a[j] * 1j ** (j * k))
    target = CoherentSuperposition.coherent(1j**k * b.alpha)
    # squared distance: the norm itself would be the square root of rounding noise
    assert dist_sq(rebuilt, target) < 1e-12


@pytest.mark.parametrize("alpha", [1.0, 2.0])
def test_photon_content(alpha):
    b = make_basis(alpha)
    n = 60
    idx = np.arange(n + 1)
    for j in range(4):
        f = to_fock(alpha_j_state(b, j), (n,)).amplitudes
        assert np.max(np.abs(f[idx % 4 != j])) < 1e-10
    f4 = to_fock(alpha4_state(b), (n,)).amplitudes
    assert np.max(np.abs(f4[(idx % 4 != 0) | (idx == 0)])) < 1e-10


@pytest.mark.parametrize("j", range(4))
def test_ecs_unit_norm(j):
    assert norm(ecs_state(make_basis(1.2), j)) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("j", range(4))
def test_ecs_schmidt_coefficients_match_expansion(j):
    b = make_basis(1.2)
    e = ecs_state(b, j)
    coeffs = np.zeros((4, 4), dtype=complex)
    for m in range(4):
        for n in range(4):
            pair = tensor(alpha_j_state(b, m), alpha_j_state(b, n))
            coeffs[m, n] = inner_product(pair, e)
    np.testing.assert_allclose(coeffs, ecs_schmidt(b, j), atol=1e-12)


def test_e0_pattern_and_large_alpha_limit():
    b = make_basis(4.0)
    sch = ecs_schmidt(b, 0)
    vals = [sch[0, 0], sch[1, 3], sch[2, 2], sch[3, 1]]
    np.testing.assert_allclose(vals, 0.5, atol=1e-3)
    small = make_basis(1.0)
    s = ecs_schmidt(small, 0)
    ne = small.ecs_normalizer(0)
    r = small.r
    np.testing.assert_allclose([s[0, 0], s[1, 3], s[2, 2], s[3, 1]], ne * np.array(
        [r[0] ** 2, r[1] * r[3], r[2] ** 2, r[3] * r[1]]))


def test_encode_coherent_state(basis_1):
    np.testing.assert_allclose(encode_info([1, 0, 0, 0], basis_1), basis_1.r / 2, atol=1e-15)


def test_encode_even_cat_has_no_odd_part(basis_1):
    c = encode_info(np.array([1, 0, 1, 0]) / np.sqrt(2), basis_1)
    assert abs(c[1]) < 1e-15 and abs(c[3]) < 1e-15


@given(quad)
def test_encode_norm_equals_state_norm(eps):
    b = make_basis(1.7)
    c = encode_info(eps, b)
    state = CoherentSuperposition(np.asarray(eps), b.alpha * np.array([[1], [1j], [-1], [-1j]]))
    assert np.sum(np.abs(c) ** 2) == pytest.approx(inner_product(state, state).real, rel=1e-10)


@given(quad, alphas)
def test_encode_decode_round_trip(eps, alpha):
    b = make_basis(alpha)
    np.testing.assert_allclose(decode_info(encode_info(eps, b), b), eps, atol=1e-12)
    c = c_from_eps(eps, b)
    assert norm(info_state(c, b)) == pytest.approx(1, abs=1e-12)


def test_decode_zero_vector():
    with pytest.raises(DegenerateInputError):
        decode_info(np.zeros(4), make_basis(1.0))

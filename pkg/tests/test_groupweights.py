import numpy as np
import pytest
from math import factorial

from kreinres.errors import DomainError, Divergent, GrowthViolation, NotHermitian
from kreinres.groupweights import (
    GroupData,
    bessel_bound_checks,
    bessel_derivative_relation_check,
    bessel_G,
    bessel_kernel,
    est_scaling_check,
    first_order_commutator,
    holder_estimate_check,
    krein_c1_check,
    m_gamma_norm,
    taylor_commutator_expansion,
    truncated_exp,
    truncated_exp_identities,
    weight_from_group,
    weight_positive_power,
)
from kreinres.kreinspace import KreinStructure, charge_gram
from kreinres.models import fixture_pauli_like
from kreinres.numkernel import matfun_hermitian, op_norm_2
from kreinres.symbols import japanese

from conftest import random_complex, random_hermitian

SIGMAS = (0.5, 1.5, 3.0)


@pytest.mark.parametrize("sigma", SIGMAS)
def test_bessel_mass_and_fourier(sigma):
    bk = bessel_kernel(sigma)
    assert abs(bk.mass - 1) <= 1e-6
    tau = np.array([0.0, 1.0, 5.0])
    np.testing.assert_allclose(bk.fourier(tau).real, (1 + tau ** 2) ** (-sigma / 2), atol=1e-6)


@pytest.mark.parametrize("sigma", SIGMAS)
def test_bessel_positive_even_and_bounds(sigma):
    t = np.geomspace(1e-3, 20, 40)
    g = bessel_G(sigma, t)
    assert np.all(g > 0)
    np.testing.assert_allclose(bessel_G(sigma, -t), g)
    assert bessel_bound_checks(sigma).ok
    with pytest.raises(DomainError):
        bessel_G(sigma, 0.0)


@pytest.mark.parametrize("sigma", [0.5, 0.6, 0.7, 0.9, 1.5, 3.0])
def test_bessel_matches_modified_bessel_function(sigma):
    # independent oracle: G_sigma(t) = c_sigma 2 (2t)^nu K_nu(t), nu = (sigma-1)/2
    from scipy.special import kv
    from kreinres.groupweights import bessel_constant
    nu = 0.5 * (sigma - 1)
    t = np.array([1e-20, 1e-12, 1e-3, 0.5, 3.0, 20.0])
    ref = bessel_constant(sigma) * 2 * (2 * t) ** nu * kv(nu, t)
    np.testing.assert_allclose(bessel_G(sigma, t), ref, rtol=1e-10)


def test_bessel_closed_form_sigma_two():
    # <tau>^{-2} has the kernel e^{-|t|}/2
    t = np.array([0.1, 1.0, 3.0])
    np.testing.assert_allclose(bessel_G(2.0, t), 0.5 * np.exp(-t), rtol=1e-9)


def test_bessel_derivative_relation():
    rep = bessel_derivative_relation_check(3.0)
    assert rep.ok and rep.spread <= 1e-3
    assert rep.C_fit < 0
    with pytest.raises(DomainError):
        bessel_derivative_relation_check(1.5)


def test_weight_examples():
    g0 = GroupData.fit(np.zeros((2, 2)))
    np.testing.assert_allclose(weight_from_group(g0, 1.5), np.eye(2), atol=1e-9)
    np.testing.assert_allclose(weight_positive_power(g0, 0.5), np.eye(2), atol=1e-9)
    g = GroupData.fit(np.diag([0.0, 10.0]))
    np.testing.assert_allclose(weight_from_group(g, 1.5, 0.1), np.diag([1.0, 2 ** -0.75]), atol=1e-6)
    g = GroupData.fit(np.array([[1.0]]))
    assert weight_positive_power(g, 0.5)[0, 0].real == pytest.approx(2 ** 0.25, abs=1e-5)


def test_weights_match_matfun_and_invert(rng):
    a = random_hermitian(rng, 5, 2.0)
    g = GroupData.fit(a)
    for sigma in SIGMAS:
        ref = matfun_hermitian(lambda x: (1 + x * x) ** (-sigma / 2), 0.7 * a)
        assert op_norm_2(weight_from_group(g, sigma, 0.7) - ref) <= 1e-6
    s = 0.6
    P = weight_positive_power(g, s, 0.7)
    ref = matfun_hermitian(lambda x: (1 + x * x) ** (s / 2), 0.7 * a)
    assert op_norm_2(P - ref) <= 1e-6 * op_norm_2(ref)
    assert op_norm_2(P @ weight_from_group(g, s, 0.7) - np.eye(5)) <= 1e-5


def test_weight_unitary_covariance(rng):
    a = random_hermitian(rng, 4)
    U, _ = np.linalg.qr(random_complex(rng, 4, 4))
    lhs = U @ weight_from_group(GroupData.fit(a), 1.5) @ U.conj().T
    rhs = weight_from_group(GroupData.fit(U @ a @ U.conj().T), 1.5)
    assert op_norm_2(lhs - rhs) <= 1e-8


def test_weight_non_hermitian_generator(rng):
    a = random_hermitian(rng, 4) + 0.05 * random_complex(rng, 4, 4)
    g = GroupData.fit(a)
    assert not g.hermitian and 0 < g.gamma < 0.5
    W = weight_from_group(g, 1.5)
    assert np.all(np.isfinite(W))
    bound = g.M * m_gamma_norm(lambda t: bessel_G(1.5, t), g.gamma)
    assert op_norm_2(W) <= bound * (1 + 1e-6)
    with pytest.raises(GrowthViolation):
        weight_from_group(g, 1.5, eps=1.0 / g.gamma)


def test_m_gamma_norm():
    G = lambda t: bessel_G(1.5, t)
    assert m_gamma_norm(G, 0.0) == pytest.approx(1, abs=1e-8)
    v4, v6 = m_gamma_norm(G, 0.4), m_gamma_norm(G, 0.6)
    assert 1 < v4 < v6 < np.inf
    with pytest.raises(Divergent):
        m_gamma_norm(G, 1.0)


def test_holder_estimate(rng):
    a = random_hermitian(rng, 4)
    g = GroupData.fit(a)
    lam, V = np.linalg.eigh(a)
    rep = holder_estimate_check(g, 0.4, 0.7, V.T)
    # eigenvectors: lhs is <lam>^s exactly
    np.testing.assert_allclose(rep.lhs, (1 + lam ** 2) ** 0.2, rtol=1e-6)
    us = random_complex(rng, 50, 4)
    assert holder_estimate_check(g, 0.4, 0.7, us).ok
    rep0 = holder_estimate_check(GroupData.fit(np.zeros((3, 3))), 0.4, 0.7, random_complex(rng, 3, 3))
    np.testing.assert_allclose(rep0.sup_terms, 0, atol=1e-12)
    np.testing.assert_allclose(rep0.constants, 1, atol=1e-8)


def test_truncated_exp_examples():
    for k in range(5):
        assert truncated_exp(k, 0.0) == pytest.approx(1 / factorial(k))
        tau = 2 + 1j
        assert abs(truncated_exp(k, tau) - (1 / factorial(k) + 1j * tau * truncated_exp(k + 1, tau))) <= 1e-12
    assert truncated_exp(1, np.pi) == pytest.approx(2j / np.pi, abs=1e-14)
    assert truncated_exp(0, 1.3) == pytest.approx(np.exp(1.3j))


def test_truncated_exp_identities():
    res = truncated_exp_identities()
    assert max(res.values()) <= 1e-10


def test_truncated_exp_series_branch_continuity():
    # the series/closed-form switch sits at |tau| = max(k, 1); |E_k'| <= 1/(k+1)!
    for k in (1, 3):
        lo, hi = truncated_exp(k, k - 1e-9), truncated_exp(k, k + 1e-9)
        assert abs(lo - hi) <= 2e-9 / factorial(k + 1) + 1e-13


@pytest.mark.parametrize("k", [1, 2, 3])
def test_taylor_commutator_expansion(rng, k):
    S = random_complex(rng, 3, 3)
    a = random_hermitian(rng, 3)
    f = japanese(-1.0, order=4)
    rep = taylor_commutator_expansion(S, a, f, lambda t: bessel_G(1.0, t), k)
    assert rep.ok and rep.residual <= 1e-5


def test_taylor_commuting_case(rng):
    a = np.diag([0.3, -1.0, 2.0])
    S = np.diag([1.0, 2.0, 3.0]).astype(complex)
    rep = taylor_commutator_expansion(S, a, japanese(-1.0), lambda t: bessel_G(1.0, t), 2)
    np.testing.assert_allclose(rep.remainder, 0, atol=1e-12)
    with pytest.raises(NotHermitian):
        taylor_commutator_expansion(S, random_complex(rng, 3, 3), japanese(-1.0),
                                    lambda t: bessel_G(1.0, t), 1)


def test_first_order_commutator(rng):
    rep = first_order_commutator(random_complex(rng, 3, 3), random_hermitian(rng, 3),
                                 japanese(-1.0), lambda t: bessel_G(1.0, t))
    assert rep.ok


@pytest.mark.parametrize("which,order", [("est1", 1.0), ("estime", 2.0)])
def test_est_scaling(rng, which, order):
    S, a = fixture_pauli_like()
    rep = est_scaling_check(which, S, a, 0.6, order)
    assert rep.passed and rep.r2 >= 0.9 and not rep.degenerate
    X = random_hermitian(rng, 8)
    rep = est_scaling_check(which, random_complex(rng, 8, 8), X, 0.6, order)
    assert rep.passed and rep.r2 >= 0.9


def test_est_scaling_degenerate():
    a = np.diag([1.0, 2.0])
    rep = est_scaling_check("est1", np.diag([3.0, 4.0]), a, 0.6, 1.0)
    assert rep.degenerate and rep.passed


def test_krein_c1():
    a = np.diag([1.0, -2.0])
    rep = krein_c1_check(KreinStructure(np.diag([1.0, -1.0])), GroupData.fit(a))
    np.testing.assert_allclose(rep.B, 0, atol=1e-14)
    a2 = np.kron(np.eye(2), np.array([[0.7]]))
    rep = krein_c1_check(KreinStructure(charge_gram(1)), GroupData.fit(a2))
    np.testing.assert_allclose(rep.B, 0, atol=1e-14)
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    # the nilpotent a = [[0,1],[0,0]] is swap-selfadjoint, so B = 0
    rep = krein_c1_check(KreinStructure(swap), GroupData.fit(np.array([[0.0, 1.0], [0.0, 0.0]])))
    assert rep.ok and op_norm_2(rep.B) < 1e-14
    a = np.array([[1.0, 2.0], [0.0, 0.0]])
    rep = krein_c1_check(KreinStructure(swap), GroupData.fit(a))
    assert rep.ok
    np.testing.assert_allclose(rep.B, swap @ a.T @ swap - a, atol=1e-12)
    np.testing.assert_allclose(rep.B_derivative, [[-1, 0], [0, 1]], atol=1e-6)

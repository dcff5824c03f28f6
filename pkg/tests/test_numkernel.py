import numpy as np
import pytest
from hypothesis import given, strategies as st

from kreinres.errors import DomainError, NotHermitian, SingularMatrix
from kreinres.numkernel import (
    TOL,
    as_cmatrix,
    general_eig,
    hermitian_eig,
    linop_norm_2,
    matfun_hermitian,
    op_norm_2,
    pseudo_inverse,
    solve_linear,
)

from conftest import random_complex, random_hermitian


def test_default_tolerances():
    assert (TOL.solve_tol, TOL.eig_tol, TOL.gen_tol, TOL.herm_tol, TOL.pivot_floor) == \
        (1e-10, 1e-10, 1e-8, 1e-10, 1e-14)


def test_as_cmatrix_rejects_nonfinite():
    with pytest.raises(DomainError):
        as_cmatrix([[1.0, np.nan]])


def test_solve_identity_and_involution():
    np.testing.assert_allclose(solve_linear(np.eye(2), [[1], [2]]), [[1], [2]])
    S = np.array([[0, 1], [1, 0]])
    np.testing.assert_allclose(solve_linear(S, np.eye(2)), S)


def test_solve_random_residual(rng):
    A = random_complex(rng, 8, 8) + 8 * np.eye(8)
    X = solve_linear(A, np.eye(8))
    assert op_norm_2(A @ X - np.eye(8)) <= 1e-10


def test_solve_singular():
    with pytest.raises(SingularMatrix):
        solve_linear(np.array([[1.0, 2.0], [2.0, 4.0]]), np.eye(2))


def test_hermitian_eig_examples(rng):
    assert np.allclose(hermitian_eig(np.diag([3.0, 1.0])).values, [1, 3])
    e = hermitian_eig(np.array([[0, 1], [1, 0]]))
    assert np.allclose(e.values, [-1, 1])
    v = e.vectors[:, 0]
    assert abs(abs(np.vdot(v, np.array([1, -1]) / np.sqrt(2))) - 1) < 1e-12
    A = random_hermitian(rng, 16)
    e = hermitian_eig(A)
    assert op_norm_2(e.vectors.conj().T @ e.vectors - np.eye(16)) <= 1e-10
    assert op_norm_2(A @ e.vectors - e.vectors * e.values) <= 1e-10 * op_norm_2(A)


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


def test_general_eig_examples():
    assert np.allclose(general_eig(np.array([[0, 1], [-1, 0]])).values, [-1j, 1j])
    assert np.allclose(general_eig(np.array([[0, 1], [1, 0]])).values, [-1, 1])
    # companion matrix of z^2 - 2z + 5
    comp = np.array([[0, -5], [1, 2]])
    assert np.allclose(general_eig(comp).values, [1 - 2j, 1 + 2j])


@given(st.integers(2, 10), st.integers(0, 2 ** 31))
def test_general_eig_conjugation_symmetric_and_residuals(n, seed):
    A = np.random.default_rng(seed).normal(size=(n, n))
    ge = general_eig(A)
    lam = ge.values
    for x in lam:
        assert np.min(np.abs(np.conj(x) - lam)) <= TOL.gen_tol * max(1, abs(x))
    assert np.all(ge.residuals <= TOL.gen_tol)


def test_matfun_examples(rng):
    A = random_hermitian(rng, 5)
    assert op_norm_2(matfun_hermitian(lambda x: x, A) - A) <= 1e-12 * op_norm_2(A)
    P = np.array([[0, 1], [1, 0]])
    np.testing.assert_allclose(matfun_hermitian(lambda x: x ** 2, P), np.eye(2), atol=1e-14)
    M = matfun_hermitian(lambda x: (1 + x * x) ** -0.25, np.diag([0.0, 3.0]))
    np.testing.assert_allclose(M, np.diag([1.0, 10 ** -0.25]), atol=1e-15)


def test_matfun_domain_error():
    with pytest.raises(DomainError):
        matfun_hermitian(lambda x: 1 / x, np.diag([0.0, 1.0]))


@given(st.integers(0, 2 ** 31))
def test_matfun_is_multiplicative(seed):
    A = random_hermitian(np.random.default_rng(seed), 6)
    f = lambda x: 1 + 2 * x - x ** 2
    g = lambda x: x ** 3 - x
    lhs = matfun_hermitian(lambda x: f(x) * g(x), A)
    rhs = matfun_hermitian(f, A) @ matfun_hermitian(g, A)
    assert op_norm_2(lhs - rhs) <= 1e-10 * max(1, op_norm_2(rhs))


def test_op_norm_examples():
    assert op_norm_2(np.eye(3)) == pytest.approx(1)
    assert op_norm_2(np.diag([2, -5])) == pytest.approx(5)
    assert op_norm_2(7.5 * np.array([[0, 1], [0, 0]])) == pytest.approx(7.5)


def test_linop_norm_matches_dense_and_is_repeatable(rng):
    A = random_complex(rng, 150, 150)
    mv = lambda X: A @ X
    rmv = lambda X: A.conj().T @ X
    a = linop_norm_2(mv, rmv, 150)
    assert a == pytest.approx(op_norm_2(A), rel=1e-10)
    assert linop_norm_2(mv, rmv, 150) == a


def test_pseudo_inverse(rng):
    np.testing.assert_allclose(pseudo_inverse(np.eye(3)), np.eye(3))
    np.testing.assert_allclose(pseudo_inverse(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))
    A = random_complex(rng, 6, 2) @ random_complex(rng, 2, 4)
    P = pseudo_inverse(A)
    for res in (A @ P @ A - A, P @ A @ P - P, (A @ P).conj().T - A @ P, (P @ A).conj().T - P @ A):
        assert op_norm_2(res) <= 1e-9 * max(1, op_norm_2(A))
    with pytest.raises(DomainError):
        pseudo_inverse(A, cutoff=0)

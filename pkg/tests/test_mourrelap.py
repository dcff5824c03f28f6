import numpy as np
import pytest

from kreinres.errors import DimensionMismatch, HypothesisFailed, IndefiniteWindow
from kreinres.kgoperators import PencilModel, assemble_K, charge_structure
from kreinres.kreinspace import KreinStructure
from kreinres.models import (
    ModelSpec,
    build_lattice_kg_1d,
    centered_momentum,
    dirichlet_laplacian,
    fixture_negative_h,
    free_companion,
    lattice_grid,
)
from kreinres.mourrelap import (
    commutator,
    compact_perturbation_check,
    default_lambda_grid,
    default_mu_grid,
    krein_putnam_instance,
    lap_sweep,
    level_spacing,
    mourre_check,
    putnam_bound_hilbert,
    putnam_bound_krein,
    putnam_window_check,
    rank_one_putnam_instance,
    virial_check,
    window_function,
)
from kreinres.speccalc import spectral_projections
from kreinres.symbols import plateau_bump
from conftest import random_hermitian

BUMP = [{"amplitude": 0.3, "center": 15.0, "width": 2.0}]


def lattice_structures(model, a):
    return charge_structure(model), assemble_K(model), np.kron(np.eye(2), a)


def z_grid(lo, hi, n_re=10, n_im=10, im=(0.05, 2.0)):
    return np.array([complex(x, y) for x in np.linspace(lo, hi, n_re)
                     for y in np.geomspace(im[0], im[1], n_im)])


# ---------------------------------------------------------------- commutator


def test_commutator_examples():
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.diag([1.0, -1.0])
    assert np.allclose(commutator(sx, sy), -2 * sz)  # i[sx, sy] = i(2i sz)
    D = np.diag([1.0, 2.0, 3.0])
    assert np.allclose(commutator(D, D ** 2), 0)
    with pytest.raises(DimensionMismatch):
        commutator(np.eye(2), np.eye(3))


def test_discrete_momentum_position_commutator():
    n, L = 64, 20.0
    dx, x = lattice_grid(n, L)
    C = commutator(centered_momentum(n, dx), np.diag(x))
    # [p, ix] is the averaging stencil (S + S^T)/2: identity on slowly varying vectors
    u = np.exp(-((x - L / 2) / 3.0) ** 2)
    assert np.linalg.norm(C @ u - u) <= 0.02 * np.linalg.norm(u)
    assert np.allclose(np.diag(C, 1), 0.5) and np.allclose(np.diag(C), 0)


# ---------------------------------------------------------------- Mourre and virial


@pytest.fixture(scope="module")
def free_lattice():
    lm = build_lattice_kg_1d(ModelSpec(n=100, L=60.0))
    return lm


def test_mourre_free_lattice_positive(free_lattice):
    lm = free_lattice
    ks, K, A = lattice_structures(free_companion(lm), lm.a)
    r = mourre_check(ks, K, A, plateau_bump(1.25, 1.3, 1.6, 1.65), (1.3, 1.6), rank_budget=1)
    assert r.passed and r.margin > 0.3
    assert len(r.eigenvalues_in_window) > 0
    assert not r.degenerate
    # consistency with the virial identity on the same window
    v = virial_check(ks, K, A)
    assert v.max_virial <= 1e-8


def test_mourre_degenerate_window(free_lattice):
    lm = free_lattice
    ks, K, A = lattice_structures(free_companion(lm), lm.a)
    r = mourre_check(ks, K, A, plateau_bump(0.2, 0.3, 0.5, 0.6), (0.3, 0.5))
    assert r.degenerate and not r.passed and r.eigenvalues_in_window == []


def test_mourre_negative_window_is_indefinite(free_lattice):
    lm = free_lattice
    ks, K, A = lattice_structures(free_companion(lm), lm.a)
    with pytest.raises(IndefiniteWindow):
        mourre_check(ks, K, A, plateau_bump(-1.65, -1.6, -1.3, -1.25), (-1.6, -1.3))


def test_mourre_zero_conjugate_fails():
    # a commuting conjugate operator gives a vanishing commutator, hence no strict margin
    H = np.diag([1.0, 2.0])
    ks = KreinStructure(np.eye(2))
    r = mourre_check(ks, H, np.diag([3.0, -1.0]), plateau_bump(0.5, 0.9, 2.1, 2.5), (0.9, 2.1),
                     rank_budget=0)
    assert r.margin == pytest.approx(0.0, abs=1e-12) and not r.passed


def test_window_function_defective():
    H = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    P = window_function(H, plateau_bump(-1.0, -0.5, 0.5, 1.0))
    assert np.allclose(P, np.eye(2))


def test_virial_negative_h_neutral():
    m = fixture_negative_h()
    ks, K = charge_structure(m), assemble_K(m)
    r = virial_check(ks, K, np.eye(2))
    assert [row.kind for row in r.rows] == ["nonreal", "nonreal"]
    assert r.max_neutrality <= 1e-15 and r.passed


def test_virial_hermitian_classical(rng):
    K = random_hermitian(rng, 7)
    A = random_hermitian(rng, 7)
    r = virial_check(KreinStructure(np.eye(7)), K, A)
    assert r.passed and r.max_virial <= 1e-12


def test_virial_lattice_with_potential():
    lm = build_lattice_kg_1d(ModelSpec(n=60, L=30.0, potential=BUMP))
    ks, K, A = lattice_structures(lm.model, lm.a)
    r = virial_check(ks, K, A)
    assert r.passed and r.max_virial <= 1e-8


# ---------------------------------------------------------------- Putnam


def test_putnam_trivial():
    H = np.diag([1.0, 2.0, 3.0])
    Z = np.zeros((3, 3))
    r = putnam_bound_hilbert(H, Z, Z, z_grid(0, 4))
    assert r.bound == 0 and r.max_lhs == 0 and r.passed and r.imag_passed


def test_putnam_rank_one_instances(rng):
    for _ in range(10):
        n = int(rng.integers(3, 9))
        H = random_hermitian(rng, n, 2.0)
        B = random_hermitian(rng, n)
        lam = np.linalg.eigvalsh(H)
        zs = z_grid(lam[0] - 1, lam[-1] + 1)
        C = rank_one_putnam_instance(H, B, zs)
        r = putnam_bound_hilbert(H, B, C, zs)
        assert r.passed and r.imag_passed
        assert r.max_ratio <= 1.0 and r.imag_max <= r.imag_bound
        assert r.symmetry_defect <= 1e-10 * max(1.0, r.max_lhs)
        rows = putnam_window_check(H, B, C, [(lam[0] - 0.1, lam[0] + 0.1), (lam[0], lam[-1])])
        assert all(lhs >= 0 for _, lhs, _ in rows)


def test_putnam_hypothesis_failure(rng):
    H = random_hermitian(rng, 4)
    B = random_hermitian(rng, 4)
    zs = z_grid(-3, 3)
    C = 10.0 * rank_one_putnam_instance(H, B, zs) + 1e-3 * np.outer(*np.linalg.eigh(B)[1][:, :2].T)
    with pytest.raises(HypothesisFailed):
        putnam_bound_hilbert(H, B, C, zs)


def test_putnam_krein_structured():
    n = 4
    m = PencilModel(-dirichlet_laplacian(n, 1.0) + np.eye(n), np.zeros((n, n)), "putnam")
    K, ks, Pi = assemble_K(m), charge_structure(m), spectral_projections(m, +1)
    lam = np.linalg.eigvals(K).real
    zs = z_grid(lam.min() - 1, lam.max() + 1)
    rng = np.random.default_rng(0)
    cs = []
    for _ in range(5):
        B, C = krein_putnam_instance(ks, K, Pi, np.linspace(-1, 1, n), rng, zs)
        r = putnam_bound_krein(ks, K, Pi, B, C, np.concatenate([zs, zs.conj()]))
        assert np.isfinite(r.max_ratio) and r.hypothesis_margin >= -1e-10
        cs.append(r.max_ratio)
    assert max(cs) / np.median(cs) <= 5


def test_putnam_krein_rejects_non_selfadjoint_B():
    ks = KreinStructure(np.diag([1.0, -1.0]))
    H = np.diag([1.0, -1.0]).astype(complex)
    B = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    with pytest.raises(HypothesisFailed):
        putnam_bound_krein(ks, H, np.eye(2), B, np.zeros((2, 2)), [1j])


# ---------------------------------------------------------------- LAP sweeps


def test_grids():
    g = default_mu_grid(0.005, 0.5)
    assert g[0] == pytest.approx(0.005) and g[-1] == pytest.approx(0.5) and len(g) == 41
    assert len(default_lambda_grid((1.0, 1.2))) == 6


def test_sweep_trivial_model_flat():
    m = PencilModel(np.array([[1.0]]), np.array([[0.0]]))
    r = lap_sweep(m, 0.25, np.array([[1.0]]), 0.7, 1.0, (2.0, 2.5))
    assert np.isnan(r.level_spacing)
    assert abs(r.fits["weighted_slope"]) <= 0.05 and abs(r.fits["unweighted_slope"]) <= 0.05
    assert r.submult_ratio <= 1 + 1e-8
    keys = [(row[0], row[1]) for row in r.rows]
    assert keys == sorted(keys)


def test_sweep_threads_deterministic_and_separated():
    lm = build_lattice_kg_1d(ModelSpec(n=60, L=30.0))
    kw = dict(mu_lo=0.05, mu_per_decade=8, lambda_per_unit=20)
    r1 = lap_sweep(lm.model, 0.25, lm.a, 0.7, 1.0, (1.3, 1.5), threads=1, **kw)
    r3 = lap_sweep(lm.model, 0.25, lm.a, 0.7, 1.0, (1.3, 1.5), threads=3, **kw)
    assert r1.rows == r3.rows
    assert r1.fits["unweighted_slope"] >= 0.9
    assert r1.fits["weighted_slope"] < r1.fits["unweighted_slope"] - 0.3
    assert r1.submult_ratio <= 1 + 1e-8
    assert all(np.isfinite(row[2]) and np.isfinite(row[3]) for row in r1.rows)
    assert level_spacing(lm.model, (1.3, 1.5)) > 0


def test_sweep_shape_checks():
    m = PencilModel(np.eye(2), np.zeros((2, 2)))
    with pytest.raises(DimensionMismatch):
        lap_sweep(m, 0.25, np.eye(3), 0.7, 1.0, (2.0, 2.5))


# ---------------------------------------------------------------- compactness proxy


def test_compact_perturbation_zero_and_localized():
    phi = plateau_bump(1.2, 1.3, 1.6, 1.7)
    lm = build_lattice_kg_1d(ModelSpec(n=50, L=30.0))
    r0 = compact_perturbation_check(lm.model, lm.model, lm.a, phi)
    assert r0.difference_norm == 0.0 and r0.top_fraction == 0.0
    fr = []
    for n in (50, 100):
        lp = build_lattice_kg_1d(ModelSpec(n=n, L=30.0, potential=BUMP))
        r = compact_perturbation_check(lp.model, free_companion(lp), lp.a, phi)
        assert r.difference_norm > 0
        fr.append(r.top_fraction)
    assert fr[1] <= fr[0]
    with pytest.raises(DimensionMismatch):
        compact_perturbation_check(lm.model, build_lattice_kg_1d(ModelSpec(n=50, L=20.0)).model,
                                   lm.a, phi)

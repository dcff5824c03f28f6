"""Positive commutators, virial identities, Putnam bounds and weighted
resolvent sweeps for Krein-selfadjoint matrices.

Finite matrices have discrete spectrum, which changes what can be checked:

* ``[H, iA]`` has trace zero, so ``C C^* <= [H, iB]`` forces ``C = 0``.  The
  Putnam checks therefore verify the hypothesis in the form the argument
  actually uses it, on the vectors ``R(z) C u`` for each grid point ``z``.
* By the virial identity every eigenvector in a spectral window is neutral
  for ``H'``, so the compressed commutator always has a non-positive
  direction.  The Mourre margin is reported after removing a small number of
  negative generalized eigenvalues (a finite-rank correction) together with
  the size of that correction.
* Resolvent norms blow up below the level spacing; the sweep records slopes
  of ``log ||R||`` against ``log Im z`` above that scale.
"""
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, DomainError, HypothesisFailed, IndefiniteWindow, SpectrumHit
from .kgoperators import PencilResolvent, assemble_K, charge_space, spectrum_K
from .kreinspace import is_krein_selfadjoint
from .numkernel import (
    TOL,
    as_cmatrix,
    general_eig,
    hermitian_defect,
    hermitian_part,
    linop_norm_2,
    matfun_hermitian,
    op_norm_2,
    pseudo_inverse,
    range_basis,
)
from .speccalc import jordan_calculus


def commutator(H, A):
    """``H' = [H, iA] = i(HA - AH)``."""
    H = as_cmatrix(H, "H")
    A = as_cmatrix(A, "A")
    if H.shape != A.shape:
        raise DimensionMismatch(f"H is {H.shape}, A is {A.shape}")
    return 1j * (H @ A - A @ H)


def window_function(H, phi, gen_tol=TOL.gen_tol):
    """``phi(H)`` for a matrix with (mostly) real spectrum.

    Diagonalizable input uses ``V phi(Lambda) V^{-1}``; eigenvalues off the
    real axis get ``phi = 0`` (``phi`` is a real-line symbol supported near a
    real window).  Defective input goes through the Riesz-projector calculus.
    """
    H = as_cmatrix(H, "H")
    ge = general_eig(H)
    V = ge.vectors
    if np.linalg.cond(V) > 1e10:
        return jordan_calculus(H, phi)
    lam = ge.values
    real = np.abs(lam.imag) <= gen_tol * np.maximum(1.0, np.abs(lam))
    fv = np.zeros(lam.shape, dtype=complex)
    if np.any(real):
        fv[real] = phi(lam.real[real])
    return (V * fv) @ np.linalg.inv(V)


@dataclass
class MourreReport:
    window: tuple
    margin: float  # after the finite-rank correction
    raw_margin: float
    compact_correction_norm: float
    correction_rank: int
    eigenvalues_in_window: list
    generalized_eigenvalues: np.ndarray
    degenerate: bool
    passed: bool


def mourre_check(ks, H, A, phi, window, rank_budget=1, tol=1e-10):
    """Positivity of ``Re <u|H'u>`` relative to ``<u|u>`` on ``ran phi(H)``.

    The generalized eigenvalues of the compressed pair ``(Q1, Q2)`` are
    sorted; up to ``rank_budget`` negative ones are treated as the
    finite-rank correction and ``margin`` is the next one.
    """
    H = as_cmatrix(H, "H")
    A = as_cmatrix(A, "A")
    lo, hi = window
    ge = general_eig(H, vectors=False)
    lam = ge.values
    inside = [float(x.real) for x in lam
              if abs(x.imag) <= TOL.gen_tol * max(1.0, abs(x)) and lo <= x.real <= hi]
    P = window_function(H, phi)
    V = range_basis(P)
    if V.shape[1] == 0:
        return MourreReport(tuple(window), float("nan"), float("nan"), 0.0, 0, inside,
                            np.zeros(0), True, False)
    Q2 = hermitian_part(V.conj().T @ ks.J @ V)
    q2min = float(np.linalg.eigvalsh(Q2)[0])
    if q2min <= TOL.gram_floor * max(1.0, op_norm_2(Q2)):
        raise IndefiniteWindow(f"Krein Gram on ran phi(H) has eigenvalue {q2min:.3e}")
    Hp = commutator(H, A)
    Q1 = hermitian_part(V.conj().T @ ks.J @ Hp @ V)
    w = sla.eigh(Q1, Q2, eigvals_only=True)
    neg = int(min(rank_budget, np.count_nonzero(w < -tol * max(1.0, float(np.max(np.abs(w)))))))
    if neg >= len(w):
        margin = float("nan")
    else:
        margin = float(w[neg])
    corr = float(np.max(np.abs(w[:neg]))) if neg else 0.0
    passed = bool(np.isfinite(margin) and margin > tol)
    return MourreReport(tuple(window), margin, float(w[0]), corr, neg, inside, w, False, passed)


@dataclass
class VirialRow:
    eigenvalue: complex
    kind: str  # "real" or "nonreal"
    value: float
    ok: bool


@dataclass
class VirialReport:
    rows: list
    max_virial: float
    max_neutrality: float
    passed: bool


def virial_check(ks, K, A, tol=1e-8, gen_tol=TOL.gen_tol):
    """``<u|[K, iA]u>_J = 0`` on real eigenvectors, ``<u|u>_J = 0`` on nonreal ones."""
    K = as_cmatrix(K, "K")
    A = as_cmatrix(A, "A")
    ge = general_eig(K)
    Kp = commutator(K, A)
    scale = max(1.0, op_norm_2(K)) * max(1.0, op_norm_2(A))
    rows = []
    vmax = nmax = 0.0
    for lam, u in zip(ge.values, ge.vectors.T):
        u = u / np.linalg.norm(u)
        if abs(lam.imag) <= gen_tol * max(1.0, abs(lam)):
            val = abs(ks.form(u, Kp @ u)) / scale
            vmax = max(vmax, val)
            rows.append(VirialRow(complex(lam), "real", float(val), val <= tol))
        else:
            val = abs(ks.form(u, u))
            nmax = max(nmax, val)
            rows.append(VirialRow(complex(lam), "nonreal", float(val), val <= tol))
    return VirialReport(rows, float(vmax), float(nmax), all(r.ok for r in rows))


# ---------------------------------------------------------------- Putnam bounds


@dataclass
class PutnamReport:
    bound: float  # 2(||B|| + ||D||), or c-fit scale for the Krein variant
    max_lhs: float
    max_ratio: float
    imag_bound: float
    imag_max: float
    hypothesis_mode: str  # "global" or "z-local"
    hypothesis_margin: float
    symmetry_defect: float
    passed: bool
    imag_passed: bool


def _invariance_D(B, C, scale):
    D = pseudo_inverse(C, 1e-10) @ B @ C
    defect = op_norm_2(B @ C - C @ D)
    if defect > 1e-8 * scale:
        raise HypothesisFailed(f"B does not leave ran C invariant (defect {defect:.2e})")
    return D


def _hyp_point(z):
    # the Hilbert-space argument is run in the upper half-plane; z-bar by symmetry
    return z if z.imag > 0 else np.conj(z)


def putnam_bound_hilbert(H, B, C, z_grid, psd_tol=1e-10, bound_slack=1e-8):
    """``||C^* R(z) C|| <= 2(||B|| + ||D||)`` and ``||C^* Im R(z) C|| <= pi ||B||``.

    The positivity hypothesis ``C C^* <= [H, iB]`` is checked globally first
    and, failing that, on ``ran R(z) C`` for every grid point.
    """
    H, B, C = (as_cmatrix(X, nm) for X, nm in ((H, "H"), (B, "B"), (C, "C")))
    n = H.shape[0]
    for X in (H, B):
        if hermitian_defect(X) > TOL.herm_tol:
            raise HypothesisFailed("H and B must be Hermitian")
    scale = max(1.0, op_norm_2(B), op_norm_2(C)) * max(1.0, op_norm_2(H))
    D = _invariance_D(B, C, scale)
    M = commutator(H, B) - C @ C.conj().T
    gmin = float(np.linalg.eigvalsh(hermitian_part(M))[0])
    mode = "global" if gmin >= -psd_tol * scale else "z-local"
    zs = np.asarray(z_grid, dtype=complex)
    I = np.eye(n)
    hyp = gmin if mode == "global" else np.inf
    lhs_max = imag_max = sym = 0.0
    for z in zs:
        R = np.linalg.solve(H - z * I, I)
        L = C.conj().T @ R @ C
        lhs_max = max(lhs_max, op_norm_2(L))
        ImR = (R - R.conj().T) / 2j
        imag_max = max(imag_max, op_norm_2(C.conj().T @ ImR @ C))
        Rb = np.linalg.solve(H - np.conj(z) * I, I)
        sym = max(sym, abs(op_norm_2(C.conj().T @ Rb @ C) - op_norm_2(L)))
        if mode == "z-local":
            Rh = R if z.imag > 0 else Rb
            W = Rh @ C
            Xz = hermitian_part(W.conj().T @ M @ W)
            ref = max(1e-300, op_norm_2(W.conj().T @ W))
            loc = float(np.linalg.eigvalsh(Xz)[0]) / ref
            if loc < -psd_tol * scale:
                raise HypothesisFailed(
                    f"C C^* <= [H, iB] fails on ran R(z)C at z={_hyp_point(z):.4g} ({loc:.2e})")
            hyp = min(hyp, loc)
    nB = op_norm_2(B)
    bound = 2.0 * (nB + op_norm_2(D))
    ibound = np.pi * nB
    return PutnamReport(bound, lhs_max, lhs_max / bound if bound > 0 else 0.0, ibound, imag_max,
                        mode, float(hyp), float(sym),
                        bool(lhs_max <= bound * (1 + bound_slack) + 1e-14),
                        bool(imag_max <= ibound * (1 + bound_slack) + 1e-14))


def putnam_window_check(H, B, C, windows):
    """Rows ``(window, ||1_J(H) C||^2, ||B|| |J|)`` from eigenprojections of ``H``."""
    H, B, C = (as_cmatrix(X) for X in (H, B, C))
    w, U = np.linalg.eigh(hermitian_part(H))
    nB = op_norm_2(B)
    rows = []
    for lo, hi in windows:
        sel = (w >= lo) & (w <= hi)
        P = U[:, sel] @ U[:, sel].conj().T
        lhs = op_norm_2(P @ C) ** 2
        rows.append(((lo, hi), lhs, nB * (hi - lo)))
    return rows


def rank_one_putnam_instance(H, B, z_grid, tightness=1.0):
    """``C = kappa c c^*`` with ``c`` the bottom eigenvector of ``B``.

    With ``Bc = beta c`` one has ``<Rc, [H,iB] Rc> = 2 Im z <Rc, (B - beta) Rc>``,
    which is non-negative for ``Im z > 0``; ``kappa`` is the largest value for
    which ``C C^* <= [H, iB]`` holds on every ``ran R(z) C`` of the grid.
    """
    H, B = as_cmatrix(H), as_cmatrix(B)
    n = H.shape[0]
    beta, vecs = np.linalg.eigh(hermitian_part(B))
    c = vecs[:, 0]
    I = np.eye(n)
    M = commutator(H, B)
    k2 = np.inf
    for z in np.asarray(z_grid, dtype=complex):
        w = np.linalg.solve(H - _hyp_point(z) * I, c)
        x = float(np.real(np.vdot(w, M @ w)))
        q = abs(np.vdot(c, w)) ** 2
        if q > 0:
            k2 = min(k2, x / q)
    k2 = max(0.0, tightness * k2) if np.isfinite(k2) else 0.0
    return np.sqrt(k2) * np.outer(c, c.conj())


def krein_putnam_instance(ks, H, Pi, betas, rng, z_grid, tightness=1.0):
    """``(B, C)`` for ``putnam_bound_krein`` on ``ran Pi``.

    ``B = sum beta_i v_i <v_i|.>_J`` over a random J-orthonormal basis of
    ``ran Pi`` (made from the eigenvectors of ``H`` there), and
    ``C = kappa c <c|.>_J`` with ``c`` the ``v_i`` of the smallest ``beta``.
    ``kappa`` is the largest value keeping the hypothesis on every ``ran R(z) C``.
    """
    H, Pi = as_cmatrix(H), as_cmatrix(Pi)
    n = H.shape[0]
    lam, V = np.linalg.eig(Pi @ H @ Pi + 1e3 * (np.eye(n) - Pi))
    sel = np.abs(lam - 1e3) > 1e-6 * 1e3
    V = V[:, sel]
    G = hermitian_part(V.conj().T @ ks.J @ V)
    w, E = np.linalg.eigh(G)
    if w[0] <= 0:
        raise HypothesisFailed("ran Pi is not Krein-positive")
    V = V @ E @ np.diag(w ** -0.5)  # J-orthonormal
    r = V.shape[1]
    Q, _ = np.linalg.qr(rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r)))
    V = V @ Q
    betas = np.sort(np.asarray(betas, dtype=float)[:r])
    B = (V * betas) @ V.conj().T @ ks.J
    c = V[:, 0]
    M = Pi @ commutator(H, B) @ Pi
    I = np.eye(n)
    k2 = np.inf
    for z in np.asarray(z_grid, dtype=complex):
        wv = np.linalg.solve(H - _hyp_point(z) * I, c)
        x = float(np.real(np.vdot(wv, ks.J @ M @ wv)))
        q = abs(np.vdot(c, ks.J @ wv)) ** 2
        if q > 0:
            k2 = min(k2, x / q)
    k2 = max(0.0, tightness * k2) if np.isfinite(k2) else 0.0
    C = np.sqrt(k2) * np.outer(c, c.conj()) @ ks.J
    return B, C


def putnam_bound_krein(ks, H, Pi, B, C, z_grid, n_probe=16, seed=0, psd_tol=1e-10):
    """Fit ``c`` in ``<Lu|Lu>_J <= c(||B|| + ||D||) ||Lu|| ||u||`` with ``L = C^* R(z) C``.

    Hypotheses: ``B`` Krein-selfadjoint, ``C = Pi C``, ``BC = CD`` and
    ``C C^* <= Pi [H, iB] Pi`` as Krein forms on ``ran R(z) C``.
    """
    H, Pi, B, C = (as_cmatrix(X) for X in (H, Pi, B, C))
    n = H.shape[0]
    if not is_krein_selfadjoint(ks, B, tol=1e-9):
        raise HypothesisFailed("B is not Krein-selfadjoint")
    scale = max(1.0, op_norm_2(B), op_norm_2(C)) * max(1.0, op_norm_2(H))
    if op_norm_2(Pi @ C - C) > 1e-9 * scale:
        raise HypothesisFailed("C is not supported in ran Pi")
    D = _invariance_D(B, C, scale)
    Cs = ks.adjoint(C)
    M = Pi @ commutator(H, B) @ Pi - C @ Cs
    rng = np.random.default_rng(seed)
    U = rng.normal(size=(n, n_probe)) + 1j * rng.normal(size=(n, n_probe))
    I = np.eye(n)
    best = 0.0
    hyp = np.inf
    per_z = []
    nBD = op_norm_2(B) + op_norm_2(D)
    for z in np.asarray(z_grid, dtype=complex):
        R = np.linalg.solve(H - z * I, I)
        Rh = R if z.imag > 0 else np.linalg.solve(H - np.conj(z) * I, I)
        W = Rh @ C
        Xz = hermitian_part(W.conj().T @ ks.J @ M @ W)
        ref = max(1e-300, op_norm_2(W.conj().T @ W))
        loc = float(np.linalg.eigvalsh(Xz)[0]) / ref
        if loc < -psd_tol * scale:
            raise HypothesisFailed(f"Krein positivity hypothesis fails at z={z:.4g} ({loc:.2e})")
        hyp = min(hyp, loc)
        L = Cs @ R @ C
        _, _, Vh = np.linalg.svd(L)
        LU = L @ np.concatenate([Vh[:2].conj().T, U], axis=1)
        Uall = np.concatenate([Vh[:2].conj().T, U], axis=1)
        num = np.real(np.einsum("ij,ij->j", LU.conj(), ks.J @ LU))
        den = nBD * np.linalg.norm(LU, axis=0) * np.linalg.norm(Uall, axis=0)
        ratio = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
        per_z.append(float(np.max(ratio)))
        best = max(best, per_z[-1])
    return PutnamReport(nBD, best * nBD, best, float("nan"), float("nan"), "z-local", float(hyp),
                        float(max(per_z) - min(per_z)) if per_z else 0.0, True, True)


# ---------------------------------------------------------------- LAP sweeps


@dataclass
class SweepReport:
    rows: list  # (re_z, im_z, weighted_norm, unweighted_norm, flag)
    fits: dict
    params: dict
    level_spacing: float = float("nan")
    sup_weighted: np.ndarray = field(default=None, repr=False)
    sup_unweighted: np.ndarray = field(default=None, repr=False)
    weight_norm: float = float("nan")  # ||<eps A>^{-s}|| in K_theta
    submult_ratio: float = float("nan")  # max weighted / (weight_norm^2 unweighted), <= 1


def default_threads():
    try:
        return max(1, int(os.environ.get("KREINRES_THREADS", "1")))
    except ValueError:
        return 1


def level_spacing(m, window):
    """Mean gap of the real eigenvalues of ``K`` inside ``window``."""
    lam = spectrum_K(m).values
    lo, hi = window
    re = np.sort(lam.real[(np.abs(lam.imag) <= TOL.gen_tol * np.maximum(1.0, np.abs(lam)))
                          & (lam.real >= lo) & (lam.real <= hi)])
    if re.size < 2:
        return float("nan")
    return float((re[-1] - re[0]) / (re.size - 1))


def default_mu_grid(mu_lo, nu, per_decade=20):
    k = max(4, int(np.ceil(per_decade * np.log10(nu / mu_lo))) + 1)
    return np.geomspace(mu_lo, nu, k)


def default_lambda_grid(window, per_unit=25):
    lo, hi = window
    return np.linspace(lo, hi, max(2, int(round(per_unit * (hi - lo))) + 1))


def _slope(mus, vals):
    x, y = np.log(mus), np.log(vals)
    p = np.polyfit(x, y, 1)
    ss = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum((y - np.polyval(p, x)) ** 2) / ss if ss > 0 else 1.0
    return float(-p[0]), float(r2)


def lap_sweep(m, theta, a, s, eps, window, mu_grid=None, nu=0.5, lam_grid=None, mu_lo=None,
              threads=None, norm_tol=1e-10, mu_per_decade=20, lambda_per_unit=25):
    """Weighted and plain resolvent norms of ``K`` in ``K_theta`` near ``window``.

    ``weighted = ||<eps A>^{-s} R(z) <eps A>^{-s}||`` with ``A = a (+) a``.
    Slopes are ``-d log sup_lambda ||.|| / d log mu`` over ``mu in [mu_lo, nu]``.
    ``mu_lo`` defaults to ten level spacings, or ``nu / 100`` when the window
    holds fewer than two eigenvalues.
    """
    a = as_cmatrix(a, "a")
    n = m.n
    if a.shape != (n, n):
        raise DimensionMismatch("a must act on the n-dimensional component space")
    g = matfun_hermitian(lambda x: (1.0 + x * x) ** (-0.5 * s), eps * a)
    cs = charge_space(m, theta)
    Wt, Wti = cs.Wtheta, cs.Wtheta_inv
    W1, W2 = Wt[:n, :n], Wt[n:, n:]
    V1, V2 = Wti[:n, :n], Wti[n:, n:]
    WG1, WG2 = W1 @ g, W2 @ g
    GV1, GV2 = g @ V1, g @ V2
    spacing = level_spacing(m, window)
    if mu_grid is None:
        if mu_lo is not None:
            lo = mu_lo
        else:
            lo = 10.0 * spacing if np.isfinite(spacing) else 0.01 * nu
        if not 0 < lo < nu:
            raise DomainError(f"mu range [{lo:.3g}, {nu:.3g}] is empty")
        mu_grid = default_mu_grid(lo, nu, mu_per_decade)
    mus = np.sort(np.asarray(mu_grid, dtype=float))
    lams = (default_lambda_grid(window, lambda_per_unit) if lam_grid is None
            else np.asarray(lam_grid, dtype=float))
    # K_theta norm of the weight, for the submultiplicativity sanity bound
    gnorm = max(op_norm_2(W1 @ g @ V1), op_norm_2(W2 @ g @ V2))

    def blockmul(A1, A2, X):
        return np.concatenate([A1 @ X[:n], A2 @ X[n:]], axis=0)

    def blockmul_h(A1, A2, X):
        return np.concatenate([A1.conj().T @ X[:n], A2.conj().T @ X[n:]], axis=0)

    def row(z):
        try:
            pr = PencilResolvent(m, z)
        except SpectrumHit:
            return (z.real, z.imag, float("nan"), float("nan"), "spectrum_hit")

        def wmv(X):
            return blockmul(WG1, WG2, pr.apply(blockmul(GV1, GV2, X)))

        def wrmv(X):
            return blockmul_h(GV1, GV2, pr.apply_adjoint(blockmul_h(WG1, WG2, X)))

        def umv(X):
            return blockmul(W1, W2, pr.apply(blockmul(V1, V2, X)))

        def urmv(X):
            return blockmul_h(V1, V2, pr.apply_adjoint(blockmul_h(W1, W2, X)))

        wn = linop_norm_2(wmv, wrmv, 2 * n, tol=norm_tol)
        un = linop_norm_2(umv, urmv, 2 * n, tol=norm_tol)
        return (float(z.real), float(z.imag), wn, un, "")

    zs = [complex(lam, mu) for lam in lams for mu in mus]
    threads = default_threads() if threads is None else max(1, int(threads))
    if threads == 1:
        rows = [row(z) for z in zs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(row, zs))
    rows.sort(key=lambda r: (r[0], r[1]))
    arr_w = np.full((len(lams), len(mus)), np.nan)
    arr_u = np.full_like(arr_w, np.nan)
    for i, r in enumerate(rows):
        arr_w[i // len(mus), i % len(mus)] = r[2]
        arr_u[i // len(mus), i % len(mus)] = r[3]
    sup_w = np.nanmax(arr_w, axis=0)
    sup_u = np.nanmax(arr_u, axis=0)
    ok = np.isfinite(sup_w) & np.isfinite(sup_u)
    if np.count_nonzero(ok) >= 2:
        sw, r2w = _slope(mus[ok], sup_w[ok])
        su, r2u = _slope(mus[ok], sup_u[ok])
    else:
        sw = su = r2w = r2u = float("nan")
    params = {"window": list(map(float, window)), "s": float(s), "eps": float(eps),
              "theta": float(theta), "nu": float(nu), "mu_lo": float(mus[0]),
              "n": int(n), "n_lambda": int(len(lams)), "n_mu": int(len(mus))}
    fits = {"weighted_slope": sw, "unweighted_slope": su, "r2": min(r2w, r2u),
            "r2_weighted": r2w, "r2_unweighted": r2u}
    fin = np.isfinite(arr_w) & np.isfinite(arr_u) & (arr_u > 0)
    submult = float(np.max(arr_w[fin] / (gnorm ** 2 * arr_u[fin]))) if fin.any() else 0.0
    return SweepReport(rows, fits, params, spacing, sup_w, sup_u, gnorm, submult)


# ---------------------------------------------------------------- compactness proxy


@dataclass
class CompactReport:
    difference_norm: float
    singular_values: np.ndarray
    top_fraction: float  # share of singular values above 1e-3 * max
    relative_k_size: float


def compact_perturbation_check(m, m0, a, phi, rel_cut=1e-3):
    """``phi(K) K' phi(K) - phi(K0) K0' phi(K0)`` with ``K' = [K, iA]``, ``A = a (+) a``."""
    if m.n != m0.n or np.max(np.abs(m.h0 - m0.h0)) > 1e-12 * max(1.0, np.max(np.abs(m0.h0))):
        raise DimensionMismatch("models must share h0 and differ only in k")
    A = np.kron(np.eye(2), as_cmatrix(a))

    def piece(model):
        K = assemble_K(model)
        P = window_function(K, phi)
        return P @ commutator(K, A) @ P

    diff = piece(m) - piece(m0)
    sv = sla.svdvals(diff)
    top = float(np.count_nonzero(sv > rel_cut * sv[0]) / sv.size) if sv.size and sv[0] > 0 else 0.0
    rel = op_norm_2(m.k - m0.k) / max(1.0, op_norm_2(m0.h0))
    return CompactReport(float(sv[0]) if sv.size else 0.0, sv, top, float(rel))


__all__ = [
    "commutator", "window_function", "MourreReport", "mourre_check", "virial_check",
    "VirialReport", "PutnamReport", "putnam_bound_hilbert", "putnam_bound_krein",
    "putnam_window_check", "rank_one_putnam_instance", "krein_putnam_instance", "SweepReport", "lap_sweep",
    "level_spacing", "default_mu_grid", "default_lambda_grid", "CompactReport",
    "compact_perturbation_check",
]

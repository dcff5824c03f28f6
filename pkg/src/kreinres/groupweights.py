"""C0-group tools: Bessel potentials, weights ``<eps A>^{+-s}`` built from the
group ``e^{ita}``, truncated exponentials and commutator expansions.

Every group integral here has an even kernel, so
``int e^{it lam} k(t) dt = 2 int_0^inf cos(t lam) k(t) dt`` (also for complex
``lam``).  The kernels carry an integrable singularity at ``t = 0`` and an
``e^{-|t|}`` tail, which fixes the quadrature: geometric Gauss-Legendre
panels on ``(0, 1]`` and uniform panels on ``[1, T*]``.
"""
from dataclasses import dataclass, field
from math import factorial

import numpy as np
import scipy.linalg as sla
from scipy.special import gamma as gamma_fn

from . import kernels
from .errors import (
    DomainError,
    Divergent,
    FitUnstable,
    FourierMismatch,
    GrowthViolation,
    NotHermitian,
    QuadratureBudgetExceeded,
)
from .numkernel import TOL, as_cmatrix, hermitian_defect, matfun_hermitian, op_norm_2

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)
TAIL_LOG = 30.0  # e^{-30} ~ 1e-13 relative tail


def _gl_on(edges):
    a, b = edges[:-1, None], edges[1:, None]
    x = 0.5 * (b - a) * _GL_NODES[None, :] + 0.5 * (a + b)
    w = 0.5 * (b - a) * _GL_WEIGHTS[None, :]
    return x.ravel(), w.ravel()


def half_line_rule(t_max, width=0.5, t_min=1e-20, budget=200_000):
    """Nodes and weights on ``(0, t_max]``, graded toward 0."""
    n_geo = int(np.ceil(np.log2(1.0 / t_min)))
    geo = 2.0 ** -np.arange(n_geo, -1, -1.0)
    geo[0] = t_min
    n_lin = max(1, int(np.ceil((t_max - 1.0) / width)))
    lin = np.linspace(1.0, max(t_max, 1.0 + width), n_lin + 1)
    edges = np.concatenate([[0.0], geo, lin[1:]])
    if (len(edges) - 1) * len(_GL_NODES) > budget:
        raise QuadratureBudgetExceeded(f"t-quadrature needs {(len(edges) - 1) * 12} nodes")
    return _gl_on(edges)


# -- Bessel potentials --------------------------------------------------------


def bessel_constant(sigma):
    return 1.0 / (2.0 ** sigma * np.sqrt(np.pi) * gamma_fn(0.5 * sigma))


def bessel_derivatives(sigma, t):
    """``(G, G', G'')`` of the Bessel potential at ``t``.

    Derivatives use analytic weights under the r-integral rather than finite
    differences of the table.
    """
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    t = np.asarray(t, dtype=float)
    if np.any(t == 0):
        raise DomainError("G_sigma is evaluated at t != 0 only")
    vals, ok = kernels.bessel_table(float(sigma), np.abs(t).ravel())
    if not ok:
        raise QuadratureBudgetExceeded(f"Bessel quadrature did not converge for sigma={sigma}")
    vals = bessel_constant(sigma) * vals
    sgn = np.sign(t).ravel()
    return (vals[0].reshape(t.shape), (sgn * vals[1]).reshape(t.shape), vals[2].reshape(t.shape))


def bessel_G(sigma, t):
    """``G_sigma(t)``, the kernel with ``int e^{i tau t} G_sigma(t) dt = <tau>^{-sigma}``."""
    g = bessel_derivatives(sigma, t)[0]
    return float(g) if g.ndim == 0 else g


@dataclass(frozen=True)
class BesselKernel:
    sigma: float
    t: np.ndarray  # positive nodes
    w: np.ndarray
    G: np.ndarray
    G2: np.ndarray

    @property
    def mass(self):
        return float(2.0 * np.sum(self.w * self.G))

    def fourier(self, tau):
        tau = np.atleast_1d(np.asarray(tau, dtype=complex))
        return 2.0 * np.cos(np.outer(tau, self.t)) @ (self.w * self.G)


def bessel_kernel(sigma, t_max=None, width=0.5, need_second=False):
    t_max = TAIL_LOG + 10.0 if t_max is None else t_max
    t, w = half_line_rule(t_max, width)
    G, _, G2 = bessel_derivatives(sigma, t)
    return BesselKernel(float(sigma), t, w, G, G2 if need_second else np.zeros(0))


@dataclass
class RelationReport:
    sigma: float
    t: np.ndarray
    C_fit: float
    spread: float  # std/mean of the pointwise ratios
    residual: float
    ok: bool


def bessel_derivative_relation_check(sigma, t_grid=None, h=1e-3, rtol=1e-4):
    """Fit ``C`` in ``G_sigma'(t) = C t G_{sigma-2}(t)`` from 5-point differences of ``G_sigma``."""
    if sigma <= 2:
        raise DomainError("relation needs sigma > 2")
    t = np.linspace(0.25, 6.0, 24) if t_grid is None else np.asarray(t_grid, dtype=float)
    fd = (-bessel_G(sigma, t + 2 * h) + 8 * bessel_G(sigma, t + h)
          - 8 * bessel_G(sigma, t - h) + bessel_G(sigma, t - 2 * h)) / (12 * h)
    rhs = t * bessel_G(sigma - 2, t)
    C = float(np.dot(fd, rhs) / np.dot(rhs, rhs))
    ratios = fd / rhs
    spread = float(np.std(ratios) / abs(np.mean(ratios)))
    residual = float(np.linalg.norm(fd - C * rhs) / np.linalg.norm(fd))
    return RelationReport(float(sigma), t, C, spread, residual, residual <= rtol)


@dataclass
class BesselBoundReport:
    sigma: float
    small_t_constants: dict  # k -> max of t^k |G^(k)| / t^min(sigma-1, 0) on (0, 1)
    small_t_slopes: dict  # k -> log-log slope of that ratio near 0 (no blow-up: >= -0.05)
    decay_ratios: dict  # k -> |G^(k)(t)| e^{t/2} / t^k at t = 2, 5, 10
    ok: bool


def _fd_derivative(sigma, t, rel=1e-3):
    h = rel * t
    return (-bessel_G(sigma, t + 2 * h) + 8 * bessel_G(sigma, t + h)
            - 8 * bessel_G(sigma, t - h) + bessel_G(sigma, t - 2 * h)) / (12 * h)


def bessel_bound_checks(sigma, t_small=None, t_decay=(2.0, 5.0, 10.0)):
    """Spot checks of the small-``t`` and large-``t`` bounds for ``k = 0, 1``.

    Near 0 the reference power is ``|t|^min(sigma-1, 0)``: for ``sigma > 1`` the
    kernel is bounded at the origin, so ``|t|^(sigma-1)`` itself cannot dominate it.
    First derivatives come from 5-point differences, independent of the
    analytic derivative weights.
    """
    t = np.geomspace(1e-4, 0.9, 30) if t_small is None else np.asarray(t_small, dtype=float)
    td = np.asarray(t_decay, dtype=float)
    p = min(sigma - 1.0, 0.0)
    consts, slopes, decay = {}, {}, {}
    ok = True
    for k, fn in ((0, bessel_G), (1, _fd_derivative)):
        r = t ** k * np.abs(fn(sigma, t)) / t ** p
        consts[k] = float(np.max(r))
        near = t <= 1e-2
        slopes[k] = float(np.polyfit(np.log(t[near]), np.log(r[near]), 1)[0])
        d = np.abs(fn(sigma, td)) * np.exp(td / 2) / td ** k
        decay[k] = d.tolist()
        ok &= bool(slopes[k] >= -0.05 and np.all(np.isfinite(r)) and np.all(np.diff(d) <= 0))
    return BesselBoundReport(float(sigma), consts, slopes, decay, ok)


# -- groups and weights -------------------------------------------------------


@dataclass(frozen=True)
class GroupData:
    """Generator ``a`` of ``W_t = e^{ita}`` with measured growth ``||W_t|| <= M e^{gamma|t|}``."""

    a: np.ndarray
    M: float
    gamma: float
    hermitian: bool
    _eig: tuple = field(default=None, repr=False, compare=False)

    @classmethod
    def fit(cls, a, t_max=10.0, n_t=81):
        a = as_cmatrix(a)
        herm = hermitian_defect(a) <= TOL.herm_tol
        eig = _diagonalize(a, herm)
        if herm:
            return cls(a, 1.0, 0.0, True, eig)
        t = np.linspace(-t_max, t_max, n_t)
        y = np.array([np.log(op_norm_2(sla.expm(1j * ti * a))) for ti in t])
        slope = np.polyfit(np.abs(t), y, 1)[0]
        gam = max(float(slope), 0.0)
        logM = float(np.max(y - gam * np.abs(t)))
        return cls(a, float(np.exp(max(logM, 0.0))), gam, False, eig)

    @property
    def n(self):
        return self.a.shape[0]

    def W(self, t):
        return sla.expm(1j * t * self.a)


def _diagonalize(a, herm):
    if herm:
        lam, V = np.linalg.eigh(0.5 * (a + a.conj().T))
        return lam.astype(complex), V, V.conj().T
    lam, V = np.linalg.eig(a)
    if np.linalg.cond(V) < 1e8:
        return lam, V, np.linalg.inv(V)
    return None


def _group_integral(g, eps, t, w, kc, km=None):
    """``2 sum_i w_i [kc_i cos(eps t_i a) + km_i (cos(eps t_i a) - 1)]``.

    Uses the eigenbasis of ``a`` when it is well conditioned, otherwise one
    ``expm`` pair per node.
    """
    wc = w * kc
    wm = None if km is None else w * km
    if g._eig is not None:
        lam, V, Vinv = g._eig
        arg = np.outer(eps * lam, t)
        vals = np.cos(arg) @ wc
        if wm is not None:
            vals = vals - 2.0 * np.sin(0.5 * arg) ** 2 @ wm
        return (V * (2.0 * vals)[None, :]) @ Vinv
    out = np.zeros((g.n, g.n), dtype=complex)
    eye = np.eye(g.n)
    for i, ti in enumerate(t):
        c = 0.5 * (sla.expm(1j * eps * ti * g.a) + sla.expm(-1j * eps * ti * g.a))
        out += 2.0 * wc[i] * c
        if wm is not None:
            out += 2.0 * wm[i] * (c - eye)
    return out


def _rule_for(g, eps):
    if 2.0 * eps * g.gamma >= 1.0:
        raise GrowthViolation(f"2*eps*gamma = {2 * eps * g.gamma:.3g} >= 1")
    t_max = TAIL_LOG / (1.0 - eps * g.gamma) + 10.0
    width = min(0.5, np.pi / (eps * op_norm_2(g.a) + 1.0))
    return half_line_rule(t_max, width)


def weight_from_group(g, sigma, eps=1.0):
    """``<eps a>^{-sigma} = int e^{i eps t a} G_sigma(t) dt``."""
    t, w = _rule_for(g, eps)
    return _group_integral(g, eps, t, w, bessel_derivatives(sigma, t)[0])


def weight_positive_power(g, s, eps=1.0):
    """``<eps a>^s = int e^{i eps t a}(G_sigma - G_sigma'')(t) dt`` with ``sigma = 2 - s``.

    Since ``int G_sigma'' = 0`` the second term is integrated against
    ``e^{ita} - 1``, which removes its non-integrable ``t^{sigma-3}`` part.
    """
    if not 0 < s < 1:
        raise DomainError("s must lie in (0, 1)")
    t, w = _rule_for(g, eps)
    G, _, G2 = bessel_derivatives(2.0 - s, t)
    return _group_integral(g, eps, t, w, G, -G2)


def m_gamma_norm(fhat, gamma, t_max=60.0, width=0.25):
    """``int e^{gamma|t|} |fhat(t)| dt`` for a callable ``fhat``.

    Raises ``Divergent`` when ``e^{gamma|t|}|fhat|`` does not decay on the tail.
    """
    t, w = half_line_rule(t_max, width)
    vals = np.exp(gamma * t) * (np.abs(fhat(t)) + np.abs(fhat(-t)))
    tail = (t > 0.5 * t_max) & (vals > 0)
    if np.count_nonzero(tail) >= 4:
        slope = np.polyfit(t[tail], np.log(vals[tail]), 1)[0]
        if slope > -0.05:
            raise Divergent(f"weighted tail does not decay (log-slope {slope:.3g})")
    total = float(np.sum(w * vals))
    if not np.isfinite(total):
        raise Divergent("non-finite M_gamma integral")
    return total


@dataclass
class HolderReport:
    C: float
    constants: np.ndarray
    lhs: np.ndarray
    sup_terms: np.ndarray
    stability: float
    ok: bool


def holder_estimate_check(g, s, m, us, x_grid=None, stability_max=10.0):
    """Compare ``||<a>^s u||`` with ``||u|| + sup_{0<|x|<1} |x|^{-m} ||(W_x - 1)u||``."""
    if not 0 < s < m < 1:
        raise DomainError("need 0 < s < m < 1")
    if g.gamma >= 0.5:
        raise GrowthViolation("Hoelder estimate needs gamma < 1/2")
    x = np.concatenate([np.geomspace(1e-6, 1.0, 60), -np.geomspace(1e-6, 1.0, 60)]) \
        if x_grid is None else np.asarray(x_grid, dtype=float)
    us = np.atleast_2d(np.asarray(us, dtype=complex))
    P = weight_positive_power(g, s, 1.0)
    Ws = [g.W(xi) - np.eye(g.n) for xi in x]
    lhs, sup, consts = [], [], []
    for u in us:
        nu = np.linalg.norm(u)
        lhs.append(np.linalg.norm(P @ u))
        sup.append(max(np.linalg.norm(Wx @ u) / abs(xi) ** m for Wx, xi in zip(Ws, x)))
        consts.append(lhs[-1] / (nu + sup[-1]))
    consts = np.array(consts)
    stab = float(np.max(consts) / np.median(consts))
    return HolderReport(float(np.max(consts)), consts, np.array(lhs), np.array(sup), stab,
                        stab <= stability_max)


# -- truncated exponentials and Taylor expansion -------------------------------


def truncated_exp(k, tau):
    """``E_k(tau) = (i tau)^{-k}(e^{i tau} - sum_{j<k} (i tau)^j/j!)``, with ``E_k(0) = 1/k!``."""
    if k < 0:
        raise DomainError("k must be a non-negative integer")
    arr = np.asarray(tau, dtype=complex)
    out = kernels.truncated_exp(int(k), arr.ravel()).reshape(arr.shape)
    return complex(out) if out.ndim == 0 else out


def truncated_exp_identities(k_max=4, taus=None, n_gauss=60):
    """Residuals of the ``E_k`` identities; returns ``{name: max abs residual}``.

    ``value_at_0``: ``E_k(0) = 1/k!``.  ``recursion``: ``E_k = 1/k! + i tau E_{k+1}``.
    ``integral_form``: against ``int_0^1 e^{i tau th}(1-th)^{k-1}/(k-1)! dth`` by
    Gauss-Legendre.  ``delta``: ``tau E_k'(tau) = E_{k-1} - k E_k`` with the
    derivative taken under the same integral.
    """
    taus = (np.concatenate([np.linspace(-12, 12, 49), [2 + 1j, 0.3 - 0.2j, 1e-4]])
            if taus is None else np.asarray(taus, dtype=complex))
    x, w = np.polynomial.legendre.leggauss(n_gauss)
    th, w = 0.5 * (x + 1.0), 0.5 * w
    ph = np.exp(1j * np.outer(taus, th))
    res = {"value_at_0": 0.0, "recursion": 0.0, "integral_form": 0.0, "delta": 0.0}
    for k in range(0, k_max + 1):
        Ek = truncated_exp(k, taus)
        res["value_at_0"] = max(res["value_at_0"], abs(truncated_exp(k, 0.0) - 1 / factorial(k)))
        rec = 1 / factorial(k) + 1j * taus * truncated_exp(k + 1, taus)
        res["recursion"] = max(res["recursion"], float(np.max(np.abs(Ek - rec))))
        if k >= 1:
            kern = (1.0 - th) ** (k - 1) / factorial(k - 1)
            integ = ph @ (w * kern)
            res["integral_form"] = max(res["integral_form"], float(np.max(np.abs(Ek - integ))))
            dEk = (1j * taus) * (ph @ (w * th * kern))
            rhs = truncated_exp(k - 1, taus) - k * Ek
            res["delta"] = max(res["delta"], float(np.max(np.abs(dEk - rhs))))
    return res


def _full_line_rule(freq, t_max=60.0):
    width = min(0.5, np.pi / (freq + 1.0))
    t, w = half_line_rule(t_max, width)
    return np.concatenate([-t[::-1], t]), np.concatenate([w[::-1], w])


def fourier_consistency(f, fhat, probes=(0.0, 0.7, 2.5), t_max=60.0, tol=1e-5):
    t, w = _full_line_rule(max(abs(p) for p in probes), t_max)
    fh = fhat(t)
    worst = 0.0
    for x in probes:
        approx = np.sum(w * fh * np.exp(1j * t * x))
        exact = complex(f(np.array([x]))[0])
        worst = max(worst, abs(approx - exact) / max(1.0, abs(exact)))
    if worst > tol:
        raise FourierMismatch(f"f and fhat disagree by {worst:.2e} at the probe points")
    return worst


def _remainder_entries(lam, St, k, fhat, t_max, kernel=None):
    """Eigenbasis entries of ``A^k R_k(f^(k))`` applied to ``St``.

    Entry ``(m, n)`` is ``St_mn Delta^k int fhat(t)(it)^k e^{it lam_m} E_k(t Delta) dt`` with
    ``Delta = lam_n - lam_m``; ``kernel`` replaces ``E_k`` when given.
    """
    n = len(lam)
    freq = float(np.max(np.abs(lam)) + np.ptp(lam)) if n else 0.0
    t, w = _full_line_rule(freq, t_max)
    gh = w * fhat(t) * (1j * t) ** k
    out = np.zeros((n, n), dtype=complex)
    for m in range(n):
        delta = lam - lam[m]
        E = kernel(np.outer(delta, t)) if kernel else truncated_exp(k, np.outer(delta, t))
        out[m] = St[m] * delta ** k * ((E * np.exp(1j * t * lam[m])[None, :]) @ gh)
    return out


@dataclass
class TaylorReport:
    lhs: np.ndarray
    partial_sum: np.ndarray
    remainder: np.ndarray
    residual: float
    fourier_error: float
    ok: bool


def _require_hermitian(a):
    a = as_cmatrix(a)
    if hermitian_defect(a) > TOL.herm_tol:
        raise NotHermitian("generator must be Hermitian for matrix functions of f^(j)")
    return 0.5 * (a + a.conj().T)


def taylor_commutator_expansion(S, a, f, fhat, k, t_max=60.0, quad_tol=1e-5):
    """``S f(a) = sum_{j<k} f^(j)(a) ad^j(S)/j! + A^k R_k(f^(k))(S)`` with ``ad(S) = [S, a]``.

    Left multiplication plays the role of ``A_l``, right multiplication of
    ``A_r`` and ``ad = A_r - A_l``.  The partial sum is formed from nested
    commutators in the original basis; the remainder is a quadrature of the
    Fourier representation in the eigenbasis of ``a``.
    """
    a = _require_hermitian(a)
    S = as_cmatrix(S)
    ferr = fourier_consistency(f, fhat, t_max=t_max, tol=quad_tol)
    lhs = S @ matfun_hermitian(f.derivs[0], a)
    partial = np.zeros_like(S)
    X = S.copy()
    for j in range(k):
        partial += matfun_hermitian(lambda x, j=j: f.d(j, x), a) @ X / factorial(j)
        X = X @ a - a @ X
    lam, U = np.linalg.eigh(a)
    St = U.conj().T @ S @ U
    rem = U @ _remainder_entries(lam, St, k, fhat, t_max) @ U.conj().T
    resid = float(op_norm_2(lhs - partial - rem) / max(1.0, op_norm_2(lhs)))
    return TaylorReport(lhs, partial, rem, resid, ferr, resid <= quad_tol)


@dataclass
class FirstOrderReport:
    lhs: np.ndarray  # [S, i f(a)]
    main: np.ndarray  # f'(a) S'
    rest: np.ndarray  # R(S')
    residual: float
    ok: bool


def first_order_commutator(S, a, f, fhat, t_max=60.0, quad_tol=1e-5):
    """``[S, i f(a)] = f'(a) S' + R(S')`` with ``S' = [S, ia]`` and kernel ``E_1 - 1``."""
    a = _require_hermitian(a)
    S = as_cmatrix(S)
    fourier_consistency(f, fhat, t_max=t_max, tol=quad_tol)
    fa = matfun_hermitian(f.derivs[0], a)
    lhs = 1j * (S @ fa - fa @ S)
    Sp = 1j * (S @ a - a @ S)
    main = matfun_hermitian(lambda x: f.d(1, x), a) @ Sp
    lam, U = np.linalg.eigh(a)
    Spt = U.conj().T @ Sp @ U
    # R(S') = int e^{it A_l} F(t ad) ghat(t) dt S' with ghat = (it) fhat, F = E_1 - 1
    rest = U @ _remainder_entries(lam, Spt, 0, lambda t: 1j * t * fhat(t), t_max,
                                  kernel=lambda tau: truncated_exp(1, tau) - 1.0) @ U.conj().T
    resid = float(op_norm_2(lhs - main - rest) / max(1.0, op_norm_2(lhs)))
    return FirstOrderReport(lhs, main, rest, resid, resid <= quad_tol)


# -- epsilon scaling -----------------------------------------------------------


@dataclass
class ScalingReport:
    which: str
    eps: np.ndarray
    values: np.ndarray
    slope: float
    r2: float
    threshold: float
    degenerate: bool
    passed: bool


def est_scaling_check(which, S, a, s, order, eps_grid=None, f=None, slack=0.15):
    """Fit the decay exponent of the commutator remainders as ``eps -> 0``.

    ``est1``:   ``||<eps a>^s [<eps a>^{-s}, S] <eps a>^s||``, asserted ``>= beta - slack``.
    ``estime``: ``||<eps a>^s ([S, i f(eps a)] - eps S') <eps a>^s||`` with ``f' = <.>^{-2s}``,
    asserted ``>= alpha - slack``.
    """
    from .symbols import hyp_primitive

    if which not in ("est1", "estime"):
        raise DomainError("which must be 'est1' or 'estime'")
    a = _require_hermitian(a)
    S = as_cmatrix(S)
    eps = np.geomspace(1e-3, 1.0, 13) if eps_grid is None else np.asarray(eps_grid, dtype=float)
    if which == "estime":
        if not 0.5 < s < 1:
            raise DomainError("estime needs s in (1/2, 1)")
        f = hyp_primitive(s) if f is None else f
    Sp = 1j * (S @ a - a @ S)
    vals = []
    for e in eps:
        wp = matfun_hermitian(lambda x: (1.0 + x * x) ** (0.5 * s), e * a)
        if which == "est1":
            wm = matfun_hermitian(lambda x: (1.0 + x * x) ** (-0.5 * s), e * a)
            X = wm @ S - S @ wm
        else:
            fa = matfun_hermitian(f.derivs[0], e * a)
            X = 1j * (S @ fa - fa @ S) - e * Sp
        vals.append(op_norm_2(wp @ X @ wp))
    vals = np.array(vals)
    scale = max(1.0, op_norm_2(S)) * TOL.norm_tol * 100
    threshold = order - slack
    if np.all(vals <= scale):
        return ScalingReport(which, eps, vals, np.inf, 1.0, threshold, True, True)
    keep = vals > scale
    x, y = np.log(eps[keep]), np.log(vals[keep])
    slope, icpt = np.polyfit(x, y, 1)
    ss = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum((y - slope * x - icpt) ** 2) / ss if ss > 0 else 1.0
    if r2 < 0.9:
        raise FitUnstable(f"log-log fit R^2 = {r2:.3f} < 0.9")
    return ScalingReport(which, eps, vals, float(slope), float(r2), threshold, False,
                         bool(slope >= threshold))


@dataclass
class KreinC1Report:
    B: np.ndarray
    B_derivative: np.ndarray
    residual: float
    ok: bool


def krein_c1_check(ks, g, h=None):
    """``B = a^* - a`` (Krein adjoint) against ``i d/dt (J^{-1} e^{-ita^H} J e^{ita})`` at 0."""
    a = g.a
    B1 = ks.adjoint(a) - a
    h = 1e-3 / max(1.0, op_norm_2(a)) if h is None else h

    def V(t):
        return ks.Jinv @ sla.expm(-1j * t * a.conj().T) @ ks.J @ sla.expm(1j * t * a)

    d = (-V(2 * h) + 8 * V(h) - 8 * V(-h) + V(-2 * h)) / (12 * h)
    B2 = 1j * d
    resid = float(op_norm_2(B1 - B2))
    return KreinC1Report(B1, B2, resid, resid <= 1e-5 * (1.0 + op_norm_2(B1)))

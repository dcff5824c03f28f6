"""Functional calculus for Klein-Gordon and definitizable matrices.

Three calculi live here:

* the free calculus ``phi(K0)`` through the even/odd split of ``phi`` and its
  norm bounds in the energy space and the charge spaces ``K_theta``;
* the boundary-value calculus
  ``chi(H) = (2 pi i)^{-1} int chi(l) [R(l + i0) - R(l - i0)] dl``, evaluated
  with an almost-analytic extension of order ``n`` and a double quadrature;
* the calculus of a definitizable matrix: definitizing polynomials, order
  functions, ``C^alpha`` norms and the resulting resolvent bounds.
"""
import itertools
from dataclasses import dataclass, field
from math import factorial, inf

import numpy as np

from .errors import (
    DomainError,
    EpsSingular,
    GrowthCheckFailed,
    MissingDerivative,
    NotSelfadjoint,
    QuadratureBudgetExceeded,
    SearchExhausted,
    TailFitFailed,
)
from .kgoperators import energy_opnorm, ktheta_opnorm
from .kreinspace import is_krein_selfadjoint
from .numkernel import as_cmatrix, general_eig, hermitian_part, matrix_rank, op_norm_2
from .symbols import SymbolFn

_GL_SMALL = np.polynomial.legendre.leggauss(20)


# ---------------------------------------------------------------- free calculus


def even_odd_split(phi):
    """Return ``(phi_+, phi_-/x)``; the ratio equals ``phi'(0)`` at the origin."""
    if not isinstance(phi, SymbolFn):
        raise TypeError("phi must be a SymbolFn")

    def plus_d(j):
        return lambda x: 0.5 * (phi.d(j, x) + (-1) ** j * phi.d(j, -x))

    plus = SymbolFn([plus_d(j) for j in range(phi.max_order + 1)], f"{phi.label}_+")
    t, w = _GL_SMALL
    t = 0.5 * (t + 1.0)
    w = 0.5 * w

    def ratio(x):
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape, dtype=complex)
        small = np.abs(x) < 1e-3
        big = ~small
        xb = x[big]
        out[big] = 0.5 * (phi.d(0, xb) - phi.d(0, -xb)) / xb
        if np.any(small):
            if phi.max_order < 1:
                raise MissingDerivative(f"{phi.label}: phi' needed for phi_-(x)/x near 0")
            # phi_-(x)/x = int_0^1 phi_-'(t x) dt, with phi_-' even
            xs = x[small][:, None] * t[None, :]
            out[small] = (0.5 * (phi.d(1, xs) + phi.d(1, -xs))) @ w
        return out

    return plus, SymbolFn([ratio], f"{phi.label}_-/x")


def free_blocks(m, phi):
    """The four blocks ``phi_+(eps), (phi_-/x)(eps), (phi_-/x)(eps) eps^2, phi_+(eps)``."""
    plus, ratio = even_odd_split(phi)
    e, V = m.eps_spectrum()
    fp = plus(e)
    fr = ratio(e)
    Vh = V.conj().T
    return (V * fp) @ Vh, (V * fr) @ Vh, (V * (fr * e * e)) @ Vh


def free_calculus(m, phi):
    """``phi(K0) = [[phi_+(eps), phi_-(eps)/eps], [phi_-(eps) eps, phi_+(eps)]]``."""
    if not m.is_free:
        raise DomainError("free calculus requires k = 0")
    P, Q, Q2 = free_blocks(m, phi)
    return np.block([[P, Q], [Q2, P]])


def eig_calculus(T, phi):
    """``V phi(Lambda) V^{-1}`` for a diagonalizable matrix (independent oracle)."""
    ge = general_eig(T)
    vals = ge.values
    fv = phi(vals.real) if np.all(np.abs(vals.imag) < 1e-12) else phi(vals)
    return (ge.vectors * fv) @ np.linalg.inv(ge.vectors)


def default_half_grid(x_dense=20.0, n_dense=4001, x_max=1e6, n_tail=400):
    return np.unique(np.concatenate([
        np.linspace(0.0, x_dense, n_dense),
        np.geomspace(x_dense, x_max, n_tail),
    ]))


def _divergent(values, grid, factor=10.0):
    """Grid-sup divergence flag: the sup keeps growing over the last three decades."""
    cut = grid[-1] * 1e-3
    inner = values[grid <= cut]
    if inner.size == 0:
        return False
    return float(np.max(values)) > factor * max(float(np.max(inner)), 1e-300)


def lambda_norm(phi, grid=None):
    """``sup_R |phi| + sup_{x >= 0} |phi_-(x)/x|`` on a grid (``inf`` when divergent)."""
    g = default_half_grid() if grid is None else np.asarray(grid, dtype=float)
    g = g[g >= 0]
    _, ratio = even_odd_split(phi)
    sup_phi = max(float(np.max(np.abs(phi(g)))), float(np.max(np.abs(phi(-g)))))
    r = np.abs(ratio(g))
    if _divergent(r, g):
        return inf
    return sup_phi + float(np.max(r))


def lambda_theta_norm(phi, theta, grid=None):
    """``||phi||_Lambda + sup|phi_-/x| + sup |phi_-(x)| <x>^{|4 theta - 1|}``."""
    g = default_half_grid() if grid is None else np.asarray(grid, dtype=float)
    g = g[g >= 0]
    base = lambda_norm(phi, g)
    if base == inf:
        return inf
    _, ratio = even_odd_split(phi)
    r = np.abs(ratio(g))
    odd = np.abs(0.5 * (phi(g) - phi(-g))) * (1.0 + g * g) ** (0.5 * abs(4.0 * theta - 1.0))
    if _divergent(odd, g):
        return inf
    return base + float(np.max(r)) + float(np.max(odd))


@dataclass
class NormBoundRow:
    label: str
    op_norm: float
    max_block: float
    block_sum: float
    three_term: float
    lambda_norm: float
    sandwich_ok: bool


@dataclass
class NormBoundReport:
    space: str
    rows: list = field(default_factory=list)

    @property
    def all_ok(self):
        return all(r.sandwich_ok for r in self.rows)

    @property
    def max_ratio(self):
        vals = [r.op_norm / r.lambda_norm for r in self.rows if 0 < r.lambda_norm < inf]
        return max(vals) if vals else 0.0


def norm_bound_check(m, space="energy", family=(), grid=None, rtol=1e-9):
    """Operator norm of ``phi(K0)`` against its block norms and the three-term sup.

    ``space`` is ``"energy"`` or a number ``theta`` in [0, 1/2].  With the
    weight ``w(x) = <x>`` (energy) or ``<x>^{4 theta}`` (charge), the conjugated
    operator has blocks ``phi_+``, ``w phi_-/x`` and ``x^2 (phi_-/x) / w`` evaluated
    at ``eps``; the three-term right side takes each sup over ``sigma(eps)`` and
    the grid.
    """
    if not m.is_free:
        raise DomainError("norm_bound_check requires k = 0")
    e, V = m.eps_spectrum()
    Vh = V.conj().T
    g = default_half_grid() if grid is None else np.asarray(grid, dtype=float)
    pts = np.unique(np.concatenate([g[g >= 0], e]))
    if space == "energy":
        wfun = lambda x: np.sqrt(1.0 + x * x)
        label = "energy"
    else:
        theta = float(space)
        wfun = lambda x: (1.0 + x * x) ** (2.0 * theta)
        label = f"K_{theta}"
    rep = NormBoundReport(space=label)
    for phi in family:
        T = free_calculus(m, phi)
        opn = energy_opnorm(m, T) if space == "energy" else ktheta_opnorm(m, float(space), T)
        plus, ratio = even_odd_split(phi)
        b11 = op_norm_2((V * plus(e)) @ Vh)
        b12 = op_norm_2((V * (wfun(e) * ratio(e))) @ Vh)
        b21 = op_norm_2((V * (e * e * ratio(e) / wfun(e))) @ Vh)
        blocks = (b11, b12, b21)
        rp, rr = np.abs(plus(pts)), np.abs(ratio(pts))
        three = float(np.max(rp) + np.max(wfun(pts) * rr) + np.max(pts * pts * rr / wfun(pts)))
        lam = lambda_norm(phi, g) if space == "energy" else lambda_theta_norm(phi, float(space), g)
        ok = (max(blocks) <= opn * (1 + rtol) + 1e-14) and (opn <= sum(blocks) * (1 + rtol) + 1e-14) \
            and (sum(blocks) <= three * (1 + rtol) + 1e-14)
        rep.rows.append(NormBoundRow(phi.label, opn, max(blocks), sum(blocks), three, lam, bool(ok)))
    return rep


def spectral_projections(m, sign):
    """``Pi_+- = 1/2 [[I, +-eps^{-1}], [+-eps, I]]``."""
    if not m.is_free:
        raise DomainError("spectral projections are defined here for k = 0")
    if sign not in (1, -1, "+", "-"):
        raise ValueError("sign must be +1 or -1")
    s = 1.0 if sign in (1, "+") else -1.0
    e, V = m.eps_spectrum()
    if e[0] <= 1e-10 * max(1.0, e[-1]):
        raise EpsSingular(f"eps has eigenvalue {e[0]:.3e}")
    Vh = V.conj().T
    I = np.eye(m.n)
    return 0.5 * np.block([[I, s * (V / e) @ Vh], [s * (V * e) @ Vh, I]])


# ------------------------------------------------------ boundary-value calculus


def _gl_panels(edges, p):
    x, w = np.polynomial.legendre.leggauss(p)
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (b - a) * x[None, :] + 0.5 * (a + b)
    weights = 0.5 * (b - a) * w[None, :]
    return nodes.ravel(), weights.ravel()


def _lambda_edges(a, b, breakpoints, centers, width, levels=14):
    pts = {a, b}
    pts.update(x for x in breakpoints if a < x < b)
    for c in centers:
        for j in range(levels + 1):
            d = width * 2.0 ** (-1.5 * j)
            for x in (c - d, c + d):
                if a < x < b:
                    pts.add(x)
        if a < c < b:
            pts.add(c)
    return np.array(sorted(pts))


def _mu_edges(nu, ratio=0.35, mu_min_rel=1e-13):
    edges = [nu]
    while edges[-1] > nu * mu_min_rel:
        edges.append(edges[-1] * ratio)
    edges.append(0.0)
    return np.array(edges[::-1])


def _batched_resolvent(H, zs):
    n = H.shape[0]
    M = H[None, :, :] - zs[:, None, None] * np.eye(n)[None, :, :]
    return np.linalg.inv(M)


def growth_profile(H, lams, nu, order, decades=8):
    """``max_lambda ||R(lambda + i mu)|| mu^{order-1}`` for ``mu = nu 10^{-j}``."""
    mus = nu * 10.0 ** (-np.arange(decades + 1, dtype=float))
    prof = []
    for mu in mus:
        R = _batched_resolvent(H, np.asarray(lams, dtype=float) + 1j * mu)
        prof.append(max(op_norm_2(r) for r in R) * mu ** (order - 1))
    return mus, np.array(prof)


def smooth_calculus_bv(H, chi, nu, order, quad_tol=1e-7, p0=10, max_nodes=4_000_000,
                       growth_check=True):
    """``chi(H)`` from the boundary values of the resolvent.

    With ``chi_(n)(l + i mu) = sum_{k<n} chi^(k)(l) (i mu)^k / k!``::

        F = int chi_(n)(l + i nu) R(l + i nu) dl
            + i int_0^nu int R(l + i mu) chi^(n)(l) (i mu)^{n-1}/(n-1)! dl dmu

    is the upper boundary value ``int chi R(l + i0) dl``; the lower one is the
    mirror with ``mu -> -mu``, and ``chi(H) = (F_up - F_down) / (2 pi i)``.
    ``chi`` must be of class ``C^order``; a piecewise symbol whose supplied
    derivatives jump at breakpoints gives a wrong result without warning.
    """
    H = as_cmatrix(H, "H")
    n = H.shape[0]
    if order < 1:
        raise DomainError("order must be >= 1")
    if chi.support is None:
        raise DomainError("chi must have compact support")
    if chi.max_order < order:
        raise MissingDerivative(f"chi needs {order} derivatives")
    a, b = chi.support
    eig = general_eig(H, vectors=False).values
    centers = sorted({float(np.round(e.real, 12)) for e in eig if a - nu <= e.real <= b + nu})
    if growth_check:
        probe = np.array(centers + [a, b, 0.5 * (a + b)])
        _, prof = growth_profile(H, probe, nu, order)
        if prof[-1] > 30.0 * max(float(np.max(prof[:4])), 1e-300):
            raise GrowthCheckFailed(
                f"||R(l+i mu)|| mu^{order - 1} grows as mu -> 0 ({prof[0]:.3e} -> {prof[-1]:.3e}); "
                "increase the order"
            )
    width = 0.25 * (b - a)
    l_edges = _lambda_edges(a, b, chi.breakpoints, centers, width)
    m_edges = _mu_edges(nu)

    def evaluate(p):
        lam, wl = _gl_panels(l_edges, p)
        mu, wm = _gl_panels(m_edges, p)
        if lam.size * (mu.size + 2) > max_nodes:
            raise QuadratureBudgetExceeded(f"{lam.size * mu.size} nodes exceed budget {max_nodes}")
        dn = chi.d(order, lam)
        keep = np.abs(dn) > 0
        lam_n, w_n, dn = lam[keep], wl[keep], dn[keep]
        cn = 1.0 / factorial(order - 1)
        total = np.zeros((n, n), dtype=complex)
        for sgn in (1.0, -1.0):
            z = lam + sgn * 1j * nu
            ext = sum(chi.d(k, lam) * (sgn * 1j * nu) ** k / factorial(k) for k in range(order))
            boundary = np.einsum("l,lij->ij", wl * ext, _batched_resolvent(H, z))
            inner = np.zeros((n, n), dtype=complex)
            if lam_n.size:
                for mj, wj in zip(mu, wm):
                    R = _batched_resolvent(H, lam_n + sgn * 1j * mj)
                    coef = w_n * dn * (sgn * 1j * mj) ** (order - 1) * cn * wj
                    inner += np.einsum("l,lij->ij", coef, R)
            Fs = boundary + sgn * 1j * inner
            total += sgn * Fs
        return total / (2j * np.pi)

    prev = evaluate(p0)
    p = p0
    while True:
        p += 6
        cur = evaluate(p)
        if op_norm_2(cur - prev) <= quad_tol * max(1.0, op_norm_2(cur)):
            return cur
        prev = cur


# ------------------------------------------------------- definitizable calculus


class OrderFunction:
    """Finite map from the extended real line to positive integers (``inf`` is a key)."""

    def __init__(self, entries=None):
        self.entries = {}
        for k, v in (entries or {}).items():
            v = int(v)
            if v < 0:
                raise ValueError("order values must be nonnegative")
            if v:
                self.entries[float(k)] = v

    def __getitem__(self, xi):
        return self.entries.get(float(xi), 0)

    def items(self):
        return sorted(self.entries.items())

    def finite_points(self):
        return [x for x in sorted(self.entries) if x != inf]

    def __le__(self, other):
        return all(v <= other[k] for k, v in self.entries.items())

    def __eq__(self, other):
        return isinstance(other, OrderFunction) and self.entries == other.entries

    def __repr__(self):
        return "OrderFunction(" + ", ".join(f"{k}: {v}" for k, v in self.items()) + ")"

    def as_dict(self):
        return {("inf" if k == inf else repr(k)): v for k, v in self.items()}

    @staticmethod
    def pointwise_min(funcs):
        funcs = list(funcs)
        keys = set().union(*(f.entries for f in funcs)) if funcs else set()
        return OrderFunction({k: min(f[k] for f in funcs) for k in keys})


@dataclass
class EigenCluster:
    center: complex
    multiplicity: int
    riesz_index: int

    @property
    def is_real(self):
        return self.center.imag == 0.0


def eigen_clusters(H, rel_tol=1e-5):
    """Group eigenvalues within ``rel_tol (1 + ||H||)`` and estimate Riesz indices.

    The Riesz index is read off the rank filtration of ``(H - xi)^j`` with a
    rank cutoff ``1e-8 (1 + ||H||)^j``.
    """
    H = as_cmatrix(H, "H")
    n = H.shape[0]
    scale = 1.0 + op_norm_2(H)
    tol = rel_tol * scale
    vals = general_eig(H, vectors=False).values
    groups = []
    for v in vals:
        for g in groups:
            if abs(np.mean(g) - v) <= tol:
                g.append(v)
                break
        else:
            groups.append([v])
    clusters = []
    for g in groups:
        c = complex(np.mean(g))
        if abs(c.imag) <= tol:
            c = complex(c.real, 0.0)
        M = H - c * np.eye(n)
        P = np.eye(n, dtype=complex)
        ranks = [n]
        for j in range(1, len(g) + 2):
            P = P @ M
            ranks.append(matrix_rank(P, 1e-8 * scale ** j))
            if ranks[-1] == ranks[-2]:
                break
        idx = next(j for j in range(1, len(ranks)) if ranks[j] == ranks[j - 1]) - 1
        clusters.append(EigenCluster(c, len(g), max(idx, 1)))
    clusters.sort(key=lambda cl: (cl.center.real, cl.center.imag))
    return clusters


def _poly_from_factors(sigma, real_roots, degrees, pair_quads):
    p = np.polynomial.Polynomial([float(sigma)])
    for quad, r in pair_quads:
        p = p * quad ** r
    for xi, d in zip(real_roots, degrees):
        if d:
            p = p * np.polynomial.Polynomial([-xi, 1.0]) ** d
    return p


def _matrix_poly(H, sigma, real_roots, degrees, pair_quads):
    n = H.shape[0]
    I = np.eye(n)
    P = float(sigma) * I.astype(complex)
    for quad, r in pair_quads:
        c = quad.coef
        Q = c[0] * I + c[1] * H + c[2] * (H @ H)
        for _ in range(r):
            P = P @ Q
    for xi, d in zip(real_roots, degrees):
        for _ in range(d):
            P = P @ (H - xi * I)
    return P


@dataclass
class DefinitizeResult:
    poly_coeffs: np.ndarray  # ascending real coefficients of p
    sigma: int
    degrees: dict  # real root -> multiplicity in p
    alpha: OrderFunction
    beta: OrderFunction
    critical_points: list
    nonreal_pairs: list  # (lambda with Im > 0, Riesz index)
    positivity_margin: float  # normalized
    raw_margin: float
    clusters: list
    candidates_checked: int


def definitize(ks, H, def_tol=1e-8, extra_degree=2, max_checks=20000):
    """Search a definitizing polynomial and the order function.

    Candidates ``sigma * prod((x-l)(x-conj l))^{r_l} * prod (x-xi)^{d_xi}``
    are enumerated by total degree, then lexicographically in ``d``, then
    ``sigma = +1`` before ``-1``.  Positivity is measured by
    ``lambda_min(Herm(J p(H))) / (||J|| prod (||H|| + |root|))``, a scale that
    stays meaningful when ``p(H)`` itself vanishes.  ``alpha`` is the pointwise
    minimum of the ``beta`` functions of every definitizing candidate up to
    ``extra_degree`` above the first success.
    """
    H = as_cmatrix(H, "H")
    if not is_krein_selfadjoint(ks, H, 1e-8):
        raise NotSelfadjoint("H is not Krein-selfadjoint")
    normH = op_norm_2(H)
    clusters = eigen_clusters(H)
    real_cl = [c for c in clusters if c.is_real]
    upper = [c for c in clusters if c.center.imag > 0]
    pair_quads = [
        (np.polynomial.Polynomial([abs(c.center) ** 2, -2.0 * c.center.real, 1.0]), c.riesz_index)
        for c in upper
    ]
    roots = [c.center.real for c in real_cl]
    maxdeg = [2 * c.riesz_index for c in real_cl]
    base_scale = op_norm_2(ks.J)
    for c in upper:
        base_scale *= (normH + abs(c.center)) ** (2 * c.riesz_index)

    # sign data of simple real eigenvalues for a cheap necessary condition
    ge = general_eig(H)
    simple = []
    for i, c in enumerate(real_cl):
        if c.multiplicity == 1:
            j = int(np.argmin(np.abs(ge.values - c.center)))
            u = ge.vectors[:, j]
            kappa = float(np.real(np.vdot(u, ks.J @ u)) / np.vdot(u, u).real)
            if abs(kappa) > 1e-6:
                simple.append((i, np.sign(kappa)))

    cands = sorted(itertools.product(*[range(d + 1) for d in maxdeg]), key=lambda d: (sum(d), d))
    cands = np.array(cands, dtype=int).reshape(len(cands), len(real_cl))
    roots_arr = np.array(roots)

    def sign_ok(d, sigma):
        for i, sk in simple:
            if d[i]:
                continue
            flips = int(np.sum(d[roots_arr > roots_arr[i]]))
            if sigma * (-1) ** flips * sk < 0:
                return False
        return True

    best = (-inf, None)
    found = None
    successes = []
    checks = 0
    for d in cands:
        deg = int(d.sum())
        if found is not None and deg > found[0] + extra_degree:
            break
        for sigma in (1, -1):
            if not sign_ok(d, sigma):
                continue
            checks += 1
            if checks > max_checks:
                break
            P = _matrix_poly(H, sigma, roots, d, pair_quads)
            raw = float(np.linalg.eigvalsh(hermitian_part(ks.J @ P))[0])
            scale = base_scale
            for xi, di in zip(roots, d):
                scale *= (normH + abs(xi)) ** int(di)
            margin = raw / scale
            if margin > best[0]:
                best = (margin, _poly_from_factors(sigma, roots, d, pair_quads).coef)
            if margin >= -def_tol:
                total_deg = deg + 2 * sum(r for _, r in pair_quads)
                beta = {xi: int(di) for xi, di in zip(roots, d) if di}
                if total_deg % 2:
                    beta[inf] = 1
                successes.append(OrderFunction(beta))
                if found is None:
                    found = (deg, sigma, d.copy(), margin, raw)
        if checks > max_checks:
            break
    if found is None:
        raise SearchExhausted("no definitizing polynomial within the degree budget",
                              best_margin=best[0], best_coeffs=best[1])
    deg, sigma, d, margin, raw = found
    p = _poly_from_factors(sigma, roots, d, pair_quads)
    beta = successes[0]
    alpha = OrderFunction.pointwise_min(successes)
    crit = [xi for xi, v in alpha.items() if v]
    return DefinitizeResult(
        poly_coeffs=np.real(p.coef),
        sigma=sigma,
        degrees={xi: int(di) for xi, di in zip(roots, d) if di},
        alpha=alpha,
        beta=beta,
        critical_points=crit,
        nonreal_pairs=[(c.center, c.riesz_index) for c in upper],
        positivity_margin=margin,
        raw_margin=raw,
        clusters=clusters,
        candidates_checked=checks,
    )


def default_calpha_grid(points=(), x_max=1e6):
    base = [np.linspace(-20.0, 20.0, 8001), np.geomspace(20.0, x_max, 300), -np.geomspace(20.0, x_max, 300)]
    offs = np.geomspace(1e-7, 1.0, 120)
    for xi in points:
        base += [xi + offs, xi - offs]
    return np.unique(np.concatenate(base))


def remainder(phi, xi, s, x):
    """``R_(xi,s) phi(x) = (phi - T phi)/(x - xi)^s`` with the Taylor polynomial of degree ``s-1``.

    Within ``|x - xi| < 1e-3`` the integral form
    ``int_0^1 phi^(s)(xi + t (x - xi)) (1-t)^{s-1}/(s-1)! dt`` is used.
    """
    x = np.asarray(x, dtype=float)
    if s == 0:
        return phi(x)
    out = np.empty(x.shape, dtype=complex)
    h = x - xi
    near = np.abs(h) < 1e-3
    far = ~near
    taylor = sum(phi.d(j, np.array(xi)) * h[far] ** j / factorial(j) for j in range(s))
    out[far] = (phi(x[far]) - taylor) / h[far] ** s
    if np.any(near):
        t, w = _GL_SMALL
        t = 0.5 * (t + 1.0)
        w = 0.5 * w * (1.0 - t) ** (s - 1) / factorial(s - 1)
        pts = xi + h[near][:, None] * t[None, :]
        out[near] = phi.d(s, pts) @ w
    return out


def tail_coefficients(phi, s, x_lo=1e3, x_hi=1e6, npts=80):
    """Coefficients ``a_0..a_{s-1}`` of ``phi ~ sum a_k x^{-k}`` at infinity (least squares)."""
    xs = np.geomspace(x_lo, x_hi, npts)
    xs = np.concatenate([xs, -xs])
    A = np.stack([xs ** (-k) for k in range(s + 1)], axis=1)
    coef, *_ = np.linalg.lstsq(A, phi(xs), rcond=None)
    a = coef[:s]
    resid = np.abs(phi(xs) - sum(a[k] * xs ** (-k) for k in range(s)))
    ax = np.abs(xs)
    r_far = float(np.max(resid[ax >= x_hi / 10]))
    r_near = float(np.max(resid[ax <= x_lo * 10]))
    scale = max(float(np.max(np.abs(phi(xs)))), 1e-300)
    if r_far > 1e-13 * scale and r_far > 0.5 * r_near:
        raise TailFitFailed(
            f"{phi.label}: expansion residual does not decay at infinity ({r_near:.2e} -> {r_far:.2e})"
        )
    return a


def calpha_norm(phi, alpha, grid=None):
    """``||phi||_alpha = max_xi sum_{j <= alpha(xi)} sup |R_(xi,j) phi|`` (``sup|phi|`` if empty)."""
    pts = alpha.finite_points()
    g = default_calpha_grid(pts) if grid is None else np.asarray(grid, dtype=float)
    sup0 = float(np.max(np.abs(phi(g))))
    best = sup0
    for xi, s in alpha.items():
        total = sup0
        if xi == inf:
            a = tail_coefficients(phi, s)
            for j in range(1, s + 1):
                with np.errstate(all="ignore"):
                    rj = g ** j * (phi(g) - sum(a[k] * g ** (-k) if k else a[0] for k in range(j)))
                total += float(np.max(np.abs(rj)))
        else:
            for j in range(1, s + 1):
                total += float(np.max(np.abs(remainder(phi, xi, j, g))))
        best = max(best, total)
    return best


def riesz_projector(H, center, radius, npts=64):
    """``-(2 pi i)^{-1} \\oint (H - z)^{-1} dz`` on a circle, trapezoid rule."""
    th = 2 * np.pi * np.arange(npts) / npts
    z = center + radius * np.exp(1j * th)
    R = _batched_resolvent(H, z)
    return -(radius / npts) * np.einsum("k,kij->ij", np.exp(1j * th), R)


def jordan_calculus(H, phi, clusters=None):
    """``phi(H) = sum_xi sum_{j < r_xi} phi^(j)(xi)/j! (H - xi)^j P_xi`` with Riesz projectors."""
    H = as_cmatrix(H, "H")
    n = H.shape[0]
    clusters = eigen_clusters(H) if clusters is None else clusters
    centers = np.array([c.center for c in clusters])
    out = np.zeros((n, n), dtype=complex)
    for i, c in enumerate(clusters):
        others = np.delete(centers, i)
        rad = 0.5 * float(np.min(np.abs(others - c.center))) if others.size else 1.0
        rad = min(rad, 1.0 + op_norm_2(H))
        P = riesz_projector(H, c.center, rad)
        M = H - c.center * np.eye(n)
        term = P.copy()
        for j in range(c.riesz_index):
            at = np.array(c.center.real if c.is_real else c.center)
            out += complex(phi.d(j, at)) / factorial(j) * term
            term = M @ term
    return out


@dataclass
class JonasReport:
    alpha: OrderFunction
    rows: list  # (label, ||phi(H)||, ||phi||_alpha, ratio)

    @property
    def max_ratio(self):
        return max(r[3] for r in self.rows) if self.rows else 0.0


def jonas_bound_check(ks, H, family, alpha=None, grid=None):
    """Ratios ``||phi(H)|| / ||phi||_alpha`` over a family of symbols."""
    H = as_cmatrix(H, "H")
    if alpha is None:
        alpha = definitize(ks, H).alpha
    clusters = eigen_clusters(H)
    rows = []
    for phi in family:
        nrm = op_norm_2(jordan_calculus(H, phi, clusters))
        ca = calpha_norm(phi, alpha, grid)
        rows.append((phi.label, nrm, ca, nrm / ca if ca > 0 else 0.0))
    return JonasReport(alpha, rows)


@dataclass
class ResoReport:
    c: float
    worst_z: complex
    c_by_decade: dict
    stability: float  # max / min of per-decade constants
    ratios: np.ndarray
    decay_ratio: float = 1.0  # c of the highest decade / smallest per-decade c

def reso_rhs(z, alpha, nonreal_pairs):
    z = complex(z)
    val = sum(abs(z - lam) ** (-r) + abs(z - np.conj(lam)) ** (-r) for lam, r in nonreal_pairs)
    inner = 1.0 + sum(abs(z - xi) ** (-k) for xi, k in alpha.items() if xi != inf)
    inner += abs(z) ** alpha[inf]
    return val + inner / abs(z.imag)


def reso_bound_check(ks, H, z_grid, result=None):
    """Fit ``c = min_z RHS(z) / ||(H - z)^{-1}||`` for the resolvent bound."""
    H = as_cmatrix(H, "H")
    result = definitize(ks, H) if result is None else result
    n = H.shape[0]
    zs = np.asarray(z_grid, dtype=complex)
    ratios = np.empty(zs.size)
    for i, z in enumerate(zs):
        nr = op_norm_2(np.linalg.inv(H - z * np.eye(n)))
        ratios[i] = reso_rhs(z, result.alpha, result.nonreal_pairs) / nr
    i = int(np.argmin(ratios))
    dec = np.floor(np.log10(np.abs(zs.imag)) + 1e-12).astype(int)
    by = {int(d): float(np.min(ratios[dec == d])) for d in np.unique(dec)}
    vals = list(by.values())
    decay = by[max(by)] / min(vals)
    return ResoReport(float(ratios[i]), complex(zs[i]), by, max(vals) / min(vals), ratios,
                      float(decay))


def krein_adjoint_symbol_check(ks, H, chi, nu, order):
    """``||chi(H)* - conj(chi)(H)||`` for the boundary-value calculus."""
    A = smooth_calculus_bv(H, chi, nu, order)
    B = smooth_calculus_bv(H, chi.conj(), nu, order)
    return op_norm_2(ks.Jinv @ A.conj().T @ ks.J - B)


__all__ = [
    "even_odd_split", "free_calculus", "free_blocks", "eig_calculus", "lambda_norm",
    "lambda_theta_norm", "norm_bound_check", "spectral_projections", "smooth_calculus_bv",
    "growth_profile", "OrderFunction", "eigen_clusters", "definitize", "DefinitizeResult",
    "calpha_norm", "remainder", "tail_coefficients", "jordan_calculus", "jonas_bound_check",
    "reso_bound_check", "reso_rhs", "riesz_projector", "krein_adjoint_symbol_check",
]

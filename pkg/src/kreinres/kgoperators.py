"""Quadratic pencils and Klein-Gordon operators on C^n + C^n.

A ``PencilModel`` holds Hermitian ``h`` and ``k``.  From them:

* the pencil ``p(z) = h + z(2k - z) = h0 - (k - z)^2`` with ``h0 = h + k^2``,
* the Klein-Gordon operator ``K = [[k, I], [h0, k]]``, selfadjoint for the
  charge form ``<u|v> = (u0|v1) + (u1|v0)``,
* its resolvent written through ``p(z)^{-1}`` only,
* ``eps = h0^{1/2}`` and the weights ``<eps>^s`` defining the charge spaces
  ``K_theta`` and the energy space.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, EpsSingular, EpsUndefined, SingularMatrix, SpectrumHit
from .kreinspace import KreinStructure, charge_gram
from .numkernel import (
    TOL,
    LUSolver,
    as_cmatrix,
    as_vector,
    general_eig,
    hermitian_eig,
    op_norm_2,
)


@dataclass(frozen=True)
class PencilModel:
    h: np.ndarray
    k: np.ndarray
    label: str = ""
    _eig0: object = field(init=False, repr=False, compare=False)
    _eps_ok: bool = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        h = as_cmatrix(self.h, "h")
        k = as_cmatrix(self.k, "k")
        if h.shape != k.shape or h.shape[0] != h.shape[1]:
            raise DimensionMismatch(f"h {h.shape} and k {k.shape} must be equal square shapes")
        # hermitian_eig validates Hermiticity of h and k
        hermitian_eig(h)
        hermitian_eig(k)
        h = 0.5 * (h + h.conj().T)
        k = 0.5 * (k + k.conj().T)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "k", k)
        eig0 = hermitian_eig(self.h0)
        object.__setattr__(self, "_eig0", eig0)
        floor = -TOL.eig_tol * max(1.0, float(np.max(np.abs(eig0.values))))
        object.__setattr__(self, "_eps_ok", bool(eig0.values[0] >= floor))

    @property
    def n(self):
        return self.h.shape[0]

    @property
    def h0(self):
        return self.h + self.k @ self.k

    @property
    def is_free(self):
        return not np.any(self.k)

    @property
    def eps_defined(self):
        return self._eps_ok

    def _eps_values(self):
        if not self._eps_ok:
            raise EpsUndefined(
                f"h0 has negative eigenvalue {self._eig0.values[0]:.3e}; eps = h0^(1/2) undefined"
            )
        return np.sqrt(np.clip(self._eig0.values, 0.0, None))

    def eps_spectrum(self):
        """Eigenvalues of eps (ascending) and the common eigenbasis."""
        return self._eps_values(), self._eig0.vectors

    def eps_fun(self, f):
        """``f(eps)`` via the eigenbasis of ``h0``."""
        e = self._eps_values()
        V = self._eig0.vectors
        with np.errstate(all="ignore"):
            fv = np.asarray(f(e), dtype=complex)
        return (V * fv) @ V.conj().T

    @property
    def eps(self):
        return self.eps_fun(lambda e: e)

    def weight(self, sigma):
        """``<eps>^sigma = (1 + h0)^{sigma/2}`` (negative h0 part clamped)."""
        return self.eps_fun(lambda e: (1.0 + e * e) ** (0.5 * sigma))


def pencil_eval(m, z):
    """``p(z) = h + z(2k - z)``."""
    z = complex(z)
    return m.h + z * (2.0 * m.k - z * np.eye(m.n))


def pencil_eval_alt(m, z):
    """``p(z) = h0 - (k - z)^2``, the second form used as a consistency check."""
    kz = m.k - complex(z) * np.eye(m.n)
    return m.h0 - kz @ kz


def assemble_K(m):
    I = np.eye(m.n)
    return np.block([[m.k, I], [m.h0, m.k]])


def assemble_H_energy(m):
    I = np.eye(m.n)
    return np.block([[np.zeros((m.n, m.n)), I], [m.h, 2.0 * m.k]])


def intertwiner(m):
    """``Phi = [[I, 0], [k, I]]`` with ``Phi K = H Phi``."""
    I = np.eye(m.n)
    return np.block([[I, np.zeros((m.n, m.n))], [m.k, I]]).astype(complex)


def charge_structure(m):
    return KreinStructure(charge_gram(m.n))


class PencilResolvent:
    """Action of ``(K - z)^{-1}`` using only an LU factorization of ``p(z)``.

    ``R = [[P(z-k), P], [I + (z-k)P(z-k), (z-k)P]]`` with ``P = p(z)^{-1}``.
    """

    def __init__(self, m, z, pivot_floor=TOL.pivot_floor):
        self.m = m
        self.z = complex(z)
        pz = pencil_eval(m, self.z)
        try:
            self._lu = LUSolver(pz, pivot_floor)
        except SingularMatrix as exc:
            raise SpectrumHit(f"p(z) singular at z={self.z}: {exc}") from exc
        rc = self._lu.rcond()
        if not np.isfinite(rc) or rc < pivot_floor:
            raise SpectrumHit(f"p(z) numerically singular at z={self.z} (rcond {rc:.2e})")
        self.rcond = rc
        self._zk = self.z * np.eye(m.n) - m.k
        self._zk_h = self._zk.conj().T

    def apply(self, V):
        n = self.m.n
        V = np.asarray(V, dtype=complex)
        v0, v1 = V[:n], V[n:]
        y0 = self._lu.solve(self._zk @ v0 + v1)
        y1 = v0 + self._zk @ y0
        return np.concatenate([y0, y1], axis=0)

    def apply_adjoint(self, W):
        n = self.m.n
        W = np.asarray(W, dtype=complex)
        w0, w1 = W[:n], W[n:]
        t = self._lu.solve(w0 + self._zk_h @ w1, trans=2)
        return np.concatenate([w1 + self._zk_h @ t, t], axis=0)

    def matrix(self):
        n = self.m.n
        P = self._lu.solve(np.eye(n, dtype=complex))
        zk = self._zk
        PZ = P @ zk
        return np.block([[PZ, P], [np.eye(n) + zk @ PZ, zk @ P]])


def resolvent_K(m, z, pivot_floor=TOL.pivot_floor):
    """``(K - z)^{-1}`` assembled from ``p(z)^{-1}``."""
    return PencilResolvent(m, z, pivot_floor).matrix()


def resolvent_K0(m, z, pivot_floor=TOL.pivot_floor):
    """Free resolvent ``(K0 + z)(h0 - z^2)^{-1}`` (requires ``k = 0``)."""
    if not m.is_free:
        raise DimensionMismatch("resolvent_K0 requires k = 0")
    z = complex(z)
    n = m.n
    try:
        lu = LUSolver(m.h0 - z * z * np.eye(n), pivot_floor)
    except SingularMatrix as exc:
        raise SpectrumHit(f"z^2 = {z * z} in spectrum of h0") from exc
    if lu.rcond() < pivot_floor:
        raise SpectrumHit(f"z^2 = {z * z} numerically in spectrum of h0")
    Q = lu.solve(np.eye(n, dtype=complex))
    return np.block([[z * Q, Q], [m.h0 @ Q, z * Q]])


def spectrum_K(m):
    return general_eig(assemble_K(m))


def free_spectrum_formula(m):
    """``+-sqrt(spec_+(h0))`` and ``+-i sqrt|spec_-(h0)|`` (valid for k = 0)."""
    w = hermitian_eig(m.h0).values
    r = np.sqrt(np.abs(w)).astype(complex)
    r = np.where(w >= 0, r, 1j * r)
    vals = np.concatenate([r, -r])
    return vals[np.lexsort((vals.imag, vals.real))]


def charge_form(u, v):
    """``(u0|v1) + (u1|v0)``."""
    u = as_vector(u, "u")
    v = as_vector(v, "v")
    if u.size != v.size or u.size % 2:
        raise DimensionMismatch(f"incompatible sizes {u.size}, {v.size}")
    n = u.size // 2
    return complex(np.vdot(u[:n], v[n:]) + np.vdot(u[n:], v[:n]))


def energy_form(m, u, v):
    """``(u0|h v0) + (k u0 + u1 | k v0 + v1)``."""
    u = as_vector(u, "u")
    v = as_vector(v, "v")
    n = m.n
    if u.size != 2 * n or v.size != 2 * n:
        raise DimensionMismatch(f"vectors must have size {2 * n}")
    a = m.k @ u[:n] + u[n:]
    b = m.k @ v[:n] + v[n:]
    return complex(np.vdot(u[:n], m.h @ v[:n]) + np.vdot(a, b))


@dataclass(frozen=True)
class ChargeStructure:
    Jc: np.ndarray
    theta: float
    Wtheta: np.ndarray
    Wtheta_inv: np.ndarray


def charge_space(m, theta):
    """Charge form and the isometry ``W_theta: K_theta -> K_0``."""
    if not 0.0 <= theta <= 0.5:
        raise ValueError("theta must lie in [0, 1/2]")
    z = np.zeros((m.n, m.n))
    up = m.weight(2.0 * theta)
    dn = m.weight(-2.0 * theta)
    W = np.block([[up, z], [z, dn]])
    Winv = np.block([[dn, z], [z, up]])
    return ChargeStructure(charge_gram(m.n), float(theta), W, Winv)


@dataclass(frozen=True)
class EnergyStructure:
    WE: np.ndarray
    WE_inv: np.ndarray
    JE: np.ndarray


def energy_space(m):
    z = np.zeros((m.n, m.n))
    I = np.eye(m.n)
    WE = np.block([[m.weight(1.0), z], [z, I]])
    WEi = np.block([[m.weight(-1.0), z], [z, I]])
    JE = np.block([[m.h, z], [z, I]]).astype(complex)
    return EnergyStructure(WE, WEi, JE)


def ktheta_opnorm(m, theta, T):
    """Operator norm of ``T`` on ``K_theta``: ``||W_theta T W_theta^{-1}||``."""
    T = as_cmatrix(T, "T")
    if T.shape != (2 * m.n, 2 * m.n):
        raise DimensionMismatch(f"T must be {2 * m.n}x{2 * m.n}")
    cs = charge_space(m, theta)
    return op_norm_2(cs.Wtheta @ T @ cs.Wtheta_inv)


def energy_opnorm(m, T):
    """Operator norm on the energy space with norm ``||<eps> u0||^2 + ||u1||^2``."""
    T = as_cmatrix(T, "T")
    es = energy_space(m)
    return op_norm_2(es.WE @ T @ es.WE_inv)


def propagator(m, t):
    """``exp(i t K)`` by scaling-and-squaring Pade."""
    return sla.expm(1j * float(t) * assemble_K(m))


def propagator_free(m, t):
    """Closed form ``[[cos t eps, i eps^{-1} sin t eps], [i eps sin t eps, cos t eps]]``."""
    if not m.is_free:
        raise DimensionMismatch("closed-form propagator requires k = 0")
    e, _ = m.eps_spectrum()
    if e[0] <= 1e-8 * max(1.0, e[-1]):
        raise EpsSingular(f"eps has eigenvalue {e[0]:.3e}")
    t = float(t)
    c = m.eps_fun(lambda x: np.cos(t * x))
    s_over = m.eps_fun(lambda x: np.sin(t * x) / x)
    s_times = m.eps_fun(lambda x: np.sin(t * x) * x)
    return np.block([[c, 1j * s_over], [1j * s_times, c]])

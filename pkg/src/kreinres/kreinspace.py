"""Finite-dimensional Krein spaces: forms, adjoints, positivity, projections.

A Krein structure is carried by an invertible Hermitian Gram matrix ``J``
with ``<u|v> = u^H J v``.  The Krein adjoint of ``T`` is ``J^{-1} T^H J`` and
``S`` is (Krein) positive when the Hermitian form ``u -> <u|Su>`` is
nonnegative, i.e. when ``Herm(J S)`` is positive semidefinite.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DegenerateRange, DimensionMismatch, NotHermitian, NotSelfadjoint
from .numkernel import (
    TOL,
    as_cmatrix,
    as_vector,
    hermitian_part,
    op_norm_2,
    range_basis,
    solve_linear,
)

EPS_LADDER = tuple(10.0 ** (-k) for k in range(0, 9))


class KreinStructure:
    """Krein structure on C^n given by its Gram matrix ``J``."""

    def __init__(self, J, herm_tol=TOL.herm_tol, gram_floor=TOL.gram_floor):
        J = as_cmatrix(J, "J")
        if J.shape[0] != J.shape[1]:
            raise DimensionMismatch(f"J must be square, got {J.shape}")
        scale = op_norm_2(J)
        if scale == 0.0:
            raise NotHermitian("J is zero")
        if op_norm_2(J - J.conj().T) > herm_tol * scale:
            raise NotHermitian("Gram matrix J is not Hermitian")
        smin = float(sla.svdvals(J)[-1])
        if smin < gram_floor:
            raise DegenerateRange(f"J is numerically singular (smallest singular value {smin:.3e})")
        self.J = hermitian_part(J)
        self.n = J.shape[0]
        self._Jinv = solve_linear(self.J, np.eye(self.n, dtype=complex))

    @classmethod
    def hilbert(cls, n):
        return cls(np.eye(n))

    @classmethod
    def charge(cls, n):
        """Phase-space structure ``[[0, I], [I, 0]]`` on C^n + C^n."""
        return cls(charge_gram(n))

    @property
    def Jinv(self):
        return self._Jinv

    def _check_dim(self, *arrays):
        for a in arrays:
            if a.shape[0] != self.n:
                raise DimensionMismatch(f"expected leading dimension {self.n}, got {a.shape[0]}")

    def form(self, u, v):
        return krein_form(self, u, v)

    def adjoint(self, T):
        return krein_adjoint(self, T)


def charge_gram(n):
    Z = np.zeros((n, n))
    I = np.eye(n)
    return np.block([[Z, I], [I, Z]]).astype(complex)


def krein_form(ks, u, v):
    """``<u|v> = u^H J v``."""
    u = as_vector(u, "u")
    v = as_vector(v, "v")
    if u.size != ks.n or v.size != ks.n:
        raise DimensionMismatch(f"vectors of size {u.size},{v.size} for dimension {ks.n}")
    return complex(np.vdot(u, ks.J @ v))


def krein_gram(ks, V):
    """Gram matrix ``[<v_i|v_j>]`` of the columns of ``V``."""
    V = np.asarray(V, dtype=complex)
    ks._check_dim(V)
    return V.conj().T @ ks.J @ V


def krein_adjoint(ks, T):
    """``T* = J^{-1} T^H J``."""
    T = as_cmatrix(T, "T")
    if T.shape != (ks.n, ks.n):
        raise DimensionMismatch(f"T has shape {T.shape}, Krein dimension is {ks.n}")
    return ks.Jinv @ T.conj().T @ ks.J


def is_krein_selfadjoint(ks, T, tol=1e-10):
    T = as_cmatrix(T, "T")
    if T.shape != (ks.n, ks.n):
        raise DimensionMismatch(f"T has shape {T.shape}, Krein dimension is {ks.n}")
    JT = ks.J @ T
    scale = op_norm_2(JT)
    if scale == 0.0:
        return True
    return op_norm_2(JT - JT.conj().T) <= tol * scale


def krein_positivity_margin(ks, S):
    """Smallest eigenvalue of ``Herm(J S)`` divided by ``||J S||``."""
    JS = ks.J @ as_cmatrix(S, "S")
    scale = op_norm_2(JS)
    if scale == 0.0:
        return 0.0
    w = np.linalg.eigvalsh(hermitian_part(JS))
    return float(w[0] / scale)


def is_krein_positive(ks, S, tol=1e-10):
    """True iff ``<u|Su> >= 0`` for all u, up to ``tol * ||JS||``."""
    S = as_cmatrix(S, "S")
    if not is_krein_selfadjoint(ks, S, tol):
        raise NotSelfadjoint("S is not Krein-selfadjoint within tolerance")
    return krein_positivity_margin(ks, S) >= -tol


def assemble_block_symmetric(a, b, c):
    """Phase-space selfadjoint operator ``[[a, b], [c, a^H]]``."""
    a = as_cmatrix(a, "a")
    b = as_cmatrix(b, "b")
    c = as_cmatrix(c, "c")
    if not (a.shape == b.shape == c.shape and a.shape[0] == a.shape[1]):
        raise DimensionMismatch("blocks must be square and of equal size")
    return np.block([[a, b], [c, a.conj().T]])


def _inv_sqrt_psd(M, eps):
    w, V = np.linalg.eigh(hermitian_part(M))
    w = np.clip(w, 0.0, None) + eps
    return (V / np.sqrt(w)) @ V.conj().T


def block_positivity_ratio(a, b, c, eps_ladder=EPS_LADDER):
    """``max_eps ||(b+eps)^{-1/2} a (c+eps)^{-1/2}||`` over the ladder.

    With the charge form, ``<u|Su> = (u0|c u0) + (u1|b u1) + 2 Re (u1|a u0)``
    for ``S = [[a, b], [c, a^H]]``, so ``b`` sits on the left of ``a``.
    """
    a = as_cmatrix(a, "a")
    return max(
        op_norm_2(_inv_sqrt_psd(b, e) @ a @ _inv_sqrt_psd(c, e)) for e in eps_ladder
    )


def block_positivity_test(a, b, c, tol=1e-10, eps_ladder=EPS_LADDER):
    """Decide Krein positivity of ``[[a, b], [c, a^H]]`` from its blocks."""
    a = as_cmatrix(a, "a")
    b = as_cmatrix(b, "b")
    c = as_cmatrix(c, "c")
    for name, M in (("b", b), ("c", c)):
        if op_norm_2(M - M.conj().T) > TOL.herm_tol * max(op_norm_2(M), 1.0):
            raise NotHermitian(f"block {name} is not Hermitian")
    scale = max(op_norm_2(b), op_norm_2(c), 1.0)
    if np.linalg.eigvalsh(hermitian_part(b))[0] < -tol * scale:
        return False
    if np.linalg.eigvalsh(hermitian_part(c))[0] < -tol * scale:
        return False
    return block_positivity_ratio(a, b, c, eps_ladder) <= 1.0 + tol


@dataclass(frozen=True)
class ProjectionReport:
    projection_defect: float
    is_projection: bool
    is_positive: bool
    hilbert_constant: float  # +inf for the empty range
    range_dim: int


def positive_projection_check(ks, P, tol=1e-10):
    P = as_cmatrix(P, "P")
    if P.shape != (ks.n, ks.n):
        raise DimensionMismatch(f"P has shape {P.shape}, Krein dimension is {ks.n}")
    defect = op_norm_2(P @ P - P)
    is_proj = defect <= tol * max(1.0, op_norm_2(P))
    if op_norm_2(P) == 0.0:
        return ProjectionReport(defect, True, True, float("inf"), 0)
    try:
        positive = is_krein_positive(ks, P, tol)
    except NotSelfadjoint:
        positive = False
    V = range_basis(P)
    G = krein_gram(ks, V)
    c = float(np.linalg.eigvalsh(hermitian_part(G))[0]) if V.shape[1] else float("inf")
    return ProjectionReport(defect, bool(is_proj), bool(positive), c, V.shape[1])


def compressed_norm(ks, P, S, gram_floor=TOL.gram_floor):
    """Best constant in ``+-<Pu|S Pu> <= C <Pu|Pu>`` on ran P."""
    P = as_cmatrix(P, "P")
    S = as_cmatrix(S, "S")
    V = range_basis(P)
    if V.shape[1] == 0:
        return 0.0
    G = hermitian_part(krein_gram(ks, V))
    gmin = np.linalg.eigvalsh(G)[0]
    if gmin < gram_floor:
        raise DegenerateRange(f"compressed Gram has eigenvalue {gmin:.3e} on ran P")
    Q = hermitian_part(V.conj().T @ ks.J @ S @ V)
    w = sla.eigh(Q, G, eigvals_only=True)
    return float(np.max(np.abs(w)))


"""Dense complex linear algebra used by every other module.

Everything is a thin, deterministic layer over LAPACK (via scipy.linalg):
fixed partial pivoting for solves, symmetric eigensolvers for Hermitian
input, and the QR algorithm for general matrices.  Matrices are plain
``numpy.ndarray`` objects of dtype ``complex128``; ``as_cmatrix`` is the
single validating constructor.
"""
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.sparse.linalg import LinearOperator, svds, ArpackNoConvergence

from .errors import DomainError, NoConvergence, NotHermitian, SingularMatrix


@dataclass(frozen=True)
class Tolerances:
    solve_tol: float = 1e-10
    eig_tol: float = 1e-10
    gen_tol: float = 1e-8
    herm_tol: float = 1e-10
    pivot_floor: float = 1e-14
    gram_floor: float = 1e-10
    norm_tol: float = 1e-12


TOL = Tolerances()


def as_cmatrix(A, name="A"):
    """Return ``A`` as a 2-D complex128 array, rejecting NaN/Inf entries."""
    M = np.asarray(A, dtype=complex)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    elif M.ndim == 1:
        M = M.reshape(-1, 1)
    if M.ndim != 2:
        raise DomainError(f"{name} must be two-dimensional, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise DomainError(f"{name} has non-finite entries")
    return M


def as_vector(u, name="u"):
    v = np.asarray(u, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise DomainError(f"{name} has non-finite entries")
    return v


def _require_square(A, name="A"):
    if A.shape[0] != A.shape[1]:
        raise DomainError(f"{name} must be square, got shape {A.shape}")


def hermitian_part(A):
    return 0.5 * (A + A.conj().T)


def hermitian_defect(A):
    """Relative 2-norm distance of ``A`` from its adjoint."""
    scale = op_norm_2(A)
    if scale == 0.0:
        return 0.0
    return op_norm_2(A - A.conj().T) / scale


class LUSolver:
    """Partial-pivoting LU factorization with a pivot-floor singularity test.

    Pivots smaller than ``pivot_floor * max|A_ij|`` raise ``SingularMatrix``.
    """

    def __init__(self, A, pivot_floor=TOL.pivot_floor):
        A = as_cmatrix(A)
        _require_square(A)
        self.n = A.shape[0]
        amax = float(np.max(np.abs(A))) if A.size else 0.0
        if amax == 0.0:
            raise SingularMatrix("zero matrix")
        with warnings.catch_warnings():
            # exact zero pivots are reported through SingularMatrix below
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            self.lu, self.piv = sla.lu_factor(A, check_finite=False)
        pivots = np.abs(np.diag(self.lu))
        if pivots.min() < pivot_floor * amax:
            raise SingularMatrix(
                f"pivot {pivots.min():.3e} below floor {pivot_floor * amax:.3e}"
            )
        self._anorm1 = float(np.max(np.sum(np.abs(A), axis=0)))

    def solve(self, B, trans=0):
        """Solve ``A X = B`` (trans=0) or ``A^H X = B`` (trans=2)."""
        return sla.lu_solve((self.lu, self.piv), B, trans=trans, check_finite=False)

    def rcond(self):
        """LAPACK 1-norm reciprocal condition estimate."""
        gecon = sla.get_lapack_funcs("gecon", (self.lu,))
        rc, info = gecon(self.lu, self._anorm1, norm="1")
        return float(rc)


def solve_linear(A, B, pivot_floor=TOL.pivot_floor):
    """Solve ``A X = B`` with LU and partial pivoting."""
    A = as_cmatrix(A)
    _require_square(A)
    Bm = np.asarray(B, dtype=complex)
    if Bm.shape[0] != A.shape[0]:
        raise DomainError(f"B has {Bm.shape[0]} rows, A is {A.shape[0]}x{A.shape[0]}")
    return LUSolver(A, pivot_floor).solve(Bm)


@dataclass(frozen=True)
class HermEig:
    values: np.ndarray  # ascending, real
    vectors: np.ndarray  # unitary, columns are eigenvectors


@dataclass(frozen=True)
class GenEig:
    values: np.ndarray
    vectors: np.ndarray | None
    residuals: np.ndarray | None  # ||Av - lv|| / (||A|| ||v||)


def hermitian_eig(A, herm_tol=TOL.herm_tol):
    """Eigen-decomposition of a Hermitian matrix (symmetrized before factoring)."""
    A = as_cmatrix(A)
    _require_square(A)
    scale = op_norm_2(A)
    if scale > 0 and op_norm_2(A - A.conj().T) > herm_tol * scale:
        raise NotHermitian(
            f"||A - A^H|| = {op_norm_2(A - A.conj().T):.3e} exceeds {herm_tol:.1e}*||A||"
        )
    H = hermitian_part(A)
    if np.all(H.imag == 0):
        H = H.real
    try:
        w, V = sla.eigh(H, check_finite=False)
    except sla.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return HermEig(values=w, vectors=V.astype(complex))


def general_eig(A, vectors=True):
    """Eigenvalues (and right eigenvectors) of a square matrix.

    Real-entried input is handed to the real LAPACK driver so complex
    eigenvalues come out in exact conjugate pairs.  Pairs are sorted by
    (real part, imaginary part) for a deterministic order.
    """
    A = as_cmatrix(A)
    _require_square(A)
    M = A.real if np.all(A.imag == 0) else A
    try:
        if vectors:
            w, V = sla.eig(M, check_finite=False)
        else:
            w = sla.eigvals(M, check_finite=False)
            V = None
    except sla.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    w = np.asarray(w, dtype=complex)
    order = np.lexsort((w.imag, w.real))
    w = w[order]
    if V is None:
        return GenEig(values=w, vectors=None, residuals=None)
    V = np.asarray(V, dtype=complex)[:, order]
    anorm = op_norm_2(A)
    vnorm = np.linalg.norm(V, axis=0)
    res = np.linalg.norm(A @ V - V * w, axis=0)
    denom = np.where(anorm * vnorm > 0, anorm * vnorm, 1.0)
    return GenEig(values=w, vectors=V, residuals=res / denom)


def _apply_scalar(f, x):
    with np.errstate(all="ignore"):
        try:
            y = np.asarray(f(x), dtype=complex)
            if y.shape != x.shape:
                raise ValueError
        except (TypeError, ValueError):
            y = np.array([complex(f(xi)) for xi in x])
    return y


def matfun_hermitian(f, A, herm_tol=TOL.herm_tol):
    """``V diag(f(lambda)) V^H`` for Hermitian ``A``."""
    eig = hermitian_eig(A, herm_tol)
    try:
        fv = _apply_scalar(f, eig.values)
    except (ArithmeticError, ValueError) as exc:
        raise DomainError(f"f undefined on spectrum: {exc}") from exc
    if not np.all(np.isfinite(fv)):
        bad = eig.values[~np.isfinite(fv)]
        raise DomainError(f"f is not finite at eigenvalue(s) {bad[:3]}")
    return (eig.vectors * fv) @ eig.vectors.conj().T


def matfun_from_eig(eig, f):
    """Same as ``matfun_hermitian`` but reuses a precomputed ``HermEig``."""
    fv = _apply_scalar(f, eig.values)
    if not np.all(np.isfinite(fv)):
        raise DomainError("f is not finite on the spectrum")
    return (eig.vectors * fv) @ eig.vectors.conj().T


def op_norm_2(A):
    """Largest singular value (full SVD)."""
    A = np.asarray(A, dtype=complex)
    if A.size == 0:
        return 0.0
    try:
        return float(sla.svdvals(A, check_finite=False)[0])
    except sla.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc


def cond_2(A):
    s = sla.svdvals(as_cmatrix(A), check_finite=False)
    return float(s[0] / s[-1]) if s[-1] > 0 else float("inf")


def linop_norm_2(matvec, rmatvec, n, tol=1e-10, dense_below=64):
    """Largest singular value of a square operator given only by products.

    Uses ARPACK (Lanczos on A^H A) with a fixed start vector so that repeated
    calls are bit-identical.  Small operators are materialized and handed to
    the dense SVD instead.
    """
    if n <= dense_below:
        M = matvec(np.eye(n, dtype=complex))
        return op_norm_2(M)
    op = LinearOperator(
        (n, n),
        matvec=matvec,
        rmatvec=rmatvec,
        matmat=matvec,
        rmatmat=rmatvec,
        dtype=complex,
    )
    v0 = np.ones(n, dtype=complex) / np.sqrt(n)
    try:
        s = svds(op, k=1, tol=tol, v0=v0, return_singular_vectors=False, maxiter=20 * n)
    except ArpackNoConvergence as exc:
        raise NoConvergence(str(exc)) from exc
    return float(s[0])


def pseudo_inverse(A, cutoff=1e-12):
    """Moore-Penrose inverse; singular values below ``cutoff * s_max`` are dropped."""
    if cutoff <= 0:
        raise DomainError("cutoff must be positive")
    A = as_cmatrix(A)
    U, s, Vh = sla.svd(A, full_matrices=False, check_finite=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((A.shape[1], A.shape[0]), dtype=complex)
    keep = s > cutoff * s[0]
    sinv = np.zeros_like(s)
    sinv[keep] = 1.0 / s[keep]
    return (Vh.conj().T * sinv) @ U.conj().T


def range_basis(A, rel_cutoff=1e-8):
    """Orthonormal basis (columns) of ran A, rank decided by a relative SVD cutoff."""
    A = as_cmatrix(A)
    U, s, _ = sla.svd(A, full_matrices=False, check_finite=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    r = int(np.sum(s > rel_cutoff * s[0]))
    return U[:, :r]


def matrix_rank(A, cutoff):
    s = sla.svdvals(as_cmatrix(A), check_finite=False)
    return int(np.sum(s > cutoff))

"""Pure numpy reference implementation of the hot kernels.

``kreinres.kernels`` selects between this module and the compiled
``kreinres._kernels``; both expose the same two functions.
"""
from math import factorial

import numpy as np

LOG_DROP = 50.0
MAX_HALVINGS = 14


def _log_integrand(u, t2, nu):
    return -t2 * np.exp(-u) - 0.25 * np.exp(u) + nu * u


def _log_envelope(u, t, nu):
    # integrand times the largest derivative weight, so G' and G'' tails are kept
    em = np.exp(-u)
    return _log_integrand(u, t * t, nu) + np.log1p(em * (1.0 + t) + t * t * em * em)


def _peak(t, nu):
    r = np.sqrt(nu * nu + t * t)
    return np.log(2.0 * (r + nu) if nu >= 0 else 2.0 * t * t / (r - nu))


def _bessel_one(t, nu, rtol):
    t2 = t * t
    if t == 0.0:  # callers evaluate G at t != 0 only
        return np.full(3, np.nan), False
    u0 = _peak(t, nu)
    # left: the weighted envelope peaks left of u0, so track its running max;
    # right: weights decay, the plain integrand (peak u0) decides
    top = _log_envelope(u0, t, nu)
    lo = u0
    d = 0.5
    while True:
        v = _log_envelope(lo, t, nu)
        top = max(top, v)
        if v <= top - LOG_DROP:
            break
        if lo < u0 - 1e4:  # integrand not decaying (t = 0)
            return np.full(3, np.nan), False
        lo -= d
        d *= 1.5
    F0 = _log_integrand(u0, t2, nu)
    hi = u0
    d = 0.5
    while _log_integrand(hi, t2, nu) > F0 - LOG_DROP:
        hi += d
        d *= 1.5

    def sums(u):
        f = np.exp(_log_integrand(u, t2, nu))
        em = np.exp(-u)
        w1 = -2.0 * t * em
        w2 = 4.0 * t2 * em * em - 2.0 * em
        return np.array([f.sum(), (w1 * f).sum(), (w2 * f).sum()]), \
            np.array([f.sum(), np.abs(w1 * f).sum(), np.abs(w2 * f).sum()])

    n = 64
    h = (hi - lo) / n
    s, a = sums(lo + h * np.arange(n + 1))
    S = s * h
    A = a * h
    for _ in range(MAX_HALVINGS):
        h *= 0.5
        s_mid, a_mid = sums(lo + h * (2 * np.arange(n) + 1))
        S_new = 0.5 * S + h * s_mid
        A = 0.5 * A + h * a_mid
        n *= 2
        if np.all(np.abs(S_new - S) <= rtol * A):
            return S_new, True
        S = S_new
    return S, False


def bessel_table(sigma, t, rtol=1e-10):
    """Unnormalized ``int exp(-t^2/r - r/4) r^{(sigma-1)/2} dr/r`` and its first two t-derivatives.

    Returns ``(values[3, len(t)], ok)`` where ``ok`` is False if some point did
    not converge within the halving budget.
    """
    t = np.abs(np.asarray(t, dtype=float))
    nu = 0.5 * (sigma - 1.0)
    out = np.empty((3, t.size))
    ok = True
    for i, ti in enumerate(t):
        vals, conv = _bessel_one(float(ti), nu, rtol)
        out[:, i] = vals
        ok = ok and conv
    return out, ok


def truncated_exp(k, tau):
    """``E_k(tau) = (i tau)^{-k} (e^{i tau} - sum_{j<k} (i tau)^j / j!)``.

    Power series ``sum_j (i tau)^j / (j+k)!`` for ``|tau| < max(1, k)``, direct
    formula otherwise.
    """
    tau = np.asarray(tau, dtype=complex)
    out = np.empty(tau.shape, dtype=complex)
    small = np.abs(tau) < max(1.0, float(k))
    if np.any(small):
        z = 1j * tau[small]
        term = np.full(z.shape, 1.0 / factorial(k), dtype=complex)
        acc = term.copy()
        j = 0
        while True:
            j += 1
            term = term * z / (j + k)
            acc += term
            if np.all(np.abs(term) <= 1e-17 * np.abs(acc)) or j > 200:
                break
        out[small] = acc
    big = ~small
    if np.any(big):
        z = 1j * tau[big]
        partial = np.zeros(z.shape, dtype=complex)
        term = np.ones(z.shape, dtype=complex)
        for j in range(k):
            partial += term
            term = term * z / (j + 1)
        out[big] = (np.exp(z) - partial) / z ** k
    return out

"""Scalar symbols with analytically supplied derivatives.

A ``SymbolFn`` bundles ``phi, phi', ..., phi^(d)`` as vectorized callables.
Remainder quotients near critical points amplify any differentiation noise,
so derivatives are never produced by finite differences here; the
``consistency_error`` probe only checks the supplied ones.
"""
from math import comb, factorial

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.hermite import hermval
from scipy.special import hyp2f1

from .errors import MissingDerivative


class SymbolFn:
    def __init__(self, derivs, label="", support=None, breakpoints=()):
        if not derivs:
            raise ValueError("at least the value callable is required")
        self.derivs = tuple(derivs)
        self.label = label
        self.support = support  # (a, b) or None for unbounded support
        self.breakpoints = tuple(sorted(breakpoints))

    @property
    def max_order(self):
        return len(self.derivs) - 1

    def __call__(self, x):
        return self.d(0, x)

    def d(self, j, x):
        if j > self.max_order:
            raise MissingDerivative(f"{self.label or 'symbol'}: derivative of order {j} not supplied")
        x = np.asarray(x)
        if not np.iscomplexobj(x):
            x = x.astype(float)
        with np.errstate(all="ignore"):
            return np.asarray(self.derivs[j](x), dtype=complex) * np.ones_like(x)

    def consistency_error(self, grid, h=1e-5):
        """Max relative mismatch between central differences and supplied derivatives."""
        grid = np.asarray(grid, dtype=float)
        worst = 0.0
        for j in range(self.max_order):
            fd = (self.d(j, grid + h) - self.d(j, grid - h)) / (2 * h)
            ex = self.d(j + 1, grid)
            scale = max(1.0, float(np.max(np.abs(ex))))
            worst = max(worst, float(np.max(np.abs(fd - ex))) / scale)
        return worst

    def conj(self):
        """``x -> conj(phi(x))`` on the real line."""
        return SymbolFn(
            [lambda x, f=f: np.conj(f(x)) for f in self.derivs],
            label=f"conj({self.label})",
            support=self.support,
            breakpoints=self.breakpoints,
        )

    def __mul__(self, other):
        if not isinstance(other, SymbolFn):
            c = complex(other)
            return SymbolFn([lambda x, f=f: c * f(x) for f in self.derivs], self.label,
                            self.support, self.breakpoints)
        order = min(self.max_order, other.max_order)

        def leibniz(j):
            return lambda x: sum(comb(j, i) * self.d(i, x) * other.d(j - i, x) for i in range(j + 1))

        supp = _intersect(self.support, other.support)
        return SymbolFn([leibniz(j) for j in range(order + 1)], f"{self.label}*{other.label}",
                        supp, self.breakpoints + other.breakpoints)

    __rmul__ = __mul__

    def __add__(self, other):
        order = min(self.max_order, other.max_order)
        return SymbolFn(
            [lambda x, j=j: self.d(j, x) + other.d(j, x) for j in range(order + 1)],
            f"{self.label}+{other.label}",
            _union(self.support, other.support),
            self.breakpoints + other.breakpoints,
        )


def _intersect(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return (max(a[0], b[0]), min(a[1], b[1]))


def _union(a, b):
    if a is None or b is None:
        return None
    return (min(a[0], b[0]), max(a[1], b[1]))


def constant(c):
    c = complex(c)
    return SymbolFn([lambda x: np.full_like(x, c, dtype=complex)] + [np.zeros_like] * 8,
                    label=f"const({c})")


def polynomial(coeffs, label=None):
    """Polynomial with ascending coefficients ``c0 + c1 x + ...``."""
    P = Polynomial(np.asarray(coeffs, dtype=complex))
    derivs = [P]
    for _ in range(max(len(coeffs), 1) + 2):
        derivs.append(derivs[-1].deriv())
    return SymbolFn(derivs, label or f"poly{list(coeffs)}")


def exp_itx(t, order=6):
    t = float(t)
    return SymbolFn([lambda x, j=j: (1j * t) ** j * np.exp(1j * t * x) for j in range(order + 1)],
                    label=f"exp(i{t}x)")


def sin_scaled(N, order=6):
    """``sin(N x)`` and its derivatives."""
    N = float(N)
    return SymbolFn([lambda x, j=j: N ** j * np.sin(N * x + j * np.pi / 2) for j in range(order + 1)],
                    label=f"sin({N}x)")


def cos_scaled(N, order=6):
    N = float(N)
    return SymbolFn([lambda x, j=j: N ** j * np.cos(N * x + j * np.pi / 2) for j in range(order + 1)],
                    label=f"cos({N}x)")


def resolvent_symbol(z, order=6):
    """``(x - z)^{-1}``."""
    z = complex(z)
    return SymbolFn(
        [lambda x, j=j: (-1) ** j * factorial(j) * (x - z) ** (-j - 1) for j in range(order + 1)],
        label=f"1/(x-{z})",
    )


def gaussian(center=0.0, width=1.0, order=6):
    """``exp(-((x - c)/w)^2)`` with Hermite-polynomial derivatives."""
    c, w = float(center), float(width)

    def deriv(j):
        coef = np.zeros(j + 1)
        coef[j] = 1.0

        def f(x):
            u = (x - c) / w
            return (-1) ** j * hermval(u, coef) * np.exp(-u * u) / w ** j

        return f

    return SymbolFn([deriv(j) for j in range(order + 1)], label=f"gauss({c},{w})")


def japanese(s, order=4):
    """``<x>^s = (1 + x^2)^{s/2}``.

    Derivatives are sums of terms ``c x^p (1+x^2)^q``; differentiating a term
    gives ``c p x^{p-1} (1+x^2)^q + 2 c q x^{p+1} (1+x^2)^{q-1}``.
    """
    terms = [{(0, 0.5 * s): 1.0}]
    for _ in range(order):
        nxt = {}
        for (p, q), c in terms[-1].items():
            if p > 0:
                nxt[(p - 1, q)] = nxt.get((p - 1, q), 0.0) + c * p
            nxt[(p + 1, q - 1)] = nxt.get((p + 1, q - 1), 0.0) + 2.0 * c * q
        terms.append(nxt)

    def make(tl):
        return lambda x: sum(c * x ** p * (1.0 + x * x) ** q for (p, q), c in tl.items())

    return SymbolFn([make(tl) for tl in terms], label=f"<x>^{s}")


def smoothstep_poly(r):
    """Polynomial ``S`` on [0,1] with ``S(0)=0``, ``S(1)=1`` and ``r`` vanishing derivatives at both ends."""
    base = Polynomial([0.0, 1.0]) ** r * Polynomial([1.0, -1.0]) ** r
    S = base.integ()
    return S / S(1.0)


def plateau_bump(c1, d1, d2, c2, r=2, order=None):
    """``C^r`` piecewise polynomial: 0 outside (c1,c2), 1 on [d1,d2]."""
    if not c1 < d1 <= d2 < c2:
        raise ValueError("need c1 < d1 <= d2 < c2")
    S = smoothstep_poly(r)
    rise = S(Polynomial([-c1, 1.0]) / (d1 - c1))
    fall = S(Polynomial([c2, -1.0]) / (c2 - d2))
    order = 2 * r + 1 if order is None else order

    def deriv(j):
        pr = rise.deriv(j) if j else rise
        pf = fall.deriv(j) if j else fall
        one = 1.0 if j == 0 else 0.0

        def f(x):
            x = np.asarray(x, dtype=float)
            out = np.zeros_like(x)
            m1 = (x > c1) & (x < d1)
            m2 = (x >= d1) & (x <= d2)
            m3 = (x > d2) & (x < c2)
            out[m1] = pr(x[m1])
            out[m2] = one
            out[m3] = pf(x[m3])
            return out

        return f

    return SymbolFn([deriv(j) for j in range(order + 1)], label=f"bump({c1},{d1},{d2},{c2})",
                    support=(c1, c2), breakpoints=(c1, d1, d2, c2))


def hyp_primitive(s, order=3):
    """``f(t) = t 2F1(1/2, s; 3/2; -t^2)``, the odd primitive of ``<t>^{-2s}``."""
    js = japanese(-2.0 * s, order=max(order - 1, 0))
    derivs = [lambda x: x * hyp2f1(0.5, s, 1.5, -x * x)]
    derivs += list(js.derivs[: order])
    return SymbolFn(derivs, label=f"F_{s}")

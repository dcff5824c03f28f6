import numpy as np
import pytest

from kreinres.errors import MissingDerivative
from kreinres.symbols import (
    SymbolFn,
    constant,
    cos_scaled,
    exp_itx,
    gaussian,
    hyp_primitive,
    japanese,
    plateau_bump,
    polynomial,
    resolvent_symbol,
    sin_scaled,
    smoothstep_poly,
)

GRID = np.linspace(-3.0, 3.0, 61) + 0.013


@pytest.mark.parametrize("sym", [
    polynomial([1.0, -2.0, 0.5, 3.0]),
    exp_itx(1.3),
    sin_scaled(4.0),
    cos_scaled(2.0),
    resolvent_symbol(0.4 + 0.7j),
    gaussian(0.5, 0.8),
    japanese(-1.0),
    japanese(0.7),
    hyp_primitive(0.6),
    constant(2.0),
], ids=lambda s: s.label)
def test_supplied_derivatives_consistent(sym):
    assert sym.consistency_error(GRID) < 1e-6


def test_bump_shape():
    f = plateau_bump(0.0, 1.0, 2.0, 3.0, r=2)
    x = np.array([-1.0, 0.0, 1.0, 1.5, 2.0, 3.0, 4.0])
    np.testing.assert_allclose(f(x).real, [0, 0, 1, 1, 1, 0, 0])
    grid = np.linspace(0.05, 2.95, 200)
    assert f.consistency_error(grid) < 1e-4
    S = smoothstep_poly(3)
    assert S(0.0) == 0 and S(1.0) == pytest.approx(1)
    for j in (1, 2, 3):
        assert abs(S.deriv(j)(0.0)) < 1e-12 and abs(S.deriv(j)(1.0)) < 1e-12


def test_algebra():
    p = polynomial([0.0, 1.0])
    q = exp_itx(0.5)
    prod = p * q
    assert prod.consistency_error(GRID) < 1e-6
    np.testing.assert_allclose(prod(GRID), GRID * np.exp(0.5j * GRID))
    s = p + q
    np.testing.assert_allclose(s.d(1, GRID), 1 + 0.5j * np.exp(0.5j * GRID))
    np.testing.assert_allclose(q.conj()(GRID), np.exp(-0.5j * GRID))


def test_missing_derivative():
    f = SymbolFn([np.sin], "sin")
    with pytest.raises(MissingDerivative):
        f.d(1, 0.0)

"""Model builders: the 1D lattice charged Klein-Gordon operator with its
dilation-type conjugate operator, and small Krein fixtures."""
from dataclasses import dataclass, field

import numpy as np

from .errors import SpecInvalid
from .kgoperators import PencilModel
from .kreinspace import KreinStructure, charge_gram
from .numkernel import hermitian_defect, matfun_hermitian, op_norm_2
from .symbols import plateau_bump

KINDS = ("lattice_kg_1d", "explicit", "fixture")


@dataclass
class ModelSpec:
    kind: str = "lattice_kg_1d"
    n: int = 200
    L: float = 60.0
    mass: float = 1.0
    potential: list = field(default_factory=list)  # [{"amplitude", "center", "width"}]
    boundary: str = "dirichlet"
    conjugate: dict = field(default_factory=lambda: {"f_support": [0.2, 3.0],
                                                     "f_plateau": [0.5, 2.5]})
    h: list = None  # explicit models
    k: list = None
    name: str = None  # fixture name

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecInvalid(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "lattice_kg_1d":
            if int(self.n) != self.n or self.n < 8:
                raise SpecInvalid("n must be an integer >= 8")
            if not self.L > 0:
                raise SpecInvalid("L must be positive")
            if self.mass < 0:
                raise SpecInvalid("mass must be non-negative")
            if self.boundary != "dirichlet":
                raise SpecInvalid("only dirichlet boundaries are supported")
            try:
                c1, c2 = map(float, self.conjugate["f_support"])
                d1, d2 = map(float, self.conjugate["f_plateau"])
            except (KeyError, TypeError, ValueError) as exc:
                raise SpecInvalid(f"conjugate needs f_support and f_plateau pairs: {exc}") from exc
            if not 0 < c1 < d1 < d2 < c2:
                raise SpecInvalid("need 0 < c1 < d1 < d2 < c2 for the conjugate cutoff")
            for p in self.potential:
                if set(p) != {"amplitude", "center", "width"} or not float(p["width"]) > 0:
                    raise SpecInvalid(f"bad potential entry {p!r}")
        elif self.kind == "explicit":
            if self.h is None or self.k is None:
                raise SpecInvalid("explicit models need h and k")
        elif self.name not in FIXTURES:
            raise SpecInvalid(f"unknown fixture {self.name!r}; known: {sorted(FIXTURES)}")

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise SpecInvalid(f"unknown model keys {sorted(extra)}")
        return cls(**d)


@dataclass(frozen=True)
class LatticeModel:
    model: PencilModel
    a: np.ndarray  # conjugate operator on the component space
    x: np.ndarray
    p: np.ndarray
    f_abs_p: np.ndarray
    spec: ModelSpec


def lattice_grid(n, L):
    dx = L / (n + 1)
    return dx, dx * np.arange(1, n + 1)


def dirichlet_laplacian(n, dx):
    return (np.diag(-2.0 * np.ones(n)) + np.diag(np.ones(n - 1), 1)
            + np.diag(np.ones(n - 1), -1)) / dx ** 2


def centered_momentum(n, dx):
    """``p = -i D`` with the antisymmetric centered difference ``D``."""
    D = (np.diag(np.ones(n - 1), 1) - np.diag(np.ones(n - 1), -1)) / (2.0 * dx)
    return -1j * D


def potential_values(spec, x):
    v = np.zeros_like(x)
    for p in spec.potential:
        v += float(p["amplitude"]) * np.exp(-((x - float(p["center"])) / float(p["width"])) ** 2)
    return v


def build_lattice_kg_1d(spec):
    """``h = -Delta + m^2 - v^2``, ``k = v`` and ``a = (f(|p|) p X + X p f(|p|))/2``."""
    if spec.kind != "lattice_kg_1d":
        raise SpecInvalid("build_lattice_kg_1d needs kind 'lattice_kg_1d'")
    n, L = int(spec.n), float(spec.L)
    dx, x = lattice_grid(n, L)
    v = potential_values(spec, x)
    h = -dirichlet_laplacian(n, dx) + spec.mass ** 2 * np.eye(n) - np.diag(v * v)
    k = np.diag(v)
    p = centered_momentum(n, dx)
    c1, c2 = spec.conjugate["f_support"]
    d1, d2 = spec.conjugate["f_plateau"]
    f = plateau_bump(c1, d1, d2, c2, r=2)
    fp = matfun_hermitian(lambda s: f(np.abs(s)).real, p)
    X = np.diag(x)
    a = 0.5 * (fp @ p @ X + X @ p @ fp)
    if hermitian_defect(a) > 1e-12:
        raise SpecInvalid("conjugate operator is not Hermitian")
    a = 0.5 * (a + a.conj().T)
    label = f"lattice_kg_1d(n={n},L={L},m={spec.mass})"
    return LatticeModel(PencilModel(h, k, label), a, x, p, fp, spec)


def conjugate_identity_residual(lm):
    """``||[eps, ia] - f(|p|) p^2 eps^{-1}||`` relative to the first term (informational)."""
    m = lm.model
    eps = m.eps
    lhs = 1j * (eps @ lm.a - lm.a @ eps)
    einv = np.linalg.inv(eps)
    rhs = lm.f_abs_p @ lm.p @ lm.p @ einv
    return op_norm_2(lhs - rhs) / max(1e-300, op_norm_2(lhs))


def free_companion(lm):
    """The same lattice model with the potential switched off (``k = 0``, same ``h0``)."""
    m = lm.model
    return PencilModel(m.h0, np.zeros_like(m.k), m.label + "[k=0]")


# ---------------------------------------------------------------- fixtures


def fixture_negative_h():
    """``h = [-1]``, ``k = 0``: ``K = [[0, 1], [-1, 0]]`` with eigenvalues ``+-i``."""
    return PencilModel(np.array([[-1.0]]), np.array([[0.0]]), "h=[-1]")


def fixture_jordan():
    """Krein-selfadjoint Jordan block: ``J = [[0,1],[1,0]]``, ``H = [[0,1],[0,0]]``."""
    return KreinStructure(np.array([[0.0, 1.0], [1.0, 0.0]])), np.array([[0.0, 1.0], [0.0, 0.0]],
                                                                        dtype=complex)


def fixture_pm_i():
    """``K = [[0,1],[-1,0]]`` in the charge structure: nonreal pair ``+-i``."""
    return KreinStructure(charge_gram(1)), np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)


def fixture_pauli_like():
    """``S = sigma_x`` with the generator ``a = (1 + sigma_z)/2 = diag(1, 0)``.

    With ``a = sigma_z`` itself every even function of ``eps a`` is a scalar,
    so ``[<eps a>^{-s}, S]`` vanishes identically; the shifted generator keeps
    the 2x2 Pauli structure while making that commutator non-trivial.
    """
    S = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    a = np.diag([1.0, 0.0]).astype(complex)
    return S, a


def random_krein_selfadjoint(rng, n, indefinite=True):
    """Random ``(ks, H)`` with ``J = diag(+-1)`` and ``H = J^{-1} X``, ``X`` Hermitian."""
    if indefinite and n >= 2:
        p = int(rng.integers(1, n))
        signs = np.concatenate([np.ones(p), -np.ones(n - p)])
    else:
        signs = np.ones(n)
    J = np.diag(signs)
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    X = X + X.conj().T
    return KreinStructure(J), J @ X


FIXTURES = {
    "negative_h": fixture_negative_h,
    "jordan": fixture_jordan,
    "pm_i": fixture_pm_i,
    "pauli_like": fixture_pauli_like,
}


def build_model(spec):
    """``PencilModel`` (plus conjugate operator when available) from a ``ModelSpec``."""
    if spec.kind == "lattice_kg_1d":
        lm = build_lattice_kg_1d(spec)
        return lm.model, lm.a
    if spec.kind == "explicit":
        return PencilModel(np.asarray(spec.h, dtype=complex), np.asarray(spec.k, dtype=complex),
                           "explicit"), None
    if spec.name == "negative_h":
        return fixture_negative_h(), None
    raise SpecInvalid(f"fixture {spec.name!r} is not a pencil model")

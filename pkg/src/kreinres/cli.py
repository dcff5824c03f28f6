"""Command-line harness.

``kreinres <command> --config path [--out dir] [--threads N] [--strict]``

The config is one JSON document with top-level keys ``model``, ``run`` and
``output``.  Every command writes ``<prefix>.json`` with the keys
``params, rows_file, fits, assertions, details``; ``spectrum`` and ``sweep``
also write ``<prefix>.csv``.  Exit status: 0 when every assertion passes,
2 when one fails (or the computation raises), 1 on a configuration error.
"""
import argparse
import json
import math
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, KreinresError, SpecInvalid

COMMANDS = ("spectrum", "sweep", "mourre", "virial", "putnam", "calculus", "definitize",
            "bessel", "commutator")
TOP_KEYS = ("model", "run", "output")


# ---------------------------------------------------------------- config


class Config:
    """Parsed config plus the source text, for line-number diagnostics."""

    def __init__(self, path):
        self.path = str(path)
        try:
            self.text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
        try:
            data = json.loads(self.text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}:1: top level must be a JSON object")
        extra = sorted(set(data) - set(TOP_KEYS))
        if extra:
            self.fail(extra[0], f"unknown top-level key (allowed: {', '.join(TOP_KEYS)})")
        for key in TOP_KEYS:
            if key in data and not isinstance(data[key], dict):
                self.fail(key, "must be a JSON object")
        self.model = data.get("model")
        self.run = data.get("run", {})
        self.output = data.get("output", {})

    def line_of(self, dotted):
        pos = 0
        for part in dotted.split("."):
            hit = self.text.find(f'"{part}"', pos)
            if hit < 0:
                break
            pos = hit
        return self.text.count("\n", 0, pos) + 1

    def fail(self, dotted, msg):
        raise ConfigError(f"{self.path}:{self.line_of(dotted)}: {dotted}: {msg}")


def _coerce(cfg, key, value, default):
    where = f"run.{key}"
    if default is None or value is None:
        return value
    try:
        if isinstance(default, bool):
            if not isinstance(value, bool):
                raise TypeError
            return value
        if isinstance(default, int):
            if isinstance(value, bool) or int(value) != value:
                raise TypeError
            return int(value)
        if isinstance(default, float):
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        if isinstance(default, (list, tuple)):
            if not isinstance(value, list):
                raise TypeError
            return value
        if isinstance(default, dict):
            if not isinstance(value, dict):
                raise TypeError
            return value
    except (TypeError, ValueError):
        cfg.fail(where, f"expected {type(default).__name__}, got {value!r}")
    return value


def run_params(cfg, defaults, required=()):
    extra = sorted(set(cfg.run) - set(defaults))
    if extra:
        cfg.fail(f"run.{extra[0]}", f"unknown run key (allowed: {', '.join(sorted(defaults))})")
    out = {}
    for key, default in defaults.items():
        out[key] = _coerce(cfg, key, cfg.run.get(key, default), default)
    for key in required:
        if out.get(key) is None:
            raise ConfigError(f"{cfg.path}:{cfg.line_of('run')}: run.{key}: required")
    return out


def _window(cfg, key, w):
    try:
        lo, hi = (float(x) for x in w)
    except (TypeError, ValueError):
        cfg.fail(f"run.{key}", "expected a pair [lo, hi]")
    if not lo < hi:
        cfg.fail(f"run.{key}", "need lo < hi")
    return lo, hi


def _matrix(cfg, key, M, n):
    try:
        A = np.asarray(M, dtype=complex)
    except (TypeError, ValueError):
        cfg.fail(f"run.{key}", "expected a square matrix (nested lists)")
    if A.shape != (n, n):
        cfg.fail(f"run.{key}", f"expected shape {(n, n)}, got {A.shape}")
    return A


def load_model(cfg, allow_structures=False):
    """``(kind, payload)``: ``("pencil", (model, a, lattice))`` or ``("structure", (ks, H))``."""
    from .models import (
        ModelSpec,
        build_lattice_kg_1d,
        build_model,
        fixture_jordan,
        fixture_pm_i,
    )

    if cfg.model is None:
        raise ConfigError(f"{cfg.path}:1: model: required for this command")
    d = dict(cfg.model)
    if allow_structures and d.get("kind") == "fixture" and d.get("name") in ("jordan", "pm_i"):
        if set(d) - {"kind", "name"}:
            cfg.fail("model", "fixture models take only kind and name")
        return "structure", (fixture_jordan() if d["name"] == "jordan" else fixture_pm_i())
    try:
        spec = ModelSpec.from_dict(d)
        if spec.kind == "lattice_kg_1d":
            lm = build_lattice_kg_1d(spec)
            return "pencil", (lm.model, lm.a, lm)
        model, a = build_model(spec)
    except SpecInvalid as exc:
        raise ConfigError(f"{cfg.path}:{cfg.line_of('model')}: model: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{cfg.path}:{cfg.line_of('model')}: model: {exc}") from exc
    return "pencil", (model, a, None)


def load_pencil(cfg):
    return load_model(cfg)[1]


# ---------------------------------------------------------------- reporting


def _plain(x):
    """JSON-safe, deterministic conversion (non-finite floats become strings)."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_plain(float(x.real)), _plain(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def fmt17(x):
    return format(float(x), ".17g")


class Report:
    def __init__(self, params):
        self.params = params
        self.fits = {}
        self.details = {}
        self.assertions = []
        self.rows_file = None
        self.rows = None
        self.header = None

    def check(self, name, passed, value, threshold):
        self.assertions.append({"name": name, "pass": bool(passed), "value": value,
                                "threshold": threshold})

    @property
    def passed(self):
        return all(a["pass"] for a in self.assertions)

    def write(self, out_dir, prefix):
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        if self.rows is not None:
            self.rows_file = f"{prefix}.csv"
            lines = [",".join(self.header)]
            for r in self.rows:
                lines.append(",".join(fmt17(v) if isinstance(v, (float, np.floating)) else str(v)
                                      for v in r))
            (out_dir / self.rows_file).write_text("\n".join(lines) + "\n")
        doc = {"params": self.params, "rows_file": self.rows_file, "fits": self.fits,
               "assertions": self.assertions, "details": self.details}
        text = json.dumps(_plain(doc), indent=2, sort_keys=True, allow_nan=False)
        (out_dir / f"{prefix}.json").write_text(text + "\n")


# ---------------------------------------------------------------- commands


def cmd_spectrum(cfg, ctx):
    from .kgoperators import assemble_K, charge_structure
    from .numkernel import general_eig

    p = run_params(cfg, {"tol": 1e-8})
    model, _, _ = load_pencil(cfg)
    K = assemble_K(model)
    ks = charge_structure(model)
    ge = general_eig(K)
    lam = ge.values
    rep = Report({"command": "spectrum", "model": cfg.model, **p})
    rows, neut, real_count = [], 0.0, 0
    for lv, u in zip(lam, ge.vectors.T):
        u = u / np.linalg.norm(u)
        q = ks.form(u, u).real
        real = abs(lv.imag) <= 1e-10 * max(1.0, abs(lv))
        if not real:
            neut = max(neut, abs(ks.form(u, u)))
        real_count += real
        rows.append((float(lv.real), float(lv.imag), float(q), "real" if real else "nonreal"))
    rep.header = ("re_lambda", "im_lambda", "krein_square", "kind")
    rep.rows = rows
    sym = max(float(np.min(np.abs(np.conj(x) - lam))) / max(1.0, abs(x)) for x in lam)
    rep.details = {"n_eigenvalues": len(lam), "n_real": int(real_count),
                   "n_nonreal": int(len(lam) - real_count)}
    rep.check("conjugation_symmetry", sym <= p["tol"], sym, p["tol"])
    rep.check("nonreal_neutrality", neut <= p["tol"], neut, p["tol"])
    return rep


def _sweep_once(model, a, p, threads):
    from .mourrelap import lap_sweep

    return lap_sweep(model, p["theta"], a, p["s"], p["eps"], p["window"], nu=p["nu"],
                     mu_lo=p["mu_lo"], threads=threads, norm_tol=p["norm_tol"],
                     mu_per_decade=p["mu_per_decade"], lambda_per_unit=p["lambda_per_unit"])


def cmd_sweep(cfg, ctx):
    from .models import build_lattice_kg_1d

    defaults = {"theta": 0.25, "s": 0.7, "eps": 1.0, "window": None, "nu": 0.5, "mu_lo": 0.0,
                "mu_per_decade": 20, "lambda_per_unit": 25, "norm_tol": 1e-10,
                "gates": {}, "check_doubling": False, "doubling_tol": 0.1, "conjugate": None}
    p = run_params(cfg, defaults, required=("window",))
    p["window"] = _window(cfg, "window", p["window"])
    if not 0.0 <= p["theta"] <= 0.5:
        cfg.fail("run.theta", "must lie in [0, 1/2]")
    if p["eps"] <= 0 or p["nu"] <= 0 or p["s"] <= 0:
        cfg.fail("run", "eps, nu and s must be positive")
    p["mu_lo"] = p["mu_lo"] if p["mu_lo"] and p["mu_lo"] > 0 else None
    gate_keys = {"weighted_max", "unweighted_min", "r2_min"}
    if set(p["gates"]) - gate_keys:
        cfg.fail("run.gates", f"allowed keys: {sorted(gate_keys)}")
    model, a, lm = load_pencil(cfg)
    if p["conjugate"] is not None:
        a = _matrix(cfg, "conjugate", p["conjugate"], model.n)
    elif a is None:
        a = np.zeros((model.n, model.n))
    flags = []
    if p["s"] <= 0.5:
        warnings.warn("s <= 1/2: outside the range where the weighted bound is expected",
                      stacklevel=2)
        flags.append("s_le_half")
    threads = ctx["threads"]
    rep_sweep = _sweep_once(model, a, p, threads)
    params = {"command": "sweep", "model": cfg.model,
              **{k: v for k, v in p.items() if k != "conjugate"},
              "conjugate_given": p["conjugate"] is not None, "flags": flags,
              "level_spacing": rep_sweep.level_spacing, "grid": rep_sweep.params}
    rep = Report(params)
    rep.header = ("re_z", "im_z", "weighted_norm", "unweighted_norm", "flag")
    rep.rows = rep_sweep.rows
    f = rep_sweep.fits
    rep.fits = {"weighted_slope": f["weighted_slope"], "unweighted_slope": f["unweighted_slope"],
                "r2": f["r2"], "r2_weighted": f["r2_weighted"],
                "r2_unweighted": f["r2_unweighted"]}
    rep.details = {"weight_norm": rep_sweep.weight_norm,
                   "sup_weighted": rep_sweep.sup_weighted, "sup_unweighted": rep_sweep.sup_unweighted}
    hits = sum(1 for r in rep_sweep.rows if r[4])
    bad = sum(1 for r in rep_sweep.rows if not r[4] and not (np.isfinite(r[2]) and np.isfinite(r[3])))
    rep.details["spectrum_hits"] = hits
    rep.check("finite_norms", bad == 0, bad, 0)
    rep.check("submultiplicativity", rep_sweep.submult_ratio <= 1 + 1e-8,
              rep_sweep.submult_ratio, 1.0)
    g = p["gates"]
    if "weighted_max" in g:
        rep.check("weighted_slope_max", f["weighted_slope"] <= g["weighted_max"],
                  f["weighted_slope"], g["weighted_max"])
    if "unweighted_min" in g:
        rep.check("unweighted_slope_min", f["unweighted_slope"] >= g["unweighted_min"],
                  f["unweighted_slope"], g["unweighted_min"])
    if "r2_min" in g:
        rep.check("r2_min", f["r2"] >= g["r2_min"], f["r2"], g["r2_min"])
    if p["check_doubling"] or ctx["strict"]:
        if lm is None:
            cfg.fail("model", "the n-doubling check needs a lattice_kg_1d model")
        lm2 = build_lattice_kg_1d(replace(lm.spec, n=2 * lm.spec.n))
        r2 = _sweep_once(lm2.model, lm2.a, p, threads)
        dw = abs(r2.fits["weighted_slope"] - f["weighted_slope"])
        du = abs(r2.fits["unweighted_slope"] - f["unweighted_slope"])
        rep.fits["doubled"] = {"n": lm2.spec.n, "weighted_slope": r2.fits["weighted_slope"],
                               "unweighted_slope": r2.fits["unweighted_slope"],
                               "r2": r2.fits["r2"], "max_change": max(dw, du)}
        if ctx["strict"]:
            rep.check("n_doubling_stability", max(dw, du) <= p["doubling_tol"], max(dw, du),
                      p["doubling_tol"])
    return rep


def _lattice_structures(model, a):
    from .kgoperators import assemble_K, charge_structure

    return charge_structure(model), assemble_K(model), np.kron(np.eye(2), a)


def cmd_mourre(cfg, ctx):
    from .models import conjugate_identity_residual, free_companion
    from .mourrelap import mourre_check
    from .symbols import plateau_bump

    p = run_params(cfg, {"window": None, "phi_support": None, "rank_budget": 1, "free": False,
                         "conjugate": None, "tol": 1e-10}, required=("window",))
    lo, hi = _window(cfg, "window", p["window"])
    c1, c2 = (lo - 0.05, hi + 0.05) if p["phi_support"] is None else \
        _window(cfg, "phi_support", p["phi_support"])
    if not c1 < lo < hi < c2:
        cfg.fail("run.phi_support", "must strictly contain the window")
    model, a, lm = load_pencil(cfg)
    if p["conjugate"] is not None:
        a = _matrix(cfg, "conjugate", p["conjugate"], model.n)
    if a is None:
        cfg.fail("run.conjugate", "required for models without a built-in conjugate operator")
    if p["free"]:
        if lm is None:
            cfg.fail("run.free", "needs a lattice_kg_1d model")
        model = free_companion(lm)
    ks, K, A = _lattice_structures(model, a)
    r = mourre_check(ks, K, A, plateau_bump(c1, lo, hi, c2), (lo, hi), p["rank_budget"], p["tol"])
    rep = Report({"command": "mourre", "model": cfg.model, **{k: v for k, v in p.items()
                                                             if k != "conjugate"},
                  "phi_support": [c1, c2]})
    rep.details = {"margin": r.margin, "raw_margin": r.raw_margin,
                   "compact_correction_norm": r.compact_correction_norm,
                   "correction_rank": r.correction_rank,
                   "eigenvalues_in_window": r.eigenvalues_in_window,
                   "lowest_generalized_eigenvalues": r.generalized_eigenvalues[:5],
                   "degenerate": r.degenerate}
    if lm is not None:
        rep.details["conjugate_identity_residual"] = conjugate_identity_residual(lm)
    rep.check("mourre_margin", r.passed, r.margin, p["tol"])
    return rep


def cmd_virial(cfg, ctx):
    from .mourrelap import virial_check

    p = run_params(cfg, {"tol": 1e-8, "conjugate": None})
    model, a, _ = load_pencil(cfg)
    if p["conjugate"] is not None:
        a = _matrix(cfg, "conjugate", p["conjugate"], model.n)
    elif a is None:
        a = np.zeros((model.n, model.n))
    ks, K, A = _lattice_structures(model, a)
    r = virial_check(ks, K, A, tol=p["tol"])
    rep = Report({"command": "virial", "model": cfg.model, "tol": p["tol"]})
    rep.details = {"rows": [{"lambda": row.eigenvalue, "kind": row.kind, "value": row.value}
                            for row in r.rows]}
    rep.check("real_eigenvector_virial", r.max_virial <= p["tol"], r.max_virial, p["tol"])
    rep.check("nonreal_neutrality", r.max_neutrality <= p["tol"], r.max_neutrality, p["tol"])
    return rep


def _z_grid(lo, hi, n_re, n_im, im_range):
    ims = np.geomspace(im_range[0], im_range[1], n_im)
    return np.array([complex(x, y) for x in np.linspace(lo, hi, n_re) for y in ims])


def cmd_putnam(cfg, ctx):
    from .kgoperators import PencilModel, assemble_K, charge_structure
    from .models import dirichlet_laplacian
    from .mourrelap import (
        krein_putnam_instance,
        putnam_bound_hilbert,
        putnam_bound_krein,
        rank_one_putnam_instance,
    )
    from .speccalc import spectral_projections

    p = run_params(cfg, {"seed": 0, "hilbert_instances": 50, "n_min": 3, "n_max": 11,
                         "grid_re": 10, "grid_im": 10, "im_range": [0.05, 2.0],
                         "krein_instances": 20, "krein_n": 4, "stability_max": 5.0})
    im_range = _window(cfg, "im_range", p["im_range"])
    if im_range[0] <= 0:
        cfg.fail("run.im_range", "must be positive")
    rng = np.random.default_rng(p["seed"])
    ratios, iratios, modes = [], [], set()
    for _ in range(p["hilbert_instances"]):
        n = int(rng.integers(p["n_min"], p["n_max"] + 1))
        X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        H = X + X.conj().T
        Y = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        B = 0.5 * (Y + Y.conj().T)
        lam = np.linalg.eigvalsh(H)
        zs = _z_grid(lam[0] - 1, lam[-1] + 1, p["grid_re"], p["grid_im"], im_range)
        C = rank_one_putnam_instance(H, B, zs)
        r = putnam_bound_hilbert(H, B, C, zs)
        ratios.append(r.max_ratio)
        iratios.append(r.imag_max / r.imag_bound if r.imag_bound > 0 else 0.0)
        modes.add(r.hypothesis_mode)
    cs = []
    if p["krein_instances"]:
        n = p["krein_n"]
        m = PencilModel(-dirichlet_laplacian(n, 1.0) + np.eye(n), np.zeros((n, n)), "putnam")
        K, ks, Pi = assemble_K(m), charge_structure(m), spectral_projections(m, +1)
        lam = np.linalg.eigvals(K).real
        zs = _z_grid(lam.min() - 1, lam.max() + 1, p["grid_re"], p["grid_im"], im_range)
        for _ in range(p["krein_instances"]):
            B, C = krein_putnam_instance(ks, K, Pi, np.linspace(-1, 1, n), rng, zs)
            r = putnam_bound_krein(ks, K, Pi, B, C, np.concatenate([zs, zs.conj()]))
            cs.append(r.max_ratio)
    rep = Report({"command": "putnam", **p})
    rep.details = {"hilbert_ratios": ratios, "imag_ratios": iratios,
                   "hypothesis_modes": sorted(modes), "krein_c": cs}
    if ratios:
        rep.check("factor_two_bound", max(ratios) <= 1.0, max(ratios), 1.0)
        rep.check("imaginary_part_bound", max(iratios) <= 1.0, max(iratios), 1.0)
    if cs:
        stab = max(cs) / float(np.median(cs)) if np.median(cs) > 0 else float("inf")
        rep.fits = {"krein_c_max": max(cs), "krein_c_median": float(np.median(cs))}
        rep.check("krein_c_stability", stab <= p["stability_max"], stab, p["stability_max"])
    return rep


def calculus_family(rng, n_poly=4, max_degree=6, resolvent_z=(), gaussians=()):
    from .symbols import gaussian, polynomial, resolvent_symbol

    fam = []
    for _ in range(n_poly):
        deg = int(rng.integers(0, max_degree + 1))
        fam.append(polynomial(rng.normal(size=deg + 1) / (1.0 + np.arange(deg + 1)) ** 2))
    fam += [resolvent_symbol(complex(*z)) for z in resolvent_z]
    fam += [gaussian(c, w) for c, w in gaussians]
    return fam


def cmd_calculus(cfg, ctx):
    from .kgoperators import PencilModel, assemble_K, charge_structure, ktheta_opnorm
    from .kreinspace import is_krein_positive, positive_projection_check
    from .models import free_companion
    from .numkernel import op_norm_2
    from .speccalc import (
        eig_calculus,
        free_calculus,
        lambda_theta_norm,
        norm_bound_check,
        spectral_projections,
    )
    from .symbols import exp_itx

    p = run_params(cfg, {"seed": 0, "n_poly": 4, "max_degree": 6,
                         "resolvent_z": [[0.5, 1.0], [2.0, -0.5]],
                         "gaussians": [[0.0, 1.0], [1.5, 0.7]], "thetas": [0.25],
                         "tol": 1e-8, "projection_tol": 1e-10})
    model, _, lm = load_pencil(cfg)
    flags = []
    if not model.is_free:
        model = free_companion(lm) if lm is not None else PencilModel(model.h0, 0 * model.k)
        flags.append("potential_dropped")
    rng = np.random.default_rng(p["seed"])
    fam = calculus_family(rng, p["n_poly"], p["max_degree"], p["resolvent_z"], p["gaussians"])
    K = assemble_K(model)
    errs = []
    for phi in fam:
        A, B = free_calculus(model, phi), eig_calculus(K, phi)
        errs.append(op_norm_2(A - B) / max(op_norm_2(B), 1e-300))
    rep = Report({"command": "calculus", "model": cfg.model, **p, "flags": flags})
    rep.check("block_formula_vs_eig", max(errs) <= p["tol"], max(errs), p["tol"])
    for space in ["energy"] + [float(t) for t in p["thetas"]]:
        nb = norm_bound_check(model, space, fam)
        bad = sum(not r.sandwich_ok for r in nb.rows)
        rep.check(f"norm_sandwich_{nb.space}", bad == 0, bad, 0)
    ks = charge_structure(model)
    Pp, Pm = spectral_projections(model, +1), spectral_projections(model, -1)
    I = np.eye(2 * model.n)
    tol = p["projection_tol"]
    idem = max(positive_projection_check(ks, Pp).projection_defect,
               positive_projection_check(ks, Pm).projection_defect)
    comp = op_norm_2(Pp + Pm - I)
    rep.check("projection_idempotency", idem <= tol, idem, tol)
    rep.check("projection_complementarity", comp <= tol, comp, tol)
    sign = is_krein_positive(ks, Pp, tol) and is_krein_positive(ks, -Pm, tol)
    rep.check("projection_krein_sign", sign, sign, True)
    # e^{itx} on K_0: infinite Lambda_0 norm, operator norm growing with ||eps||
    phi = exp_itx(1.0)
    lam0 = lambda_theta_norm(phi, 0.0)
    scales = np.array([1.0, 4.0, 16.0])
    norms, eps_norms = [], []
    for c in scales:
        mc = PencilModel(c * c * model.h, model.k, "scaled")
        norms.append(ktheta_opnorm(mc, 0.0, free_calculus(mc, phi)))
        eps_norms.append(float(np.max(mc.eps_spectrum()[0])))
    growth = float(np.polyfit(np.log(eps_norms), np.log(norms), 1)[0])
    rep.details = {"calculus_errors": errs, "exp_itx_norms": norms, "eps_norms": eps_norms}
    rep.check("unbounded_case_detected", lam0 == float("inf") and growth >= 0.8, growth, 0.8)
    return rep


def cmd_definitize(cfg, ctx):
    from .kgoperators import assemble_K, charge_structure
    from .speccalc import definitize, jonas_bound_check, reso_bound_check
    from .symbols import sin_scaled

    p = run_params(cfg, {"def_tol": 1e-8, "reso_lambda": [-2.0, -0.5, 0.5, 2.0],
                         "reso_mu": [0.01, 1.0], "reso_per_decade": 10, "reso_stability_max": 10.0,
                         "jonas_N": [1, 10, 100, 1000], "jonas_max": 2.0})
    kind, payload = load_model(cfg, allow_structures=True)
    if kind == "structure":
        ks, H = payload
    else:
        model = payload[0]
        ks, H = charge_structure(model), assemble_K(model)
    res = definitize(ks, H, def_tol=p["def_tol"])
    mlo, mhi = _window(cfg, "reso_mu", p["reso_mu"])
    k = max(2, int(round(p["reso_per_decade"] * np.log10(mhi / mlo))) + 1)
    mus = np.geomspace(mlo, mhi, k)
    zs = np.array([complex(x, s * y) for x in p["reso_lambda"] for y in mus for s in (1, -1)])
    reso = reso_bound_check(ks, H, zs, res)
    rep = Report({"command": "definitize", "model": cfg.model, **p})
    rep.details = {"poly_coeffs": res.poly_coeffs, "sigma": res.sigma,
                   "alpha": res.alpha.as_dict(), "beta": res.beta.as_dict(),
                   "nonreal_pairs": [[lam, r] for lam, r in res.nonreal_pairs],
                   "raw_margin": res.raw_margin, "reso_c": reso.c, "reso_worst_z": reso.worst_z,
                   "reso_c_by_decade": reso.c_by_decade,
                   "reso_spread": reso.stability}
    rep.check("definitizing_margin", res.positivity_margin >= -p["def_tol"],
              res.positivity_margin, -p["def_tol"])
    rep.check("reso_constant_positive", reso.c > 0, reso.c, 0.0)
    # the constant must not collapse as Im z -> 0; growth towards the axis is harmless
    rep.check("reso_no_decay", reso.decay_ratio <= p["reso_stability_max"], reso.decay_ratio,
              p["reso_stability_max"])
    if p["jonas_N"]:
        jr = jonas_bound_check(ks, H, [sin_scaled(N) for N in p["jonas_N"]], res.alpha)
        worst = max(r[3] for r in jr.rows)
        rep.details["jonas_rows"] = [list(r) for r in jr.rows]
        rep.check("jonas_ratio", worst <= p["jonas_max"], worst, p["jonas_max"])
    return rep


def cmd_bessel(cfg, ctx):
    from .groupweights import (
        GroupData,
        bessel_bound_checks,
        bessel_derivative_relation_check,
        bessel_kernel,
        weight_from_group,
        weight_positive_power,
    )
    from .numkernel import matfun_hermitian, op_norm_2

    p = run_params(cfg, {"sigmas": [0.5, 1.5, 3.0], "mass_tol": 1e-6, "fourier_taus": [0.0, 1.0, 5.0],
                         "seed": 0, "weight_n": 6, "weight_eps": [0.1, 0.3], "weight_tol": 1e-6,
                         "positive_power_s": [0.3, 0.6], "relation_sigma": 3.0,
                         "relation_tol": 1e-4})
    rep = Report({"command": "bessel", **p})
    taus = np.asarray(p["fourier_taus"], dtype=float)
    masses, four = {}, {}
    for s in p["sigmas"]:
        bk = bessel_kernel(s)
        masses[s] = abs(bk.mass - 1.0)
        four[s] = float(np.max(np.abs(bk.fourier(taus) - (1 + taus ** 2) ** (-0.5 * s))))
        rep.check(f"mass_sigma_{s:g}", masses[s] <= p["mass_tol"], masses[s], p["mass_tol"])
        rep.check(f"fourier_sigma_{s:g}", four[s] <= p["mass_tol"], four[s], p["mass_tol"])
        b = bessel_bound_checks(s)
        rep.details[f"bounds_sigma_{s:g}"] = {"small_t_constants": b.small_t_constants,
                                               "small_t_slopes": b.small_t_slopes,
                                               "decay_ratios": b.decay_ratios}
        rep.check(f"kernel_bounds_sigma_{s:g}", b.ok, min(b.small_t_slopes.values()), -0.05)
    rng = np.random.default_rng(p["seed"])
    n = p["weight_n"]
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    a = 0.5 * (X + X.conj().T)
    g = GroupData.fit(a)
    werr = 0.0
    for s in p["sigmas"]:
        for e in p["weight_eps"]:
            ref = matfun_hermitian(lambda x: (1 + x * x) ** (-0.5 * s), e * a)
            werr = max(werr, op_norm_2(weight_from_group(g, s, e) - ref) / op_norm_2(ref))
    perr = 0.0
    for s in p["positive_power_s"]:
        for e in p["weight_eps"]:
            ref = matfun_hermitian(lambda x: (1 + x * x) ** (0.5 * s), e * a)
            perr = max(perr, op_norm_2(weight_positive_power(g, s, e) - ref) / op_norm_2(ref))
    rep.check("group_weight_vs_matfun", werr <= p["weight_tol"], werr, p["weight_tol"])
    rep.check("positive_power_vs_matfun", perr <= p["weight_tol"], perr, p["weight_tol"])
    rel = bessel_derivative_relation_check(p["relation_sigma"])
    rep.fits = {"C_sigma": rel.C_fit, "C_sigma_spread": rel.spread}
    rep.check("derivative_relation", rel.ok and rel.spread <= 1e-3, rel.residual, p["relation_tol"])
    rep.check("derivative_relation_sign", rel.C_fit < 0, rel.C_fit, 0.0)
    rep.details["mass_errors"] = masses
    rep.details["fourier_errors"] = four
    return rep


def cmd_commutator(cfg, ctx):
    from .groupweights import (
        bessel_G,
        est_scaling_check,
        taylor_commutator_expansion,
        truncated_exp_identities,
    )
    from .models import fixture_pauli_like
    from .symbols import japanese

    p = run_params(cfg, {"seed": 0, "orders": [1, 2, 3], "taylor_tol": 1e-5, "ek_tol": 1e-10,
                         "s": 0.6, "beta": 1.0, "alpha": 2.0, "random_n": 8, "slack": 0.15,
                         "r2_min": 0.9})
    rng = np.random.default_rng(p["seed"])
    rep = Report({"command": "commutator", **p})
    f = japanese(-1.0, order=4)

    def fhat(t):
        return bessel_G(1.0, np.where(t == 0, 1e-300, t))

    res = []
    for k in p["orders"]:
        X = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        a = X + X.conj().T
        S = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        r = taylor_commutator_expansion(S, a, f, fhat, k, quad_tol=p["taylor_tol"])
        res.append(r.residual)
        rep.check(f"taylor_identity_k{k}", r.residual <= p["taylor_tol"], r.residual,
                  p["taylor_tol"])
    ek = truncated_exp_identities()
    for name, v in ek.items():
        rep.check(f"truncated_exp_{name}", v <= p["ek_tol"], v, p["ek_tol"])
    S2, a2 = fixture_pauli_like()
    X = rng.normal(size=(p["random_n"], p["random_n"]))
    a8 = X + X.T
    S8 = rng.normal(size=(p["random_n"], p["random_n"]))
    slopes = {}
    for label, S, a in (("pauli_like", S2, a2), ("random", S8, a8)):
        for which, order in (("est1", p["beta"]), ("estime", p["alpha"])):
            sr = est_scaling_check(which, S, a, p["s"], order, slack=p["slack"])
            slopes[f"{which}_{label}"] = {"slope": sr.slope, "r2": sr.r2,
                                          "degenerate": sr.degenerate}
            rep.check(f"{which}_{label}_slope", sr.passed, sr.slope, sr.threshold)
            rep.check(f"{which}_{label}_r2", sr.r2 >= p["r2_min"], sr.r2, p["r2_min"])
    rep.fits = slopes
    rep.details = {"taylor_residuals": res, "truncated_exp_residuals": ek}
    return rep


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


# ---------------------------------------------------------------- entry point


def build_parser():
    ap = argparse.ArgumentParser(prog="kreinres", description=__doc__.split("\n")[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON config with model/run/output")
    ap.add_argument("--out", default=None, help="output directory (default: output.dir or .)")
    ap.add_argument("--threads", type=int, default=None,
                    help="worker threads for sweeps (default: KREINRES_THREADS or 1)")
    ap.add_argument("--strict", action="store_true",
                    help="also assert the n-doubling stability of sweep slopes")
    return ap


def run(command, config_path, out=None, threads=None, strict=False):
    """Run one command; returns ``(exit_code, report_or_None)``."""
    from .mourrelap import default_threads

    try:
        cfg = Config(config_path)
        outcfg = dict(cfg.output)
        extra = sorted(set(outcfg) - {"dir", "prefix"})
        if extra:
            cfg.fail(f"output.{extra[0]}", "unknown output key (allowed: dir, prefix)")
        ctx = {"threads": default_threads() if threads is None else max(1, int(threads)),
               "strict": bool(strict)}
        rep = HANDLERS[command](cfg, ctx)
    except ConfigError as exc:
        print(f"kreinres: config error: {exc}", file=sys.stderr)
        return 1, None
    except KreinresError as exc:
        print(f"kreinres: {command} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2, None
    out_dir = out if out is not None else outcfg.get("dir", ".")
    prefix = str(outcfg.get("prefix", command))
    rep.write(out_dir, prefix)
    for a in rep.assertions:
        print(f"{'PASS' if a['pass'] else 'FAIL'} {a['name']}: value={_plain(a['value'])} "
              f"threshold={_plain(a['threshold'])}")
    return (0 if rep.passed else 2), rep


def main(argv=None):
    args = build_parser().parse_args(argv)
    code, _ = run(args.command, args.config, args.out, args.threads, args.strict)
    return code


if __name__ == "__main__":
    sys.exit(main())

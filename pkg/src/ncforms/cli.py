"""Batch front end: configure a calculus and an experiment, emit reports.

Subcommands name the experiment kind; a JSON config (``--config``) selects
the calculus and its parameters.  Reports are JSON with a ``meta`` block
(timestamp, version, config echo) and a ``result`` block that is
byte-deterministic for a fixed (config, seed); time series go to CSV.

Exit codes: 0 all checks passed, 1 a check failed (reports still written),
2 configuration error, 3 numerical abort.
"""

import argparse
import csv
import datetime
import json
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from . import calculus as nc
from . import coeff as cf
from . import harmonic, kernels, shiftcalc, toda, weyl
from .errors import (ConfigError, NCFormsError, NewtonDivergenceError,
                     ObstructionError, OverflowAbortError, SingularityError)

_ABORTS = (NewtonDivergenceError, OverflowAbortError, SingularityError,
           ObstructionError)
KINDS = ("axioms", "derive", "tower", "toda", "heisenberg", "metric")

_CALC_KEYS = {
    "lattice": {"kind", "n", "spacings", "signature"},
    "semi-discrete-toda": {"kind", "ell"},
    "shift": {"kind", "a", "b", "theta"},
    "weyl": {"kind", "hbar"},
}
_EXP_KEYS = {
    "axioms": {"samples", "coefficients", "shape"},
    "derive": {"rate"},
    "tower": {"nt", "nx", "depth", "amplitude", "modes", "residual_tol",
              "solver_tol", "period_tol", "closure_tol"},
    "toda": {"sites", "dt", "t_final", "stride", "modes", "energy_tol",
             "momentum_tol", "force_python"},
    "heisenberg": {"samples", "theta", "squeeze", "offset", "matrix_dim",
                   "max_degree"},
    "metric": {"draws", "shape", "quantum_plane"},
}
_DEFAULT_CALC = {
    "axioms": "lattice", "derive": "semi-discrete-toda", "tower": "lattice",
    "toda": "semi-discrete-toda", "heisenberg": "weyl", "metric": "lattice",
}


def _check_keys(table, kind, cfg, what):
    extra = sorted(set(cfg) - table[kind])
    if extra:
        raise ConfigError(f"unknown {what} keys for '{kind}': {', '.join(extra)}")


def normalize_calculus(cfg, default_kind):
    """Fill defaults and validate; returns a plain dict (the config echo)."""
    cfg = dict(cfg or {})
    kind = cfg.setdefault("kind", default_kind)
    if kind not in _CALC_KEYS:
        raise ConfigError(f"unknown calculus kind '{kind}'")
    _check_keys(_CALC_KEYS, kind, cfg, "calculus")
    if kind == "lattice":
        n = int(cfg.setdefault("n", 2))
        if not 1 <= n <= 3:
            raise ConfigError("lattice dimension must be 1, 2 or 3")
        spacings = cfg.setdefault("spacings", [1.0] * n)
        if len(spacings) != n:
            raise ConfigError("spacings length must match n")
        signature = cfg.setdefault("signature", [1] + [-1] * (n - 1))
        if len(signature) != n or any(s not in (1, -1) for s in signature):
            raise ConfigError("signature must be n entries of +1/-1")
        if any(l <= 0 for l in spacings):
            raise ConfigError("spacings must be positive")
    elif kind == "semi-discrete-toda":
        if float(cfg.setdefault("ell", 0.5)) <= 0:
            raise ConfigError("ell must be positive")
    elif kind == "shift":
        cfg.setdefault("a", 0.6), cfg.setdefault("b", 0.35)
        cfg.setdefault("theta", 0.0)
        if cfg["a"] == 0 or cfg["b"] == 0:
            raise ConfigError("shift parameters a, b must be nonzero")
    else:
        if float(cfg.setdefault("hbar", 0.5)) <= 0:
            raise ConfigError("hbar must be positive")
    return cfg


def build_calculus(cfg):
    """Instantiate the calculus a normalized config describes."""
    kind = cfg["kind"]
    if kind == "lattice":
        return nc.lattice_calculus(tuple(cfg["spacings"]), tuple(cfg["signature"]))
    if kind == "semi-discrete-toda":
        return nc.semi_discrete_calculus(float(cfg["ell"]))
    if kind == "shift":
        return shiftcalc.ShiftCalculusSpec(cfg["a"], cfg["b"], cfg["theta"])
    return weyl.WeylCalculus(float(cfg["hbar"]))


# ---------------------------------------------------------------------------
# Experiment runners: each returns (result dict, list of failed check ids)
# ---------------------------------------------------------------------------

def _run_axioms(calc_cfg, exp, seed, tolerance, outdir, tag):
    kind = calc_cfg["kind"]
    samples = int(exp.get("samples", 250))
    if kind == "shift":
        spec = build_calculus(calc_cfg)
        rep = shiftcalc.shift_suite(spec, samples=samples, seed=seed,
                                    tolerance=1e-12 if tolerance is None else tolerance)
    elif kind == "weyl":
        rep = weyl.weyl_suite(float(calc_cfg["hbar"]), samples=samples, seed=seed,
                              tolerance=0.0 if tolerance is None else tolerance)
    else:
        calc = build_calculus(calc_cfg)
        coeffs = exp.get("coefficients",
                         "expsum" if kind == "semi-discrete-toda" else "grid")
        shape = tuple(exp["shape"]) if "shape" in exp else None
        rep = nc.axiom_suite(calc, samples=samples, seed=seed, kind=coeffs,
                             shape=shape,
                             tolerance=1e-12 if tolerance is None else tolerance)
    failed = [k for k, v in rep["residuals"].items() if v > rep["tolerance"]] \
        if "residuals" in rep and "tolerance" in rep else []
    if not rep.get("pass", False) and not failed:
        failed = ["suite"]
    return rep, ([] if rep.get("pass", False) else failed)


def _run_metric(calc_cfg, exp, seed, tolerance, outdir, tag):
    if calc_cfg["kind"] != "lattice":
        raise ConfigError("the metric experiment runs on the lattice calculus")
    tol = 0.0 if tolerance is None else tolerance
    n = int(calc_cfg["n"])
    draws = int(exp.get("draws", 3))
    shape = tuple(exp.get("shape", (8,) * n))
    if len(shape) != n:
        raise ConfigError("metric grid shape must match the lattice dimension")
    rng = np.random.default_rng(seed)
    failed, flat, plane = [], [], []
    for i in range(draws):
        spacings = [int(rng.integers(1, 9)) / 4.0 for _ in range(n)]
        signature = [int(s) for s in rng.choice([1, -1], n)]
        calc = nc.lattice_calculus(tuple(spacings), tuple(signature))
        axes = [np.arange(m) * l for m, l in zip(shape, spacings)]
        grids = np.meshgrid(*axes, indexing="ij")
        ys = [cf.GridFunction(g, boundary=("open",) * n) for g in grids]
        metric = nc.metric_components(calc, ys, basis="x")
        worst = 0.0
        for mu in range(n):
            for nu in range(n):
                want = spacings[mu] * spacings[nu] * signature[mu] if mu == nu else 0.0
                got = metric.components[(mu, nu)]
                worst = max(worst, float(np.abs(got.values - want).max()))
        entry = {"spacings": spacings, "signature": signature,
                 "residual_max": worst}
        inv = metric.check_inverse(tol=0.0)
        if inv is not None:
            entry["inverse_residual"] = inv
        flat.append(entry)
        if worst > tol:
            failed.append(f"flat_metric_draw{i}")
    if n == 2:
        for i in range(draws):
            qs = []
            while len(qs) < 2:
                cand = int(rng.integers(2, 9)) / 4.0
                if cand != 1.0:
                    qs.append(cand)
            spacings = [int(rng.integers(1, 9)) / 4.0 for _ in range(2)]
            calc = nc.lattice_calculus(tuple(spacings), (1, -1))
            rep = nc.quantum_plane_check(calc, qs)
            worst = max(rep["checks"].values())
            plane.append({"qs": qs, "spacings": spacings,
                          "residual_max": worst, "checks": rep["checks"]})
            if worst > tol:
                failed.append(f"quantum_plane_draw{i}")
    result = {"draws": draws, "tolerance": tol, "flat": flat,
              "quantum_plane": plane, "pass": not failed}
    return result, failed


def _run_derive(calc_cfg, exp, seed, tolerance, outdir, tag):
    kind = calc_cfg["kind"]
    if kind == "semi-discrete-toda":
        rep = toda.derive_toda(ell=float(calc_cfg["ell"]), seed=seed)
        failed = [] if rep.get("pass") else [c["check"] for c in rep["checks"]
                                             if c["residual"] > rep["tolerance"]]
        return rep, failed
    if kind == "shift":
        spec = build_calculus(calc_cfg)
        rate = float(exp.get("rate", 0.75))
        f = cf.ExpSum.exponential(1.0, lx=rate)
        g = cf.ExpSum.exponential(1.0, lx=-rate)
        rep = shiftcalc.derivation_check_A(spec, f, g)
        tol = 1e-12 if tolerance is None else tolerance
        failed = [c["check"] for c in rep["checks"] if c["residual"] > tol]
        rep["tolerance"] = tol
        rep["pass"] = not failed
        return rep, failed
    raise ConfigError("derive is defined for the semi-discrete-toda and shift calculi")


def _run_tower(calc_cfg, exp, seed, tolerance, outdir, tag):
    if calc_cfg["kind"] != "lattice" or int(calc_cfg["n"]) != 2:
        raise ConfigError("the tower experiment needs a 2-axis lattice")
    calc = build_calculus(calc_cfg)
    nt, nx = int(exp.get("nt", 32)), int(exp.get("nx", 32))
    depth = int(exp.get("depth", 4))
    amp = float(exp.get("amplitude", 1.5e-5))
    rtol = float(exp.get("residual_tol", 1e-8 if tolerance is None else tolerance))
    stol = float(exp.get("solver_tol", 1e-10))
    rng = np.random.default_rng(seed)
    x = np.arange(nx)
    u0 = np.zeros(nx)
    u1 = np.zeros(nx)
    for m in range(1, int(exp.get("modes", 3)) + 1):
        c0, s0, c1, s1 = rng.uniform(-1, 1, 4)
        u0 += amp * (c0 * np.cos(2 * np.pi * m * x / nx)
                     + s0 * np.sin(2 * np.pi * m * x / nx))
        u1 += amp * (c1 * np.cos(2 * np.pi * m * x / nx)
                     + s1 * np.sin(2 * np.pi * m * x / nx))
    hist, info = harmonic.solve_field_equation(u0, u1, steps=nt - 2)
    a = cf.GridFunction(np.exp(-hist.values), boundary=("open", "periodic"))
    rep = harmonic.conserved_tower(
        nc.Form.function(calc, a), depth,
        period_tol=float(exp.get("period_tol", 1e-9)),
        closure_tol=float(exp.get("closure_tol", 1e-8)),
        rng=np.random.default_rng(seed + 1))
    result = rep.to_dict()
    result["grid"] = [nt, nx]
    result["amplitude"] = amp
    result["solver"] = {
        "max_slice_residual": max(info["slice_residuals"], default=0.0),
        "max_newton_iterations": max(info["newton_iterations"], default=0),
    }
    failed = []
    if result["solver"]["max_slice_residual"] > stol:
        failed.append("solver_residual")
    for lv in result["levels"]:
        if lv["residual_rel"] > rtol:
            failed.append(f"conservation_level{lv['level']}")
        if lv["charge_drift_rel"] > rtol:
            failed.append(f"charge_drift_level{lv['level']}")
    _write_charges_csv(os.path.join(outdir, f"{tag}charges.csv"), result["levels"])
    result["tolerance"] = rtol
    result["pass"] = not failed
    return result, failed


def _write_charges_csv(path, levels):
    common = None
    for lv in levels:
        ts = set(lv["charges_t"])
        common = ts if common is None else (common & ts)
    common = sorted(common or [])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"Q_{lv['level']}" for lv in levels])
        for t in common:
            row = [t]
            for lv in levels:
                row.append(lv["charges"][lv["charges_t"].index(t)])
            w.writerow(row)


def _run_toda(calc_cfg, exp, seed, tolerance, outdir, tag):
    if calc_cfg["kind"] != "semi-discrete-toda":
        raise ConfigError("the toda experiment needs the semi-discrete-toda calculus")
    ell = float(calc_cfg["ell"])
    m = int(exp.get("sites", 16))
    dt = float(exp.get("dt", 1e-3))
    t_final = float(exp.get("t_final", 10.0))
    n_steps = int(round(t_final / dt))
    stride = int(exp.get("stride", max(1, n_steps // 1000)))
    a1, a2, b1 = exp.get("modes", (1.0, 0.4, 0.3))
    etol = float(exp.get("energy_tol", 1e-8 if tolerance is None else tolerance))
    ptol = float(exp.get("momentum_tol", 1e-12))
    x = np.arange(m)
    u0 = a1 * np.cos(2 * np.pi * x / m) + a2 * np.sin(4 * np.pi * x / m)
    v0 = b1 * np.sin(2 * np.pi * x / m)
    state = toda.TodaState(u0, v0, ell)
    out = toda.simulate(state, dt, t_final, stride=stride,
                        force_python=bool(exp.get("force_python", False)))
    h, p = out["H"], out["P"]
    energy_drift = float(np.abs(h - h[0]).max() / max(abs(h[0]), 1e-300))
    momentum_drift = float(np.abs(p - p[0]).max())
    _write_trajectory_csv(os.path.join(outdir, f"{tag}trajectory.csv"), out, m)
    failed = []
    if energy_drift > etol:
        failed.append("energy_drift")
    if momentum_drift > ptol:
        failed.append("momentum_drift")
    result = {"sites": m, "ell": ell, "dt": dt, "t_final": t_final,
              "stride": stride, "backend": out["backend"],
              "samples": int(out["t"].size),
              "energy_drift_rel": energy_drift,
              "momentum_drift_abs": momentum_drift,
              "energy_tol": etol, "momentum_tol": ptol,
              "pass": not failed}
    return result, failed


def _write_trajectory_csv(path, out, m):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"u_{k + 1}" for k in range(m)]
                   + [f"v_{k + 1}" for k in range(m)] + ["H", "P"])
        for i, t in enumerate(out["t"]):
            w.writerow([t] + list(out["u"][i]) + list(out["v"][i])
                       + [out["H"][i], out["P"][i]])


def _run_heisenberg(calc_cfg, exp, seed, tolerance, outdir, tag):
    if calc_cfg["kind"] != "weyl":
        raise ConfigError("the heisenberg experiment needs the weyl calculus")
    hbar = float(calc_cfg["hbar"])
    tol = 0.0 if tolerance is None else tolerance
    samples = int(exp.get("samples", 80))
    theta = float(exp.get("theta", 0.5))
    squeeze = float(exp.get("squeeze", 0.25))
    offset = float(exp.get("offset", 0.75))
    dim = int(exp.get("matrix_dim", 2))
    max_degree = int(exp.get("max_degree", 3))
    failed = []
    suite = weyl.weyl_suite(hbar, samples=samples, seed=seed, tolerance=tol)
    eps = weyl.epsilon_suite(hbar, samples=max(10, samples // 2), seed=seed + 1,
                             tolerance=tol)
    if not suite["pass"]:
        failed += [f"suite_{k}" for k, v in suite["residuals"].items() if v > tol]
    if not eps["pass"]:
        failed += [f"epsilon_{k}" for k, v in eps["residuals"].items() if v > tol]
    catalog = {}
    for name, (P, Q, expect) in weyl.automorphism_catalog(
            hbar, theta=theta, s=squeeze, c=offset).items():
        R, info = weyl.field_residual_pq(P, Q, full_output=True)
        catalog[name] = {"residual_vs_expected": (R - expect).norm(),
                         "identity_residual": info["identity_residual"]}
        if max(catalog[name].values()) > tol:
            failed.append(f"catalog_{name}")
    rng = np.random.default_rng(seed + 2)
    A, chi = _seeded_tower_data(hbar, dim, max_degree, rng)
    twr = weyl.tower_identity_residual(A, chi)
    if max(twr.values()) > tol:
        failed.append("tower_identity")
    result = {"hbar": hbar, "suite": suite, "epsilon": eps, "catalog": catalog,
              "tower_identity": twr, "tolerance": tol, "pass": not failed}
    return result, failed


def _seeded_tower_data(hbar, dim, max_degree, rng):
    """Flat matrix current (entrywise d star A = 0) and a dyadic test matrix."""
    calc = weyl.WeylCalculus(hbar)
    p, q = weyl.WeylElement.p(hbar), weyl.WeylElement.q(hbar)
    one = weyl.WeylElement.unit(hbar)

    def entry():
        al, be, de, c1, c2 = (int(rng.integers(-4, 5)) / 4.0 for _ in range(5))
        P = p * al + q * be + one * c1
        Q = p * be + q * de + one * c2
        return weyl.gauge_current_pq(P, Q)

    A = [[entry() for _ in range(dim)] for _ in range(dim)]
    chi = [[weyl.WeylForm(calc, 0, {(): weyl._rand_element(
        rng, hbar, max_degree=max_degree, dyadic=True)})
        for _ in range(dim)] for _ in range(dim)]
    return A, chi


_RUNNERS = {"axioms": _run_axioms, "metric": _run_metric, "derive": _run_derive,
            "tower": _run_tower, "toda": _run_toda, "heisenberg": _run_heisenberg}


# ---------------------------------------------------------------------------
# Report plumbing
# ---------------------------------------------------------------------------

def _jsonable(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _dump(report, path):
    with open(path, "w") as fh:
        json.dump(report, fh, sort_keys=True, indent=2, default=_jsonable)
        fh.write("\n")


def run_experiment(kind, calc_cfg, exp_cfg, seed, tolerance, outdir, tag=""):
    """Run one experiment; returns (report dict, exit status)."""
    if kind not in _RUNNERS:
        raise ConfigError(f"unknown experiment kind '{kind}'")
    calc_cfg = normalize_calculus(calc_cfg, _DEFAULT_CALC[kind])
    exp_cfg = dict(exp_cfg or {})
    _check_keys(_EXP_KEYS, kind, exp_cfg, "experiment")
    meta = {
        "version": __version__,
        "command": kind,
        "seed": seed,
        "tolerance": tolerance,
        "backend": kernels.backend_name(),
        "config": {"calculus": calc_cfg, "experiment": exp_cfg},
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    status = 0
    try:
        result, failed = _RUNNERS[kind](calc_cfg, exp_cfg, seed, tolerance,
                                        outdir, tag)
        result["failed_checks"] = failed
        if failed:
            status = 1
    except _ABORTS as e:
        result, status = {"error": {"type": type(e).__name__, "message": str(e)},
                          "pass": False}, 3
    return {"meta": meta, "result": result}, status


def _parse_args(argv):
    parser = argparse.ArgumentParser(
        prog="ncforms",
        description="Deformed differential calculi: suites, derivations, towers")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        sp = sub.add_parser(kind, help=f"run the {kind} experiment")
        sp.add_argument("--config", help="JSON config path")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="master RNG seed")
        sp.add_argument("--tolerance", type=float, default=None,
                        help="override the experiment's default tolerance")
    return parser.parse_args(argv)


def main(argv=None):
    args = _parse_args(argv)
    try:
        cfg = {}
        if args.config:
            with open(args.config) as fh:
                cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        os.makedirs(args.out, exist_ok=True)
        if "experiments" in cfg:
            entries = cfg["experiments"]
            if not isinstance(entries, list) or not entries:
                raise ConfigError("'experiments' must be a non-empty list")
        else:
            entries = [cfg]
        jobs = []
        for i, entry in enumerate(entries):
            if not isinstance(entry, dict):
                raise ConfigError("each experiment entry must be an object")
            bad = set(entry) - {"kind", "calculus", "experiment", "seed",
                                "tolerance"}
            if bad:
                raise ConfigError(f"unknown config keys: {', '.join(sorted(bad))}")
            kind = entry.get("kind", args.kind)
            if kind not in KINDS:
                raise ConfigError(f"unknown experiment kind '{kind}'")
            seed = args.seed if args.seed is not None else entry.get("seed", 0)
            tolerance = args.tolerance if args.tolerance is not None \
                else entry.get("tolerance")
            tag = f"exp{i}_" if len(entries) > 1 else ""
            jobs.append((kind, entry.get("calculus"), entry.get("experiment"),
                         int(seed), tolerance, args.out, tag))
    except (ConfigError, OSError, json.JSONDecodeError) as e:
        print(f"configuration error: {e}")
        return 2

    try:
        if len(jobs) == 1:
            outcomes = [run_experiment(*jobs[0])]
        else:
            workers = int(os.environ.get("NCFORMS_THREADS") or 0) \
                or min(4, len(jobs))
            with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
                outcomes = list(pool.map(lambda j: run_experiment(*j), jobs))
    except NCFormsError as e:
        print(f"configuration error: {e}")
        return 2

    status = 0
    summary = []
    for i, ((report, st), job) in enumerate(zip(outcomes, jobs)):
        name = "report.json" if len(jobs) == 1 else f"report_{i}.json"
        path = os.path.join(args.out, name)
        _dump(report, path)
        status = max(status, st)
        summary.append({"kind": job[0], "report": name, "status": st,
                        "pass": bool(report["result"].get("pass", False))})
        tag = "ok" if st == 0 else ("FAIL" if st == 1 else "ABORT")
        print(f"[{tag}] {job[0]} -> {path}")
    if len(jobs) > 1:
        _dump({"experiments": summary}, os.path.join(args.out, "summary.json"))
    return status


if __name__ == "__main__":
    raise SystemExit(main())

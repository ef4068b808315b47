"""Verification suites and deterministic report emission.

Each suite checks one family of quantitative claims at desk scale and returns a
JSON-able summary plus CSV rows.  The same functions back the command-line
runner and the acceptance test suite, so a CLI run and `pytest` exercise the
identical code paths.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .generator import assemble_generator, eig_scan, evolve
from .homogeneous import NO_INTEGRABLE, shoot_homogeneous
from .modes import KernelK1, LogGrid, ModeFunction, apply_phi1, lq_norm
from .params import VortexParams
from .resolvent import (
    KernelK2,
    SolveConfig,
    apply_phi2,
    contraction_bound,
    resolvent_bound_check,
    solve_k0,
    solve_mode,
    verify_kernel_composition,
    verify_neat_identities,
)

SUITES = ("identities", "resolvent", "semigroup", "spectrum", "shooting")

# (q, alpha) pairs for the lattice checks: alpha = 2/q on the scaling-critical
# boundary where admissible (q > 2); q = 2 runs at the default alpha = 0.5
YOUNG_LATTICE = ((2.0, 0.5), (2.5, 0.8), (3.0, 2.0 / 3.0), (4.0, 0.5))
LATTICE_K = tuple(range(1, 9))
LAMBDA_OFFSETS_YOUNG = (0.5, 2.0)


@dataclass
class RunConfig:
    """Everything a batch run needs; all randomized checks derive from ``seed``."""

    params: VortexParams = field(default_factory=lambda: VortexParams(alpha=0.5, beta=1.0, m=2, q=2.0))
    suites: tuple = SUITES
    k_max: int = 8
    seed: int = 1234
    out_dir: str = "out"
    lambdas: tuple = ()          # probe points; default a0 + offsets below
    lambda_offsets: tuple = (0.1, 0.5, 1.0, 4.0)
    workers: int = 1
    residual_tol: float = 1e-6
    young_batch: int = 100
    bound_batch: int = 12
    # grids
    fine_t: float = 25.0
    fine_n: int = 2**17 + 1
    norm_t: float = 25.0
    norm_n: int = 2**14 + 1
    young_t: float = 40.0
    young_n: int = 4097
    scan_t: float = 12.0
    scan_n: int = 2048
    evolve_t_min: float = -8.0
    evolve_t_max: float = 10.0
    evolve_n: int = 1024
    tau_end: float = 5.0
    shoot_span: float = 12.0
    shoot_k: tuple = (1, 2, 3)
    shoot_offsets: tuple = (0.8, 1.6, 2.4, 3.2, 4.0)
    shoot_imags: tuple = (-2.0, -1.0, 0.0, 1.0, 2.0)

    def __post_init__(self):
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise ValueError(f"unknown suites {unknown}; choose from {SUITES}")
        if self.k_max < 0 or int(self.k_max) != self.k_max:
            raise ValueError("k_max must be a nonnegative integer")
        if not self.lambdas:
            self.lambdas = tuple(complex(self.params.a0 + off) for off in self.lambda_offsets)
        bad = [z for z in self.lambdas if not complex(z).real > self.params.a0]
        if bad:
            raise ValueError(
                f"every probe point needs Re(lambda) > a0 = {self.params.a0:.6g}; got {bad}")

    def probe_lambdas(self):
        return tuple(complex(z) for z in self.lambdas)


def _map_tasks(fn, tasks, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


# --------------------------------------------------------------------------
# identities
# --------------------------------------------------------------------------

def suite_identities(cfg: RunConfig) -> tuple[dict, list, list]:
    p = cfg.params
    a0 = p.a0
    t_samples = list(np.linspace(-2.0, 3.0, 5))
    mu_samples = [0.5, 1.0, 2.0, 3.75]
    neat = verify_neat_identities(t_samples, mu_samples, p, k=1)

    lattice = list(np.linspace(-2.0, 2.5, 10))
    comp_sets = [
        {"k": 1, "lam": a0 + 0.5},
        {"k": 2, "lam": a0 + 1.0 + 1.0j},
        {"k": 3, "lam": a0 + 0.5 - 0.5j},
    ]
    comp_reports = []
    for cs in comp_sets:
        comp_reports.append(verify_kernel_composition(lattice, lattice, p, cs["k"], cs["lam"]))

    rows = []
    if not neat.get("skipped"):
        for r in neat["rows"]:
            rows.append({
                "check": r["identity"], "t": r["t"], "r": r["r"],
                "mu_re": complex(r["mu"]).real, "mu_im": complex(r["mu"]).imag,
                "abs_error": r["abs_error"],
            })
    for cs, rep in zip(comp_sets, comp_reports):
        for r in rep["rows"]:
            rows.append({
                "check": "composition", "t": r["t"], "r": r["r"],
                "mu_re": complex(cs["lam"]).real, "mu_im": complex(cs["lam"]).imag,
                "abs_error": r["abs_error"],
            })
    max_neat = max(neat.get("max_error_half_line", math.nan),
                   neat.get("max_error_finite", math.nan))
    max_comp = max(rep["max_error"] for rep in comp_reports)
    checks = [
        {"name": "tail_and_interval_shortcuts", "max_error": max_neat,
         "tolerance": 1e-8, "passed": bool(max_neat <= 1e-8)},
        {"name": "kernel_composition_collapse", "max_error": max_comp,
         "tolerance": 1e-6, "passed": bool(max_comp <= 1e-6)},
    ]
    summary = {
        "suite": "identities",
        "params": _params_dict(p),
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
        "note": ("the closed-form shortcuts are rapid-phase asymptotics; at these"
                 " parameters their true errors are O(0.01..1), so strict"
                 " tolerances are expected to fail"),
    }
    cols = ["check", "t", "r", "mu_re", "mu_im", "abs_error"]
    return summary, rows, cols


# --------------------------------------------------------------------------
# resolvent
# --------------------------------------------------------------------------

def _young_checks(cfg: RunConfig) -> tuple[list, list]:
    rows = []
    worst_phi1 = 0.0
    worst_phi2 = 0.0
    rng = np.random.default_rng(cfg.seed + 1)
    for q, alpha in YOUNG_LATTICE:
        p = VortexParams(alpha=alpha, beta=cfg.params.beta, m=2, q=q)
        grid = LogGrid(-cfg.young_t, cfg.young_t, cfg.young_n)
        for k in LATTICE_K:
            kernel = KernelK1(k, q, 2)
            bound = 2.0 / kernel.A_minus
            worst = 0.0
            for _ in range(cfg.young_batch):
                x = rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n)
                fn = ModeFunction(k, "U", grid, x)
                worst = max(worst, lq_norm(apply_phi1(fn, kernel), q) / lq_norm(fn, q))
            ratio = worst / bound
            worst_phi1 = max(worst_phi1, ratio)
            rows.append({"check": "young_phi1", "k": k, "q": q, "alpha": alpha,
                         "lambda_re": math.nan, "lambda_im": math.nan,
                         "value": worst, "bound": bound,
                         "passed": worst <= bound * (1.0 + 1e-6)})
        for off in LAMBDA_OFFSETS_YOUNG:
            lam = p.a0 + off
            k2 = KernelK2(p, 1, lam)
            bound = 1.0 / k2.B.real
            worst = 0.0
            for _ in range(cfg.young_batch):
                x = rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n)
                fn = ModeFunction(1, "G", grid, x)
                worst = max(worst, lq_norm(apply_phi2(fn, k2), q) / lq_norm(fn, q))
            worst_phi2 = max(worst_phi2, worst / bound)
            rows.append({"check": "young_phi2", "k": 1, "q": q, "alpha": alpha,
                         "lambda_re": lam, "lambda_im": 0.0,
                         "value": worst, "bound": bound,
                         "passed": worst <= bound * (1.0 + 1e-6)})
    checks = [
        {"name": "young_phi1_lattice", "worst_ratio_to_bound": worst_phi1,
         "passed": worst_phi1 <= 1.0 + 1e-6},
        {"name": "young_phi2_lattice", "worst_ratio_to_bound": worst_phi2,
         "passed": worst_phi2 <= 1.0 + 1e-6},
    ]
    return checks, rows


def _contraction_checks(cfg: RunConfig) -> tuple[list, list]:
    rows = []
    gammas_ok = True
    worst_gamma = 0.0
    for q, alpha in YOUNG_LATTICE:
        p = VortexParams(alpha=alpha, beta=cfg.params.beta, m=2, q=q)
        for k in LATTICE_K:
            g = contraction_bound(p, k)
            worst_gamma = max(worst_gamma, g)
            gammas_ok = gammas_ok and g < 1.0
            rows.append({"check": "gamma", "k": k, "q": q, "alpha": alpha,
                         "lambda_re": math.nan, "lambda_im": math.nan,
                         "value": g, "bound": 1.0, "passed": g < 1.0})
    # iteration budget certified on the map that gamma describes (the reduced,
    # K1-shortcut map); the full kernel map's counts are recorded alongside
    iter_ok = True
    grid = LogGrid(-20.0, 20.0, 2**14 + 1)
    gauss = np.exp(-grid.nodes**2).astype(complex)
    cfg_red = SolveConfig(method="picard", map_kind="reduced", compute_residual=False)
    cfg_full = SolveConfig(method="picard", compute_residual=False)
    for q, alpha in YOUNG_LATTICE:
        p = VortexParams(alpha=alpha, beta=cfg.params.beta, m=2, q=q)
        for k in (1, 2, 4, 8):
            g = contraction_bound(p, k)
            budget = int(math.ceil(math.log(1e-10) / math.log(g))) + 1
            for off in LAMBDA_OFFSETS_YOUNG:
                G = ModeFunction(k, "G", grid, gauss)
                sol = solve_mode(G, p.a0 + off, k, p, cfg_red)
                ok = sol.iterations <= budget
                iter_ok = iter_ok and ok
                rows.append({"check": "picard_iterations", "k": k, "q": q, "alpha": alpha,
                             "lambda_re": p.a0 + off, "lambda_im": 0.0,
                             "value": sol.iterations, "bound": budget, "passed": ok})
                full = solve_mode(G, p.a0 + off, k, p, cfg_full)
                rows.append({"check": "picard_iterations_full_map", "k": k, "q": q,
                             "alpha": alpha, "lambda_re": p.a0 + off, "lambda_im": 0.0,
                             "value": full.iterations, "bound": budget,
                             "passed": True})
    checks = [
        {"name": "contraction_factor_below_one", "worst_gamma": worst_gamma,
         "passed": gammas_ok},
        {"name": "picard_iteration_budget", "passed": iter_ok},
    ]
    return checks, rows


def _residual_checks(cfg: RunConfig) -> tuple[list, list]:
    p = cfg.params
    rows = []
    grid = LogGrid(-cfg.fine_t, cfg.fine_t, cfg.fine_n)
    gauss = np.exp(-grid.nodes**2).astype(complex)
    solve_cfg = SolveConfig(residual_tol=cfg.residual_tol)
    worst = 0.0
    for lam in cfg.probe_lambdas():
        sol0 = solve_k0(ModeFunction(0, "G", grid, gauss), lam, p, solve_cfg)
        worst = max(worst, sol0.residual)
        rows.append({"check": "residual", "k": 0, "q": p.q, "alpha": p.alpha,
                     "lambda_re": lam.real, "lambda_im": lam.imag,
                     "value": sol0.residual, "bound": cfg.residual_tol,
                     "passed": sol0.residual <= cfg.residual_tol})
        for k in (1, 2):
            sol = solve_mode(ModeFunction(k, "G", grid, gauss), lam, k, p, solve_cfg)
            worst = max(worst, sol.residual)
            rows.append({"check": "residual", "k": k, "q": p.q, "alpha": p.alpha,
                         "lambda_re": lam.real, "lambda_im": lam.imag,
                         "value": sol.residual, "bound": cfg.residual_tol,
                         "passed": sol.residual <= cfg.residual_tol})
    checks = [{"name": "ode_residuals", "worst_residual": worst,
               "tolerance": cfg.residual_tol, "passed": worst <= cfg.residual_tol}]
    return checks, rows


def suite_resolvent(cfg: RunConfig) -> tuple[dict, list, list]:
    p = cfg.params
    young_checks, young_rows = _young_checks(cfg)
    contr_checks, contr_rows = _contraction_checks(cfg)
    resid_checks, resid_rows = _residual_checks(cfg)
    bound = resolvent_bound_check(
        cfg.probe_lambdas(), p, min(cfg.k_max, 3),
        grid=LogGrid(-cfg.norm_t, cfg.norm_t, cfg.norm_n),
        batch=cfg.bound_batch, seed=cfg.seed + 2,
        cfg=SolveConfig(compute_residual=False),
    )
    bound_rows = [{"check": "norm_ratio", "k": r["k"], "q": p.q, "alpha": p.alpha,
                   "lambda_re": r["lambda"].real, "lambda_im": r["lambda"].imag,
                   "value": r["max_ratio"], "bound": r["bound"], "passed": r["passed"]}
                  for r in bound["rows"]]
    checks = young_checks + contr_checks + resid_checks + [
        {"name": "resolvent_norm_bound", "M_empirical": bound["M_empirical"],
         "M_alpha_bound": bound["M_alpha_bound"], "passed": bound["passed"]},
    ]
    summary = {
        "suite": "resolvent",
        "params": _params_dict(p),
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
    cols = ["check", "k", "q", "alpha", "lambda_re", "lambda_im", "value", "bound", "passed"]
    return summary, young_rows + contr_rows + resid_rows + bound_rows, cols


# --------------------------------------------------------------------------
# semigroup
# --------------------------------------------------------------------------

def suite_semigroup(cfg: RunConfig) -> tuple[dict, list, list]:
    p = cfg.params
    a0 = p.a0
    grid = LogGrid(cfg.evolve_t_min, cfg.evolve_t_max, cfg.evolve_n)
    center = cfg.evolve_t_max - 0.22 * (cfg.evolve_t_max - cfg.evolve_t_min)
    U0 = np.exp(-(grid.nodes - center) ** 2).astype(complex)

    def one(k):
        gen = assemble_generator(k, p, grid)
        return k, evolve(U0, cfg.tau_end, None, gen)

    results = _map_tasks(one, list(range(cfg.k_max + 1)), cfg.workers)
    rows = []
    fits = {}
    for k, tr in results:
        fits[k] = tr.fitted_rate
        for tau, nrm in zip(tr.times, tr.norms):
            rows.append({"k": k, "tau": float(tau), "norm": float(nrm)})
    k0_err = abs(fits[0] - a0)
    all_below = all(r <= a0 + 0.05 for r in fits.values())
    checks = [
        {"name": "radial_mode_rate_sharp", "fitted": fits[0], "target": a0,
         "tolerance": 1e-2, "passed": bool(k0_err <= 1e-2)},
        {"name": "all_modes_below_threshold", "rates": {str(k): v for k, v in fits.items()},
         "threshold": a0 + 0.05, "passed": bool(all_below)},
    ]
    summary = {
        "suite": "semigroup",
        "params": _params_dict(p),
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
    return summary, rows, ["k", "tau", "norm"]


# --------------------------------------------------------------------------
# spectrum
# --------------------------------------------------------------------------

def suite_spectrum(cfg: RunConfig) -> tuple[dict, list, list]:
    p = cfg.params
    grid = LogGrid(-cfg.scan_t, cfg.scan_t, cfg.scan_n)
    report = eig_scan(range(cfg.k_max + 1), p, grid,
                      probe_cfg=SolveConfig(residual_tol=cfg.residual_tol))
    rows = []
    for m in report["modes"]:
        for ev in m.pop("eigenvalues", ()):
            rows.append({"k": m["k"], "re": float(ev.real), "im": float(ev.imag)})
    summary = {
        "suite": "spectrum",
        "params": _params_dict(p),
        "checks": [{
            "name": "no_surviving_eigenvalue_right_of_a0",
            "a0": report["a0"], "eps_disc": report["eps_disc"],
            "modes": report["modes"],
            "passed": report["passed"],
        }],
        "passed": report["passed"],
    }
    return summary, rows, ["k", "re", "im"]


# --------------------------------------------------------------------------
# shooting
# --------------------------------------------------------------------------

def suite_shooting(cfg: RunConfig) -> tuple[dict, list, list]:
    p = cfg.params
    a0 = p.a0
    grid = LogGrid(-cfg.shoot_span, cfg.shoot_span, 256)
    lam_res = [a0 + off for off in cfg.shoot_offsets]
    lam_ims = list(cfg.shoot_imags)
    tasks = [(0, complex(a0 + 1.0, 0.0))]
    for k in cfg.shoot_k:
        for lr in lam_res:
            for li in lam_ims:
                tasks.append((k, complex(lr, li)))

    def one(task):
        k, lam = task
        return shoot_homogeneous(p, k, lam, grid)

    results = _map_tasks(one, tasks, cfg.workers)
    rows = [{"k": r.k, "re_lambda": r.lam.real, "im_lambda": r.lam.imag,
             "mismatch": r.mismatch, "verdict": r.verdict} for r in results]
    ok = all(r.verdict == NO_INTEGRABLE for r in results)
    min_mismatch = min(r.mismatch for r in results)
    summary = {
        "suite": "shooting",
        "params": _params_dict(p),
        "checks": [{"name": "no_integrable_homogeneous_solution",
                    "min_mismatch": min_mismatch, "threshold": 1e-6,
                    "passed": ok}],
        "passed": ok,
    }
    return summary, rows, ["k", "re_lambda", "im_lambda", "mismatch", "verdict"]


# --------------------------------------------------------------------------
# emission
# --------------------------------------------------------------------------

def _params_dict(p: VortexParams) -> dict:
    return {"alpha": p.alpha, "beta": p.beta, "m": p.m, "q": p.q, "a0": p.a0}


def _sanitize(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_sanitize(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _fmt_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def emit(report: dict, rows: list, columns: list, out_dir: str, name: str) -> tuple[str, str]:
    """Write <out_dir>/<name>.json and .csv deterministically (stable key order,
    shortest round-trip float formatting, no timestamps)."""
    os.makedirs(out_dir, exist_ok=True)
    jpath = os.path.join(out_dir, f"{name}.json")
    cpath = os.path.join(out_dir, f"{name}.csv")
    with open(jpath, "w") as fh:
        json.dump(_sanitize(report), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(cpath, "w") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt_cell(row.get(c, "")) for c in columns) + "\n")
    return jpath, cpath


_SUITE_FN = {
    "identities": suite_identities,
    "resolvent": suite_resolvent,
    "semigroup": suite_semigroup,
    "spectrum": suite_spectrum,
    "shooting": suite_shooting,
}


def run(cfg: RunConfig, log=print) -> int:
    """Execute the configured suites in canonical order; 0 iff all pass."""
    try:
        os.makedirs(cfg.out_dir, exist_ok=True)
        probe = os.path.join(cfg.out_dir, ".write_probe")
        with open(probe, "w") as fh:
            fh.write("ok")
        os.remove(probe)
    except OSError as exc:
        log(f"error: output directory not writable: {exc}")
        return 2
    all_ok = True
    for name in SUITES:
        if name not in cfg.suites:
            continue
        summary, rows, cols = _SUITE_FN[name](cfg)
        summary["seed"] = cfg.seed
        emit(summary, rows, cols, cfg.out_dir, name)
        ok = summary["passed"]
        all_ok = all_ok and ok
        status = "PASS" if ok else "FAIL"
        log(f"[{status}] {name}")
        if not ok:
            for c in summary["checks"]:
                if not c["passed"]:
                    log(f"    failing check: {c['name']}")
    return 0 if all_ok else 1

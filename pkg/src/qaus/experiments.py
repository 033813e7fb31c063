"""Experiment drivers: parameter sweeps, CSV artifacts, and manifests.

Four experiments cover the robustness studies: schedule discretization,
Hamiltonian misspecification (chi), random noise ensembles, and the
thermal-rate scaling report.  Each driver reads a plain-text config
(section per experiment, key = value lines), runs its sweep over an
optional worker pool with order-deterministic collection, and writes

  * one or more CSV artifacts (comma-separated, header row, repr-format
    floats so files are byte-reproducible),
  * a plot_params.json sidecar carrying every guide-curve constant a
    renderer needs (nothing is hard-coded downstream), and
  * a manifest.json recording the fully resolved configuration, seeds,
    package version, and wall time.  Re-running from the manifest
    reproduces the CSVs byte-identically at any worker count.
"""

import configparser
import csv
import hashlib
import json
import multiprocessing
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import IntegratorConfig, evolve
from .noise import (
    REFERENCE_DECAY_CONSTANT,
    NoiseParams,
    fit_decay_constant,
    run_noise_instance,
)
from .problem import HamiltonianSpec, ProblemInstance
from .schedule import ScheduleParams, exact_schedule, piecewise_schedule
from .spectrum import shifted_gap_minimum
from .stats import bootstrap_median
from .thermal import POLICIES, BathParams, scaling_report

__all__ = [
    "ConfigError",
    "DEFAULT_CONFIG",
    "CROSSING_THRESHOLD",
    "load_config",
    "resolve_config",
    "run_schedule_sweep",
    "run_chi_sweep",
    "run_noise_sweep",
    "run_thermal_report",
    "run_validate",
    "write_manifest",
]

# success-probability threshold defining the "crossing size" of a decaying curve
CROSSING_THRESHOLD = 0.1

DEFAULT_CONFIG = {
    "schedule": {
        "n_min": "4",
        "n_max": "14",
        "epsilon": "0.01",
        "k_pieces": "1,2,3,4,exact",
        "curve_samples": "256",
    },
    "chi": {
        "n_min": "4",
        "n_max": "16",
        "epsilon": "0.01",
        "chi": "2.56,1.28,0.64,0.32",
    },
    "noise": {
        "n": "6,8,10",
        # sigma grid specified through x = N sigma^2 so ensembles at
        # different N share the collapse variable; an absolute `sigma`
        # list overrides it when nonempty
        "n_sigma_sq": "0.01,0.02,0.05,0.1,0.3,1.0,3.0",
        "sigma": "",
        "instances": "200",
        "base_seed": "0",
        "epsilon": "0.01",
        "complex_hermitian": "false",
    },
    "thermal": {
        "n_min": "6",
        "n_max": "16",
        "beta": "1.0",
        "g": "0.01",
        "policies": ",".join(POLICIES),
        "epsilon": "0.01",
    },
    "integrator": {
        "rel_tol": "",
        "abs_tol": "",
    },
}


class ConfigError(ValueError):
    """Invalid configuration file or override."""


# ---------------------------------------------------------------- config

def load_config(path) -> dict:
    """Read a config file (INI sections) or a manifest.json.

    Returns {section: {key: string value}}; unknown sections or keys
    raise ConfigError naming the offender.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    if path.suffix == ".json":
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed manifest {path}: {exc}") from exc
        raw = data.get("config")
        if not isinstance(raw, dict):
            raise ConfigError(f"manifest {path} has no 'config' table")
        cfg = {sec: {k: str(v) for k, v in kv.items()} for sec, kv in raw.items()}
    else:
        parser = configparser.ConfigParser()
        try:
            parser.read_string(path.read_text(), source=str(path))
        except configparser.Error as exc:
            raise ConfigError(f"malformed config {path}: {exc}") from exc
        cfg = {sec: dict(parser.items(sec)) for sec in parser.sections()}
    _check_keys(cfg)
    return cfg


def _check_keys(cfg: dict):
    for section, kv in cfg.items():
        if section not in DEFAULT_CONFIG:
            raise ConfigError(f"unknown config section [{section}]")
        for key in kv:
            if key not in DEFAULT_CONFIG[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")


def resolve_config(file_cfg: dict | None = None, overrides: dict | None = None) -> dict:
    """Defaults <- file <- command-line overrides, fully validated.

    overrides maps (section, key) -> value.
    """
    cfg = {sec: dict(kv) for sec, kv in DEFAULT_CONFIG.items()}
    if file_cfg:
        _check_keys(file_cfg)
        for sec, kv in file_cfg.items():
            cfg[sec].update(kv)
    for (sec, key), value in (overrides or {}).items():
        if sec not in cfg or key not in cfg[sec]:
            raise ConfigError(f"unknown override {sec}.{key}")
        cfg[sec][key] = str(value)
    return cfg


def _get_int(cfg, sec, key):
    try:
        return int(cfg[sec][key])
    except ValueError as exc:
        raise ConfigError(f"{sec}.{key} must be an integer, got {cfg[sec][key]!r}") from exc


def _get_float(cfg, sec, key):
    try:
        return float(cfg[sec][key])
    except ValueError as exc:
        raise ConfigError(f"{sec}.{key} must be a number, got {cfg[sec][key]!r}") from exc


def _get_bool(cfg, sec, key):
    v = cfg[sec][key].strip().lower()
    if v in ("true", "1", "yes"):
        return True
    if v in ("false", "0", "no"):
        return False
    raise ConfigError(f"{sec}.{key} must be a boolean, got {cfg[sec][key]!r}")


def _get_list(cfg, sec, key, conv=float):
    raw = cfg[sec][key].strip()
    if not raw:
        return []
    try:
        return [conv(tok.strip()) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad value in {sec}.{key}: {cfg[sec][key]!r}") from exc


def _n_range(cfg, sec):
    lo, hi = _get_int(cfg, sec, "n_min"), _get_int(cfg, sec, "n_max")
    if lo < 1 or hi < lo:
        raise ConfigError(f"bad size range {sec}.n_min={lo}, n_max={hi}")
    return list(range(lo, hi + 1))


def _integrator_config(cfg, total_time: float) -> IntegratorConfig:
    """Integrator overrides from [integrator]; default is time-aware auto."""
    rel = cfg["integrator"]["rel_tol"].strip()
    abs_ = cfg["integrator"]["abs_tol"].strip()
    if not rel and not abs_:
        return IntegratorConfig.auto(total_time)
    kwargs = {}
    if rel:
        kwargs["rel_tol"] = _get_float(cfg, "integrator", "rel_tol")
    if abs_:
        kwargs["abs_tol"] = _get_float(cfg, "integrator", "abs_tol")
    if "abs_tol" not in kwargs and "rel_tol" in kwargs:
        kwargs["abs_tol"] = 1e-2 * kwargs["rel_tol"]
    return IntegratorConfig(**kwargs)


# ------------------------------------------------------------- artifacts

def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path: Path, fieldnames: list[str], rows: list[dict]):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(row[k]) for k in fieldnames})


def _merge_sidecar(out_dir: Path, updates: dict):
    """Accumulate guide-curve constants in plot_params.json."""
    path = out_dir / "plot_params.json"
    params = json.loads(path.read_text()) if path.exists() else {}
    params.update(updates)
    path.write_text(json.dumps(params, indent=2, sort_keys=True) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(out_dir: Path, experiment: str, cfg: dict,
                   outputs: list[Path], wall_time: float):
    manifest = {
        "experiment": experiment,
        "version": __version__,
        "config": cfg,
        "outputs": {p.name: _sha256(p) for p in sorted(outputs)},
        "wall_time_s": round(wall_time, 3),
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _pool_map(fn, jobs, workers: int):
    """Map preserving job order; a worker pool never changes the output."""
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(processes=workers) as pool:
        return pool.map(fn, jobs, chunksize=1)


def _log(msg: str):
    print(msg, file=sys.stderr, flush=True)


# -------------------------------------------------------- schedule sweep

def _schedule_job(job):
    n, kind, epsilon, cfg = job
    params = ScheduleParams(N=1 << n, epsilon=epsilon)
    sched = (exact_schedule(params) if kind == "exact"
             else piecewise_schedule(int(kind), params))
    config = _integrator_config(cfg, sched.total_time)
    res = evolve(HamiltonianSpec(ProblemInstance(n)), sched, config=config)
    return {
        "n": n, "N": 1 << n, "k_pieces": kind, "epsilon": epsilon,
        "total_time": sched.total_time, "P_s": res.success_probability,
        "norm_drift": res.norm_drift, "accepted_steps": res.accepted_steps,
        "status": res.status,
    }


def run_schedule_sweep(cfg: dict, out_dir: Path, workers: int = 1) -> int:
    """Success probability vs size for the exact schedule and k-piece ramps.

    Writes schedule_sweep.csv plus schedule_curves.csv (t, s samples and
    knots at the largest size, for schedule overlay plots).  Returns the
    number of failed runs.
    """
    t0 = time.perf_counter()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ns = _n_range(cfg, "schedule")
    epsilon = _get_float(cfg, "schedule", "epsilon")
    kinds = []
    for tok in cfg["schedule"]["k_pieces"].split(","):
        tok = tok.strip()
        if not tok:
            continue
        if tok == "exact":
            kinds.append("exact")
        else:
            try:
                kinds.append(int(tok))
            except ValueError as exc:
                raise ConfigError(f"bad k_pieces entry {tok!r}") from exc
    if not kinds:
        raise ConfigError("schedule.k_pieces is empty")

    jobs = [(n, kind, epsilon, cfg) for kind in kinds for n in ns]
    rows = _pool_map(_schedule_job, jobs, workers)
    sweep_csv = out_dir / "schedule_sweep.csv"
    write_csv(sweep_csv, ["n", "N", "k_pieces", "epsilon", "total_time",
                          "P_s", "norm_drift", "accepted_steps", "status"], rows)

    # schedule curves at the largest size: exact samples plus every knot set
    n_curve = ns[-1]
    params = ScheduleParams(N=1 << n_curve, epsilon=epsilon)
    curve_rows = []
    t, s = exact_schedule(params).samples(_get_int(cfg, "schedule", "curve_samples"))
    for ti, si in zip(t, s):
        curve_rows.append({"n": n_curve, "kind": "exact", "t": float(ti), "s": float(si)})
    for kind in kinds:
        if kind == "exact":
            continue
        sched = piecewise_schedule(kind, params)
        for ti, si in zip(sched.knot_times, sched.knot_values):
            curve_rows.append({"n": n_curve, "kind": f"k{kind}",
                               "t": float(ti), "s": float(si)})
    curves_csv = out_dir / "schedule_curves.csv"
    write_csv(curves_csv, ["n", "kind", "t", "s"], curve_rows)

    _merge_sidecar(out_dir, {
        "schedule_epsilon": epsilon,
        "schedule_curve_n": n_curve,
    })
    wall = time.perf_counter() - t0
    failures = sum(r["status"] != "ok" for r in rows)
    write_manifest(out_dir, "schedule-sweep", cfg, [sweep_csv, curves_csv], wall)
    _log(f"schedule-sweep: {len(rows)} runs, {failures} failures, {wall:.1f}s")
    return failures


# ------------------------------------------------------------- chi sweep

def _chi_job(job):
    n, chi, epsilon, cfg = job
    N = 1 << n
    sched = exact_schedule(ScheduleParams(N=N, epsilon=epsilon))
    config = _integrator_config(cfg, sched.total_time)
    res = evolve(HamiltonianSpec(ProblemInstance(n), chi=chi), sched, config=config)
    return {
        "n": n, "N": N, "chi": chi, "epsilon": epsilon,
        "s_star": shifted_gap_minimum(chi, N), "P_s": res.success_probability,
        "norm_drift": res.norm_drift, "accepted_steps": res.accepted_steps,
        "status": res.status,
    }


def run_chi_sweep(cfg: dict, out_dir: Path, workers: int = 1) -> int:
    """Success probability vs size for misspecified problem Hamiltonians.

    Writes chi_sweep.csv and records the size at which each curve first
    drops below the crossing threshold in the plot sidecar.
    """
    t0 = time.perf_counter()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ns = _n_range(cfg, "chi")
    epsilon = _get_float(cfg, "chi", "epsilon")
    chis = _get_list(cfg, "chi", "chi")
    if not chis:
        raise ConfigError("chi.chi list is empty")
    for chi in chis:
        if chi <= -1.0:
            raise ConfigError(f"chi must exceed -1, got {chi}")

    jobs = [(n, chi, epsilon, cfg) for chi in chis for n in ns]
    rows = _pool_map(_chi_job, jobs, workers)
    sweep_csv = out_dir / "chi_sweep.csv"
    write_csv(sweep_csv, ["n", "N", "chi", "epsilon", "s_star", "P_s",
                          "norm_drift", "accepted_steps", "status"], rows)

    crossings = {}
    for chi in chis:
        cross = next((r["n"] for r in rows
                      if r["chi"] == chi and r["P_s"] < CROSSING_THRESHOLD), None)
        crossings[repr(chi)] = cross
    _merge_sidecar(out_dir, {
        "crossing_threshold": CROSSING_THRESHOLD,
        "crossings": crossings,
        "chi_epsilon": epsilon,
    })
    wall = time.perf_counter() - t0
    failures = sum(r["status"] != "ok" for r in rows)
    write_manifest(out_dir, "chi-sweep", cfg, [sweep_csv], wall)
    _log(f"chi-sweep: {len(rows)} runs, {failures} failures, {wall:.1f}s")
    return failures


# ----------------------------------------------------------- noise sweep

def _noise_job(job):
    n, sigma, k, base_seed, instances, complex_h, epsilon, cfg = job
    N = 1 << n
    params = NoiseParams(sigma=sigma, base_seed=base_seed, instances=instances,
                         complex_hermitian=complex_h)
    sched = exact_schedule(ScheduleParams(N=N, epsilon=epsilon))
    config = _integrator_config(cfg, sched.total_time)
    res = run_noise_instance(n, params, k, schedule=sched, config=config)
    return {
        "n": n, "N": N, "sigma": sigma, "instance_index": k,
        "seed": base_seed, "marked_state": res.params["m"],
        "P_s": res.success_probability, "norm_drift": res.norm_drift,
        "accepted_steps": res.accepted_steps, "status": res.status,
    }


def _noise_grid(cfg) -> list[tuple[int, list[float]]]:
    ns = _get_list(cfg, "noise", "n", int)
    if not ns:
        raise ConfigError("noise.n list is empty")
    sigma_abs = _get_list(cfg, "noise", "sigma")
    grid = []
    for n in ns:
        N = 1 << n
        if sigma_abs:
            sigmas = list(sigma_abs)
        else:
            xs = _get_list(cfg, "noise", "n_sigma_sq")
            if not xs:
                raise ConfigError("provide noise.sigma or noise.n_sigma_sq")
            sigmas = [float(np.sqrt(x / N)) for x in xs]
        grid.append((n, sigmas))
    return grid


def run_noise_sweep(cfg: dict, out_dir: Path, workers: int = 1) -> int:
    """Ensembles of random-matrix perturbations per (size, noise strength).

    Per-instance rows stream into noise_runs.csv as they complete (the
    (n, sigma, instance) order is fixed, so the file is reproducible);
    bootstrap summaries land in noise_summary.csv afterwards.
    """
    t0 = time.perf_counter()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    instances = _get_int(cfg, "noise", "instances")
    base_seed = _get_int(cfg, "noise", "base_seed")
    complex_h = _get_bool(cfg, "noise", "complex_hermitian")
    epsilon = _get_float(cfg, "noise", "epsilon")
    grid = _noise_grid(cfg)

    run_fields = ["n", "N", "sigma", "instance_index", "seed", "marked_state",
                  "P_s", "norm_drift", "accepted_steps", "status"]
    runs_csv = out_dir / "noise_runs.csv"
    failures = 0
    summary_rows = []
    with open(runs_csv, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=run_fields, lineterminator="\n")
        writer.writeheader()
        fh.flush()
        for n, sigmas in grid:
            for sigma in sigmas:
                jobs = [(n, sigma, k, base_seed, instances, complex_h, epsilon, cfg)
                        for k in range(instances)]
                rows = _pool_map(_noise_job, jobs, workers)
                for row in rows:
                    writer.writerow({k: _fmt(row[k]) for k in run_fields})
                fh.flush()
                values = [row["P_s"] for row in rows]
                est = bootstrap_median(values, seed=base_seed)
                bad = sum(row["status"] != "ok" for row in rows)
                failures += bad
                summary_rows.append({
                    "n": n, "N": 1 << n, "sigma": sigma,
                    "n_sigma_sq": (1 << n) * sigma**2,
                    "median_P_s": float(np.median(values)),
                    "mean_of_medians": est.mean_of_medians,
                    "error_bar": est.error_bar, "instances": instances,
                })
                _log(f"noise-sweep: n={n} sigma={sigma:.6g} "
                     f"median={np.median(values):.4g} failures={bad} "
                     f"elapsed={time.perf_counter() - t0:.0f}s")

    summary_csv = out_dir / "noise_summary.csv"
    write_csv(summary_csv, ["n", "N", "sigma", "n_sigma_sq", "median_P_s",
                            "mean_of_medians", "error_bar", "instances"],
              summary_rows)

    fit_points = [(r["N"], r["sigma"], r["median_P_s"]) for r in summary_rows]
    try:
        fitted = fit_decay_constant(fit_points)
    except ValueError:
        fitted = None
    _merge_sidecar(out_dir, {
        "guide_decay_constant": REFERENCE_DECAY_CONSTANT,
        "fitted_decay_constant": fitted,
        "one_over_N": {str(n): 1.0 / (1 << n) for n, _ in grid},
        "noise_epsilon": epsilon,
    })
    wall = time.perf_counter() - t0
    write_manifest(out_dir, "noise-sweep", cfg, [runs_csv, summary_csv], wall)
    _log(f"noise-sweep: done, {failures} failures, {wall:.0f}s")
    return failures


# -------------------------------------------------------- thermal report

def run_thermal_report(cfg: dict, out_dir: Path, workers: int = 1) -> int:
    """Thermal-rate scaling tables, one CSV per bath-parameter policy."""
    t0 = time.perf_counter()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ns = _n_range(cfg, "thermal")
    bath = BathParams(beta=_get_float(cfg, "thermal", "beta"),
                      g=_get_float(cfg, "thermal", "g"))
    epsilon = _get_float(cfg, "thermal", "epsilon")
    policies = [p.strip() for p in cfg["thermal"]["policies"].split(",") if p.strip()]
    for policy in policies:
        if policy not in POLICIES:
            raise ConfigError(f"unknown thermal policy {policy!r}")

    outputs = []
    for policy in policies:
        rows = scaling_report(ns, bath, policy, epsilon=epsilon)
        path = out_dir / f"thermal_{policy}.csv"
        write_csv(path, ["n", "N", "beta", "g", "policy", "thermal_P_at_half",
                         "N_times_thermal_P", "expected_excitations"], rows)
        outputs.append(path)
    _merge_sidecar(out_dir, {"thermal_policies": policies,
                             "thermal_epsilon": epsilon})
    wall = time.perf_counter() - t0
    write_manifest(out_dir, "thermal-report", cfg, outputs, wall)
    _log(f"thermal-report: {len(policies)} policies, {wall:.1f}s")
    return 0


# --------------------------------------------------------------- validate

def run_validate(cfg: dict, out_dir: Path, workers: int = 1) -> int:
    """Fast self-checks of the physics oracles; returns failure count."""
    from .spectrum import dense_oracle, gap
    from .schedule import s_exact, total_time as sched_total_time

    checks = []

    def check(name, ok, detail=""):
        checks.append((name, bool(ok)))
        _log(f"{'PASS' if ok else 'FAIL'} {name}" + (f" ({detail})" if detail else ""))

    rng = np.random.default_rng(0)
    worst = 0.0
    for n in range(2, 7):
        N = 1 << n
        for s in rng.uniform(0.0, 1.0, size=5):
            evals, _ = dense_oracle(HamiltonianSpec(ProblemInstance(n)), float(s))
            d = gap(float(s), N)
            expect = np.sort(np.concatenate(
                [[0.5 * (1 - d), 0.5 * (1 + d)], np.ones(N - 2)]))
            worst = max(worst, float(np.max(np.abs(np.sort(evals) - expect))))
    check("closed-form spectrum vs dense diagonalization", worst < 1e-10,
          f"max dev {worst:.2e}")

    params = ScheduleParams(N=1 << 10)
    T = params.total_time
    bvals = (s_exact(0.0, params), s_exact(0.5 * T, params), s_exact(T, params))
    check("schedule boundary values", bvals == (0.0, 0.5, 1.0), str(bvals))

    ts = np.linspace(0.05 * T, 0.95 * T, 9)
    h = 1e-5 * T
    fd = (s_exact(ts + h, params) - s_exact(ts - h, params)) / (2 * h)
    expect = params.epsilon * gap(s_exact(ts, params), params.N) ** 2
    rel = float(np.max(np.abs(fd / expect - 1.0)))
    check("schedule slope matches eps*gap^2", rel < 1e-6, f"max rel {rel:.2e}")

    res = evolve(HamiltonianSpec(ProblemInstance(8)),
                 exact_schedule(ScheduleParams(N=256)))
    check("unperturbed anneal succeeds",
          res.ok and res.success_probability > 0.9,
          f"P_s={res.success_probability:.4f} drift={res.norm_drift:.2e}")

    res_full = evolve(HamiltonianSpec(ProblemInstance(6)),
                      exact_schedule(ScheduleParams(N=64)), space="full")
    res_red = evolve(HamiltonianSpec(ProblemInstance(6)),
                     exact_schedule(ScheduleParams(N=64)), space="reduced")
    dev = abs(res_full.success_probability - res_red.success_probability)
    check("reduced and full space agree", dev < 1e-6, f"dev {dev:.2e}")

    p = NoiseParams(sigma=0.02, base_seed=7, instances=2)
    a = run_noise_instance(4, p, 1)
    b = run_noise_instance(4, p, 1)
    check("noise instance determinism",
          a.success_probability == b.success_probability
          and a.params["m"] == b.params["m"])

    failures = sum(not ok for _, ok in checks)
    _log(f"validate: {len(checks) - failures}/{len(checks)} checks passed")
    return failures

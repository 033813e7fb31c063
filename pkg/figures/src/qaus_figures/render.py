"""Figure builders for the experiment CSV artifacts.

Each builder takes the parsed CSV rows plus the plot_params.json sidecar
and returns a matplotlib figure together with a dictionary of every
plotted array (dumped alongside the images so numbers can be checked
without re-reading pixels).  Guide-curve constants -- decay constants,
crossing thresholds, asymptote levels -- come exclusively from the
sidecar; a missing column or sidecar key is a schema error.
"""

import csv
import hashlib
import json
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


class SchemaError(Exception):
    """An input CSV or sidecar does not match the expected schema."""


def load_csv(path: Path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"{path}: no such file")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file")
        rows = []
        for raw in reader:
            row = {}
            for key, value in raw.items():
                if key is None or value is None:
                    raise SchemaError(f"{path}: ragged row {raw}")
                try:
                    row[key] = float(value)
                except ValueError:
                    row[key] = value
            rows.append(row)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def require_columns(rows: list[dict], columns: set[str], path: Path):
    missing = columns - set(rows[0])
    if missing:
        raise SchemaError(f"{path}: missing columns {sorted(missing)}")


def load_sidecar(csv_paths: list[Path]) -> dict:
    """Merge plot_params.json from every directory holding an input CSV."""
    params = {}
    for directory in dict.fromkeys(Path(p).resolve().parent for p in csv_paths):
        sidecar = directory / "plot_params.json"
        if sidecar.exists():
            params.update(json.loads(sidecar.read_text()))
    return params


def require_params(params: dict, keys: set[str]):
    missing = keys - set(params)
    if missing:
        raise SchemaError(
            f"plot_params.json sidecar: missing keys {sorted(missing)}")


def input_hash(csv_paths: list[Path]) -> str:
    digest = hashlib.sha256()
    for path in csv_paths:
        digest.update(Path(path).read_bytes())
    for directory in dict.fromkeys(Path(p).resolve().parent for p in csv_paths):
        sidecar = directory / "plot_params.json"
        if sidecar.exists():
            digest.update(sidecar.read_bytes())
    return digest.hexdigest()[:10]


def _series(rows, key_col, x_col, y_col):
    """Group rows into {key: (x array, y array)} sorted by x."""
    out = {}
    for row in rows:
        out.setdefault(row[key_col], []).append((row[x_col], row[y_col]))
    return {
        key: tuple(np.array(pairs).T[i] for i in (0, 1))
        for key, pairs in ((k, sorted(v)) for k, v in out.items())
    }


# --------------------------------------------------------------- builders

def _fig_schedule_curves(csv_paths, params):
    """fig1a: interpolation fraction s versus scaled time t/T, the exact
    locally adiabatic curve against its piecewise approximations."""
    rows = load_csv(csv_paths[0])
    require_columns(rows, {"n", "kind", "t", "s"}, csv_paths[0])
    require_params(params, {"schedule_curve_n"})
    fig, ax = plt.subplots(figsize=(4.2, 3.4), layout="constrained")
    data = {}
    total_time = max(r["t"] for r in rows)
    for kind, (t, s) in sorted(_series(rows, "kind", "t", "s").items()):
        x = t / total_time
        if kind == "exact":
            ax.plot(x, s, "k-", lw=1.8, label="exact", zorder=3)
        else:
            ax.plot(x, s, "o--", ms=4, lw=1.0,
                    label=f"{kind.lstrip('k')} pieces")
        data[kind] = {"t_over_T": x.tolist(), "s": s.tolist()}
    ax.set_xlabel(r"$t\,/\,T$")
    ax.set_ylabel(r"$s(t)$")
    ax.set_title(f"n = {int(params['schedule_curve_n'])}", fontsize=10)
    ax.legend(fontsize=7, frameon=False)
    return fig, {"series": data, "total_time": total_time}


def _fig_schedule_success(csv_paths, params):
    """fig1b: final success probability versus problem size for each
    schedule variant."""
    rows = load_csv(csv_paths[0])
    require_columns(rows, {"n", "k_pieces", "P_s"}, csv_paths[0])
    fig, ax = plt.subplots(figsize=(4.2, 3.4), layout="constrained")
    data = {}

    def order(kind):
        return (1, 0) if kind == "exact" else (0, int(kind))

    for kind, (n, p) in sorted(
            _series(rows, "k_pieces", "n", "P_s").items(),
            key=lambda kv: order(kv[0])):
        label = "exact" if kind == "exact" else f"{int(float(kind))} pieces"
        style = "ks-" if kind == "exact" else "o-"
        ax.plot(n, p, style, ms=4, lw=1.2, label=label)
        data[str(kind)] = {"n": n.tolist(), "P_s": p.tolist()}
    ax.set_xlabel("number of qubits  n")
    ax.set_ylabel("success probability")
    ax.set_ylim(0.0, 1.05)
    ax.legend(fontsize=7, frameon=False)
    return fig, {"series": data}


def _fig_chi(csv_paths, params):
    """fig2: success probability versus size for each Hamiltonian
    misspecification strength, with the crossing threshold."""
    rows = load_csv(csv_paths[0])
    require_columns(rows, {"n", "chi", "P_s"}, csv_paths[0])
    require_params(params, {"crossing_threshold", "crossings"})
    fig, ax = plt.subplots(figsize=(4.2, 3.4), layout="constrained")
    data = {}
    for chi, (n, p) in sorted(_series(rows, "chi", "n", "P_s").items(),
                              reverse=True):
        ax.semilogy(n, p, "o-", ms=4, lw=1.2, label=rf"$\chi = {chi:g}$")
        data[repr(chi)] = {"n": n.tolist(), "P_s": p.tolist()}
    threshold = params["crossing_threshold"]
    ax.axhline(threshold, color="0.4", lw=0.8, ls=":")
    ax.set_xlabel("number of qubits  n")
    ax.set_ylabel("success probability")
    ax.legend(fontsize=7, frameon=False)
    return fig, {"series": data, "crossing_threshold": threshold,
                 "crossings": params["crossings"]}


def _fig_noise(csv_paths, params):
    """fig3: median success probability versus N sigma^2 for each size,
    with the exponential small-noise guide and the 1/N asymptotes."""
    rows = load_csv(csv_paths[0])
    require_columns(rows, {"n", "n_sigma_sq", "median_P_s"}, csv_paths[0])
    require_params(params, {"guide_decay_constant", "one_over_N"})
    fig, ax = plt.subplots(figsize=(4.2, 3.4), layout="constrained")
    data = {}
    x_max = 0.0
    for n, (x, med) in sorted(_series(rows, "n", "n_sigma_sq",
                                      "median_P_s").items()):
        ax.loglog(x, med, "o-", ms=4, lw=1.2, label=f"n = {int(n)}")
        data[str(int(n))] = {"n_sigma_sq": x.tolist(),
                             "median_P_s": med.tolist()}
        x_max = max(x_max, float(x[-1]))
    c = params["guide_decay_constant"]
    xs = np.geomspace(min(v["n_sigma_sq"][0] for v in data.values()), 1.0, 64)
    guide = np.exp(-c * xs)
    ax.loglog(xs, guide, "k--", lw=1.0, label=rf"$e^{{-{c:g}\,N\sigma^2}}$")
    asymptotes = {k: float(v) for k, v in params["one_over_N"].items()}
    for level in asymptotes.values():
        ax.axhline(level, color="0.6", lw=0.6, ls=":")
    ax.set_xlabel(r"$N\sigma^2$")
    ax.set_ylabel("median success probability")
    ax.legend(fontsize=7, frameon=False)
    return fig, {"series": data,
                 "guide": {"n_sigma_sq": xs.tolist(), "value": guide.tolist(),
                           "decay_constant": c},
                 "one_over_N": asymptotes,
                 "fitted_decay_constant": params.get("fitted_decay_constant")}


def _fig_thermal(csv_paths, params):
    """thermal: rescaled equilibrium success N*P and expected excitation
    count versus size, one curve per bath-scaling policy."""
    require_params(params, {"thermal_policies"})
    fig, (ax_p, ax_x) = plt.subplots(1, 2, figsize=(7.6, 3.2), layout="constrained")
    data = {}
    for path in csv_paths:
        rows = load_csv(path)
        require_columns(rows, {"n", "policy", "N_times_thermal_P",
                               "expected_excitations"}, path)
        policy = rows[0]["policy"]
        n = np.array([r["n"] for r in rows])
        nxp = np.array([r["N_times_thermal_P"] for r in rows])
        exc = np.array([r["expected_excitations"] for r in rows])
        label = str(policy).replace("_", " ")
        ax_p.semilogy(n, nxp, "o-", ms=4, lw=1.2, label=label)
        ax_x.semilogy(n, exc, "o-", ms=4, lw=1.2, label=label)
        data[str(policy)] = {"n": n.tolist(), "N_times_thermal_P": nxp.tolist(),
                             "expected_excitations": exc.tolist()}
    ax_p.set_xlabel("number of qubits  n")
    ax_p.set_ylabel(r"$N \cdot P_{\mathrm{thermal}}$")
    ax_x.set_xlabel("number of qubits  n")
    ax_x.set_ylabel("expected excitations")
    ax_x.legend(fontsize=7, frameon=False)
    return fig, {"series": data, "policies": params["thermal_policies"]}


FIGURES = {
    "fig1a": _fig_schedule_curves,
    "fig1b": _fig_schedule_success,
    "fig2": _fig_chi,
    "fig3": _fig_noise,
    "thermal": _fig_thermal,
}


def render_figure(figure_id: str, csv_paths: list, out_dir) -> dict:
    """Render one figure; write vector + raster images and a JSON dump of
    the plotted arrays.  Returns {kind: path}."""
    if figure_id not in FIGURES:
        raise SchemaError(f"unknown figure id {figure_id!r}; "
                          f"choose from {sorted(FIGURES)}")
    csv_paths = [Path(p) for p in csv_paths]
    if not csv_paths:
        raise SchemaError("at least one input CSV is required")
    params = load_sidecar(csv_paths)
    fig, data = FIGURES[figure_id](csv_paths, params)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{figure_id}_{input_hash(csv_paths)}"
    written = {}
    for kind, ext, kwargs in (("vector", "pdf", {}),
                              ("raster", "png", {"dpi": 200})):
        path = out_dir / f"{stem}.{ext}"
        fig.savefig(path, **kwargs)
        written[kind] = path
    plt.close(fig)
    data_path = out_dir / f"{stem}.json"
    data_path.write_text(json.dumps(
        {"figure": figure_id, "inputs": [str(p) for p in csv_paths],
         "data": data}, indent=2) + "\n")
    written["data"] = data_path
    return written

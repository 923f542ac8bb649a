"""Config-driven command line: simulate, predict, verify, and compare.

Every subcommand reads one TOML configuration (from ``--config PATH`` or a
packaged ``--preset NAME``), resolves defaults, and drops its artifacts plus
an ``effective_config.toml`` echo into the output directory.  Re-running any
command from the echoed file reproduces the outputs byte for byte.

Exit codes: 0 success, 2 bad configuration or flags, 3 numerical failure,
64 unknown subcommand.
"""

import argparse
import cmath
import json
import math
import sys
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - Python 3.10 fallback
    import tomli as tomllib

import numpy as np

from .analysis import classify_case, compare_report, exit_times, predicted_exit, \
    write_comparison_csv, write_comparison_json
from .asymptotics import curve_h, curve_hopf, curve_stbc, data_config, data_from_config
from .contour import build_contour, integrate_segments, segment_asymptotics_check
from .core import ExperimentConfig, Grid, PhysParams, from_logpolar, logpolar_sum
from .qss import base_expansion, qss_residual
from .solver import Trajectory, read_snapshots, run, write_snapshots, write_trajectory_csv
from .sources import kernel_g, source_config, source_from_config

OK = 0
BAD_CONFIG = 2
NUMERICAL = 3
BAD_COMMAND = 64

_USAGE = """\
usage: slowhopf COMMAND --config PATH | --preset NAME [--out DIR] [--threads N]

commands:
  simulate        integrate the ramped PDE; writes trajectory.csv + snapshots.dhb
  curves          sample the three predicted onset curves; writes curve_*.csv
  verify-contour  per-segment quadrature asymptotics and a prefactor eps-scan
  verify-qss      expansion-residual eps-scans (orders 1 and 2)
  classify        name the delayed-onset scenario; writes classification.json
  report          predicted vs measured exits; writes report.csv + report.json

Each command also echoes the fully resolved configuration to
OUT/effective_config.toml; `slowhopf COMMAND --help` lists the flags.
"""


# --- configuration ----------------------------------------------------------------

_SIM_DEFAULTS = {
    "dt": "auto",
    "record_every": 0.005,
    "exit_threshold": 0.1,
    "cubic": True,
    "diffusion_method": "cn",
}
_ANALYSIS_DEFAULTS = {"regime": "base", "tolerance": 0.05, "case_delta": 0.05}
_VERIFY_DEFAULTS = {
    "x": 1.0,
    "mu": 0.3,
    "kind": "Cr",
    "scan_x": 0.4,
    "eps_scan": [0.04, 0.01, 0.0025],
    "qss_mu": -1.0,
    "qss_eps": [0.04, 0.02, 0.01, 0.005, 0.0025],
}


@dataclass
class RunSpec:
    """One fully resolved configuration, shared by all subcommands."""

    params: PhysParams
    source: object
    data: object
    grid: Grid
    mu_end: object  # float, or None when the config omits it
    dt: object  # float or "auto"
    record_every: float
    exit_threshold: float
    cubic: bool
    diffusion_method: str
    analysis: dict
    verify: dict


def _float(sec, key, where):
    v = sec[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValueError(f"[{where}] {key} must be a number, got {v!r}")
    return float(v)


def _float_list(sec, key, where):
    v = sec[key]
    if not isinstance(v, list) or not v or any(
        isinstance(u, bool) or not isinstance(u, (int, float)) for u in v
    ):
        raise ValueError(f"[{where}] {key} must be a non-empty list of numbers")
    return [float(u) for u in v]


def _section(raw, name, allowed, defaults=()):
    sec = dict(raw.get(name, {}))
    out = dict(defaults)
    out.update(sec)
    unknown = set(sec) - set(allowed)
    if unknown:
        raise ValueError(f"[{name}] has unknown keys: {', '.join(sorted(unknown))}")
    missing = [k for k in allowed if k not in out and k not in defaults]
    return out, missing


def build_spec(raw) -> RunSpec:
    """Validate a parsed config mapping and resolve every default."""
    known = {"params", "source", "initial_data", "sim", "analysis", "verify"}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown config sections: {', '.join(sorted(unknown))}")
    for name in ("params", "source", "initial_data", "sim"):
        if name not in raw:
            raise ValueError(f"config is missing the [{name}] section")

    par, _ = _section(
        raw, "params",
        ("eps", "omega0", "alpha", "d_R", "d_I", "beta", "gamma", "mu0"),
        {"d_I": 0.0, "beta": 0.5, "gamma": 1.0, "mu0": -1.0},
    )
    for key in ("eps", "omega0", "alpha", "d_R"):
        if key not in par:
            raise ValueError(f"[params] is missing {key}")
    params = PhysParams(**{k: _float(par, k, "params") for k in par})

    source = source_from_config(raw["source"])
    data = data_from_config(raw["initial_data"])

    sim, _ = _section(
        raw, "sim",
        ("half_length", "n_points", "mu_end") + tuple(_SIM_DEFAULTS),
        _SIM_DEFAULTS,
    )
    for key in ("half_length", "n_points"):
        if key not in sim:
            raise ValueError(f"[sim] is missing {key}")
    n_points = sim["n_points"]
    if isinstance(n_points, bool) or not isinstance(n_points, int):
        raise ValueError(f"[sim] n_points must be an integer, got {n_points!r}")
    grid = Grid(_float(sim, "half_length", "sim"), n_points)
    mu_end = _float(sim, "mu_end", "sim") if "mu_end" in sim else None
    dt = sim["dt"]
    if isinstance(dt, str):
        if dt != "auto":
            raise ValueError(f'[sim] dt must be a positive number or "auto", got {dt!r}')
    else:
        dt = _float(sim, "dt", "sim")
        if dt <= 0:
            raise ValueError(f"[sim] dt must be positive, got {dt}")
    record_every = _float(sim, "record_every", "sim")
    if record_every <= 0:
        raise ValueError(f"[sim] record_every must be positive, got {record_every}")
    exit_threshold = _float(sim, "exit_threshold", "sim")
    if exit_threshold <= 0:
        raise ValueError(f"[sim] exit_threshold must be positive, got {exit_threshold}")
    if sim["diffusion_method"] not in ("cn", "rk4"):
        raise ValueError(f"[sim] unknown diffusion method {sim['diffusion_method']!r}")

    ana, _ = _section(raw, "analysis", tuple(_ANALYSIS_DEFAULTS), _ANALYSIS_DEFAULTS)
    if not isinstance(ana["regime"], str):
        raise ValueError("[analysis] regime must be a string")
    analysis = {
        "regime": ana["regime"],
        "tolerance": _float(ana, "tolerance", "analysis"),
        "case_delta": _float(ana, "case_delta", "analysis"),
    }

    ver, _ = _section(raw, "verify", tuple(_VERIFY_DEFAULTS), _VERIFY_DEFAULTS)
    if not isinstance(ver["kind"], str):
        raise ValueError("[verify] kind must be a string")
    verify = {
        "x": _float(ver, "x", "verify"),
        "mu": _float(ver, "mu", "verify"),
        "kind": ver["kind"],
        "scan_x": _float(ver, "scan_x", "verify"),
        "eps_scan": _float_list(ver, "eps_scan", "verify"),
        "qss_mu": _float(ver, "qss_mu", "verify"),
        "qss_eps": _float_list(ver, "qss_eps", "verify"),
    }

    return RunSpec(
        params=params,
        source=source,
        data=data,
        grid=grid,
        mu_end=mu_end,
        dt=dt,
        record_every=record_every,
        exit_threshold=exit_threshold,
        cubic=bool(sim["cubic"]),
        diffusion_method=str(sim["diffusion_method"]),
        analysis=analysis,
        verify=verify,
    )


def _preset_dir():
    return resources.files("slowhopf") / "presets"


def preset_names():
    return sorted(t.name[:-5] for t in _preset_dir().iterdir() if t.name.endswith(".toml"))


def load_spec(config_path=None, preset=None) -> RunSpec:
    """Load and resolve a configuration file or packaged preset."""
    if preset is not None:
        entry = _preset_dir() / f"{preset}.toml"
        try:
            text = entry.read_text()
        except FileNotFoundError:
            raise ValueError(
                f"unknown preset {preset!r}; available: {', '.join(preset_names())}"
            ) from None
    else:
        text = Path(config_path).read_text()
    return build_spec(tomllib.loads(text))


# --- effective-config echo --------------------------------------------------------


def _toml_scalar(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return repr(v)
    if isinstance(v, float):
        return repr(v)  # repr round-trips through the TOML parser exactly
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_scalar(u) for u in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__} to TOML")


def effective_sections(spec: RunSpec) -> dict:
    p = spec.params
    sim = {"half_length": spec.grid.half_length, "n_points": spec.grid.n_points}
    if spec.mu_end is not None:
        sim["mu_end"] = spec.mu_end
    sim.update(
        dt=spec.dt,
        record_every=spec.record_every,
        exit_threshold=spec.exit_threshold,
        cubic=spec.cubic,
        diffusion_method=spec.diffusion_method,
    )
    return {
        "params": {
            k: getattr(p, k)
            for k in ("eps", "omega0", "alpha", "d_R", "d_I", "beta", "gamma", "mu0")
        },
        "source": source_config(spec.source),
        "initial_data": data_config(spec.data),
        "sim": sim,
        "analysis": dict(spec.analysis),
        "verify": dict(spec.verify),
    }


def _echo_config(spec: RunSpec, out: Path):
    lines = []
    for name, sec in effective_sections(spec).items():
        lines.append(f"[{name}]")
        for key, value in sec.items():
            lines.append(f"{key} = {_toml_scalar(value)}")
        lines.append("")
    (out / "effective_config.toml").write_text("\n".join(lines))


# --- subcommands ------------------------------------------------------------------


def _experiment(spec: RunSpec) -> ExperimentConfig:
    if spec.mu_end is None:
        raise ValueError("[sim] mu_end is required to run the PDE")
    if spec.params.d_R <= 0:
        raise ValueError("PDE runs need d_R > 0; diffusion-free reductions are library-only")
    return ExperimentConfig(
        spec.params,
        spec.grid,
        spec.source,
        spec.data,
        mu_end=spec.mu_end,
        dt=spec.dt,
        record_every=spec.record_every,
        exit_threshold=spec.exit_threshold,
        cubic=spec.cubic,
        diffusion_method=spec.diffusion_method,
    )


def cmd_simulate(spec: RunSpec, out: Path, threads: int) -> None:
    cfg = _experiment(spec)
    traj = run(cfg)
    write_trajectory_csv(traj, cfg.grid, out / "trajectory.csv")
    write_snapshots(traj, cfg.params, cfg.grid, out / "snapshots.dhb")
    print(f"{len(traj.snapshots)} snapshots (dt={traj.dt:g}) -> {out}/trajectory.csv")


def _write_curve_csv(sample, path):
    with open(path, "w") as f:
        f.write("x,mu,kind\n")
        for xj, mj in zip(sample.x, sample.mu):
            f.write(f"{xj:.17g},{mj:.17g},{sample.kind}\n")


def cmd_curves(spec: RunSpec, out: Path, threads: int) -> None:
    regime = spec.analysis["regime"]
    stbc = curve_stbc(spec.source, spec.grid, spec.params, regime=regime, threads=threads)
    hom = curve_h(spec.data, spec.source, spec.grid, spec.params, threads=threads)
    hopf = curve_hopf(spec.source, spec.grid, spec.params, regime=regime, threads=threads)
    for sample, name in ((stbc, "curve_stbc"), (hom, "curve_h"), (hopf, "curve_hopf")):
        _write_curve_csv(sample, out / f"{name}.csv")
    print(f"stbc/h/hopf sampled on {spec.grid.n_points} points -> {out}")


def _fit_slope(eps_values, errors):
    eps_log = np.log(np.asarray(eps_values, dtype=float))
    err_log = np.log(np.maximum(np.asarray(errors, dtype=float), 1e-300))
    return float(np.polyfit(eps_log, err_log, 1)[0])


def _stokes_prefactor_error(spec: RunSpec, p: PhysParams) -> float:
    v = spec.verify
    path = build_contour(v["kind"], p.mu0, v["mu"], p)
    parts = integrate_segments(path, spec.source, v["scan_x"], p)
    numeric = from_logpolar(*logpolar_sum([(q["log_amp"], q["phase"]) for q in parts[:3]]))
    target = math.sqrt(2.0 * math.pi) * complex(
        np.asarray(kernel_g(spec.source, v["scan_x"], v["mu"] + 1j * p.omega0, p.d))
    )
    return abs(numeric - target) / abs(target)


def cmd_verify_contour(spec: RunSpec, out: Path, threads: int) -> None:
    v = spec.verify
    p = spec.params
    path = build_contour(v["kind"], p.mu0, v["mu"], p)
    rows = segment_asymptotics_check(path, spec.source, v["x"], p)
    with open(out / "contour_report.json", "w") as f:
        json.dump(rows, f, indent=2, sort_keys=True)
        f.write("\n")

    pairs = []
    for eps in v["eps_scan"]:
        err = _stokes_prefactor_error(spec, replace(p, eps=eps))
        pairs.append({"eps": eps, "error": err})
    slope = _fit_slope([q["eps"] for q in pairs], [q["error"] for q in pairs])
    scan = {
        "scans": [
            {"label": "stokes_prefactor_rel_error", "pairs": pairs, "slope": slope}
        ]
    }
    with open(out / "contour_scan.json", "w") as f:
        json.dump(scan, f, indent=2, sort_keys=True)
        f.write("\n")
    print(f"{len(rows)} segments checked; prefactor scan slope {slope:.3f} -> {out}")


def cmd_verify_qss(spec: RunSpec, out: Path, threads: int) -> None:
    v = spec.verify
    scans = []
    for order in (1, 2):
        pairs = []
        for eps in v["qss_eps"]:
            p_eps = replace(spec.params, eps=eps)
            q = base_expansion(spec.source, p_eps, order=order)
            res = qss_residual(q, spec.source, p_eps, v["qss_mu"], spec.grid)
            pairs.append({"eps": eps, "error": res})
        slope = _fit_slope([q["eps"] for q in pairs], [q["error"] for q in pairs])
        scans.append({"label": f"base-order-{order}", "pairs": pairs, "slope": slope})
    with open(out / "qss_scan.json", "w") as f:
        json.dump({"scans": scans}, f, indent=2, sort_keys=True)
        f.write("\n")
    print("; ".join(f"{s['label']} slope {s['slope']:.3f}" for s in scans) + f" -> {out}")


def cmd_classify(spec: RunSpec, out: Path, threads: int) -> None:
    pred = predicted_exit(spec.source, spec.data, spec.params, spec.grid, threads=threads)
    rep = classify_case(pred, spec.params, delta=spec.analysis["case_delta"])
    counts = {}
    for w in rep.winner:
        counts[str(w)] = counts.get(str(w), 0) + 1
    payload = {
        "case": rep.case,
        "crossovers": list(rep.crossovers),
        "winner_counts": counts,
    }
    with open(out / "classification.json", "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    at = ", ".join(f"{c:.3f}" for c in rep.crossovers) or "none"
    print(f"case {rep.case}; crossovers: {at}")


def _trajectory_for_report(spec: RunSpec, out: Path):
    store = out / "snapshots.dhb"
    if store.exists():
        p, grid, snaps = read_snapshots(store)
        if p != spec.params or grid != spec.grid:
            raise ValueError(
                f"{store} was produced by a different configuration; "
                "re-run simulate or point --out elsewhere"
            )
        return Trajectory(snaps, "from-artifacts", float("nan"))
    cfg = _experiment(spec)
    traj = run(cfg)
    write_trajectory_csv(traj, cfg.grid, out / "trajectory.csv")
    write_snapshots(traj, cfg.params, cfg.grid, store)
    return traj


def cmd_report(spec: RunSpec, out: Path, threads: int) -> None:
    if spec.analysis["regime"] != "base":
        raise ValueError("report compares against the base-regime expansion only")
    traj = _trajectory_for_report(spec, out)
    q = base_expansion(spec.source, spec.params)
    measured = exit_times(traj, q, threshold=spec.exit_threshold)
    pred = predicted_exit(spec.source, spec.data, spec.params, spec.grid, threads=threads)
    table = compare_report(pred, measured, tolerance=spec.analysis["tolerance"])
    write_comparison_csv(table, out / "report.csv")
    write_comparison_json(table, out / "report.json")
    s = table.summary
    print(
        f"max |diff| {s['max_abs_diff']:.4g} over {s['n_compared']} comparable "
        f"points -> {out}/report.csv"
    )


_COMMANDS = {
    "simulate": cmd_simulate,
    "curves": cmd_curves,
    "verify-contour": cmd_verify_contour,
    "verify-qss": cmd_verify_qss,
    "classify": cmd_classify,
    "report": cmd_report,
}


# --- entry point ------------------------------------------------------------------


def _parser(cmd: str) -> argparse.ArgumentParser:
    pr = argparse.ArgumentParser(prog=f"slowhopf {cmd}")
    where = pr.add_mutually_exclusive_group(required=True)
    where.add_argument("--config", metavar="PATH", help="TOML configuration file")
    where.add_argument("--preset", metavar="NAME",
                       help="packaged configuration (see slowhopf.presets)")
    pr.add_argument("--out", metavar="DIR", default=".", help="artifact directory")
    pr.add_argument("--threads", metavar="N", type=int, default=1,
                    help="worker threads for curve sampling")
    return pr


def main(argv=None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    if args and args[0] in ("-h", "--help"):
        print(_USAGE, end="")
        return OK
    if not args or args[0] not in _COMMANDS:
        sys.stderr.write(_USAGE)
        if args:
            sys.stderr.write(f"slowhopf: unknown command {args[0]!r}\n")
        return BAD_COMMAND
    cmd = args[0]

    try:
        ns = _parser(cmd).parse_args(args[1:])
    except SystemExit as stop:  # argparse already printed the reason
        return int(stop.code or 0)

    try:
        if ns.threads < 1:
            raise ValueError(f"--threads must be at least 1, got {ns.threads}")
        spec = load_spec(ns.config, ns.preset)
        out = Path(ns.out)
        out.mkdir(parents=True, exist_ok=True)
        _echo_config(spec, out)
        _COMMANDS[cmd](spec, out, ns.threads)
    except (ValueError, OSError) as bad:
        sys.stderr.write(f"slowhopf {cmd}: {bad}\n")
        return BAD_CONFIG
    except (ArithmeticError, RuntimeError) as num:
        sys.stderr.write(f"slowhopf {cmd}: numerical failure: {num}\n")
        return NUMERICAL
    return OK


if __name__ == "__main__":
    sys.exit(main())

"""``qbatt`` command line: JSON-configured runs written as CSV.

    qbatt <mode> --config run.json --out result.csv [--seed 42] [--threads 4]

Exit status: 0 on success, 1 for configuration errors, 2 when a solver
failed (failed grid points keep their row with an explicit status), and
for ``audit`` the number of failed checks (at most 125).
"""
import argparse
from dataclasses import dataclass, field
import hashlib
from importlib import resources
import io
import json
import sys

import jsonschema
import numpy as np

from . import __version__
from .audit import audit, exit_code
from .dynamics import evolve
from .errors import ConfigError, QBattError
from .figures import figure, failed, recipe
from .metrics import ground_state
from .model import build_liouvillian, default_basis
from .sweep import (
    OK_STATUSES,
    Axis,
    evaluate_point,
    evaluate_reference,
    grid,
    optimize,
    params_from_dict,
    run_grid,
)
from .trajectories import RNG_ALGORITHM, TrajectoryConfig, ensemble_average, run_trajectory

MODES = ("steady", "dynamics", "trajectories", "sweep2d", "optimize", "figure", "audit", "reference")
DEFAULT_OUTPUTS = ["E", "ergotropy", "R", "density", "avg_ergotropy"]
UNITS = "energies in omega0; rates (gammaC, gammaB, J, F, optimal_gammaC) in g; times in 1/g; g in omega0"

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2


@dataclass
class RunResult:
    columns: list
    rows: list
    exit_code: int = EXIT_OK
    notes: list = field(default_factory=list)
    rng: str = "none"


def load_schema():
    return json.loads(resources.files("qbatt").joinpath("config_schema.json").read_text())


def _field_path(error):
    path = "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in error.absolute_path).lstrip(".")
    if error.validator == "additionalProperties":
        extra = sorted(set(error.instance) - set(error.schema.get("properties", {})))
        return ".".join(filter(None, [path, extra[0] if extra else ""]))
    return path or "<root>"


def validate_config(config, mode):
    """Schema check plus the constraints JSON Schema cannot express."""
    if not isinstance(config, dict):
        raise ConfigError("configuration must be a JSON object", field="<root>")
    try:
        jsonschema.validate(config, load_schema())
    except jsonschema.ValidationError as err:
        where = _field_path(err)
        raise ConfigError(f"{where}: {err.message}", field=where) from None
    if config.get("mode", mode) != mode:
        raise ConfigError(f"mode: config says {config['mode']!r}, command line says {mode!r}", field="mode")
    for i, axis in enumerate(config.get("axes", [])):
        if not axis["min"] < axis["max"]:
            raise ConfigError(f"axes[{i}]: min must be < max", field=f"axes[{i}]")
        if axis.get("scale") == "log" and axis["min"] <= 0:
            raise ConfigError(f"axes[{i}]: log scale needs min > 0", field=f"axes[{i}]")
    names = [a["name"] for a in config.get("axes", [])]
    if len(set(names)) != len(names):
        raise ConfigError("axes: duplicate axis name", field="axes")
    if mode == "sweep2d" and not names:
        raise ConfigError("axes: sweep2d needs at least one axis", field="axes")
    if "F" in names and mode != "reference":
        raise ConfigError("axes: F is only meaningful in reference mode", field="axes")
    if mode == "figure":
        if "figure_id" not in config:
            raise ConfigError("figure_id: required in figure mode", field="figure_id")
        try:
            recipe(config["figure_id"])
        except QBattError as exc:
            raise ConfigError(f"figure_id: {exc}", field="figure_id") from None
    try:
        params = params_from_dict(config.get("base"))
    except ValueError as exc:
        raise ConfigError(f"base: {exc}", field="base") from None
    if mode == "trajectories" and params.N != 1:
        raise ConfigError("base.N: trajectories need N = 1", field="base.N")
    return params


def _axes(config):
    return [Axis(a["name"], a["min"], a["max"], a["points"], a.get("scale", "linear")) for a in config.get("axes", [])]


def _status_exit(rows):
    return EXIT_OK if all(r["status"] in OK_STATUSES for r in rows) else EXIT_SOLVER


def _grid_rows(fn, axes, outputs, threads):
    names = [a.name for a in axes]
    points = grid(axes) if axes else [()]
    rows = []
    for p, (status, values) in zip(points, run_grid(fn, points, threads)):
        rows.append({**dict(zip(names, p)), **values, "status": status})
    return names + list(outputs) + ["status"], rows


def run_steady(config, params, threads, sweep=False):
    outputs = config.get("outputs", DEFAULT_OUTPUTS)
    axes = _axes(config) if sweep else []
    names = [a.name for a in axes]
    objective, sector = config.get("objective", "E"), config.get("sector", "full")

    def fn(p):
        return evaluate_point(params, names, p, outputs, objective, sector)

    columns, rows = _grid_rows(fn, axes, outputs, threads)
    return RunResult(columns, rows, _status_exit(rows))


def run_optimize(config, params, threads):
    objective, sector = config.get("objective", "E"), config.get("sector", "full")
    free = tuple(config.get("free", ["gammaC", "delta"] if params.N == 1 else ["gammaC"]))
    columns = ["objective", "value", "optimal_gammaC", "optimal_delta", "status"]
    try:
        opt = optimize(params, free, objective, sector)
    except (QBattError, ValueError) as exc:
        return RunResult(columns, [{"objective": objective, "status": type(exc).__name__}], EXIT_SOLVER)
    row = {"objective": objective, "value": opt.value, "optimal_gammaC": opt.gammaC_over_g,
           "optimal_delta": opt.delta, "status": "ok"}
    return RunResult(columns, [row])


def run_reference(config, params, threads):
    ref = config.get("reference", {})
    axes = _axes(config) or [Axis("T", 0.1, 100.0, 40, "log")]
    names = [a.name for a in axes]

    def fn(p):
        return evaluate_reference(params, names, p, ref.get("F", 4.0), ref.get("gammaC", 4.0))

    columns, rows = _grid_rows(fn, axes, ["E", "ergotropy"], threads)
    return RunResult(columns, rows, _status_exit(rows))


def run_dynamics(config, params, threads):
    opts = config.get("dynamics", {})
    L = build_liouvillian(params)
    basis = default_basis(params)
    g = params.g
    dt = opts["dt"] / g if "dt" in opts else None
    record = evolve(L, ground_state(basis.dimension, basis.kind), dt=dt, t_max=opts.get("t_max", 30.0) / g,
                    store_every=opts.get("store_every", 100))
    columns = ["t", "E", "ergotropy", "R", "density", "avg_ergotropy", "status"]
    rows = [
        {"t": t * g, "E": m.stored_energy, "ergotropy": m.ergotropy, "R": m.efficiency_R,
         "density": m.energy_density, "avg_ergotropy": m.avg_ergotropy, "status": "ok"}
        for t, m in zip(record.times, record.observables)
    ]
    return RunResult(columns, rows)


def run_trajectories(config, params, seed):
    opts = config.get("trajectories", {})
    g = params.g
    dt = opts.get("dt_gammaC", 1e-3) / params.gammaC
    steps = max(1, int(round(opts.get("t_max", 30.0) / g / dt)))
    record_every = opts.get("record_every", max(1, steps // 100))
    cfg = TrajectoryConfig(params, dt=dt, steps=steps, ensemble_size=opts.get("ensemble_size", 100),
                           seed=seed, record_every=record_every)
    if cfg.ensemble_size == 1:
        rec = run_trajectory(cfg)
        columns = ["t", "charger_excited", "battery_excited", "photocurrent", "status"]
        rows = [
            {"t": t * g, "charger_excited": p[0], "battery_excited": p[1], "photocurrent": r, "status": "ok"}
            for t, p, r in zip(rec.times, rec.populations, rec.photocurrent)
        ]
    else:
        ens = ensemble_average(cfg)
        columns = ["t", "charger_excited", "charger_excited_se", "battery_excited", "battery_excited_se",
                   "photocurrent", "photocurrent_se", "status"]
        rows = [
            {"t": t * g, "charger_excited": m[0], "charger_excited_se": s[0], "battery_excited": m[1],
             "battery_excited_se": s[1], "photocurrent": c, "photocurrent_se": cs, "status": "ok"}
            for t, m, s, c, cs in zip(ens.times, ens.mean_populations, ens.stderr_populations,
                                      ens.mean_photocurrent, ens.stderr_photocurrent)
        ]
    # photocurrent is recorded per step; the value at t = 0 is undefined
    rows[0]["photocurrent"] = None
    rows[0].pop("photocurrent_se", None)
    return RunResult(columns, rows, notes=[f"dt = {dt * g!r} / g, steps = {steps}"], rng=RNG_ALGORITHM)


def run_figure(config, threads):
    overrides = _axes(config)
    columns, rows, notes = figure(config["figure_id"], overrides, threads, config.get("base"))
    return RunResult(list(columns), rows, EXIT_SOLVER if failed(rows) else EXIT_OK, list(notes))


def run_audit():
    results = audit()
    rows = [{"check": r.name, "residual": r.residual, "tolerance": r.tolerance, "passed": r.passed} for r in results]
    return RunResult(["check", "residual", "tolerance", "passed"], rows, exit_code(results), rng=RNG_ALGORITHM)


def run(mode, config, seed=None, threads=1):
    """Execute one mode on a parsed config; raises ConfigError on bad input."""
    if mode not in MODES:
        raise ConfigError(f"mode: unknown mode {mode!r}", field="mode")
    if mode == "audit":
        if config:
            validate_config(config, mode)
        return run_audit()
    params = validate_config(config, mode)
    seed = config.get("seed", 0) if seed is None else seed
    if mode == "steady":
        return run_steady(config, params, threads)
    if mode == "sweep2d":
        return run_steady(config, params, threads, sweep=True)
    if mode == "optimize":
        return run_optimize(config, params, threads)
    if mode == "reference":
        return run_reference(config, params, threads)
    if mode == "figure":
        return run_figure(config, threads)
    if mode == "dynamics":
        return run_dynamics(config, params, threads)
    return run_trajectories(config, params, seed)


def format_value(x):
    """Shortest round-trip decimal, capped at 12 significant digits."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not np.isfinite(x):
            return repr(x)
        return repr(float(format(x, ".12g")))
    return str(x)


def canonical_json(config):
    return json.dumps(config, sort_keys=True, separators=(",", ":"))


def render_csv(mode, config, result, seed):
    """CSV text: '#' metadata lines, header row, data rows."""
    text = canonical_json(config)
    buf = io.StringIO()
    meta = [
        f"qbatt {__version__}",
        f"mode: {mode}",
        f"config_sha256: {hashlib.sha256(text.encode()).hexdigest()}",
        f"config: {text}",
        f"seed: {seed}",
        f"rng: {result.rng}",
        f"solvers: numpy {np.__version__}",
        f"units: {UNITS}",
    ]
    meta += [f"note: {n}" for n in result.notes]
    for line in meta:
        buf.write(f"# {line}\n")
    buf.write(",".join(result.columns) + "\n")
    for row in result.rows:
        buf.write(",".join(_cell(row.get(c)) for c in result.columns) + "\n")
    return buf.getvalue()


def _cell(x):
    s = format_value(x)
    if any(ch in s for ch in ',"\n'):
        s = '"' + s.replace('"', '""') + '"'
    return s


def read_metadata(path):
    """Parse the '#' header of a CSV written by ``qbatt``; returns a dict."""
    meta = {}
    with open(path) as fh:
        for line in fh:
            if not line.startswith("# "):
                break
            key, _, value = line[2:].rstrip("\n").partition(": ")
            if key == "config":
                value = json.loads(value)
            meta.setdefault(key, value)
    return meta


def build_parser():
    p = argparse.ArgumentParser(prog="qbatt", description="Feedback-charged quantum battery simulator.")
    p.add_argument("mode", choices=MODES)
    p.add_argument("--config", help="JSON configuration file (optional for audit)")
    p.add_argument("--out", help="CSV output path (default: standard output)")
    p.add_argument("--seed", type=int, default=None, help="random seed, overrides the config value")
    p.add_argument("--threads", type=int, default=1, help="worker threads for grid evaluation")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.config is None:
            if args.mode != "audit":
                raise ConfigError("--config is required for this mode", field="--config")
            config = {}
        else:
            try:
                with open(args.config) as fh:
                    config = json.load(fh)
            except OSError as exc:
                raise ConfigError(f"cannot read {args.config}: {exc.strerror}", field="--config") from None
            except json.JSONDecodeError as exc:
                raise ConfigError(f"invalid JSON: {exc}", field="--config") from None
        if args.seed is not None and not 0 <= args.seed < 2 ** 64:
            raise ConfigError("--seed must be an unsigned 64-bit integer", field="--seed")
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1", field="--threads")
        result = run(args.mode, config, args.seed, args.threads)
    except ConfigError as exc:
        print(f"qbatt: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QBattError, ValueError) as exc:
        print(f"qbatt: solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    seed = config.get("seed", 0) if args.seed is None else args.seed
    text = render_csv(args.mode, config, result, seed)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.mode == "audit":
        for row in result.rows:
            flag = "PASS" if row["passed"] else "FAIL"
            print(f"{flag}  residual={row['residual']:.3e}  tol={row['tolerance']:.1e}  {row['check']}", file=sys.stderr)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())

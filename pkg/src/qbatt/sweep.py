"""Parameter grids, point evaluation and the two-stage optimal-parameter search.

Axis values for rates (gammaC, gammaB, J, F) are given in units of g, as on
the figure axes; ``SystemParams`` itself works in units of omega0.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import itertools

import numpy as np

from .errors import FlatObjective, QBattError
from .metrics import multiparticle_metrics
from .model import SystemParams
from .steady import reference_scheme, solve_steady

RATE_AXES = {"gammaC", "gammaB", "J", "F"}
AXIS_NAMES = ("delta", "gammaC", "gammaB", "T", "n", "J", "N", "F")
OUTPUTS = ("E", "ergotropy", "R", "density", "avg_ergotropy", "optimal_gammaC", "optimal_delta")

COARSE_GAMMAC = (0.2, 50.0, 61)  # gammaC / g, log spaced
COARSE_DELTA = (0.0, 2.0, 41)
REFINE = 10
FLAT_TOL = 1e-12
FLAT_STATUS = "flat_objective"
OK_STATUSES = ("ok", FLAT_STATUS)


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"unknown axis {self.name!r}")
        if self.points < 2:
            raise ValueError("an axis needs at least 2 points")
        if not self.min < self.max:
            raise ValueError("axis min must be < max")
        if self.scale not in ("linear", "log"):
            raise ValueError("scale must be 'linear' or 'log'")
        if self.scale == "log" and self.min <= 0:
            raise ValueError("log axis needs min > 0")

    def values(self):
        if self.scale == "log":
            v = np.geomspace(self.min, self.max, self.points)
        else:
            v = np.linspace(self.min, self.max, self.points)
        if self.name == "N":
            return [int(round(x)) for x in v]
        return [float(x) for x in v]


def grid(axes):
    """Cartesian product of axis values; the last axis varies fastest."""
    return list(itertools.product(*(a.values() for a in axes)))


BASE_DEFAULTS = {"g": 0.01, "gammaC": 2.0, "gammaB": 0.1, "delta": 1.0, "eta": 1.0, "J": 0.0,
                 "reservoir": "bosonic", "T": 0.0, "n": None, "N": 1}


def params_from_dict(base):
    """SystemParams from a config-style mapping: g in omega0, other rates in units of g."""
    merged = {**BASE_DEFAULTS, **(base or {})}
    unknown = set(merged) - set(BASE_DEFAULTS)
    if unknown:
        raise ValueError(f"unknown base parameter(s): {', '.join(sorted(unknown))}")
    g = merged["g"]
    return SystemParams(
        g=g,
        gammaC=merged["gammaC"] * g,
        gammaB=merged["gammaB"] * g,
        J=merged["J"] * g,
        delta=merged["delta"],
        eta=merged["eta"],
        reservoir=merged["reservoir"],
        T=merged["T"],
        n=merged["n"],
        N=merged["N"],
    )


def apply_point(base, names, values):
    """Set axis values on ``base`` (rates scaled by g)."""
    changes = {}
    for name, v in zip(names, values):
        if name == "F":
            continue
        if name in RATE_AXES:
            changes[name] = v * base.g
        elif name == "N":
            changes[name] = int(v)
        else:
            changes[name] = v
    if "T" in changes and "n" not in changes:
        changes["n"] = None
    return base.replace(**changes)


def steady_metrics(params, sector="full"):
    rho = solve_steady(params).rho_inf
    return multiparticle_metrics(rho, params, sector=sector)


def metric_values(m):
    return {
        "E": m.stored_energy,
        "ergotropy": m.ergotropy,
        "R": m.efficiency_R,
        "density": m.energy_density,
        "avg_ergotropy": m.avg_ergotropy,
    }


def objective_value(params, objective="E", sector="full"):
    return metric_values(steady_metrics(params, sector))[objective]


def _log_grid(lo, hi, points):
    return np.geomspace(lo, hi, points)


def _refined(values, i, log):
    """Ten-fold finer grid spanning the neighbours of coarse index ``i``."""
    lo = values[max(i - 1, 0)]
    hi = values[min(i + 1, len(values) - 1)]
    if log:
        step = np.log(values[1] / values[0]) / REFINE
        k = int(round(np.log(hi / lo) / step))
        return lo * np.exp(step * np.arange(k + 1))
    step = (values[1] - values[0]) / REFINE
    k = int(round((hi - lo) / step))
    return lo + step * np.arange(k + 1)


@dataclass(frozen=True)
class OptimumResult:
    params: SystemParams
    value: float
    gammaC_over_g: float
    delta: float


def _search(base, gcs, deltas, objective, sector):
    best = (-np.inf, None, None)
    lo = np.inf
    values = np.empty((len(gcs), len(deltas)))
    for i, gc in enumerate(gcs):
        for j, d in enumerate(deltas):
            v = objective_value(base.replace(gammaC=gc * base.g, delta=d), objective, sector)
            values[i, j] = v
            lo = min(lo, v)
            if v > best[0]:
                best = (v, i, j)
    return best, lo, values


def optimize(base, free=("gammaC",), objective="E", sector="full"):
    """Two-stage grid search for the maximum of ``objective``.

    Coarse stage: 61 log-spaced gammaC/g in [0.2, 50] and/or 41 values of
    delta in [0, 2], for whichever of the two is free.  Fine stage: ten
    times finer spacing over the two coarse cells around the coarse argmax.
    """
    free = tuple(free)
    if not free or set(free) - {"gammaC", "delta"}:
        raise ValueError("free must be a non-empty subset of ('gammaC', 'delta')")
    g = base.g
    gcs = _log_grid(*COARSE_GAMMAC) if "gammaC" in free else np.array([base.gammaC / g])
    deltas = np.linspace(*COARSE_DELTA) if "delta" in free else np.array([base.delta])

    (v, i, j), lo, _ = _search(base, gcs, deltas, objective, sector)
    if v - lo < FLAT_TOL:
        raise FlatObjective(f"objective {objective} varies by {v - lo:.3e} over the coarse grid")
    fine_gcs = _refined(gcs, i, log=True) if "gammaC" in free else gcs
    fine_deltas = _refined(deltas, j, log=False) if "delta" in free else deltas
    (v2, i2, j2), _, _ = _search(base, fine_gcs, fine_deltas, objective, sector)
    if v2 >= v:
        gc, d, v = fine_gcs[i2], fine_deltas[j2], v2
    else:
        gc, d = gcs[i], deltas[j]
    best = base.replace(gammaC=float(gc) * g, delta=float(d))
    return OptimumResult(params=best, value=float(v), gammaC_over_g=float(gc), delta=float(d))


def refined_resolution():
    """(relative gammaC step, delta step) of the refined search grid."""
    gcs = _log_grid(*COARSE_GAMMAC)
    d_step = (COARSE_DELTA[1] - COARSE_DELTA[0]) / (COARSE_DELTA[2] - 1)
    return float(gcs[1] / gcs[0]) ** (1 / REFINE) - 1, d_step / REFINE


def evaluate_point(base, names, values, outputs, objective="E", sector="full"):
    """One grid point of a steady-state sweep; returns (status, {output: value}).

    Requesting ``optimal_gammaC`` and/or ``optimal_delta`` first maximizes
    ``objective`` over those parameters; the remaining outputs are then
    evaluated at the optimum.
    """
    try:
        params = apply_point(base, names, values)
        row = {}
        free = tuple(k for k, out in (("gammaC", "optimal_gammaC"), ("delta", "optimal_delta")) if out in outputs)
        status = "ok"
        if free:
            try:
                opt = optimize(params, free, objective, sector)
            except FlatObjective:
                # no optimum exists (e.g. zero ergotropy everywhere); the
                # metrics at the base point are still well defined
                status = FLAT_STATUS
            else:
                params = opt.params
                if "gammaC" in free:
                    row["optimal_gammaC"] = opt.gammaC_over_g
                if "delta" in free:
                    row["optimal_delta"] = opt.delta
        vals = metric_values(steady_metrics(params, sector))
        for key in outputs:
            if key in vals:
                row[key] = vals[key]
        return status, row
    except (QBattError, ValueError, np.linalg.LinAlgError) as exc:
        return type(exc).__name__, {}


def evaluate_reference(base, names, values, F, gammaC):
    """Reference-scheme point: F and gammaC in units of g; temperature from the axes."""
    try:
        point = dict(zip(names, values))
        F = point.pop("F", F)
        gammaC = point.pop("gammaC", gammaC)
        params = apply_point(base.replace(reservoir="fermionic"), list(point), list(point.values()))
        out = reference_scheme(F * base.g, gammaC * base.g, base.g, params.occupation, base.omega0)
        return "ok", {"E": out["E_B"], "ergotropy": out["ergotropy"]}
    except (QBattError, ValueError, np.linalg.LinAlgError) as exc:
        return type(exc).__name__, {}


def run_grid(fn, points, threads=1):
    """Evaluate ``fn`` over ``points``; rows come back in grid order."""
    if threads <= 1:
        return [fn(p) for p in points]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, points))

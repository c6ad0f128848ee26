"""Data recipes for the published figures.

Each figure is a list of panels; a panel fixes the base parameters (rates in
units of g, g = 0.01 omega0) and the grid axes.  ``figure`` evaluates all
panels and returns one long-format table with the full parameter point on
every row.
"""
from dataclasses import dataclass, field

from .errors import UnknownFigure
from .sweep import Axis, OK_STATUSES, apply_point, evaluate_point, evaluate_reference, grid, params_from_dict, run_grid

PARAM_COLUMNS = ("reservoir", "delta", "gammaC", "gammaB", "T", "n", "J", "N")
OUTPUT_COLUMNS = ("E", "ergotropy", "R", "density", "avg_ergotropy", "optimal_gammaC", "optimal_delta")
COLUMNS = ("panel",) + PARAM_COLUMNS + OUTPUT_COLUMNS + ("status",)

MULTI_TEMPERATURES = (0.0, 1.0, 10.0)
MULTI_J = (0.0, 0.1, 1.0)
MULTI_N = Axis("N", 1, 10, 10)
NOTE_MULTI = "N range 1..10 and temperatures T in {0, 1, 10} are chosen defaults"


@dataclass
class Panel:
    label: str
    base: dict
    axes: list
    outputs: tuple
    objective: str = "E"
    kind: str = "steady"
    reference: dict = field(default_factory=dict)


@dataclass
class Recipe:
    description: str
    panels: list
    notes: tuple = ()


def _surface(kind, temps, outputs, objective="E"):
    axes = [Axis("gammaC", 0.5, 6.0, 41), Axis("delta", 0.0, 2.0, 41)]
    return [
        Panel(f"T={T:g}", {"reservoir": kind, "T": T, "gammaB": 0.1}, axes, outputs, objective)
        for T in temps
    ]


def _volume(kind, temps, outputs):
    axes = [Axis("delta", 0.0, 2.0, 11), Axis("gammaB", 0.01, 1.0, 11, "log"), Axis("gammaC", 0.5, 10.0, 11, "log")]
    return [Panel(f"T={T:g}", {"reservoir": kind, "T": T}, axes, outputs) for T in temps]


def _versus_gammaB(kind, temps, outputs, objective="E"):
    axis = [Axis("gammaB", 0.01, 10.0, 61, "log")]
    return [
        Panel(f"T={T:g}", {"reservoir": kind, "T": T, "gammaC": 2.0, "delta": 1.0}, axis, outputs, objective)
        for T in temps
    ]


def _versus_T(kind):
    axis = [Axis("T", 0.1, 50.0, 20, "log")]
    return [Panel("R(T)", {"reservoir": kind, "gammaB": 0.1, "gammaC": 2.0, "delta": 1.0}, axis, ("E", "ergotropy", "R"))]


def _versus_N(kind, gammaB, outputs, objective):
    return [
        Panel(
            f"J={J:g}g,T={T:g}",
            {"reservoir": kind, "T": T, "J": J, "gammaB": gammaB, "delta": 1.0},
            [MULTI_N],
            outputs,
            objective,
        )
        for J in MULTI_J
        for T in MULTI_TEMPERATURES
    ]


def _versus_J(kind):
    panels = []
    for N in (3, 5):
        for gammaB in (0.05, 0.5):
            for T in (0.0, 10.0):
                base = {"reservoir": kind, "T": T, "N": N, "gammaB": gammaB, "delta": 1.0}
                axis = [Axis("J", 0.0, 2.0, 21)]
                tag = f"N={N},gammaB={gammaB:g}g,T={T:g}"
                panels.append(Panel(tag + ",density", base, axis, ("density", "optimal_gammaC"), "E"))
                panels.append(Panel(tag + ",avg_ergotropy", base, axis, ("avg_ergotropy", "optimal_gammaC"), "ergotropy"))
    return panels


def _comparison():
    axis = [Axis("T", 0.1, 100.0, 40, "log")]
    ours = Panel("feedback", {"reservoir": "fermionic", "gammaB": 0.1, "gammaC": 2.0, "delta": 1.0}, axis, ("E", "ergotropy"))
    ref = Panel("reference F=gammaC=4g", {"reservoir": "fermionic", "gammaB": 0.0}, axis, ("E", "ergotropy"),
                kind="reference", reference={"F": 4.0, "gammaC": 4.0})
    return [ours, ref]


def _multi(kind, gammaB, what):
    outputs, objective = {
        "density": (("density", "E", "optimal_gammaC"), "E"),
        "avg_ergotropy": (("avg_ergotropy", "ergotropy", "optimal_gammaC"), "ergotropy"),
        "R": (("R", "density", "avg_ergotropy", "optimal_gammaC"), "E"),
    }[what]
    return Recipe(f"{kind} multiparticle {what} vs N, gammaB={gammaB:g}g", _versus_N(kind, gammaB, outputs, objective), (NOTE_MULTI,))


B, F = "bosonic", "fermionic"
FIGURES = {
    "fig2": Recipe("bosonic stored energy over (gammaC, delta)", _surface(B, (0.0, 10.0), ("E",))),
    "fig3": Recipe("bosonic stored energy over (delta, gammaB, gammaC)", _volume(B, (0.0, 10.0), ("E",))),
    "fig4": Recipe("bosonic optimal stored energy vs gammaB", _versus_gammaB(B, (0.0, 1.0, 10.0, 50.0), ("E",))),
    "fig5": Recipe("bosonic ergotropy over (gammaC, delta)", _surface(B, (0.0, 10.0), ("ergotropy",))),
    "fig6": Recipe("bosonic ergotropy over (delta, gammaB, gammaC)", _volume(B, (0.0, 10.0), ("ergotropy",))),
    "fig7": Recipe(
        "bosonic ergotropy vs gammaB at gammaC=2g, optimal delta",
        _versus_gammaB(B, (0.0, 1.0, 10.0, 50.0), ("ergotropy", "optimal_delta"), "ergotropy"),
    ),
    "fig8": Recipe("bosonic charging efficiency vs T at the optimal point", _versus_T(B)),
    "fig9": Recipe("fermionic stored energy and ergotropy over (gammaC, delta)", _surface(F, (10.0,), ("E", "ergotropy"))),
    "fig10": Recipe("fermionic stored energy and ergotropy over (delta, gammaB, gammaC)", _volume(F, (10.0,), ("E", "ergotropy"))),
    "fig11": Recipe("fermionic optimal stored energy vs gammaB", _versus_gammaB(F, (0.0, 0.5, 1.0, 10.0), ("E",))),
    "fig12": Recipe(
        "fermionic ergotropy vs gammaB at gammaC=2g, optimal delta",
        _versus_gammaB(F, (0.0, 0.5, 1.0, 10.0), ("ergotropy", "optimal_delta"), "ergotropy"),
        ("temperatures T in {0, 0.5, 1, 10} follow the fermionic stored-energy figure",),
    ),
    "fig13": Recipe("fermionic charging efficiency vs T at the optimal point", _versus_T(F)),
    "fig14": _multi(B, 0.05, "density"),
    "fig15": _multi(B, 0.05, "avg_ergotropy"),
    "fig16": _multi(B, 0.05, "R"),
    "fig17": Recipe("bosonic three- and five-particle batteries vs J", _versus_J(B)),
    "fig18": _multi(F, 0.05, "density"),
    "fig19": _multi(F, 0.05, "avg_ergotropy"),
    "fig20": _multi(F, 0.05, "R"),
    "fig21": Recipe("fermionic three- and five-particle batteries vs J", _versus_J(F)),
    "figB22": Recipe(
        "feedback scheme vs reference scheme, fermionic reservoir, vs T",
        _comparison(),
        ("feedback curve uses gammaB = 0.1g as a chosen default",),
    ),
    "fig23": _multi(B, 0.5, "density"),
    "fig24": _multi(B, 0.5, "avg_ergotropy"),
    "fig25": _multi(B, 0.5, "R"),
    "fig26": _multi(F, 0.5, "density"),
    "fig27": _multi(F, 0.5, "avg_ergotropy"),
    "fig28": _multi(F, 0.5, "R"),
}


def recipe(figure_id):
    try:
        return FIGURES[figure_id]
    except KeyError:
        raise UnknownFigure(f"unknown figure {figure_id!r}; known: {', '.join(FIGURES)}") from None


def _override(axes, overrides):
    by_name = {a.name: a for a in overrides or ()}
    return [by_name.get(a.name, a) for a in axes]


def _point_columns(params, base_g):
    return {
        "reservoir": params.reservoir.value,
        "delta": params.delta,
        "gammaC": params.gammaC / base_g,
        "gammaB": params.gammaB / base_g,
        "T": params.T,
        "n": params.occupation,
        "J": params.J / base_g,
        "N": params.N,
    }


def figure(figure_id, axis_overrides=None, threads=1, base_overrides=None):
    """Evaluate every panel of ``figure_id``.

    ``axis_overrides`` replaces recipe axes of the same name (e.g. a shorter
    N range).  Returns (columns, rows, notes); each row is a dict.
    """
    rec = recipe(figure_id)
    rows = []
    for panel in rec.panels:
        base = params_from_dict({**panel.base, **(base_overrides or {})})
        axes = _override(panel.axes, axis_overrides)
        names = [a.name for a in axes]
        points = grid(axes)
        if panel.kind == "reference":
            ref = panel.reference

            def fn(p):
                return evaluate_reference(base, names, p, ref["F"], ref["gammaC"])
        else:
            def fn(p, panel=panel):
                return evaluate_point(base, names, p, panel.outputs, panel.objective)

        for p, (status, values) in zip(points, run_grid(fn, points, threads)):
            point = dict(zip(names, p))
            if panel.kind == "reference":
                point = {k: v for k, v in point.items() if k not in ("F", "gammaC")}
                params = apply_point(base.replace(reservoir="fermionic", gammaC=ref["gammaC"] * base.g),
                                     list(point), list(point.values()))
            else:
                params = apply_point(base, names, p)
            row = {"panel": panel.label, **_point_columns(params, base.g), **values, "status": status}
            rows.append(row)
    return COLUMNS, rows, rec.notes


def failed(rows):
    return sum(1 for r in rows if r["status"] not in OK_STATUSES)

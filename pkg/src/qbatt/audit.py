"""Cross-validation of the independent solution routes.

Every check compares two routes that share no code path beyond the model
parameters: closed forms vs Liouvillian kernel, term-by-term generator vs
superoperator, reduced vs full Hilbert space, time integration vs kernel,
stochastic ensemble vs deterministic evolution.
"""
from dataclasses import dataclass
import itertools

import numpy as np

from .dynamics import evolve_to_steady
from .metrics import ground_state, multiparticle_metrics, single_cell_metrics
from .model import SystemParams, build_liouvillian, lindblad_rhs
from .operators import BasisSpec
from .steady import (
    critical_gammaB,
    ergotropy_closed,
    solve_steady,
    steady_analytic,
    steady_from,
    stored_energy_closed,
)
from .trajectories import TrajectoryConfig, deterministic_populations, ensemble_average

G = 0.01
MAX_EXIT = 125
OCCUPATIONS = {"bosonic": (0.0, 0.5, 9.51), "fermionic": (0.0, 0.27, 0.475)}


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self):
        return bool(np.isfinite(self.residual) and self.residual <= self.tolerance)


def agreement_grid(kind):
    """5 x 5 x 5 x 3 single-cell grid: delta, gammaC, gammaB, occupation."""
    deltas = np.linspace(0.0, 2.0, 5)
    gcs = np.geomspace(0.5, 10.0, 5) * G
    gbs = np.geomspace(0.01, 1.0, 5) * G
    for d, gc, gb, n in itertools.product(deltas, gcs, gbs, OCCUPATIONS[kind]):
        yield SystemParams(g=G, delta=float(d), gammaC=float(gc), gammaB=float(gb), n=n, reservoir=kind)


def check_analytic_numeric(kind):
    worst = 0.0
    for p in agreement_grid(kind):
        diff = np.abs(steady_analytic(p).rho_inf - solve_steady(p).rho_inf).max()
        worst = max(worst, float(diff))
    return CheckResult(f"steady state analytic vs kernel ({kind}, 375 points)", worst, 1e-9)


def check_energy_formula(kind):
    worst = 0.0
    for p in agreement_grid(kind):
        rho = steady_analytic(p).rho_inf
        worst = max(worst, abs(stored_energy_closed(p) - (rho[0, 0] + rho[2, 2]).real))
    return CheckResult(f"stored-energy formula vs analytic populations ({kind})", worst, 1e-12)


def check_optimal_ergotropy(kind):
    worst = 0.0
    for gb, n in itertools.product((0.01, 0.1, 0.5, 2.0), OCCUPATIONS[kind]):
        p = SystemParams(g=G, gammaC=2 * G, delta=1.0, gammaB=gb * G, n=n, reservoir=kind)
        numeric = single_cell_metrics(solve_steady(p).rho_inf, p).ergotropy
        worst = max(worst, abs(ergotropy_closed(p) - numeric))
    return CheckResult(f"optimal-point ergotropy formula vs numeric ({kind})", worst, 1e-9)


def check_critical(kind):
    worst = 0.0
    for n in OCCUPATIONS[kind]:
        crit = critical_gammaB(kind, n)
        base = SystemParams(g=G, gammaC=2 * G, delta=1.0, n=n, reservoir=kind)
        below = base.replace(gammaB=crit * (1 - 1e-3) * G)
        at = base.replace(gammaB=crit * G)
        e_below = single_cell_metrics(solve_steady(below).rho_inf, below).ergotropy
        e_at = single_cell_metrics(solve_steady(at).rho_inf, at).ergotropy
        worst = max(worst, e_at, 0.0 if e_below > 1e-9 else np.inf)
    return CheckResult(f"ergotropy vanishes at the critical dissipation ({kind})", worst, 1e-9)


def check_full_charge():
    p = SystemParams(g=G, gammaC=2 * G, gammaB=0.0, delta=1.0, eta=1.0)
    E_num = single_cell_metrics(solve_steady(p).rho_inf, p).stored_energy
    return CheckResult("full charge without battery loss", max(abs(stored_energy_closed(p) - 1), abs(E_num - 1)), 1e-9)


def check_generator(seed=7):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for N, kind in ((1, "two_qubit"), (2, "dicke"), (2, "full"), (3, "dicke")):
        p = SystemParams(g=G, N=N, J=0.3 * G, gammaB=0.2 * G, T=2.0)
        basis = {"two_qubit": BasisSpec.two_qubit, "dicke": BasisSpec.dicke, "full": BasisSpec.full}[kind]
        basis = basis() if kind == "two_qubit" else basis(N)
        a = rng.normal(size=(basis.dimension,) * 2) + 1j * rng.normal(size=(basis.dimension,) * 2)
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        L = build_liouvillian(p, basis)
        worst = max(worst, float(np.abs(L.apply(rho) - lindblad_rhs(p, rho, basis)).max()))
    return CheckResult("superoperator vs term-by-term generator", worst, 1e-13)


def check_dicke(Ns=(2, 3)):
    worst = 0.0
    for N, kind in itertools.product(Ns, ("bosonic", "fermionic")):
        p = SystemParams(g=G, N=N, J=0.1 * G, gammaC=3 * G, gammaB=0.05 * G, T=1.0, reservoir=kind)
        dicke = multiparticle_metrics(solve_steady(p, BasisSpec.dicke(N)).rho_inf, p, BasisSpec.dicke(N))
        full_basis = BasisSpec.full(N)
        rho_full = steady_from(build_liouvillian(p, full_basis), ground_state(full_basis.dimension)).rho_inf
        full = multiparticle_metrics(rho_full, p, full_basis)
        for a, b in ((dicke.stored_energy, full.stored_energy), (dicke.ergotropy, full.ergotropy),
                     (dicke.avg_ergotropy, full.avg_ergotropy)):
            worst = max(worst, abs(a - b))
    return CheckResult("Dicke-reduced vs full product space", worst, 1e-8)


def check_evolution():
    p = SystemParams(g=G, gammaC=2 * G, gammaB=0.1 * G, T=1.0)
    L = build_liouvillian(p)
    evolved = evolve_to_steady(L, ground_state(4), tol=1e-12, t_cap=200 / G).rho_inf
    return CheckResult("RK4 long-time state vs kernel", float(np.abs(evolved - solve_steady(p).rho_inf).max()), 1e-8)


def check_trajectories(seed=11, ensemble_size=400, steps=400):
    p = SystemParams(g=G, gammaC=2 * G, gammaB=0.1 * G)
    cfg = TrajectoryConfig(p, dt=1e-3 / p.gammaC, steps=steps, ensemble_size=ensemble_size, seed=seed,
                           record_every=steps // 4)
    ens = ensemble_average(cfg)
    det = deterministic_populations(p, ens.times)
    se = np.maximum(ens.stderr_populations[1:], 1e-15)
    z = np.abs(ens.mean_populations[1:] - det[1:]) / se
    return CheckResult("trajectory ensemble vs master equation (standard errors)", float(z.max()), 4.0)


def check_zero_temperature():
    pb = SystemParams(g=G, gammaB=0.3 * G, n=0.0, reservoir="bosonic")
    pf = pb.replace(reservoir="fermionic")
    diff = np.abs(build_liouvillian(pb).matrix - build_liouvillian(pf).matrix).max()
    return CheckResult("bosonic and fermionic generators coincide at T = 0", float(diff), 1e-12)


def checks():
    yield check_full_charge
    for kind in ("bosonic", "fermionic"):
        yield lambda kind=kind: check_analytic_numeric(kind)
        yield lambda kind=kind: check_energy_formula(kind)
        yield lambda kind=kind: check_optimal_ergotropy(kind)
        yield lambda kind=kind: check_critical(kind)
    yield check_zero_temperature
    yield check_generator
    yield check_dicke
    yield check_evolution
    yield check_trajectories


def audit():
    """Run every check; a check that raises counts as failed with infinite residual."""
    results = []
    for check in checks():
        try:
            results.append(check())
        except Exception as exc:  # noqa: BLE001 - report, do not abort the audit
            name = getattr(check, "__name__", "check")
            results.append(CheckResult(f"{name} raised {type(exc).__name__}: {exc}", float("inf"), 0.0))
    return results


def exit_code(results):
    return min(sum(not r.passed for r in results), MAX_EXIT)

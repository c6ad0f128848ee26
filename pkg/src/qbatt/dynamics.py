"""Fixed-step RK4 integration of the master equation on vec(rho)."""
from dataclasses import dataclass, field

import numpy as np

from .errors import NotConverged, StepTooLarge
from .metrics import multiparticle_metrics
from .model import unvec, vec
from .steady import SteadyMethod, SteadyReport

DT_SAFETY = 0.05


@dataclass
class EvolutionRecord:
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    observables: list = field(default_factory=list)


def spectral_bound(liouvillian):
    """Row-sum (infinity) norm, a cheap upper bound on the spectral radius."""
    return float(np.max(np.sum(np.abs(liouvillian.matrix), axis=1)))


def default_dt(liouvillian):
    """0.01 / (fastest physical rate), tightened if needed to satisfy the step guard."""
    p = liouvillian.params
    rates = [p.gammaC, p.gammaB * (1 + 2 * p.occupation), p.g, p.f, abs(p.J)]
    fastest = max(rates)
    dt = 0.01 / fastest if fastest > 0 else 1.0
    bound = spectral_bound(liouvillian)
    if bound > 0:
        dt = min(dt, DT_SAFETY / bound)
    return dt


def _check_dt(liouvillian, dt):
    if dt <= 0:
        raise StepTooLarge("dt must be positive")
    bound = spectral_bound(liouvillian)
    if bound > 0 and dt > DT_SAFETY / bound * (1 + 1e-12):
        raise StepTooLarge(f"dt = {dt:.4g} exceeds {DT_SAFETY}/|L|_inf = {DT_SAFETY / bound:.4g}")


def _rk4_step(L, v, dt):
    k1 = L @ v
    k2 = L @ (v + 0.5 * dt * k1)
    k3 = L @ (v + 0.5 * dt * k2)
    k4 = L @ (v + dt * k3)
    return v + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def evolve(liouvillian, rho0, dt=None, t_max=1.0, store_every=1, observables=True):
    """Integrate from rho0 up to t_max with classical RK4 steps.

    States (and, if ``observables``, battery metrics) are stored every
    ``store_every`` steps, plus the initial and final state.
    """
    dt = default_dt(liouvillian) if dt is None else dt
    _check_dt(liouvillian, dt)
    L = liouvillian.matrix
    d = liouvillian.d
    steps = int(round(t_max / dt))
    v = vec(np.asarray(rho0, dtype=complex)).copy()
    record = EvolutionRecord()

    def store(k):
        rho = unvec(v, d).copy()
        record.times.append(k * dt)
        record.states.append(rho)
        if observables:
            record.observables.append(multiparticle_metrics(rho, liouvillian.params, liouvillian.basis))

    store(0)
    for k in range(1, steps + 1):
        v = _rk4_step(L, v, dt)
        if k % store_every == 0 or k == steps:
            store(k)
    return record


def evolve_to_steady(liouvillian, rho0, dt=None, tol=1e-10, t_cap=None, check_every=50):
    """Integrate until ||drho/dt||_F <= tol; raise NotConverged at t_cap."""
    dt = default_dt(liouvillian) if dt is None else dt
    _check_dt(liouvillian, dt)
    L = liouvillian.matrix
    if t_cap is None:
        t_cap = 1e5 * dt
    v = vec(np.asarray(rho0, dtype=complex)).copy()
    steps = int(np.ceil(t_cap / dt))
    residual = float(np.linalg.norm(L @ v))
    k = 0
    while residual > tol:
        if k >= steps:
            raise NotConverged(f"residual {residual:.3e} > {tol:.1e} at t_cap = {t_cap:.4g}")
        for _ in range(min(check_every, steps - k)):
            v = _rk4_step(L, v, dt)
        k += min(check_every, steps - k)
        residual = float(np.linalg.norm(L @ v))
    rho = unvec(v, liouvillian.d)
    rho = rho / np.trace(rho)
    return SteadyReport(rho, SteadyMethod.NUMERIC_EVOLUTION, residual, liouvillian.params, liouvillian.basis)

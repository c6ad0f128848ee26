"""Stochastic homodyne trajectories with direct (Markovian) feedback.

One step of length dt, for every trajectory:

1. draw dw ~ Normal(0, dt);
2. measurement update of the conditioned state for the monitored channel
   sqrt(eta GammaC) sm_C (x quadrature), together with the deterministic
   Lindblad part (H, battery reservoir), in a first-order Kraus form that
   keeps the state positive (see ``_Engine``);
3. photocurrent r dt = <sx_C> dt + dw / sqrt(eta GammaC), using the state at
   the start of the step;
4. feedback rotation exp(i theta sy_C) with theta = f r dt (sign as in the
   master equation), applied after the measurement update;
5. trace renormalization.

Averaged over the noise this reproduces the feedback master equation.
Trajectories of an ensemble are advanced together as a stacked array; each
trajectory draws its noise from its own stream, seeded from
``SeedSequence(seed, spawn_key=(index,))``, so results do not depend on
ensemble size or ordering.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import NonPhysicalState
from .linalg import dagger
from . import model as _model
from .model import SystemParams, build_liouvillian, model_operators, unvec
from .operators import BasisSpec

RNG_ALGORITHM = "numpy PCG64 seeded by SeedSequence(seed, spawn_key=(trajectory_index,))"
POSITIVITY_TOL = -1e-4
NOISE_BLOCK = 1024


@dataclass(frozen=True)
class TrajectoryConfig:
    params: SystemParams
    dt: float
    steps: int
    ensemble_size: int = 1
    seed: int = 0
    tau: float = 0.0
    record_every: int = 1
    check_every: int = 100
    zero_noise: bool = False

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.ensemble_size < 1:
            raise ValueError("ensemble_size must be >= 1")
        if self.tau != 0:
            raise ValueError("only the Markovian limit tau = 0 is supported")
        if self.params.N != 1:
            raise ValueError("trajectories are implemented for the single-cell model")
        if self.params.gammaC <= 0:
            raise ValueError("homodyne detection needs gammaC > 0")


@dataclass
class TrajectoryRecord:
    times: np.ndarray
    photocurrent: np.ndarray
    populations: np.ndarray  # (records, 2): charger excited, battery excited
    final_state: np.ndarray
    rng: str = RNG_ALGORITHM


@dataclass
class EnsembleResult:
    times: np.ndarray
    mean_populations: np.ndarray
    stderr_populations: np.ndarray
    mean_photocurrent: np.ndarray
    stderr_photocurrent: np.ndarray
    ensemble_size: int
    rng: str = RNG_ALGORITHM
    extra: dict = field(default_factory=dict)


def noise_generator(seed, index):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def _ground_state():
    rho = np.zeros((4, 4), dtype=complex)
    rho[3, 3] = 1.0
    return rho


class _Engine:
    """Vectorized stepper for a stack of 4x4 conditioned states.

    The measurement update is written in Kraus form,
    rho -> M rho M^dag + sum_k c_k rho c_k^dag dt with
    M = 1 - (iH + sum_all c^dag c / 2) dt + c_meas dy and
    dy = <c_meas + c_meas^dag> dt + dw.  To first order this is the usual
    Euler-Maruyama step of the diffusive stochastic master equation, but it
    maps positive matrices to positive matrices, so nearly pure conditioned
    states do not drift out of the state space.
    """

    def __init__(self, params):
        basis = BasisSpec.two_qubit()
        ops = model_operators(params, basis)
        self.params = params
        sm, sp, lb = ops["sm_C"], ops["sp_C"], ops["L_B"]
        self.meas = np.sqrt(params.eta * params.gammaC)
        self.c_meas = self.meas * sm
        # unmonitored jump channels
        jumps = []
        if params.eta < 1:
            jumps.append(np.sqrt((1 - params.eta) * params.gammaC) * sm)
        if params.gamma_down > 0:
            jumps.append(np.sqrt(params.gamma_down) * lb)
        if params.gamma_up > 0:
            jumps.append(np.sqrt(params.gamma_up) * dagger(lb))
        self.jumps = jumps
        decay = params.gammaC * (sp @ sm) + sum((dagger(c) @ c for c in jumps), np.zeros((4, 4), complex))
        self.drift_gen = -1j * ops["H"] - 0.5 * decay
        self.sy = ops["sy_C"]
        self.sx = sm + sp
        self.n_c = sp @ sm
        self.n_b = ops["N_B"]
        self._dt = None

    def _prepare(self, dt):
        # The feedback rotation exp(i s theta sy_C) = cos(theta) + i s sin(theta) sy_C
        # (s the model's feedback sign), so every per-trajectory operator is a
        # combination of fixed matrices.
        k0 = np.eye(4) + self.drift_gen * dt
        isy = 1j * _model.FEEDBACK_SIGN * self.sy
        self._kraus_basis = np.stack([k0, isy @ k0, self.c_meas, isy @ self.c_meas]).reshape(4, 16)
        self._jump_basis = [np.stack([c, isy @ c]).reshape(2, 16) * np.sqrt(dt) for c in self.jumps]
        self._meas_jump = np.stack([self.c_meas, isy @ self.c_meas]).reshape(2, 16) * np.sqrt(dt)
        self._dt = dt

    def step(self, rho, dw, dt, noiseless=False):
        """Advance every state by dt; returns (states, photocurrent r).

        ``noiseless`` is the dw = 0 reduction: the measured channel acts as an
        ordinary jump term and the measurement back-action is dropped.  (The
        Kraus step relies on dy**2 ~ dt to produce that jump term, which a
        vanishing noise cannot supply.)
        """
        if self._dt != dt:
            self._prepare(dt)
        m = rho.shape[0]
        x = np.einsum("ij,mji->m", self.sx, rho).real
        dy = self.meas * x * dt + dw
        # photocurrent increment r dt = <sx> dt + dw / sqrt(eta GammaC)
        r_dt = dy / self.meas
        theta = self.params.f * r_dt
        cos, sin = np.cos(theta), np.sin(theta)
        kick = np.zeros_like(dy) if noiseless else dy
        # feedback after measurement: rho -> U (K rho K^dag + dt sum c rho c^dag) U^dag
        uk = (np.stack([cos, sin, kick * cos, kick * sin], axis=1) @ self._kraus_basis).reshape(m, 4, 4)
        new = uk @ rho @ np.conj(np.swapaxes(uk, 1, 2))
        jumps = self._jump_basis + ([self._meas_jump] if noiseless else [])
        if jumps:
            rot = np.stack([cos, sin], axis=1)
            for basis in jumps:
                uc = (rot @ basis).reshape(m, 4, 4)
                new += uc @ rho @ np.conj(np.swapaxes(uc, 1, 2))
        tr = np.einsum("mii->m", new).real
        new /= tr[:, None, None]
        return new, r_dt / dt

    def populations(self, rho):
        pc = np.einsum("ij,mji->m", self.n_c, rho).real
        pb = np.einsum("ij,mji->m", self.n_b, rho).real
        return pc, pb


def _check_positive(rho):
    w = np.linalg.eigvalsh(rho)
    worst = float(w.min())
    if worst < POSITIVITY_TOL:
        raise NonPhysicalState(f"eigenvalue {worst:.3e} below {POSITIVITY_TOL}; reduce dt")


def _simulate(cfg, indices, rho0=None):
    """Advance the trajectories ``indices`` together; yield per-record arrays."""
    engine = _Engine(cfg.params)
    M = len(indices)
    rho = np.repeat((_ground_state() if rho0 is None else np.asarray(rho0, complex))[None], M, axis=0)
    gens = None if cfg.zero_noise else [noise_generator(cfg.seed, k) for k in indices]
    sqdt = np.sqrt(cfg.dt)

    n_rec = cfg.steps // cfg.record_every + 1
    times = np.empty(n_rec)
    pops = np.empty((n_rec, M, 2))
    current = np.zeros((n_rec, M))
    pc, pb = engine.populations(rho)
    times[0], pops[0, :, 0], pops[0, :, 1] = 0.0, pc, pb

    block = None
    rec = 1
    for k in range(cfg.steps):
        j = k % NOISE_BLOCK
        if j == 0:
            size = min(NOISE_BLOCK, cfg.steps - k)
            if gens is None:
                block = np.zeros((M, size))
            else:
                block = np.stack([g.standard_normal(size) for g in gens]) * sqdt
        rho, r = engine.step(rho, block[:, j], cfg.dt, noiseless=cfg.zero_noise)
        if (k + 1) % cfg.check_every == 0:
            _check_positive(rho)
        if (k + 1) % cfg.record_every == 0:
            pc, pb = engine.populations(rho)
            times[rec] = (k + 1) * cfg.dt
            pops[rec, :, 0], pops[rec, :, 1] = pc, pb
            current[rec] = r
            rec += 1
    _check_positive(rho)
    return times, pops, current, rho


def run_trajectory(cfg, index=0, rho0=None):
    """Single conditioned trajectory (stream ``index`` of ``cfg.seed``)."""
    times, pops, current, rho = _simulate(cfg, [index], rho0)
    return TrajectoryRecord(times=times, photocurrent=current[:, 0], populations=pops[:, 0, :], final_state=rho[0])


def ensemble_average(cfg, rho0=None, batch=None):
    """Per-record sample mean and standard error over ``cfg.ensemble_size`` trajectories."""
    M = cfg.ensemble_size
    if M < 2:
        raise ValueError("ensemble_average needs ensemble_size >= 2")
    batch = batch or M
    # sums are taken relative to trajectory 0 so that identical runs give an
    # exactly zero spread (no cancellation in s2 - s1**2 / M)
    ref_p = ref_c = None
    s1 = s2 = c1 = c2 = 0.0
    for start in range(0, M, batch):
        idx = list(range(start, min(M, start + batch)))
        times, pops, current, _ = _simulate(cfg, idx, rho0)
        if ref_p is None:
            ref_p, ref_c = pops[:, :1, :].copy(), current[:, :1].copy()
        dp, dc = pops - ref_p, current - ref_c
        s1 = s1 + dp.sum(axis=1)
        s2 = s2 + (dp ** 2).sum(axis=1)
        c1 = c1 + dc.sum(axis=1)
        c2 = c2 + (dc ** 2).sum(axis=1)
    mean = ref_p[:, 0, :] + s1 / M
    var = np.clip(s2 - s1 ** 2 / M, 0.0, None) / (M - 1)
    cmean = ref_c[:, 0] + c1 / M
    cvar = np.clip(c2 - c1 ** 2 / M, 0.0, None) / (M - 1)
    return EnsembleResult(
        times=times,
        mean_populations=mean,
        stderr_populations=np.sqrt(var / M),
        mean_photocurrent=cmean,
        stderr_photocurrent=np.sqrt(cvar / M),
        ensemble_size=M,
    )


def deterministic_populations(params, times, rho0=None):
    """Populations of the feedback master equation at ``times`` (matrix exponential)."""
    from scipy.linalg import expm

    L = build_liouvillian(params, BasisSpec.two_qubit())
    ops = model_operators(params, BasisSpec.two_qubit())
    rho = _ground_state() if rho0 is None else np.asarray(rho0, complex)
    v0 = rho.reshape(-1, order="F")
    out = []
    for t in times:
        r = unvec(expm(L.matrix * t) @ v0, 4)
        out.append(
            (
                np.trace(ops["sp_C"] @ ops["sm_C"] @ r).real,
                np.trace(ops["N_B"] @ r).real,
            )
        )
    return np.array(out)

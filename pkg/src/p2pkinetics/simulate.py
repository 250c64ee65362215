"""Time evolution of a scheme: deterministic ODE, Langevin SDE, exact jumps.

Three engines share one contract.  ``integrate_ode`` runs classical
fixed-step RK4 on ``dx/dt = drift(x)``.  ``integrate_sde`` runs
Euler-Maruyama on the Langevin form ``dx = A dt + b dW`` using the
per-reaction noise factor, with one independent Wiener component per
reaction (``dW = xi * sqrt(dt)``, xi standard normal).  ``ssa_run`` is the
Gillespie direct method on integer states, the exact realization of the jump
process the other two approximate.

Fixed steps only, for reproducibility: the ODE/SDE grid is ``k * dt`` for
``k = 0 .. ceil(t_end / dt)``; every ``record_every``-th step is recorded
plus always the final one.  SSA records event times (initial state, then
every ``record_every``-th event plus the last one) and stops at ``t_end`` or
when the total propensity hits zero.  With a given seed every engine is
bit-reproducible within one kernel lane.  Negative propensity excursions of
SDE paths clamp to zero; there is no reflecting boundary, which is the known
weakness of the Langevin approximation near the axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import (
    STATUS_EVENT_BUDGET,
    STATUS_NONFINITE,
    active_kernels,
    derive_stream_seed,
)
from .scheme import InteractionScheme, scheme_arrays


class SimulationError(RuntimeError):
    """A run could not be completed (used by the ensemble driver)."""


@dataclass
class RunConfig:
    """Shared knobs for all engines.

    ``noise_scale`` multiplies the SDE noise factor (0 degenerates
    Euler-Maruyama into plain Euler); ``record_every`` subsamples the
    recorded output without changing the integration step.
    """

    t_end: float = 100.0
    dt: float = 0.01
    seed: int = 0
    record_every: int = 1
    noise_scale: float = 1.0

    def __post_init__(self):
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValueError("record_every must be a positive integer")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.noise_scale < 0:
            raise ValueError("noise_scale must be nonnegative")

    @property
    def n_steps(self) -> int:
        return max(1, int(np.ceil(self.t_end / self.dt - 1e-12)))


@dataclass
class Trajectory:
    """Recorded times and per-species values from one run.

    ``kind`` is one of ``ode``, ``sde``, ``ssa``; SSA states are integers.
    ``error`` is None for a completed run, otherwise a short reason and the
    trajectory holds the partial path up to the failure.
    """

    times: np.ndarray
    states: np.ndarray
    kind: str
    error: str | None = None

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


@dataclass
class EnsembleStats:
    """Pointwise mean and unbiased variance over independent runs."""

    times: np.ndarray
    mean: np.ndarray      # (n_times, n_species)
    variance: np.ndarray  # (n_times, n_species)
    run_count: int


_STATUS_MESSAGES = {
    STATUS_NONFINITE: "non-finite state encountered",
    STATUS_EVENT_BUDGET: "event budget exhausted",
}


def _float_initial(scheme, initial) -> np.ndarray:
    x0 = np.asarray(initial, dtype=np.float64)
    if x0.shape != (scheme.n_species,):
        raise ValueError(
            f"initial state has shape {x0.shape}, expected ({scheme.n_species},)"
        )
    if np.any(x0 < 0):
        raise ValueError("initial state must be nonnegative")
    return x0


def _int_initial(scheme, initial) -> np.ndarray:
    x0 = np.asarray(initial)
    if np.any(x0 != np.floor(x0)):
        raise ValueError("SSA initial state must be integer-valued")
    x0 = x0.astype(np.int64)
    if x0.shape != (scheme.n_species,):
        raise ValueError(
            f"initial state has shape {x0.shape}, expected ({scheme.n_species},)"
        )
    if np.any(x0 < 0):
        raise ValueError("initial state must be nonnegative")
    return x0


def integrate_ode(scheme: InteractionScheme, initial, config: RunConfig) -> Trajectory:
    """Fixed-step RK4 solution of the deterministic drift equations."""
    arrs = scheme_arrays(scheme)
    x0 = _float_initial(scheme, initial)
    times, states, status = active_kernels().rk4(
        arrs, x0, config.dt, config.n_steps, int(config.record_every)
    )
    return Trajectory(times, states, "ode", _STATUS_MESSAGES.get(status))


def integrate_sde(scheme: InteractionScheme, initial, config: RunConfig) -> Trajectory:
    """Euler-Maruyama path of the Langevin equation for the scheme.

    Per step ``x <- x + A dt + noise_scale * b @ xi * sqrt(dt)`` with one
    standard normal per reaction.  Identical config (including seed) gives an
    identical path within one kernel lane.
    """
    arrs = scheme_arrays(scheme)
    x0 = _float_initial(scheme, initial)
    times, states, status = active_kernels().em(
        arrs,
        x0,
        config.dt,
        config.n_steps,
        int(config.record_every),
        config.noise_scale,
        int(config.seed),
    )
    return Trajectory(times, states, "sde", _STATUS_MESSAGES.get(status))


def ssa_run(
    scheme: InteractionScheme,
    initial,
    config: RunConfig,
    max_events: int = 100_000_000,
) -> Trajectory:
    """Gillespie direct method from an integer state.

    Waiting times are exponential with the total propensity as rate; the
    firing reaction is chosen with probability proportional to its
    propensity and applies its integer change vector.  The walk stops at
    ``t_end``, in an absorbing state (zero total propensity), or when
    ``max_events`` fires have happened (reported as an error).
    """
    arrs = scheme_arrays(scheme)
    x0 = _int_initial(scheme, initial)
    times, states, status = active_kernels().ssa_events(
        arrs,
        x0,
        float(config.t_end),
        int(config.record_every),
        int(config.seed),
        int(max_events),
    )
    return Trajectory(times, states, "ssa", _STATUS_MESSAGES.get(status))


def derive_run_seed(seed: int, run_index: int) -> int:
    """Decorrelated seed for run ``run_index`` of an ensemble (documented in
    the kernel module: splitmix64 finalizer of ``seed + (i+1) * GOLDEN``)."""
    return derive_stream_seed(int(seed), int(run_index))


def ensemble(
    scheme: InteractionScheme,
    initial,
    config: RunConfig,
    runs: int,
    mode: str,
    seeds=None,
    max_events: int = 100_000_000,
) -> EnsembleStats:
    """Pointwise mean and unbiased variance over independent runs.

    Seeds default to ``derive_run_seed(config.seed, i)``; pass ``seeds`` to
    override (length must equal ``runs``).  SSA paths are aligned to the
    ODE/SDE recording grid by last-value interpolation (the state holds
    between events).  Statistics use Welford's one-pass update.  Any failed
    run aborts with a diagnostic naming the run.
    """
    if runs < 2:
        raise ValueError("ensemble needs runs >= 2")
    if mode not in ("sde", "ssa"):
        raise ValueError(f"mode must be 'sde' or 'ssa', got {mode!r}")
    if seeds is None:
        seeds = [derive_run_seed(config.seed, i) for i in range(runs)]
    else:
        seeds = [int(s) for s in seeds]
        if len(seeds) != runs:
            raise ValueError("seeds must have one entry per run")

    arrs = scheme_arrays(scheme)
    kern = active_kernels()
    n_steps = config.n_steps
    stride = int(config.record_every)
    recorded = [k for k in range(0, n_steps + 1) if k % stride == 0]
    if n_steps % stride != 0:
        recorded.append(n_steps)
    grid = np.array([k * config.dt for k in recorded])

    if mode == "ssa":
        x0 = _int_initial(scheme, initial)
    else:
        x0 = _float_initial(scheme, initial)

    mean = np.zeros((grid.size, scheme.n_species))
    m2 = np.zeros_like(mean)
    for i, run_seed in enumerate(seeds):
        if mode == "sde":
            _, states, status = kern.em(
                arrs, x0, config.dt, n_steps, stride,
                config.noise_scale, run_seed,
            )
            if status or states.shape[0] != grid.size:
                raise SimulationError(
                    f"sde run {i} (seed {run_seed}) failed: "
                    f"{_STATUS_MESSAGES.get(status, 'short trajectory')}"
                )
            values = states
        else:
            values, status = kern.ssa_grid(arrs, x0, grid, run_seed, max_events)
            if status:
                raise SimulationError(
                    f"ssa run {i} (seed {run_seed}) failed: "
                    f"{_STATUS_MESSAGES.get(status)}"
                )
            values = values.astype(np.float64)
        delta = values - mean
        mean += delta / (i + 1)
        m2 += delta * (values - mean)
    variance = m2 / (runs - 1)
    return EnsembleStats(times=grid, mean=mean, variance=variance, run_count=runs)

"""Fixed points, linear stability and phase portraits of a scheme.

Steady states solve ``drift(x) == 0``.  They are located with a damped
Newton iteration on the analytic Jacobian: the step is halved until the
residual decreases (at most 30 halvings), and a singular Jacobian falls back
to a gradient step on ``0.5 * ||drift||**2``.  Classification follows the
sign pattern of the Jacobian eigenvalues at the fixed point, with a declared
dead zone ``ZERO_EPS`` around zero real part so the focus/node boundary is
well defined numerically.

``fasttrack_classification`` is the closed-form dichotomy for the two-species
arrival/conversion/departure model: complex eigenvalues (damped oscillation,
a stable focus) iff ``beta * lambda < 4 * mu**2``, real negative ones (a
stable node) in the reverse case.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kinetics
from .eigen import eigvals
from .scheme import InteractionScheme

ZERO_EPS = 1e-9

CLASSIFICATIONS = (
    "stable-node",
    "stable-focus",
    "unstable-node",
    "unstable-focus",
    "saddle",
    "center",
    "degenerate",
)


@dataclass
class FixedPoint:
    """A candidate steady state and how well Newton did on it."""

    state: np.ndarray
    residual_norm: float
    converged: bool


@dataclass
class StabilityReport:
    """Fixed point with its Jacobian, spectrum and classification."""

    fixed_point: FixedPoint
    jacobian: np.ndarray
    eigenvalues: np.ndarray
    classification: str


def _newton(scheme, guess, tol, max_iter) -> FixedPoint:
    x = np.array(guess, dtype=np.float64)
    r = kinetics.drift(scheme, x)
    rn = float(np.max(np.abs(r))) if r.size else 0.0
    for _ in range(max_iter):
        if rn < tol:
            return FixedPoint(x, rn, True)
        jac = kinetics.jacobian(scheme, x)
        step = None
        try:
            cand = np.linalg.solve(jac, -r)
            if np.all(np.isfinite(cand)):
                step = cand
        except np.linalg.LinAlgError:
            pass
        if step is None:
            step = -(jac.T @ r)
        accepted = False
        lam = 1.0
        for _ in range(31):
            xn = x + lam * step
            rnew = kinetics.drift(scheme, xn)
            rnn = float(np.max(np.abs(rnew)))
            if rnn < rn:  # NaN compares False and is rejected
                x, r, rn = xn, rnew, rnn
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            break
    return FixedPoint(x, rn, rn < tol)


def find_fixed_points(
    scheme: InteractionScheme,
    initial_guesses,
    tol: float = 1e-10,
    max_iter: int = 50,
) -> list[FixedPoint]:
    """Damped Newton from every guess; nearby results merged.

    Converged points within 1e-6 of each other (max norm) collapse to the one
    with the smallest residual.  Non-converged starts are reported too, with
    ``converged=False``, deduplicated the same way among themselves.
    Converged points come first in the returned list.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    results = [
        _newton(scheme, np.asarray(g, dtype=np.float64), tol, max_iter)
        for g in initial_guesses
    ]

    def merge(group: list[FixedPoint]) -> list[FixedPoint]:
        kept: list[FixedPoint] = []
        for fp in group:
            for i, other in enumerate(kept):
                if np.max(np.abs(fp.state - other.state)) <= 1e-6:
                    if fp.residual_norm < other.residual_norm:
                        kept[i] = fp
                    break
            else:
                kept.append(fp)
        return kept

    converged = merge([fp for fp in results if fp.converged])
    failed = merge([fp for fp in results if not fp.converged])
    return converged + failed


def default_starts(
    scheme: InteractionScheme,
    analytic=None,
    n_random: int = 8,
    seed: int = 0,
) -> list[np.ndarray]:
    """Newton seeds: the analytic point (if known) perturbed by +-50 percent,
    plus ``n_random`` random positive states."""
    n = scheme.n_species
    rng = np.random.default_rng(seed)
    starts: list[np.ndarray] = []
    if analytic is not None:
        ref = np.asarray(analytic, dtype=np.float64)
        starts += [ref.copy(), 0.5 * ref, 1.5 * ref]
        high = np.maximum(2.0 * ref, 1.0)
    else:
        high = np.full(n, 10.0)
    for _ in range(n_random):
        starts.append(rng.uniform(0.1, high))
    return starts


def eigenvalues(matrix) -> np.ndarray:
    """Eigenvalues of a real dense matrix (dimension <= 64), sorted by real
    part descending, ties by imaginary part descending."""
    return eigvals(matrix)


def classify(eigs, eps: float = ZERO_EPS) -> str:
    """Map a spectrum to a phase-portrait classification.

    Real parts within ``eps`` of zero count as zero: if every eigenvalue is
    then purely imaginary (nonzero imaginary part) the point is a center,
    otherwise degenerate.  With all real parts strictly negative (positive),
    any imaginary part beyond ``eps`` makes a stable (unstable) focus instead
    of a node.  Strictly mixed real-part signs give a saddle.
    """
    z = np.asarray(eigs, dtype=np.complex128)
    if z.size == 0:
        raise ValueError("empty eigenvalue list")
    re, im = z.real, z.imag
    near_zero = np.abs(re) <= eps
    if near_zero.any():
        if near_zero.all() and (np.abs(im) > eps).all():
            return "center"
        return "degenerate"
    oscillatory = bool((np.abs(im) > eps).any())
    if (re < 0).all():
        return "stable-focus" if oscillatory else "stable-node"
    if (re > 0).all():
        return "unstable-focus" if oscillatory else "unstable-node"
    return "saddle"


def fasttrack_classification(lambda_: float, beta: float, mu: float) -> str:
    """Closed-form stability dichotomy for the FastTrack-style model.

    ``beta * lambda < 4 * mu**2`` gives a stable focus, the reverse a stable
    node, exact equality the degenerate boundary.  Agrees with
    ``classify(eigenvalues(jacobian))`` at the fixed point.
    """
    if lambda_ <= 0 or beta <= 0 or mu <= 0:
        raise ValueError("parameters must be positive")
    product = beta * lambda_
    threshold = 4.0 * mu * mu
    if product < threshold:
        return "stable-focus"
    if product > threshold:
        return "stable-node"
    return "degenerate"


def stability_report(scheme: InteractionScheme, fixed_point: FixedPoint) -> StabilityReport:
    """Jacobian, spectrum and classification at an already-located point."""
    jac = kinetics.jacobian(scheme, fixed_point.state)
    eigs = eigenvalues(jac)
    return StabilityReport(
        fixed_point=fixed_point,
        jacobian=jac,
        eigenvalues=eigs,
        classification=classify(eigs),
    )


def phase_portrait(
    scheme: InteractionScheme,
    center,
    deviations,
    t_end: float,
    dt: float,
) -> list:
    """Deterministic trajectories from ``center + deviation``, one per deviation.

    Returns the list of ODE trajectories in deviation order, ready for
    phase-plane plotting or CSV emission.
    """
    from .simulate import RunConfig, integrate_ode

    c = np.asarray(center, dtype=np.float64)
    if c.shape != (scheme.n_species,):
        raise ValueError(
            f"center has shape {c.shape}, expected ({scheme.n_species},)"
        )
    config = RunConfig(t_end=t_end, dt=dt)
    trajectories = []
    for dev in deviations:
        d = np.asarray(dev, dtype=np.float64)
        if d.shape != c.shape:
            raise ValueError(
                f"deviation has shape {d.shape}, expected {c.shape}"
            )
        trajectories.append(integrate_ode(scheme, c + d, config))
    return trajectories

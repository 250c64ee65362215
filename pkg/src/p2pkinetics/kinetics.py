"""Drift, diffusion and Langevin noise coefficients of a scheme.

For a scheme with change vectors ``r_a`` and propensities ``s_a(x)``:

* drift vector      ``A_i = sum_a r_a[i] * s_a``
* diffusion matrix  ``B_ij = sum_a r_a[i] * r_a[j] * s_a``
* noise factor      ``b[:, a] = r_a * sqrt(max(s_a, 0))``

The noise factor is the per-reaction square-root construction, so
``b @ b.T == B`` holds by construction even when B is singular (closed
systems on a conservation manifold break a Cholesky factorization).  The
drift defines the deterministic ODE; ``A dt + b dW`` is the Langevin SDE
driven by one Wiener component per reaction.

The Jacobian of the drift is analytic, exploiting the monomial rate-law
structure; reactions whose raw (unclamped) propensity is negative are flat
under the clamp and contribute nothing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import active_kernels
from .scheme import InteractionScheme, scheme_arrays


@dataclass
class KineticCoefficients:
    """Drift A, diffusion B and noise factor b at one state.

    B is symmetric positive semidefinite whenever all propensities are
    nonnegative, and ``noise_factor @ noise_factor.T`` reproduces it to
    roundoff (max-norm below 1e-12 at model scales).
    """

    drift: np.ndarray         # (n_species,)
    diffusion: np.ndarray     # (n_species, n_species)
    noise_factor: np.ndarray  # (n_species, n_reactions)


def _state(scheme: InteractionScheme, state) -> np.ndarray:
    x = np.asarray(state, dtype=np.float64)
    if x.shape != (scheme.n_species,):
        raise ValueError(
            f"state has shape {x.shape}, expected ({scheme.n_species},)"
        )
    return x


def drift(scheme: InteractionScheme, state) -> np.ndarray:
    """Deterministic rate of change of each species at ``state``."""
    arrs = scheme_arrays(scheme)
    return active_kernels().drift(arrs, _state(scheme, state))


def diffusion(scheme: InteractionScheme, state) -> np.ndarray:
    """Second-moment (fluctuation) matrix at ``state``; symmetric by construction."""
    arrs = scheme_arrays(scheme)
    s = active_kernels().propensities(arrs, _state(scheme, state))
    mat = arrs.change_f.T @ (arrs.change_f * s[:, None])
    # the quadratic form is symmetric; halve-sum removes any last-ulp skew
    return 0.5 * (mat + mat.T)


def noise_factor(scheme: InteractionScheme, state) -> np.ndarray:
    """Matrix b with ``b @ b.T == diffusion``, one column per reaction."""
    arrs = scheme_arrays(scheme)
    s = active_kernels().propensities(arrs, _state(scheme, state))
    return (arrs.change_f * np.sqrt(s)[:, None]).T


def kinetic_coefficients(scheme: InteractionScheme, state) -> KineticCoefficients:
    """All three coefficient blocks at one state."""
    return KineticCoefficients(
        drift=drift(scheme, state),
        diffusion=diffusion(scheme, state),
        noise_factor=noise_factor(scheme, state),
    )


def jacobian(scheme: InteractionScheme, state) -> np.ndarray:
    """Analytic Jacobian dA_i/dx_j of the drift at ``state``.

    Per reaction, the monomial product rule gives the propensity gradient;
    species factors contribute unit directions and aggregate factors
    contribute their weight rows.  Where the raw propensity is negative the
    clamped value is constant, so the gradient is zero there.
    """
    arrs = scheme_arrays(scheme)
    x = _state(scheme, state)
    n_s = arrs.n_species

    src = np.empty(n_s + arrs.n_aggregates)
    src[:n_s] = x
    if arrs.n_aggregates:
        src[n_s:] = arrs.agg_w @ x

    jac = np.zeros((n_s, n_s))
    grad = np.empty(n_s)
    for r in range(arrs.n_reactions):
        lo, hi = arrs.f_ptr[r], arrs.f_ptr[r + 1]
        if lo == hi:
            continue  # constant propensity
        cols = arrs.f_src[lo:hi]
        exps = arrs.f_exp[lo:hi]
        vals = src[cols]
        raw = arrs.rates[r] * np.prod(vals**exps)
        if raw < 0.0:
            continue  # clamped flat at zero
        grad[:] = 0.0
        for f in range(cols.size):
            partial = arrs.rates[r] * exps[f] * vals[f] ** (exps[f] - 1)
            for g in range(cols.size):
                if g != f:
                    partial *= vals[g] ** exps[g]
            col = cols[f]
            if col < n_s:
                grad[col] += partial
            else:
                grad += partial * arrs.agg_w[col - n_s]
        jac += np.outer(arrs.change_f[r], grad)
    return jac

"""Built-in peer-to-peer protocol models.

Every constructor returns a validated ``InteractionScheme`` whose rate
constants reference named parameters, so exported model files round-trip and
the CLI can override values by name.

``fasttrack``: two species, new nodes ``n`` and seeds ``l``.  New nodes
arrive at intensity lambda, node-seed interactions convert a node into a
seed at rate ``beta * n * l``, seeds depart at rate ``mu * l``.  The unique
positive steady state is ``(mu / beta, lambda / mu)``.

``bittorrent_closed``: single transfer reaction ``n + c -> 2 c`` at rate
``beta * n * c``; total population is conserved.  ``bittorrent_open`` adds
arrivals and seeder departures and is structurally the FastTrack scheme with
the seed species renamed ``c``.

``bittorrent_chunks``: the file has ``m`` chunks; species are new peers
``n``, leecher classes ``l1 .. l{m-1}`` (holding that many chunks) and
seeders ``c``.  One chunk moves per interaction: peers convert to ``l1`` via
seeders (``beta``) or any leecher class (``beta_i``); class ``i`` advances to
``i+1`` via an interested leecher (``delta_i``, i <= m-2) or a seeder
(``gamma_i``, i <= m-2); class ``m-1`` completes to a seeder via an
interested leecher (``gamma_last_peer``) or a seeder (``gamma_last_seed``);
seeders depart (``mu``).  The "interested leecher" pools are aggregates
``lbar_i`` whose membership is a policy choice (see ``INTEREST_POLICIES``):
the sources never define the pool precisely, so the default counts every
leecher.  Interaction partners drawn from a pool enter rate laws only, not
stoichiometry, so the change vectors stay one-step.

``bittorrent_aggregated``: the two-species reduction obtained by lumping all
leechers and seeders into one pool ``y``; departures remove seeders only, so
the loss term is ``mu * fraction * y`` with ``fraction`` the assumed seeder
share of the pool.  With ``fraction = 1`` the reduction is drift-identical
to ``fasttrack``.  The lumped derivation double-counts seeders if taken
literally; this constructor follows the printed reduced equations and leaves
the share assumption explicit.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .scheme import (
    Aggregate,
    InteractionScheme,
    RateLaw,
    Reaction,
    make_scheme,
    reaction_from_counts,
    validated,
)

INTEREST_POLICIES = ("all-leechers", "others-only", "higher-classes")


@dataclass(frozen=True)
class FastTrackParams:
    """Arrival intensity, interaction coefficient, departure intensity."""

    lambda_: float
    beta: float
    mu: float

    def __post_init__(self):
        if not (self.lambda_ > 0 and self.beta > 0 and self.mu > 0):
            raise ValueError("lambda, beta and mu must all be positive")


def _two_species_open(name_a: str, name_b: str, params: FastTrackParams) -> InteractionScheme:
    species = [name_a, name_b]
    reactions = [
        reaction_from_counts(
            species, {}, {name_a: 1}, RateLaw("lambda"), label="arrive"
        ),
        reaction_from_counts(
            species,
            {name_a: 1, name_b: 1},
            {name_b: 2},
            RateLaw("beta", ((name_a, 1), (name_b, 1))),
            label="convert",
        ),
        reaction_from_counts(
            species, {name_b: 1}, {}, RateLaw("mu", ((name_b, 1),)), label="depart"
        ),
    ]
    return validated(
        make_scheme(
            species,
            reactions,
            parameters={
                "lambda": params.lambda_,
                "beta": params.beta,
                "mu": params.mu,
            },
        )
    )


def fasttrack(params: FastTrackParams) -> InteractionScheme:
    """Arrival / node-seed conversion / seed departure model."""
    return _two_species_open("n", "l", params)


def fasttrack_fixed_point(params: FastTrackParams) -> np.ndarray:
    """Closed-form steady state (mu / beta, lambda / mu)."""
    return np.array([params.mu / params.beta, params.lambda_ / params.mu])


def fasttrack_char_roots(params: FastTrackParams) -> tuple[complex, complex]:
    """Roots of the characteristic polynomial at the fixed point.

    ``s = 0.5 * (-beta*lambda/mu +- sqrt((beta*lambda/mu)**2 - 4*beta*lambda))``,
    returned with the + branch first.
    """
    p = params.beta * params.lambda_ / params.mu
    disc = p * p - 4.0 * params.beta * params.lambda_
    root = cmath.sqrt(disc)
    return 0.5 * (-p + root), 0.5 * (-p - root)


def bittorrent_closed(beta: float) -> InteractionScheme:
    """Closed one-chunk swarm: leechers become seeders, nobody enters or leaves."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    species = ["n", "c"]
    transfer = reaction_from_counts(
        species,
        {"n": 1, "c": 1},
        {"c": 2},
        RateLaw("beta", (("n", 1), ("c", 1))),
        label="transfer",
    )
    return validated(make_scheme(species, [transfer], parameters={"beta": beta}))


def bittorrent_open(params: FastTrackParams) -> InteractionScheme:
    """Open one-chunk swarm; FastTrack up to renaming the seed species."""
    return _two_species_open("n", "c", params)


@dataclass(frozen=True)
class ChunkModelParams:
    """Coefficients of the m-chunk swarm model.

    Vector coefficients are indexed by leecher class: ``beta_i`` and
    ``delta_i`` have length ``m - 1``, ``gamma_i`` length ``m - 2``.  Only
    the first ``m - 2`` entries of ``delta_i`` drive reactions (interior
    advances); the final slot mirrors the coefficient list of the source
    formulation, whose completion channel is carried by ``gamma_last_peer``
    instead.
    """

    m: int
    lambda_: float
    mu: float
    beta: float
    beta_i: tuple[float, ...]
    delta_i: tuple[float, ...]
    gamma_i: tuple[float, ...]
    gamma_last_peer: float
    gamma_last_seed: float
    interest_policy: str = "all-leechers"

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise ValueError("m must be an integer >= 2 (use the open model for one chunk)")
        if not (self.lambda_ > 0 and self.mu > 0):
            raise ValueError("lambda and mu must be positive")
        if len(self.beta_i) != self.m - 1:
            raise ValueError(f"beta_i must have length m-1 = {self.m - 1}")
        if len(self.delta_i) != self.m - 1:
            raise ValueError(f"delta_i must have length m-1 = {self.m - 1}")
        if len(self.gamma_i) != self.m - 2:
            raise ValueError(f"gamma_i must have length m-2 = {self.m - 2}")
        coeffs = (
            (self.beta, self.gamma_last_peer, self.gamma_last_seed)
            + tuple(self.beta_i)
            + tuple(self.delta_i)
            + tuple(self.gamma_i)
        )
        if any(c < 0 for c in coeffs):
            raise ValueError("interaction coefficients must be nonnegative")
        if self.interest_policy not in INTEREST_POLICIES:
            raise ValueError(
                f"interest_policy must be one of {INTEREST_POLICIES}"
            )


def _interest_weights(policy: str, i: int, m: int) -> np.ndarray:
    """Weights of lbar_i over species (n, l1..l_{m-1}, c)."""
    w = np.zeros(m + 1)
    for j in range(1, m):
        if policy == "all-leechers":
            w[j] = 1.0
        elif policy == "others-only":
            w[j] = 0.0 if j == i else 1.0
        else:  # higher-classes
            w[j] = 1.0 if j > i else 0.0
    return w


def bittorrent_chunks(params: ChunkModelParams) -> InteractionScheme:
    """m-chunk swarm; see the module docstring for the reaction families.

    Interest pools that are empty under the chosen policy (for instance the
    top class under ``higher-classes``) drop the reactions that would draw
    from them instead of creating an all-zero aggregate.
    """
    m = int(params.m)
    species = ["n"] + [f"l{i}" for i in range(1, m)] + ["c"]
    parameters: dict[str, float] = {
        "lambda": params.lambda_,
        "mu": params.mu,
        "beta": params.beta,
        "gamma_peer": params.gamma_last_peer,
        "gamma_seed": params.gamma_last_seed,
    }
    for i in range(1, m):
        parameters[f"beta_{i}"] = params.beta_i[i - 1]
        parameters[f"delta_{i}"] = params.delta_i[i - 1]
    for i in range(1, m - 1):
        parameters[f"gamma_{i}"] = params.gamma_i[i - 1]

    aggregates: list[Aggregate] = []
    pool_names: dict[int, str] = {}
    for i in range(1, m):
        w = _interest_weights(params.interest_policy, i, m)
        if np.any(w != 0.0):
            name = f"lbar{i}"
            aggregates.append(Aggregate(name, tuple(w)))
            pool_names[i] = name

    reactions: list[Reaction] = [
        reaction_from_counts(species, {}, {"n": 1}, RateLaw("lambda"), label="arrive"),
        reaction_from_counts(
            species,
            {"n": 1, "c": 1},
            {"l1": 1, "c": 1},
            RateLaw("beta", (("n", 1), ("c", 1))),
            label="seed_convert",
        ),
    ]
    for i in range(1, m):
        products = {"l1": 2} if i == 1 else {"l1": 1, f"l{i}": 1}
        reactions.append(
            reaction_from_counts(
                species,
                {"n": 1, f"l{i}": 1},
                products,
                RateLaw(f"beta_{i}", (("n", 1), (f"l{i}", 1))),
                label=f"leech_convert_{i}",
            )
        )
    for i in range(1, m - 1):
        if i in pool_names:
            reactions.append(
                reaction_from_counts(
                    species,
                    {f"l{i}": 1},
                    {f"l{i + 1}": 1},
                    RateLaw(f"delta_{i}", ((f"l{i}", 1), (pool_names[i], 1))),
                    label=f"advance_peer_{i}",
                )
            )
        reactions.append(
            reaction_from_counts(
                species,
                {f"l{i}": 1, "c": 1},
                {f"l{i + 1}": 1, "c": 1},
                RateLaw(f"gamma_{i}", ((f"l{i}", 1), ("c", 1))),
                label=f"advance_seed_{i}",
            )
        )
    top = m - 1
    if top in pool_names:
        reactions.append(
            reaction_from_counts(
                species,
                {f"l{top}": 1},
                {"c": 1},
                RateLaw("gamma_peer", ((f"l{top}", 1), (pool_names[top], 1))),
                label="complete_peer",
            )
        )
    reactions.append(
        reaction_from_counts(
            species,
            {f"l{top}": 1, "c": 1},
            {"c": 2},
            RateLaw("gamma_seed", ((f"l{top}", 1), ("c", 1))),
            label="complete_seed",
        )
    )
    reactions.append(
        reaction_from_counts(
            species, {"c": 1}, {}, RateLaw("mu", (("c", 1),)), label="depart"
        )
    )
    return validated(make_scheme(species, reactions, aggregates, parameters))


def bittorrent_aggregated(
    params: FastTrackParams, fraction: float = 1.0
) -> InteractionScheme:
    """Two-species lumped swarm: peers ``n`` and the leecher+seeder pool ``y``.

    ``fraction`` is the assumed seeder share of the pool; the departure rate
    is ``mu * fraction * y`` (stored as the derived constant ``mu_eff``).
    The default of 1 makes the scheme drift-identical to ``fasttrack``.
    """
    if not 0 <= fraction <= 1:
        raise ValueError("fraction must lie in [0, 1]")
    species = ["n", "y"]
    reactions = [
        reaction_from_counts(species, {}, {"n": 1}, RateLaw("lambda"), label="arrive"),
        reaction_from_counts(
            species,
            {"n": 1, "y": 1},
            {"y": 2},
            RateLaw("beta", (("n", 1), ("y", 1))),
            label="convert",
        ),
        reaction_from_counts(
            species, {"y": 1}, {}, RateLaw("mu_eff", (("y", 1),)), label="deplete"
        ),
    ]
    return validated(
        make_scheme(
            species,
            reactions,
            parameters={
                "lambda": params.lambda_,
                "beta": params.beta,
                "mu": params.mu,
                "fraction": fraction,
                "mu_eff": params.mu * fraction,
            },
        )
    )


# ---------------------------------------------------------------------------
# registry used by the CLI (name -> builder over string overrides)
# ---------------------------------------------------------------------------


def _pfloat(name: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"parameter {name!r}: {text!r} is not a number") from None


def _pint(name: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"parameter {name!r}: {text!r} is not an integer") from None


def _pvector(name: str, text: str, length: int) -> tuple[float, ...]:
    parts = [p for p in text.split(",") if p != ""]
    values = tuple(_pfloat(name, p) for p in parts)
    if len(values) == 1:
        return values * length
    if len(values) != length:
        raise ValueError(
            f"parameter {name!r} needs 1 or {length} comma-separated values, "
            f"got {len(values)}"
        )
    return values


def _take(overrides: dict[str, str], allowed) -> dict[str, str]:
    unknown = set(overrides) - set(allowed)
    if unknown:
        raise ValueError(
            f"unknown parameter(s) {sorted(unknown)}; this model takes {sorted(allowed)}"
        )
    return overrides


def _build_fasttrack_like(ctor):
    def build(overrides: dict[str, str]) -> InteractionScheme:
        o = _take(overrides, {"lambda", "beta", "mu"})
        return ctor(
            FastTrackParams(
                lambda_=_pfloat("lambda", o.get("lambda", "1")),
                beta=_pfloat("beta", o.get("beta", "0.1")),
                mu=_pfloat("mu", o.get("mu", "0.5")),
            )
        )

    return build


def _build_closed(overrides: dict[str, str]) -> InteractionScheme:
    o = _take(overrides, {"beta"})
    return bittorrent_closed(_pfloat("beta", o.get("beta", "0.5")))


def _build_aggregated(overrides: dict[str, str]) -> InteractionScheme:
    o = _take(overrides, {"lambda", "beta", "mu", "fraction"})
    return bittorrent_aggregated(
        FastTrackParams(
            lambda_=_pfloat("lambda", o.get("lambda", "1")),
            beta=_pfloat("beta", o.get("beta", "0.1")),
            mu=_pfloat("mu", o.get("mu", "0.5")),
        ),
        fraction=_pfloat("fraction", o.get("fraction", "1")),
    )


def _build_chunks(overrides: dict[str, str]) -> InteractionScheme:
    o = _take(
        overrides,
        {
            "m", "lambda", "mu", "beta", "beta_i", "delta_i", "gamma_i",
            "gamma_peer", "gamma_seed", "interest_policy",
        },
    )
    m = _pint("m", o.get("m", "3"))
    if m < 2:
        raise ValueError("parameter 'm' must be >= 2")
    return bittorrent_chunks(
        ChunkModelParams(
            m=m,
            lambda_=_pfloat("lambda", o.get("lambda", "1")),
            mu=_pfloat("mu", o.get("mu", "0.5")),
            beta=_pfloat("beta", o.get("beta", "0.2")),
            beta_i=_pvector("beta_i", o.get("beta_i", "0.1"), m - 1),
            delta_i=_pvector("delta_i", o.get("delta_i", "0.1"), m - 1),
            gamma_i=_pvector("gamma_i", o.get("gamma_i", "0.1"), max(m - 2, 0)),
            gamma_last_peer=_pfloat("gamma_peer", o.get("gamma_peer", "0.2")),
            gamma_last_seed=_pfloat("gamma_seed", o.get("gamma_seed", "0.2")),
            interest_policy=o.get("interest_policy", "all-leechers"),
        )
    )


def _fp_open(scheme: InteractionScheme) -> np.ndarray:
    p = scheme.parameters
    return np.array([p["mu"] / p["beta"], p["lambda"] / p["mu"]])


def _fp_aggregated(scheme: InteractionScheme) -> np.ndarray:
    p = scheme.parameters
    return np.array([p["mu_eff"] / p["beta"], p["lambda"] / p["mu_eff"]])


BUILTIN_MODELS: dict[str, dict] = {
    "fasttrack": {
        "build": _build_fasttrack_like(fasttrack),
        "analytic_fixed_point": _fp_open,
        "help": "lambda, beta, mu",
    },
    "bittorrent-closed": {
        "build": _build_closed,
        "analytic_fixed_point": None,
        "help": "beta",
    },
    "bittorrent-open": {
        "build": _build_fasttrack_like(bittorrent_open),
        "analytic_fixed_point": _fp_open,
        "help": "lambda, beta, mu",
    },
    "bittorrent-chunks": {
        "build": _build_chunks,
        "analytic_fixed_point": None,
        "help": (
            "m, lambda, mu, beta, beta_i, delta_i, gamma_i, gamma_peer, "
            "gamma_seed, interest_policy"
        ),
    },
    "bittorrent-aggregated": {
        "build": _build_aggregated,
        "analytic_fixed_point": _fp_aggregated,
        "help": "lambda, beta, mu, fraction",
    },
}


def build_builtin(name: str, overrides: dict[str, str]) -> InteractionScheme:
    """Construct a built-in model by CLI name with string overrides."""
    try:
        entry = BUILTIN_MODELS[name]
    except KeyError:
        raise ValueError(
            f"unknown model {name!r}; available: {', '.join(sorted(BUILTIN_MODELS))}"
        ) from None
    return entry["build"](overrides)

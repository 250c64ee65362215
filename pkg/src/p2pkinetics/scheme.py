"""Symbolic interaction schemes for one-step (birth-death) processes.

A scheme lists the species of a population model, the reactions that move
individuals between species, and mass-action style rate laws.  Each reaction
carries its before/after stoichiometry; the difference is the change vector
applied when the reaction fires, and the rate law gives the state-dependent
firing propensity.  Rate laws are restricted to ``constant * product of
monomials`` over species counts and linear aggregates of species counts,
which keeps propensities, drift Jacobians and exact jump simulation all
analyzable from the same record.

Schemes are plain frozen dataclasses: validate once, then share freely across
threads.  ``scheme_arrays`` compiles a validated scheme into the flat numpy
arrays consumed by the numeric kernels.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np


class SchemeError(Exception):
    """Configuration error in a scheme (unresolved names, bad shapes...)."""


_IDENTIFIER = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class Species:
    """A state-vector component: unique name plus 0-based position."""

    name: str
    index: int


@dataclass(frozen=True)
class Aggregate:
    """Named linear combination of species counts, usable in rate laws.

    ``weights`` has one entry per species, in species order.  At least one
    weight must be nonzero.
    """

    name: str
    weights: tuple[float, ...]


@dataclass(frozen=True)
class RateLaw:
    """Propensity ``constant * product(source ** exponent)``.

    ``constant`` is either a literal nonnegative value or the name of an
    entry in the scheme's parameter map.  Each factor names a species or an
    aggregate and raises it to a positive integer power.  A law with no
    factors is a pure constant (e.g. an influx intensity).
    """

    constant: float | str
    factors: tuple[tuple[str, int], ...] = ()


@dataclass(frozen=True)
class Reaction:
    """One interaction channel: before/after stoichiometry plus rate law.

    ``reactants`` and ``products`` hold a nonnegative count per species.
    The change vector is ``products - reactants``; species appearing with
    equal counts on both sides act as catalysts.
    """

    reactants: tuple[int, ...]
    products: tuple[int, ...]
    rate: RateLaw
    label: str = ""


@dataclass(frozen=True)
class InteractionScheme:
    """A validated-on-demand model: species, aggregates, reactions, parameters."""

    species: tuple[Species, ...]
    aggregates: tuple[Aggregate, ...]
    reactions: tuple[Reaction, ...]
    parameters: dict[str, float] = field(default_factory=dict)

    @property
    def species_names(self) -> tuple[str, ...]:
        return tuple(sp.name for sp in self.species)

    @property
    def n_species(self) -> int:
        return len(self.species)


def make_scheme(
    species: list[str] | tuple[str, ...],
    reactions: list[Reaction] | tuple[Reaction, ...],
    aggregates: list[Aggregate] | tuple[Aggregate, ...] = (),
    parameters: dict[str, float] | None = None,
) -> InteractionScheme:
    """Build a scheme from species names, assigning contiguous indices."""
    sp = tuple(Species(name, i) for i, name in enumerate(species))
    return InteractionScheme(
        species=sp,
        aggregates=tuple(aggregates),
        reactions=tuple(reactions),
        parameters=dict(parameters or {}),
    )


def reaction_from_counts(
    species: list[str] | tuple[str, ...],
    reactants: dict[str, int],
    products: dict[str, int],
    rate: RateLaw,
    label: str = "",
) -> Reaction:
    """Build a reaction from sparse name->count maps, in species order."""
    order = {name: i for i, name in enumerate(species)}
    for name in list(reactants) + list(products):
        if name not in order:
            raise SchemeError(f"unknown species {name!r} in reaction {label!r}")
    r = [0] * len(species)
    p = [0] * len(species)
    for name, count in reactants.items():
        r[order[name]] = int(count)
    for name, count in products.items():
        p[order[name]] = int(count)
    return Reaction(tuple(r), tuple(p), rate, label)


def change_vector(reaction: Reaction) -> np.ndarray:
    """Per-species state increment when the reaction fires (after - before)."""
    return np.asarray(reaction.products, dtype=np.int64) - np.asarray(
        reaction.reactants, dtype=np.int64
    )


def resolve_rate_constant(scheme: InteractionScheme, rate: RateLaw) -> float:
    """Resolve a rate-law constant against the scheme's parameter map."""
    if isinstance(rate.constant, str):
        try:
            return float(scheme.parameters[rate.constant])
        except KeyError:
            raise SchemeError(
                f"unresolved parameter name {rate.constant!r}"
            ) from None
    return float(rate.constant)


def _source_index(scheme: InteractionScheme, name: str) -> int:
    """Map a factor source name to a column: species first, then aggregates."""
    for sp in scheme.species:
        if sp.name == name:
            return sp.index
    for k, agg in enumerate(scheme.aggregates):
        if agg.name == name:
            return scheme.n_species + k
    raise SchemeError(f"unresolved source {name!r}")


def propensity(
    scheme: InteractionScheme, reaction: Reaction, state: np.ndarray
) -> float:
    """Evaluate one reaction's propensity at a (possibly continuous) state.

    Aggregates are evaluated first, then the monomial.  A negative raw value
    (possible when SDE paths undershoot zero) is clamped to 0 so the Langevin
    noise factor stays real.
    """
    x = np.asarray(state, dtype=np.float64)
    if x.shape != (scheme.n_species,):
        raise SchemeError(
            f"state has length {x.size}, scheme has {scheme.n_species} species"
        )
    value = resolve_rate_constant(scheme, reaction.rate)
    for name, exponent in reaction.rate.factors:
        col = _source_index(scheme, name)
        if col < scheme.n_species:
            base = x[col]
        else:
            agg = scheme.aggregates[col - scheme.n_species]
            base = float(np.dot(agg.weights, x))
        value *= base ** int(exponent)
    if value < 0.0:
        return 0.0
    return float(value)


def propensities(scheme: InteractionScheme, state: np.ndarray) -> np.ndarray:
    """All reaction propensities at a state, in reaction order."""
    from ._kernels import active_kernels

    arrs = scheme_arrays(scheme)
    x = np.asarray(state, dtype=np.float64)
    if x.shape != (arrs.n_species,):
        raise SchemeError(
            f"state has length {x.size}, scheme has {arrs.n_species} species"
        )
    return active_kernels().propensities(arrs, x)


def validate(scheme: InteractionScheme) -> list[str]:
    """Check a scheme and return all violations (empty list means ok)."""
    problems: list[str] = []
    n = scheme.n_species

    seen: set[str] = set()
    for sp in scheme.species:
        if not _IDENTIFIER.match(sp.name):
            problems.append(f"species name {sp.name!r} is not an identifier")
        if sp.name in seen:
            problems.append(f"duplicate species name {sp.name!r}")
        seen.add(sp.name)
    for i, sp in enumerate(scheme.species):
        if sp.index != i:
            problems.append(
                f"species {sp.name!r} has index {sp.index}, expected {i}"
            )

    agg_seen: set[str] = set()
    for agg in scheme.aggregates:
        if not _IDENTIFIER.match(agg.name):
            problems.append(f"aggregate name {agg.name!r} is not an identifier")
        if agg.name in seen:
            problems.append(
                f"aggregate name {agg.name!r} collides with a species name"
            )
        if agg.name in agg_seen:
            problems.append(f"duplicate aggregate name {agg.name!r}")
        agg_seen.add(agg.name)
        if len(agg.weights) != n:
            problems.append(
                f"aggregate {agg.name!r} has {len(agg.weights)} weights, "
                f"expected {n}"
            )
        elif not any(w != 0.0 for w in agg.weights):
            problems.append(f"aggregate {agg.name!r} has no nonzero weight")

    for name, value in scheme.parameters.items():
        if not _IDENTIFIER.match(name):
            problems.append(f"parameter name {name!r} is not an identifier")
        if not np.isfinite(value):
            problems.append(f"parameter {name!r} is not finite")

    known_sources = seen | agg_seen
    for j, rxn in enumerate(scheme.reactions):
        where = f"reaction {rxn.label!r}" if rxn.label else f"reaction #{j}"
        if len(rxn.reactants) != n or len(rxn.products) != n:
            problems.append(f"{where}: stoichiometry length != species count")
        if any(c < 0 for c in rxn.reactants) or any(c < 0 for c in rxn.products):
            problems.append(f"{where}: negative stoichiometric count")
        const = rxn.rate.constant
        if isinstance(const, str):
            if const not in scheme.parameters:
                problems.append(
                    f"{where}: unresolved parameter name {const!r}"
                )
            elif scheme.parameters[const] < 0:
                problems.append(
                    f"{where}: negative rate constant {const!r}"
                )
        elif const < 0:
            problems.append(f"{where}: negative rate constant {const}")
        for name, exponent in rxn.rate.factors:
            if name not in known_sources:
                problems.append(f"{where}: unresolved source {name!r}")
            if exponent < 1:
                problems.append(
                    f"{where}: factor {name!r} has exponent {exponent} < 1"
                )
    return problems


def validated(scheme: InteractionScheme) -> InteractionScheme:
    """Validate and return the scheme; raise with every violation otherwise."""
    problems = validate(scheme)
    if problems:
        raise SchemeError("; ".join(problems))
    return scheme


@dataclass
class SchemeArrays:
    """Flat numeric encoding of a validated scheme for the kernels.

    Rate-law factors come in two equivalent encodings: a CSR triple
    (``f_ptr``/``f_src``/``f_exp``) for the jitted scalar loops and a dense
    exponent matrix over ``species + aggregates`` columns for the vectorized
    lane.  Source column ``j`` is species ``j`` if ``j < n_species``, else
    aggregate ``j - n_species``.
    """

    n_species: int
    n_reactions: int
    n_aggregates: int
    species_names: tuple[str, ...]
    rates: np.ndarray        # (n_reactions,) resolved constants
    change_f: np.ndarray     # (n_reactions, n_species) float64
    change_i: np.ndarray     # (n_reactions, n_species) int64
    f_ptr: np.ndarray        # (n_reactions + 1,) int64
    f_src: np.ndarray        # (total_factors,) int64 column indices
    f_exp: np.ndarray        # (total_factors,) int64 exponents
    exp_dense: np.ndarray    # (n_reactions, n_species + n_aggregates) float64
    agg_w: np.ndarray        # (n_aggregates, n_species) float64


def scheme_arrays(scheme: InteractionScheme) -> SchemeArrays:
    """Compile (and cache) the numeric arrays for a validated scheme."""
    cached = getattr(scheme, "_arrays", None)
    if cached is not None:
        return cached
    validated(scheme)

    n_s = scheme.n_species
    n_r = len(scheme.reactions)
    n_a = len(scheme.aggregates)

    rates = np.empty(n_r)
    change_i = np.empty((n_r, n_s), dtype=np.int64)
    f_ptr = np.zeros(n_r + 1, dtype=np.int64)
    srcs: list[int] = []
    exps: list[int] = []
    exp_dense = np.zeros((n_r, n_s + n_a))
    for j, rxn in enumerate(scheme.reactions):
        rates[j] = resolve_rate_constant(scheme, rxn.rate)
        change_i[j] = change_vector(rxn)
        for name, exponent in rxn.rate.factors:
            col = _source_index(scheme, name)
            srcs.append(col)
            exps.append(int(exponent))
            exp_dense[j, col] += exponent
        f_ptr[j + 1] = len(srcs)

    agg_w = np.zeros((n_a, n_s))
    for k, agg in enumerate(scheme.aggregates):
        agg_w[k] = agg.weights

    arrs = SchemeArrays(
        n_species=n_s,
        n_reactions=n_r,
        n_aggregates=n_a,
        species_names=scheme.species_names,
        rates=rates,
        change_f=change_i.astype(np.float64),
        change_i=change_i,
        f_ptr=f_ptr,
        f_src=np.asarray(srcs, dtype=np.int64),
        f_exp=np.asarray(exps, dtype=np.int64),
        exp_dense=exp_dense,
        agg_w=agg_w,
    )
    object.__setattr__(scheme, "_arrays", arrs)
    return arrs

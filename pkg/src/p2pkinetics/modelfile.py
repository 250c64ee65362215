"""Plain-text model definition files (strict grammar, versioned header).

One document describes one scheme::

    # p2pkinetics model v1

    [parameters]
    lambda = 1
    beta = 0.10000000000000001

    [species]
    n
    l

    [aggregates]
    pool = l + 0.5*n

    [reactions]
    arrive:  0 -> n        @ lambda
    convert: n + l -> 2 l  @ beta * n * l
    depart:  l -> 0        @ mu * l

Grammar, line by line:

* the first line must be exactly the version header above
* blank lines and full-line ``#`` comments are ignored elsewhere
* sections are ``[parameters]`` (optional), ``[species]``, ``[aggregates]``
  (optional) and ``[reactions]``, each at most once; anything else is
  rejected
* ``[species]``: one identifier per line, in state-vector order
* ``[parameters]``: ``name = number``
* ``[aggregates]``: ``name = term + term + ...`` with ``term`` either
  ``species`` or ``coef*species``
* ``[reactions]``: ``label: side -> side @ rate``; a side is ``0`` or
  ``count species + ...`` terms (count optional, juxtaposed ``2l`` works);
  the rate is a constant (parameter name or number) followed by
  ``* source`` factors, each optionally ``^exponent``

Parsing is strict: unknown sections, malformed lines and duplicate
definitions raise ``ModelFileError`` carrying line and column.  A parsed
scheme is validated before being returned, so semantic problems (negative
constants, unresolved names) are rejected too.  ``render_model`` writes the
canonical form with 17-significant-digit numbers; parse(render(scheme))
reproduces the scheme exactly.
"""

from __future__ import annotations

import re

from .scheme import (
    Aggregate,
    InteractionScheme,
    RateLaw,
    Reaction,
    make_scheme,
    validate,
)

HEADER = "# p2pkinetics model v1"

_SECTIONS = ("parameters", "species", "aggregates", "reactions")
_SECTION_RE = re.compile(r"^\[([A-Za-z_]+)\]$")
_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_SIDE_TERM_RE = re.compile(r"^(\d+)?\s*([A-Za-z_][A-Za-z0-9_]*)$")
_FACTOR_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(\d+))?$")


class ModelFileError(Exception):
    """Syntax or semantic error in a model file, with position when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _column(line: str, fragment_offset: int) -> int:
    return fragment_offset + 1


def _parse_number(text: str, ln: int, col: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ModelFileError(f"expected a number, got {text!r}", ln, col) from None


def _split_terms(body: str, offset: int):
    """Yield (term, column) for '+'-separated terms of a side or aggregate."""
    pos = 0
    for part in body.split("+"):
        stripped = part.strip()
        lead = len(part) - len(part.lstrip())
        yield stripped, offset + pos + lead + 1
        pos += len(part) + 1


def _parse_side(body: str, ln: int, offset: int, species: list[str]) -> tuple[int, ...]:
    counts = [0] * len(species)
    stripped = body.strip()
    if stripped == "0":
        return tuple(counts)
    index = {name: i for i, name in enumerate(species)}
    for term, col in _split_terms(body, offset):
        m = _SIDE_TERM_RE.match(term)
        if not m:
            raise ModelFileError(f"malformed term {term!r}", ln, col)
        count = int(m.group(1)) if m.group(1) else 1
        name = m.group(2)
        if name not in index:
            raise ModelFileError(f"unknown species {name!r}", ln, col)
        counts[index[name]] += count
    return tuple(counts)


def _parse_rate(body: str, ln: int, offset: int) -> RateLaw:
    parts = body.split("*")
    head = parts[0].strip()
    col = offset + (len(parts[0]) - len(parts[0].lstrip())) + 1
    if not head:
        raise ModelFileError("missing rate constant", ln, col)
    constant: float | str
    if _IDENT_RE.match(head):
        constant = head
    else:
        constant = _parse_number(head, ln, col)
    factors: list[tuple[str, int]] = []
    pos = len(parts[0]) + 1
    for part in parts[1:]:
        term = part.strip()
        col = offset + pos + (len(part) - len(part.lstrip())) + 1
        m = _FACTOR_RE.match(term)
        if not m:
            raise ModelFileError(f"malformed rate factor {term!r}", ln, col)
        factors.append((m.group(1), int(m.group(2)) if m.group(2) else 1))
        pos += len(part) + 1
    return RateLaw(constant, tuple(factors))


def parse_model(text: str) -> InteractionScheme:
    """Parse and validate one model document."""
    lines = text.splitlines()
    if not lines or lines[0].rstrip() != HEADER:
        raise ModelFileError(f"first line must be {HEADER!r}", 1, 1)

    sections: dict[str, list[tuple[int, str, int]]] = {s: [] for s in _SECTIONS}
    seen: set[str] = set()
    current: str | None = None
    for ln, rawline in enumerate(lines[1:], start=2):
        stripped = rawline.strip()
        if not stripped or stripped.startswith("#"):
            continue
        indent = len(rawline) - len(rawline.lstrip())
        m = _SECTION_RE.match(stripped)
        if m:
            name = m.group(1)
            if name not in _SECTIONS:
                raise ModelFileError(
                    f"unknown section [{name}]", ln, _column(rawline, indent)
                )
            if name in seen:
                raise ModelFileError(
                    f"duplicate section [{name}]", ln, _column(rawline, indent)
                )
            seen.add(name)
            current = name
            continue
        if current is None:
            raise ModelFileError(
                "content before any section", ln, _column(rawline, indent)
            )
        sections[current].append((ln, stripped, indent))

    if not sections["species"]:
        raise ModelFileError("missing or empty [species] section")
    if not sections["reactions"]:
        raise ModelFileError("missing or empty [reactions] section")

    parameters: dict[str, float] = {}
    for ln, line, indent in sections["parameters"]:
        name, eq, value = line.partition("=")
        name = name.strip()
        if not eq or not _IDENT_RE.match(name):
            raise ModelFileError(
                "expected 'name = number'", ln, _column(line, indent)
            )
        if name in parameters:
            raise ModelFileError(f"duplicate parameter {name!r}", ln, indent + 1)
        parameters[name] = _parse_number(
            value.strip(), ln, indent + line.find("=") + 2
        )

    species: list[str] = []
    for ln, line, indent in sections["species"]:
        if not _IDENT_RE.match(line):
            raise ModelFileError(
                f"species name {line!r} is not an identifier", ln, indent + 1
            )
        if line in species:
            raise ModelFileError(f"duplicate species {line!r}", ln, indent + 1)
        species.append(line)

    aggregates: list[Aggregate] = []
    for ln, line, indent in sections["aggregates"]:
        name, eq, body = line.partition("=")
        name = name.strip()
        if not eq or not _IDENT_RE.match(name):
            raise ModelFileError(
                "expected 'name = term + term + ...'", ln, indent + 1
            )
        weights = [0.0] * len(species)
        index = {s: i for i, s in enumerate(species)}
        body_offset = indent + line.find("=") + 1
        for term, col in _split_terms(body, body_offset):
            coef_text, star, sp_name = term.partition("*")
            if star:
                coef = _parse_number(coef_text.strip(), ln, col)
                sp_name = sp_name.strip()
            else:
                coef = 1.0
                sp_name = coef_text.strip()
            if sp_name not in index:
                raise ModelFileError(f"unknown species {sp_name!r}", ln, col)
            weights[index[sp_name]] += coef
        aggregates.append(Aggregate(name, tuple(weights)))

    reactions: list[Reaction] = []
    for ln, line, indent in sections["reactions"]:
        label, colon, rest = line.partition(":")
        label = label.strip()
        if not colon or not label:
            raise ModelFileError(
                "expected 'label: side -> side @ rate'", ln, indent + 1
            )
        body, at, rate_text = rest.partition("@")
        if not at:
            raise ModelFileError("missing '@ rate' part", ln, indent + len(line))
        lhs, arrow, rhs = body.partition("->")
        if not arrow:
            raise ModelFileError(
                "missing '->' between reaction sides", ln, indent + line.find(":") + 2
            )
        lhs_off = indent + line.find(":") + 1
        rhs_off = lhs_off + len(lhs) + 2
        rate_off = indent + line.find("@") + 1
        reactions.append(
            Reaction(
                reactants=_parse_side(lhs, ln, lhs_off, species),
                products=_parse_side(rhs, ln, rhs_off, species),
                rate=_parse_rate(rate_text, ln, rate_off),
                label=label,
            )
        )

    scheme = make_scheme(species, reactions, aggregates, parameters)
    problems = validate(scheme)
    if problems:
        raise ModelFileError("validation failed: " + "; ".join(problems))
    return scheme


def _render_side(counts: tuple[int, ...], species: tuple[str, ...]) -> str:
    terms = []
    for count, name in zip(counts, species):
        if count == 1:
            terms.append(name)
        elif count > 1:
            terms.append(f"{count} {name}")
    return " + ".join(terms) if terms else "0"


def _render_rate(rate: RateLaw) -> str:
    head = rate.constant if isinstance(rate.constant, str) else _fmt(rate.constant)
    parts = [head]
    for name, exponent in rate.factors:
        parts.append(name if exponent == 1 else f"{name}^{exponent}")
    return " * ".join(parts)


def render_model(scheme: InteractionScheme) -> str:
    """Canonical text form; numbers carry 17 significant digits."""
    names = scheme.species_names
    out = [HEADER, ""]
    if scheme.parameters:
        out.append("[parameters]")
        for name, value in scheme.parameters.items():
            out.append(f"{name} = {_fmt(value)}")
        out.append("")
    out.append("[species]")
    out.extend(names)
    out.append("")
    if scheme.aggregates:
        out.append("[aggregates]")
        for agg in scheme.aggregates:
            terms = []
            for weight, name in zip(agg.weights, names):
                if weight == 0.0:
                    continue
                terms.append(name if weight == 1.0 else f"{_fmt(weight)}*{name}")
            out.append(f"{agg.name} = " + " + ".join(terms))
        out.append("")
    out.append("[reactions]")
    for j, rxn in enumerate(scheme.reactions):
        label = rxn.label or f"r{j}"
        out.append(
            f"{label}: {_render_side(rxn.reactants, names)} -> "
            f"{_render_side(rxn.products, names)} @ {_render_rate(rxn.rate)}"
        )
    out.append("")
    return "\n".join(out)


def load_model_file(path) -> InteractionScheme:
    """Read, parse and validate a model file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read())


def save_model_file(path, scheme: InteractionScheme) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_model(scheme))

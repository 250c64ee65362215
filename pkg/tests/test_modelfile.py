import numpy as np
import pytest

import p2pkinetics as pk
from p2pkinetics.modelfile import (
    HEADER,
    ModelFileError,
    load_model_file,
    parse_model,
    render_model,
    save_model_file,
)

from conftest import random_positive_states


def builtin_schemes(chunk_params_m4):
    yield pk.fasttrack(pk.FastTrackParams(1, 0.1, 0.5))
    yield pk.bittorrent_closed(0.5)
    yield pk.bittorrent_open(pk.FastTrackParams(2, 0.4, 0.7))
    yield pk.bittorrent_chunks(chunk_params_m4)
    yield pk.bittorrent_aggregated(pk.FastTrackParams(1, 0.1, 0.5), fraction=0.8)


def test_round_trip_equality_for_builtins(chunk_params_m4):
    for scheme in builtin_schemes(chunk_params_m4):
        assert parse_model(render_model(scheme)) == scheme


def test_round_trip_preserves_kinetics(chunk_params_m4):
    for scheme in builtin_schemes(chunk_params_m4):
        reparsed = parse_model(render_model(scheme))
        for state in random_positive_states(scheme.n_species, 100, seed=51):
            assert np.max(np.abs(pk.drift(scheme, state) - pk.drift(reparsed, state))) < 1e-12
            assert np.max(
                np.abs(pk.diffusion(scheme, state) - pk.diffusion(reparsed, state))
            ) < 1e-12


def test_round_trip_awkward_floats():
    rxn = pk.reaction_from_counts(
        ["a"], {}, {"a": 1}, pk.RateLaw(0.1 + 0.2), label="in"
    )
    scheme = pk.make_scheme(["a"], [rxn], parameters={"k": 1 / 3})
    assert parse_model(render_model(scheme)) == scheme


def test_save_and_load(tmp_path, ft_focus):
    path = tmp_path / "ft.model"
    save_model_file(path, ft_focus)
    assert load_model_file(path) == ft_focus


def test_header_required():
    with pytest.raises(ModelFileError) as err:
        parse_model("[species]\nn\n")
    assert err.value.line == 1


def test_unknown_section_rejected():
    text = HEADER + "\n\n[species]\nn\n\n[nonsense]\n"
    with pytest.raises(ModelFileError, match="unknown section") as err:
        parse_model(text)
    assert err.value.line == 6


def test_duplicate_section_rejected():
    text = HEADER + "\n[species]\nn\n[species]\nn2\n"
    with pytest.raises(ModelFileError, match="duplicate section"):
        parse_model(text)


def test_content_before_section_rejected():
    text = HEADER + "\nn = 1\n"
    with pytest.raises(ModelFileError, match="before any section"):
        parse_model(text)


def test_missing_reactions_section():
    text = HEADER + "\n[species]\nn\n"
    with pytest.raises(ModelFileError, match="reactions"):
        parse_model(text)


def test_negative_rate_constant_lists_reaction_label():
    text = "\n".join(
        [
            HEADER,
            "[parameters]",
            "k = -1",
            "[species]",
            "x",
            "[reactions]",
            "drain: x -> 0 @ k * x",
        ]
    )
    with pytest.raises(ModelFileError, match="drain.*negative rate constant"):
        parse_model(text)


def test_unknown_species_in_reaction_has_position():
    text = "\n".join([HEADER, "[species]", "x", "[reactions]", "r: y -> 0 @ 1"])
    with pytest.raises(ModelFileError, match="unknown species") as err:
        parse_model(text)
    assert err.value.line == 5
    assert err.value.column is not None


def test_missing_rate_part():
    text = "\n".join([HEADER, "[species]", "x", "[reactions]", "r: x -> 0"])
    with pytest.raises(ModelFileError, match="@"):
        parse_model(text)


def test_missing_arrow():
    text = "\n".join([HEADER, "[species]", "x", "[reactions]", "r: x @ 1"])
    with pytest.raises(ModelFileError, match="->"):
        parse_model(text)


def test_malformed_parameter_line():
    text = "\n".join(
        [HEADER, "[parameters]", "what", "[species]", "x", "[reactions]", "r: 0 -> x @ 1"]
    )
    with pytest.raises(ModelFileError, match="name = number"):
        parse_model(text)


def test_juxtaposed_and_spaced_counts_agree():
    def doc(side):
        return "\n".join(
            [HEADER, "[species]", "l1", "[reactions]", f"r: {side} -> 0 @ 1 * l1"]
        )

    a = parse_model(doc("2l1"))
    b = parse_model(doc("2 l1"))
    assert a.reactions[0].reactants == b.reactions[0].reactants == (2,)


def test_exponent_round_trip():
    rxn = pk.reaction_from_counts(
        ["x"], {"x": 2}, {"x": 3}, pk.RateLaw(0.5, (("x", 2),)), label="grow"
    )
    scheme = pk.make_scheme(["x"], [rxn])
    text = render_model(scheme)
    assert "x^2" in text
    assert parse_model(text) == scheme


def test_aggregate_weights_round_trip():
    rxn = pk.reaction_from_counts(
        ["a", "b"], {"a": 1}, {"b": 1}, pk.RateLaw(1.0, (("pool", 1),)), "hop"
    )
    scheme = pk.make_scheme(
        ["a", "b"], [rxn], aggregates=[pk.Aggregate("pool", (0.5, 2.0))]
    )
    text = render_model(scheme)
    assert "pool = 0.5*a + 2*b" in text
    assert parse_model(text) == scheme


def test_numeric_literal_rate_constant():
    text = "\n".join([HEADER, "[species]", "x", "[reactions]", "r: x -> 0 @ 0.25 * x"])
    scheme = parse_model(text)
    assert scheme.reactions[0].rate.constant == 0.25


def test_comments_and_blank_lines_ignored():
    text = "\n".join(
        [
            HEADER,
            "",
            "# a comment",
            "[species]",
            "x",
            "",
            "[reactions]",
            "# another comment",
            "r: 0 -> x @ 1",
        ]
    )
    scheme = parse_model(text)
    assert scheme.species_names == ("x",)


def test_validation_failure_on_unresolved_rate_name():
    text = "\n".join([HEADER, "[species]", "x", "[reactions]", "r: 0 -> x @ lam"])
    with pytest.raises(ModelFileError, match="unresolved parameter"):
        parse_model(text)

"""Tests for obstruction sets, color structures, rewritability and FPP solving."""

import dataclasses
import itertools

import pytest

from omega_width.algebra import FiniteStructure
from omega_width.atlas import AtlasError, mmsnp_atlas, validate_atlas
from omega_width.atlas.builtins import label_color
from omega_width.fixtures import (
    EXPECTED_REWRITABILITY,
    OBSTRUCTION_TEXTS,
    complete_graph,
    cycle_graph,
    obstruction_set,
    random_graph_structure,
    triple_path,
)
from omega_width.mmsnp import (
    MMSNPError,
    ObstructionParseError,
    color_structure,
    datalog_rewritable,
    fpp_solve,
    obstruction_embedding,
    parse_obstruction_set,
    precolor,
    structure_from_atoms,
)
from omega_width.mmsnp.obstructions import format_obstruction_set
from omega_width.oracles import fpp_brute_force
from omega_width.reduction import Verdict

MMSNP_FIXTURES = sorted(OBSTRUCTION_TEXTS)


def decode_typing(atlas, obstructions, typing, n):
    """Colored structure on 0..n-1 that a typing of the mmsnp atlas describes."""
    atoms = [
        (symbol, args)
        for symbol, arity in sorted(obstructions.signature.items())
        for args in itertools.product(range(n), repeat=arity)
        if (atlas.label_of(typing, n, args),) in atlas.relations[symbol].allowed
    ]
    coloring = {i: label_color(atlas.label_of(typing, n, (i,))) for i in range(n)}
    return structure_from_atoms(range(n), atoms, coloring)


@pytest.fixture
def two_coloring():
    return obstruction_set("two-coloring")


@pytest.fixture
def triangle_free():
    return obstruction_set("triangle-free")


class TestParser:
    """Test the obstruction-set text format."""

    def test_named_members(self, two_coloring):
        assert two_coloring.colors == ("R", "B")
        assert two_coloring.signature == {"E": 2}
        assert [m.name for m in two_coloring.members] == ["mono_R", "mono_B"]
        assert two_coloring.normal_form
        assert not two_coloring.precolored

    def test_unnamed_members(self):
        three = obstruction_set("three-coloring")
        assert [m.name for m in three.members] == ["F1", "F2", "F3"]

    def test_member_coloring(self, triangle_free):
        member = triangle_free.members[0]
        assert member.size == 3
        assert set(member.coloring.values()) == {"C"}
        assert len(member.atoms) == 3

    def test_format_reparses(self, two_coloring):
        again = parse_obstruction_set(format_obstruction_set(two_coloring))
        assert again.summary() == two_coloring.summary()

    def test_unknown_symbol_position(self):
        text = "colors R;\nrelation E/2;\nforbid {v: E(v,v), X(v)};\n"
        with pytest.raises(ObstructionParseError) as excinfo:
            parse_obstruction_set(text)
        error = excinfo.value
        assert (error.line, error.column) == (3, 20)
        assert error.member == "F1"

    def test_missing_semicolon(self):
        text = "colors R;\nrelation E/2\nforbid {v: E(v,v), R(v)};\n"
        with pytest.raises(ObstructionParseError, match="expected ';'") as excinfo:
            parse_obstruction_set(text)
        assert (excinfo.value.line, excinfo.value.column) == (3, 1)

    def test_unexpected_character(self):
        with pytest.raises(ObstructionParseError) as excinfo:
            parse_obstruction_set("colors R;\n@\n")
        assert (excinfo.value.line, excinfo.value.column) == (2, 1)

    def test_zero_arity(self):
        with pytest.raises(ObstructionParseError, match="positive"):
            parse_obstruction_set("colors R; relation E/0;")

    def test_disconnected_member(self):
        text = "colors R; relation E/2; forbid bad = {u,v: R(u), R(v)};"
        with pytest.raises(ObstructionParseError, match="not connected") as excinfo:
            parse_obstruction_set(text)
        assert excinfo.value.member == "bad"

    def test_multi_colored_vertex(self):
        text = "colors R, B; relation E/2; forbid {v,w: E(v,w), R(v), B(v), R(w)};"
        with pytest.raises(ObstructionParseError, match="multi-colored"):
            parse_obstruction_set(text)

    def test_uncolored_vertex(self):
        text = "colors R; relation E/2; forbid {v,w: E(v,w), R(v)};"
        with pytest.raises(ObstructionParseError, match="uncolored"):
            parse_obstruction_set(text)

    def test_unknown_statement(self):
        with pytest.raises(ObstructionParseError, match="unknown statement"):
            parse_obstruction_set("colours R;")


class TestPrecolor:
    """Test the standard precoloration."""

    @pytest.mark.parametrize(
        "name, added",
        [("two-coloring", 2), ("three-coloring", 6), ("triangle-free", 0)],
    )
    def test_mismatch_members(self, name, added):
        original = obstruction_set(name)
        precolored = precolor(original)
        assert precolored.precolored
        assert len(precolored.members) == len(original.members) + added
        assert len(precolored.core_members()) == len(original.members)

    def test_predicates(self, two_coloring):
        precolored = precolor(two_coloring)
        assert precolored.signature["P_R"] == 1
        assert precolored.precolor_symbols == {"R": "P_R", "B": "P_B"}
        assert "pre_R_B" in {m.name for m in precolored.members}

    def test_twice(self, two_coloring):
        with pytest.raises(MMSNPError, match="already precolored"):
            precolor(precolor(two_coloring))


class TestColorStructure:
    """Test the finite structure on colors."""

    def test_needs_precoloring(self, two_coloring):
        with pytest.raises(MMSNPError):
            color_structure(two_coloring)

    def test_needs_normal_form(self, two_coloring):
        plain = dataclasses.replace(precolor(two_coloring), normal_form=False)
        with pytest.raises(MMSNPError):
            color_structure(plain)

    def test_two_coloring_edge_relation(self, two_coloring):
        structure = color_structure(precolor(two_coloring))
        assert set(structure.domain) == {"R", "B"}
        assert structure.relations["E(0,1)"] == frozenset({("R", "B"), ("B", "R")})


class TestRewritability:
    """Test the Datalog rewritability decision."""

    @pytest.mark.parametrize("name", ["two-coloring", "triangle-free"])
    def test_datalog(self, name):
        verdict = datalog_rewritable(obstruction_set(name))
        assert verdict.verdict == EXPECTED_REWRITABILITY[name]
        assert verdict.is_datalog
        assert verdict.certificate is not None
        assert verdict.transcript[-1] == "linked WNU pair (w3, w4) found"

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["three-coloring", "monochromatic-triangle"])
    def test_not_datalog(self, name):
        verdict = datalog_rewritable(obstruction_set(name))
        assert verdict.verdict == EXPECTED_REWRITABILITY[name]
        assert verdict.certificate is None
        assert "exhausted" in verdict.transcript[-1]

    def test_same_verdict_when_precolored(self, two_coloring):
        plain = datalog_rewritable(two_coloring)
        precolored = datalog_rewritable(precolor(two_coloring))
        assert plain.verdict == precolored.verdict

    def test_refuses_without_normal_form(self):
        text = OBSTRUCTION_TEXTS["two-coloring"].replace("normal-form;\n", "")
        with pytest.raises(MMSNPError, match="normal form"):
            datalog_rewritable(parse_obstruction_set(text))

    def test_provenance(self, triangle_free):
        body = datalog_rewritable(triangle_free).to_dict()
        assert "precolored;" in body["provenance"]["precoloration"]
        assert body["certificate"]["w3"]["arity"] == 3


class TestMMSNPAtlas:
    """Test the atlas of the template of a precolored obstruction set."""

    def test_ternary_signature(self):
        atlas = mmsnp_atlas(precolor(obstruction_set("monochromatic-triple")))
        assert (atlas.k, atlas.ell) == (3, 4)
        assert atlas.labels[1] == ("R", "B")
        assert len(atlas.labels[2]) == 2 + 4
        assert len(atlas.labels[3]) == 8 + 3 * 4 + 2
        allowed = atlas.relations["T"].allowed
        assert ("R|R|R|",) not in allowed
        assert ("R|R|B|",) in allowed
        report = validate_atlas(atlas)
        assert report.valid, report.errors

    def test_two_coloring_labels(self):
        atlas = mmsnp_atlas(precolor(obstruction_set("two-coloring")))
        assert (atlas.k, atlas.ell) == (2, 3)
        assert atlas.labels[1] == ("R", "B")
        assert atlas.relations["E"].allowed == {("R|B|",), ("B|R|",)}
        assert atlas.relations["P_R"].allowed == {("R",)}

    @pytest.mark.parametrize("name", MMSNP_FIXTURES)
    def test_fixtures_are_valid(self, name):
        report = validate_atlas(mmsnp_atlas(precolor(obstruction_set(name))))
        assert report.valid, report.errors

    def test_needs_precoloring(self, two_coloring):
        with pytest.raises(AtlasError, match="precolored"):
            mmsnp_atlas(two_coloring)

    def test_orbit_cap(self, two_coloring):
        with pytest.raises(AtlasError, match="more than 1 orbits"):
            mmsnp_atlas(precolor(two_coloring), cap=1)

    @pytest.mark.parametrize("name", MMSNP_FIXTURES)
    def test_realizable_typings_are_obstruction_free(self, name):
        """Every realizable typing up to ell points decodes to an obstruction-free coloring."""
        obstructions = obstruction_set(name)
        atlas = mmsnp_atlas(precolor(obstructions))
        for n in range(1, atlas.ell + 1):
            for typing in atlas.all_typings(n):
                decoded = decode_typing(atlas, obstructions, typing, n)
                assert obstruction_embedding(obstructions.members, decoded) is None, typing

    @pytest.mark.parametrize(
        "name, n",
        [(name, n) for name in MMSNP_FIXTURES for n in (1, 2)]
        + [
            pytest.param(name, 3, marks=pytest.mark.slow)
            for name in MMSNP_FIXTURES
            if obstruction_set(name).signature == {"E": 2}
        ],
    )
    def test_obstruction_free_colorings_are_realizable(self, name, n):
        """Every obstruction-free coloring of n points lies inside a realizable typing."""
        obstructions = obstruction_set(name)
        atlas = mmsnp_atlas(precolor(obstructions))
        decoded = [
            decode_typing(atlas, obstructions, typing, n) for typing in atlas.all_typings(n)
        ]
        covers = [(s.coloring, set(s.atoms)) for s in decoded]
        candidates = [
            (symbol, args)
            for symbol, arity in sorted(obstructions.signature.items())
            for args in itertools.product(range(n), repeat=arity)
        ]
        for colors in itertools.product(obstructions.colors, repeat=n):
            coloring = dict(enumerate(colors))
            for size in range(len(candidates) + 1):
                for atoms in itertools.combinations(candidates, size):
                    colored = structure_from_atoms(range(n), atoms, coloring)
                    if obstruction_embedding(obstructions.members, colored) is not None:
                        continue
                    assert any(
                        c == coloring and set(atoms) <= found for c, found in covers
                    ), (colors, atoms)


class TestFPPSolve:
    """Test deciding FPP(F) on concrete inputs."""

    @pytest.mark.parametrize(
        "name, structure, satisfiable",
        [
            ("two-coloring", cycle_graph(4), True),
            ("two-coloring", cycle_graph(5), False),
            ("triangle-free", cycle_graph(5), True),
            ("triangle-free", complete_graph(4), False),
        ],
    )
    def test_agrees_with_brute_force(self, name, structure, satisfiable):
        obstructions = obstruction_set(name)
        assert (fpp_brute_force(obstructions, structure) is not None) == satisfiable
        result = fpp_solve(obstructions, structure, levels=(2, 3))
        assert result.verdict is (Verdict.SAT if satisfiable else Verdict.UNSAT)

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_ternary_relation(self, n):
        obstructions = obstruction_set("monochromatic-triple")
        structure = triple_path(n)
        assert fpp_brute_force(obstructions, structure) is not None
        result = fpp_solve(obstructions, structure)
        assert result.verdict is Verdict.SAT
        assert result.checked
        for a, b, c in structure.relations["T"]:
            assert len({result.coloring[a], result.coloring[b], result.coloring[c]}) == 2

    @pytest.mark.parametrize("route", ["lift", "coloring"])
    def test_unknown_is_never_sat(self, route):
        """Every 2-coloring of K5 has a monochromatic triangle; the solver never claims SAT."""
        obstructions = obstruction_set("monochromatic-triangle")
        structure = complete_graph(5)
        assert fpp_brute_force(obstructions, structure) is None
        result = fpp_solve(obstructions, structure, route=route)
        assert result.verdict in (Verdict.UNSAT, Verdict.UNKNOWN)
        assert result.coloring is None

    @pytest.mark.slow
    @pytest.mark.parametrize(
        "name", ["two-coloring", "three-coloring", "triangle-free", "monochromatic-triangle"]
    )
    def test_random_graphs_agree_with_brute_force(self, name):
        """Non-UNKNOWN verdicts on seeded random graphs match exhaustive coloring."""
        obstructions = obstruction_set(name)
        decided = 0
        for seed in range(8):
            structure = random_graph_structure(3 + seed % 6, 0.5, seed)
            expected = fpp_brute_force(obstructions, structure) is not None
            result = fpp_solve(obstructions, structure)
            if result.verdict is Verdict.UNKNOWN:
                assert not expected, structure.name
                continue
            decided += 1
            assert (result.verdict is Verdict.SAT) == expected, structure.name
            if expected:
                assert result.checked
        assert decided

    def test_coloring_is_checked(self, two_coloring):
        structure = cycle_graph(4)
        result = fpp_solve(two_coloring, structure)
        assert result.checked
        assert set(result.coloring) == set(structure.domain)
        for a, b in structure.relations["E"]:
            assert result.coloring[a] != result.coloring[b]

    def test_coloring_route(self, triangle_free):
        result = fpp_solve(triangle_free, cycle_graph(5), route="coloring")
        assert result.route == "coloring"
        assert result.verdict is not Verdict.UNSAT
        if result.verdict is Verdict.SAT:
            assert result.checked

    def test_unknown_route(self, two_coloring):
        with pytest.raises(MMSNPError, match="unknown route"):
            fpp_solve(two_coloring, cycle_graph(4), route="direct")

    def test_needs_normal_form(self, two_coloring):
        plain = dataclasses.replace(two_coloring, normal_form=False)
        with pytest.raises(MMSNPError):
            fpp_solve(plain, cycle_graph(4))

    def test_foreign_relation(self, two_coloring):
        structure = FiniteStructure((0, 1), {"F": {(0, 1)}})
        with pytest.raises(MMSNPError, match="not in the signature"):
            fpp_solve(two_coloring, structure)

    def test_result_dict(self, triangle_free):
        body = fpp_solve(triangle_free, cycle_graph(5)).to_dict()
        assert body["verdict"] == "SAT"
        assert body["route"] == "lift"
        assert set(body["coloring"].values()) == {"C"}

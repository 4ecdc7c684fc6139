"""Tests for pattern atlases, builtin families and the registry."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omega_width.atlas import (
    AtlasError,
    Pattern,
    PatternError,
    check_pattern,
    enumerate_patterns,
    export_atlas,
    get_atlas,
    list_families,
    load_atlas,
    mmsnp_atlas,
    orbit_structure,
    realizability_problem,
    realizable,
    resolve_atlas,
    restrict_pattern,
    tuple_label,
    validate_atlas,
)
from omega_width.fixtures import obstruction_set
from omega_width.mmsnp import precolor

BUILTIN_SPECS = [
    "equality",
    "equivalence",
    "henson:3",
    "henson:4",
    "random-graph",
    "fourary",
    "partition:1,inf",
]


class TestLabels:
    """Test the label sets and derived parameters of builtin atlases."""

    def test_equality_labels(self, equality):
        """The pure set has one unary label and two pair labels."""
        assert equality.k == 2
        assert equality.ell == 3
        assert set(equality.labels[1]) == {"V"}
        assert set(equality.labels[2]) == {"EQ", "NEQ"}

    def test_graph_labels(self, henson3):
        """Graph families label pairs by equality, edge or non-edge."""
        assert set(henson3.labels[2]) == {"EQ", "E", "N"}

    def test_diagonal_labels(self, equivalence):
        """Only EQ labels pairs with equal entries."""
        assert equivalence.diagonal_labels == frozenset({"EQ"})
        assert equivalence.is_diagonal("EQ")
        assert not equivalence.is_diagonal("SAME")

    def test_partition_labels(self):
        """Partition labels name the blocks of both entries."""
        atlas = get_atlas("partition:1,inf")
        assert set(atlas.labels[1]) == {"V1", "V2"}
        assert {"EQ1", "EQ2", "N12", "N21"} <= set(atlas.labels[2])

    @pytest.mark.parametrize(
        "spec, bound, wnu, ts",
        [
            ("equality", 6, (4, 6), (2, 3)),
            ("henson:3", 6, (4, 6), (2, 3)),
            ("henson:7", 7, (4, 7), (2, 7)),
        ],
    )
    def test_derived_levels(self, spec, bound, wnu, ts):
        """Capability bound and default levels follow k and ell."""
        atlas = get_atlas(spec)
        assert atlas.capability_bound == bound
        assert atlas.wnu_levels == wnu
        assert atlas.ts_levels == ts

    def test_paper_widths(self):
        """Each family records the width it is known to have."""
        assert get_atlas("equality").paper_width == (2, 3)
        assert get_atlas("henson:5").paper_width == (2, 5)
        assert get_atlas("random-graph").paper_width == (4, 6)


class TestRealizableTypings:
    """Test enumeration of realizable patterns."""

    @pytest.mark.parametrize("points, expected", [(2, 2), (3, 5), (4, 15)])
    def test_equality_counts_are_bell_numbers(self, equality, points, expected):
        """Patterns over the pure set are the set partitions of the points."""
        assert len(equality.all_typings(points)) == expected

    def test_random_graph_three_points(self, random_graph):
        """One class, a merged pair with either edge label, or any of 8 graphs."""
        assert len(random_graph.all_typings(3)) == 1 + 3 * 2 + 8

    def test_henson_omits_triangle(self, henson3, random_graph):
        """The Henson graph loses exactly the triangle on three points."""
        assert len(henson3.all_typings(3)) == len(random_graph.all_typings(3)) - 1
        assert ("E", "E", "E") not in henson3.all_typings(3)

    def test_partition_singleton_block(self):
        """A singleton block holds no two distinct points."""
        atlas = get_atlas("partition:1,inf")
        pairs = {t[0] for t in atlas.all_typings(2)}
        assert "N11" not in pairs
        assert "N22" in pairs

    def test_enumerate_patterns_orders_points(self, equality):
        """Patterns are yielded on the points in canonical order."""
        patterns = list(enumerate_patterns(equality, [3, 1, 2]))
        assert len(patterns) == 5
        assert all(p.points == (1, 2, 3) for p in patterns)

    @pytest.mark.parametrize("spec", ["equality", "equivalence", "henson:3", "fourary"])
    @pytest.mark.parametrize("points", [3, 4])
    def test_enumeration_is_closed_under_permutations(self, spec, points):
        """No pattern is yielded twice and relabeling the points stays inside the set."""
        atlas = get_atlas(spec)
        typings = [p.typing for p in enumerate_patterns(atlas, range(points))]
        found = set(typings)
        assert len(found) == len(typings)
        for typing in typings:
            for perm in itertools.permutations(range(points)):
                relabeled = tuple(
                    atlas.label_of(typing, points, tuple(perm[i] for i in combo))
                    for combo in itertools.combinations(range(points), atlas.k)
                )
                assert relabeled in found, (typing, perm)

    def test_ternary_enumeration_is_closed_under_permutations(self):
        atlas = mmsnp_atlas(precolor(obstruction_set("monochromatic-triple")))
        typings = set(atlas.all_typings(4))
        for typing in typings:
            for perm in itertools.permutations(range(4)):
                relabeled = tuple(
                    atlas.label_of(typing, 4, tuple(perm[i] for i in combo))
                    for combo in itertools.combinations(range(4), 3)
                )
                assert relabeled in typings


class TestPatternCalculus:
    """Test coherence, realizability and restriction."""

    def test_forbidden_pattern_not_realizable(self, equality):
        """Two equalities force the third pair to be equal."""
        pattern = Pattern.on([1, 2, 3], ("EQ", "EQ", "NEQ"))
        assert not realizable(equality, pattern)
        assert realizability_problem(equality, pattern) is not None

    def test_realizable_pattern(self, equality):
        pattern = Pattern.on([1, 2, 3], ("EQ", "NEQ", "NEQ"))
        assert realizable(equality, pattern)
        assert realizability_problem(equality, pattern) is None

    def test_wrong_typing_length(self, equality):
        """A typing must have one label per pair."""
        with pytest.raises(PatternError):
            check_pattern(equality, Pattern.on([1, 2, 3], ("EQ", "NEQ")))

    def test_unknown_label(self, equality):
        with pytest.raises(PatternError):
            realizable(equality, Pattern.on([1, 2], ("E",)))

    def test_repeated_points(self, equality):
        with pytest.raises(PatternError):
            check_pattern(equality, Pattern((1, 1), ("EQ",)))

    def test_restrict_pattern(self, henson3):
        """Restriction keeps the labels of the chosen points."""
        pattern = Pattern.on(["a", "b", "c"], ("E", "N", "E"))
        restricted = restrict_pattern(henson3, pattern, ["a", "c"])
        assert restricted.points == ("a", "c")
        assert restricted.typing == ("N",)

    def test_restrict_to_empty_set(self, henson3):
        pattern = Pattern.on(["a", "b"], ("E",))
        with pytest.raises(PatternError):
            restrict_pattern(henson3, pattern, [])

    def test_restrict_to_foreign_points(self, henson3):
        pattern = Pattern.on(["a", "b"], ("E",))
        with pytest.raises(PatternError):
            restrict_pattern(henson3, pattern, ["z"])

    def test_tuple_label(self, equality):
        """Repeated points get the diagonal label; order does not matter."""
        pattern = Pattern.on([1, 2], ("NEQ",))
        assert tuple_label(equality, pattern, (1, 1)) == "EQ"
        assert tuple_label(equality, pattern, (2, 1)) == "NEQ"
        assert tuple_label(equality, pattern, (1,)) == "V"

    @given(data=st.data())
    @settings(max_examples=40, deadline=None)
    def test_restrictions_stay_realizable(self, data):
        """Every restriction of a realizable pattern is realizable."""
        atlas = get_atlas("henson:3")
        typing = data.draw(st.sampled_from(sorted(atlas.all_typings(4))))
        pattern = Pattern((0, 1, 2, 3), typing)
        subset = data.draw(st.sets(st.sampled_from(range(4)), min_size=1))
        assert realizable(atlas, restrict_pattern(atlas, pattern, subset))


class TestValidation:
    """Test atlas validation."""

    @pytest.mark.parametrize("spec", BUILTIN_SPECS)
    def test_builtins_are_valid(self, spec):
        report = validate_atlas(get_atlas(spec))
        assert report.valid, report.errors


class TestRegistry:
    """Test family lookup and spec parsing."""

    def test_families_listed(self):
        families = list_families()
        for family in ("equality", "equivalence", "henson", "partition"):
            assert family in families

    def test_aliases_share_cache(self):
        """Aliases resolve to the same cached atlas."""
        assert get_atlas("eq") is get_atlas("equality")
        assert get_atlas("pure-set") is get_atlas("equality")

    def test_henson_parameter(self):
        atlas = get_atlas("h:4")
        assert atlas.name == "henson:4"
        assert atlas.ell == 4

    @pytest.mark.parametrize(
        "spec",
        ["nope", "henson", "henson:2", "henson:x", "equality:3", "partition", "partition:2"],
    )
    def test_bad_specs(self, spec):
        with pytest.raises(AtlasError):
            get_atlas(spec)


class TestAtlasFiles:
    """Test exporting and loading atlases."""

    def test_export_and_load(self, tmp_path, henson3):
        """A reloaded atlas has the same labels and realizable patterns."""
        path = export_atlas(henson3, tmp_path / "henson3.json")
        loaded = load_atlas(path)

        assert loaded.name == henson3.name
        assert (loaded.k, loaded.ell) == (henson3.k, henson3.ell)
        assert loaded.labels == henson3.labels
        assert loaded.all_typings(3) == henson3.all_typings(3)
        assert set(loaded.relations) == set(henson3.relations)

    def test_resolve_atlas_path(self, tmp_path, equality):
        path = export_atlas(equality, tmp_path / "eq.json")
        assert resolve_atlas(path).all_typings(4) == equality.all_typings(4)

    def test_export_is_deterministic(self, tmp_path, fourary):
        first = export_atlas(fourary, tmp_path / "a.json").read_bytes()
        second = export_atlas(fourary, tmp_path / "b.json").read_bytes()
        assert first == second


class TestOrbitStructure:
    """Test the finite structure on pair labels."""

    def test_equality_orbit_structure(self, equality):
        structure = orbit_structure(equality)
        assert set(structure.domain) == {"EQ", "NEQ"}
        assert structure.relations["top3"] == equality.all_typings(3)
        assert structure.arities["top3"] == 3

    def test_relations_included(self, henson3):
        """Binary relations become unary relations on pair labels."""
        structure = orbit_structure(henson3)
        assert structure.relations["E"] == frozenset({("E",)})

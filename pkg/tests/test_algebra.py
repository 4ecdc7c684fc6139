"""Tests for finite structures, polymorphism searches, cores and cyclic relations."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omega_width.algebra import (
    CyclicRelation,
    FiniteStructure,
    OperationTable,
    StructureError,
    close_cyclic,
    core_of,
    find_linked_wnu_pair,
    find_loop,
    find_polymorphism,
    has_ts_all_arities,
    is_idempotent,
    is_linked,
    is_polymorphism,
    is_wnu,
    linkedness_congruence,
    loop_lemma_harness,
    parse_identity,
    preserves,
    table_from_function,
    wnu_identities,
)
from omega_width.engine import SearchError
from omega_width.fixtures import (
    complete_graph,
    cycle_graph,
    duplicated_point_structure,
    edgeless_structure,
    full_structure,
    majority_on_booleans,
    semilattice_generators,
)


@pytest.fixture
def minimum():
    return table_from_function((0, 1), 2, min, name="min")


class TestFiniteStructure:
    """Test structure construction and derived structures."""

    def test_relations_frozen(self, neq):
        assert neq.relations["neq"] == frozenset({(0, 1), (1, 0)})
        assert neq.arities["neq"] == 2
        assert neq.size == 2

    def test_repeated_domain(self):
        with pytest.raises(StructureError):
            FiniteStructure((0, 0), {})

    def test_mixed_arities(self):
        with pytest.raises(StructureError):
            FiniteStructure((0, 1), {"R": {(0,), (0, 1)}})

    def test_tuple_outside_domain(self):
        with pytest.raises(StructureError):
            FiniteStructure((0, 1), {"R": {(0, 5)}})

    def test_empty_relation_needs_arity(self):
        with pytest.raises(StructureError):
            FiniteStructure((0, 1), {"R": set()})

    def test_with_singletons(self, neq):
        expanded = neq.with_singletons()
        assert len(expanded.relations) == 3
        assert all(expanded.arities[name] == 1 for name in expanded.relations if name != "neq")

    def test_induced(self, k3):
        induced = k3.induced([0, 1])
        assert induced.domain == (0, 1)
        assert induced.relations["E"] == frozenset({(0, 1), (1, 0)})


class TestOperationTable:
    """Test operation tables and set functions."""

    def test_from_function(self, minimum):
        assert minimum(0, 1) == 0
        assert minimum(1, 1) == 1
        assert len(minimum.expand()) == 4
        assert is_idempotent(minimum)

    def test_partial_table(self):
        with pytest.raises(StructureError, match="not total"):
            OperationTable((0, 1), 2, table={(0, 0): 0})

    def test_table_and_set_function(self):
        with pytest.raises(StructureError):
            OperationTable((0, 1), 1)

    def test_at_arity_needs_set_function(self, minimum):
        with pytest.raises(StructureError):
            minimum.at_arity(3)

    def test_set_function_arities(self):
        """A set function answers at every arity."""
        sets = {frozenset({0}): 0, frozenset({1}): 1, frozenset({0, 1}): 0}
        table = OperationTable((0, 1), 2, set_function=sets, name="and")
        wide = table.at_arity(5)
        assert wide(1, 1, 0, 1, 1) == 0
        assert wide(1, 1, 1, 1, 1) == 1
        assert table.to_dict()["sets"][-1] == [[0, 1], 0]


class TestIdentities:
    """Test identity parsing and WNU systems."""

    def test_parse_and_show(self):
        identity = parse_identity("w(x,x,y) = w(x,y,x)")
        assert str(identity) == "w(x,x,y) = w(x,y,x)"
        assert identity.variables() == ["x", "y"]

    def test_variable_right_side(self):
        identity = parse_identity("w(x,x,x) = x")
        assert identity.right == "x"

    @pytest.mark.parametrize("text", ["w(x,y)", "x = w(x,x)", "w() = x", "w(x) = 3y"])
    def test_bad_identities(self, text):
        with pytest.raises(StructureError):
            parse_identity(text)

    def test_wnu_identities(self):
        identities = wnu_identities(4)
        assert len(identities) == 3
        assert str(identities[0]) == "w(y,x,x,x) = w(x,y,x,x)"

    def test_wnu_arity(self):
        with pytest.raises(StructureError):
            wnu_identities(1)


class TestPolymorphisms:
    """Test polymorphism checks and searches."""

    def test_majority_preserves_neq(self, neq):
        majority = majority_on_booleans()
        assert is_polymorphism(majority, neq)
        assert is_wnu(majority)

    def test_min_breaks_neq(self, neq, minimum):
        assert not is_polymorphism(minimum, neq)
        assert preserves(minimum, {(0, 0), (0, 1), (1, 1)})

    def test_projection_is_not_wnu(self):
        first = table_from_function((0, 1), 3, lambda x, y, z: x)
        assert not is_wnu(first)

    def test_found_wnu_is_checked(self, neq):
        table = find_polymorphism(neq.with_singletons(), "idempotent-wnu", 3)
        assert table is not None
        assert is_wnu(table)
        assert is_polymorphism(table, neq)

    def test_k3_has_no_wnu(self, k3):
        assert find_polymorphism(k3.with_singletons(), "idempotent-wnu", 3) is None

    def test_z2_linear(self, z2_linear):
        """Minority is a WNU of arity 3 but the pair search fails."""
        expanded = z2_linear.with_singletons()
        assert find_polymorphism(expanded, "idempotent-wnu", 3) is not None
        assert find_polymorphism(expanded, "idempotent-wnu", 4) is None
        assert find_linked_wnu_pair(expanded) is None

    def test_linked_pair_on_neq(self, neq):
        pair = find_linked_wnu_pair(neq.with_singletons())
        assert pair is not None
        w3, w4 = pair
        assert is_wnu(w3) and is_wnu(w4)
        for x in (0, 1):
            for y in (0, 1):
                assert w3(y, x, x) == w4(y, x, x, x)

    def test_linked_pair_absent_on_k3(self, k3):
        assert find_linked_wnu_pair(core_of(k3).expanded) is None

    def test_custom_identities(self, horn):
        """A commutative idempotent binary polymorphism exists on Horn relations."""
        identities = [parse_identity("f(x,y) = f(y,x)"), parse_identity("f(x,x) = x")]
        table = find_polymorphism(horn, identities, 2)
        assert table is not None
        assert table(0, 1) == table(1, 0)
        assert is_polymorphism(table, horn)

    def test_unknown_spec(self, neq):
        with pytest.raises(StructureError):
            find_polymorphism(neq, "majority", 3)

    def test_ts_all_arities(self, horn, neq):
        ts = has_ts_all_arities(horn)
        assert ts is not None
        assert ts.is_compressed
        assert is_polymorphism(ts.at_arity(3), horn)
        assert has_ts_all_arities(neq) is None

    def test_search_cap(self, k3):
        with pytest.raises(SearchError):
            find_polymorphism(k3, "wnu", 4, cap=10)


class TestCores:
    """Test core computation."""

    @pytest.mark.parametrize(
        "structure, size",
        [
            (complete_graph(3), 3),
            (cycle_graph(4), 2),
            (duplicated_point_structure(), 2),
            (full_structure(2), 1),
            (edgeless_structure(3), 1),
        ],
    )
    def test_core_size(self, structure, size):
        assert len(core_of(structure).core.domain) == size

    def test_retraction_fixes_core(self):
        result = core_of(duplicated_point_structure())
        assert result.is_proper
        assert result.core.domain == (0, 2)
        for value in result.core.domain:
            assert result.retraction[value] == value
        assert result.retraction[1] == 2

    def test_odd_cycle_is_core(self, c5):
        result = core_of(c5)
        assert not result.is_proper
        assert len(result.expanded.relations) == 1 + 5


class TestCyclicRelations:
    """Test cyclic relations, linkedness and closures."""

    def test_from_tuples_closes_shifts(self):
        relation = CyclicRelation.from_tuples([(0, 1, 2)])
        assert len(relation) == 3
        assert relation.support == frozenset({0, 1, 2})

    def test_not_closed(self):
        with pytest.raises(StructureError):
            CyclicRelation(2, frozenset({(0, 1)}))

    def test_unlinked_without_loop(self):
        relation = CyclicRelation.from_tuples([(0, 1)])
        assert len(linkedness_congruence(relation)) == 2
        assert not is_linked(relation)
        assert find_loop(relation) is None

    def test_shifts_of_a_triple_are_unlinked(self):
        """Each prefix of a cyclic shift of (0, 1, 2) completes in one way only."""
        relation = CyclicRelation.from_tuples([(0, 1, 2)])
        assert linkedness_congruence(relation) == [
            frozenset({0}),
            frozenset({1}),
            frozenset({2}),
        ]
        assert not is_linked(relation)

    def test_full_square_is_linked(self):
        relation = CyclicRelation.from_tuples(itertools.product((0, 1), repeat=2))
        assert linkedness_congruence(relation) == [frozenset({0, 1})]
        assert is_linked(relation)

    def test_closure_under_min_has_loop(self, minimum):
        closed = close_cyclic([(0, 1)], [minimum])
        assert (0, 0) in closed.tuples
        assert is_linked(closed)
        assert find_loop(closed) == (0, 0)

    def test_non_idempotent_generator(self):
        negation = table_from_function((0, 1), 2, lambda x, y: 1 - x)
        with pytest.raises(StructureError):
            close_cyclic([(0, 1)], [negation])

    def test_closure_cap(self):
        with pytest.raises(SearchError):
            close_cyclic([(0, 1, 1)], [majority_on_booleans()], cap=2)

    @given(
        rows=st.lists(
            st.tuples(st.integers(0, 1), st.integers(0, 1), st.integers(0, 1)),
            min_size=1,
            max_size=3,
        )
    )
    @settings(max_examples=50, deadline=None)
    def test_linked_closures_have_loops(self, rows):
        """Closing under a semilattice never yields a loop-free linked relation."""
        closed = close_cyclic(rows, semilattice_generators())
        if is_linked(closed):
            assert find_loop(closed) is not None


class TestLoopHarness:
    """Test the randomized loop harness."""

    def test_semilattice_run(self):
        report = loop_lemma_harness(None, 40, 3, generators=semilattice_generators())
        assert report.ok
        assert report.trials == 40
        assert report.loops >= report.linked
        assert report.to_dict()["generators"] == ["min"]

    def test_majority_run(self):
        report = loop_lemma_harness(None, 40, 5, generators=[majority_on_booleans()])
        assert report.ok

    def test_certificate_from_structure(self, neq):
        report = loop_lemma_harness(neq, 20, 1)
        assert report.ok

    def test_needs_structure_or_generators(self):
        with pytest.raises(StructureError):
            loop_lemma_harness(None, 5, 1)

    def test_needs_wnu(self):
        first = table_from_function((0, 1), 2, lambda x, y: x, name="first")
        with pytest.raises(StructureError, match="no WNU"):
            loop_lemma_harness(None, 5, 1, generators=[first])

    def test_no_certificate(self, k3):
        with pytest.raises(StructureError):
            loop_lemma_harness(k3, 5, 1)

"""Tests for instances, the minimality engine and finite search."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omega_width.atlas import get_atlas
from omega_width.engine import (
    CapabilityError,
    FiniteConstraint,
    FiniteInstance,
    Instance,
    InstanceError,
    PropagationStats,
    SearchError,
    SearchStats,
    check_levels,
    establish_minimality,
    gen_random_instance,
    is_minimal,
    is_trivial,
    normalize,
    search_solution,
)
from omega_width.fixtures import fourary_instance_i, fourary_instance_j, henson_triangle
from omega_width.oracles import brute_force_satisfiable


def constraint_map(instance):
    """Scope to allowed typings, expanding lazy tops."""
    return {c.scope: c.typings(instance.atlas) for c in instance.constraints}


@pytest.fixture
def solvable(equality):
    """x = y, y ≠ z."""
    return Instance.from_applications(
        equality, ["x", "y", "z"], [("EQ", ("x", "y")), ("NEQ", ("y", "z"))]
    )


@pytest.fixture
def neq_pair():
    """Two variables that must differ over {0, 1}."""
    return FiniteInstance(
        variables=("a", "b"),
        alphabet=(0, 1),
        constraints=(FiniteConstraint(("a", "b"), frozenset({(0, 1), (1, 0)}), "neq"),),
        name="neq-pair",
    )


class TestNormalize:
    """Test conversion of relation applications to constraints."""

    def test_scopes_are_canonical(self, equality):
        instance = Instance.from_applications(equality, [2, 1], [("NEQ", (2, 1))])
        normalized = normalize(instance)
        assert normalized.normalized
        assert normalized.variables == (1, 2)
        assert normalized.constraints[0].scope == (1, 2)
        assert normalized.constraints[0].allowed == frozenset({("NEQ",)})

    def test_unknown_relation(self, equality):
        instance = Instance.from_applications(equality, [1, 2], [("E", (1, 2))])
        with pytest.raises(InstanceError, match="Unknown relation"):
            normalize(instance)

    def test_arity_mismatch(self, equality):
        instance = Instance.from_applications(equality, [1, 2, 3], [("EQ", (1, 2, 3))])
        with pytest.raises(InstanceError, match="arity"):
            normalize(instance)

    def test_undeclared_variable(self, equality):
        instance = Instance.from_applications(equality, [1, 2], [("EQ", (1, 9))])
        with pytest.raises(InstanceError, match="undeclared"):
            normalize(instance)

    def test_duplicates_merged(self, equality):
        """Constraints on one scope are intersected by default."""
        instance = Instance.from_applications(
            equality, [1, 2], [("EQ", (1, 2)), ("NEQ", (1, 2))]
        )
        normalized = normalize(instance)
        assert len(normalized.constraints) == 1
        assert is_trivial(normalized)

    def test_duplicates_kept(self, equality):
        instance = Instance.from_applications(
            equality, [1, 2], [("EQ", (1, 2)), ("NEQ", (1, 2))]
        )
        normalized = normalize(instance, merge_duplicates=False)
        assert len(normalized.constraints) == 2
        assert not is_trivial(normalized)


class TestCheckLevels:
    """Test the capability bound."""

    @pytest.mark.parametrize("levels", [(0, 3), (3, 2), (2, 7)])
    def test_rejected(self, equality, levels):
        with pytest.raises(CapabilityError):
            check_levels(equality, *levels)

    def test_unsafe_override(self, equality):
        check_levels(equality, 2, 7, unsafe=True)

    def test_establish_checks_levels(self, triangle_instance):
        with pytest.raises(CapabilityError):
            establish_minimality(triangle_instance, 2, 9)


class TestEstablishMinimality:
    """Test (k', ell')-minimality propagation."""

    def test_equality_triangle_is_trivial(self, triangle_instance):
        stats = PropagationStats()
        result = establish_minimality(triangle_instance, 2, 3, stats=stats)
        assert is_trivial(result)
        assert stats.trivial
        assert result.minimality_level == (2, 3)

    def test_trivial_result_is_all_empty(self, triangle_instance):
        result = establish_minimality(triangle_instance, 2, 3)
        assert result.constraints
        assert all(c.allowed == frozenset() for c in result.constraints)

    def test_solvable_instance(self, solvable):
        """Propagation derives x ≠ z."""
        result = establish_minimality(solvable, 2, 3)
        assert not is_trivial(result)
        assert constraint_map(result)[("x", "z")] == frozenset({("NEQ",)})

    def test_result_is_minimal(self, solvable):
        result = establish_minimality(solvable, 2, 3)
        check = is_minimal(result, 2, 3)
        assert check
        assert check.reason == "minimal"

    def test_henson_clique(self):
        """An E-triangle has no solution in the triangle-free graph."""
        assert is_trivial(establish_minimality(henson_triangle(3), 2, 3))

    def test_idempotent(self, solvable):
        once = establish_minimality(solvable, 2, 3)
        twice = establish_minimality(once, 2, 3)
        assert constraint_map(once) == constraint_map(twice)

    @given(seed=st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=25, deadline=None)
    def test_stronger_levels_shrink_constraints(self, seed):
        """Raising ell' only removes patterns from shared scopes."""
        atlas = get_atlas("equality")
        instance = gen_random_instance(atlas, 5, 5, seed, relations=["EQ", "NEQ"])
        weak = establish_minimality(instance, 2, 3)
        strong = establish_minimality(instance, 2, 4)
        if is_trivial(weak):
            assert is_trivial(strong)
            return
        weak_map = constraint_map(weak)
        for scope, allowed in constraint_map(strong).items():
            if scope in weak_map:
                assert allowed <= weak_map[scope]

    @given(seed=st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=25, deadline=None)
    def test_solutions_preserved(self, seed):
        """Minimization never changes satisfiability."""
        atlas = get_atlas("henson:3")
        instance = gen_random_instance(atlas, 4, 4, seed, relations=["E", "N", "NEQ"])
        minimized = establish_minimality(instance, 2, 3)
        assert brute_force_satisfiable(minimized) == brute_force_satisfiable(instance)

    @pytest.mark.slow
    def test_fourary_instance_i(self):
        """The R_eq/R_neq clash on one scope needs k' = 4."""
        instance = fourary_instance_i()
        assert not is_trivial(establish_minimality(instance, 3, 6))
        assert is_trivial(establish_minimality(instance, 4, 6))

    @pytest.mark.slow
    def test_fourary_instance_j(self):
        """The chained R_eq/R_neq instance needs ell' = 6."""
        instance = fourary_instance_j()
        assert not is_trivial(establish_minimality(instance, 4, 5))
        assert is_trivial(establish_minimality(instance, 4, 6))


class TestIsMinimal:
    """Test the literal minimality check."""

    def test_unnormalized_instance_not_covered(self, solvable):
        """A scope-free pair of variables is reported."""
        check = is_minimal(normalize(solvable), 2, 3)
        assert not check
        assert check.uncovered is not None
        assert "lie in no constraint scope" in check.reason

    def test_disagreeing_projections(self, neq_pair):
        pinned = FiniteInstance(
            variables=neq_pair.variables,
            alphabet=neq_pair.alphabet,
            constraints=neq_pair.constraints
            + (FiniteConstraint(("a",), frozenset({(0,)}), "pin"),),
        )
        check = is_minimal(pinned, 1, 2)
        assert not check
        assert check.subset == ("a",)
        assert check.to_dict()["minimal"] is False


class TestSearch:
    """Test the finite backtracking search."""

    def test_solution_found(self, neq_pair):
        stats = SearchStats()
        solution = search_solution(neq_pair, stats=stats)
        assert solution is not None
        assert solution["a"] != solution["b"]
        assert neq_pair.is_satisfied_by(solution)

    def test_no_solution(self, neq_pair):
        both = FiniteInstance(
            variables=neq_pair.variables,
            alphabet=neq_pair.alphabet,
            constraints=neq_pair.constraints
            + (FiniteConstraint(("a", "b"), frozenset({(0, 0), (1, 1)}), "eq"),),
        )
        assert search_solution(both) is None

    def test_node_cap(self, neq_pair):
        with pytest.raises(SearchError):
            search_solution(neq_pair, node_cap=0)

    def test_empty_alphabet(self):
        with pytest.raises(InstanceError):
            FiniteInstance(variables=("a",), alphabet=())


class TestGenerate:
    """Test random instance generation."""

    def test_deterministic(self, equality):
        first = gen_random_instance(equality, 6, 8, 42)
        second = gen_random_instance(equality, 6, 8, 42)
        assert first == second
        assert first.variables == tuple(range(1, 7))
        assert len(first.applications) == 8

    def test_relation_filter(self, henson3):
        instance = gen_random_instance(henson3, 5, 20, 7, relations=["E"])
        assert {a.relation for a in instance.applications} == {"E"}

    def test_bad_sizes(self, equality):
        with pytest.raises(InstanceError):
            gen_random_instance(equality, 0, 3, 1)

    def test_unknown_relations(self, equality):
        with pytest.raises(InstanceError):
            gen_random_instance(equality, 3, 3, 1, relations=["R_eq"])

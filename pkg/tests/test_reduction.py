"""Tests for orbit instances, lifting and the solving pipeline."""

import pytest

from omega_width.atlas import Pattern
from omega_width.engine import (
    CapabilityError,
    Instance,
    InstanceError,
    establish_minimality,
    normalize,
)
from omega_width.fixtures import fourary_instance_i, henson_triangle
from omega_width.reduction import (
    LIFT_STEPS,
    LiftError,
    Verdict,
    Witness,
    build_orbit_instance,
    check_minimality_transfer,
    clique_number,
    lift_solution,
    resolve_levels,
    solve,
    verify_witness,
    witness_from_dict,
    witness_graph,
)


@pytest.fixture
def solvable(equality):
    """x = y, y ≠ z."""
    return Instance.from_applications(
        equality, ["x", "y", "z"], [("EQ", ("x", "y")), ("NEQ", ("y", "z"))]
    )


@pytest.fixture
def path_graph(henson3):
    """E(1,2), E(2,3), N(1,3) over the triangle-free graph."""
    return Instance.from_applications(
        henson3, [1, 2, 3], [("E", (1, 2)), ("E", (2, 3)), ("N", (1, 3))]
    )


class TestResolveLevels:
    """Test level selection per mode."""

    def test_modes(self, equality):
        assert resolve_levels(equality, "wnu") == (4, 6)
        assert resolve_levels(equality, "ts") == (2, 3)
        assert resolve_levels(equality, "family") == (2, 3)

    def test_override(self, equality):
        assert resolve_levels(equality, "wnu", (3, 5)) == (3, 5)

    def test_unknown_mode(self, equality):
        with pytest.raises(CapabilityError):
            resolve_levels(equality, "fast")


class TestSolve:
    """Test the minimize, search and lift pipeline."""

    @pytest.mark.parametrize("mode", ["wnu", "ts", "family"])
    def test_equality_triangle_unsat(self, triangle_instance, mode):
        result = solve(triangle_instance, mode)
        assert result.verdict is Verdict.UNSAT
        assert result.witness is None
        assert not result.satisfiable

    def test_henson_triangle_unsat(self):
        assert solve(henson_triangle(3), "family").verdict is Verdict.UNSAT

    def test_sat_with_witness(self, solvable):
        result = solve(solvable, "family")
        assert result.verdict is Verdict.SAT
        witness = result.witness
        assert witness.size == 2
        assert witness.quotient["x"] == witness.quotient["y"]
        assert witness.quotient["x"] != witness.quotient["z"]
        assert verify_witness(solvable, witness).ok

    def test_equality_materialization(self, solvable):
        witness = solve(solvable, "family").witness
        values = witness.materialization["values"]
        assert values["x"] == values["y"] != values["z"]

    def test_graph_materialization(self, path_graph):
        result = solve(path_graph, "family")
        assert result.verdict is Verdict.SAT
        materialized = result.witness.materialization
        assert materialized["clique_number"] < 3
        assert materialized["edges"] == [[0, 1], [1, 2]]

    def test_witness_graph(self, path_graph, henson3):
        witness = solve(path_graph, "ts").witness
        graph = witness_graph(witness, henson3)
        assert graph.number_of_edges() == 2
        assert clique_number(graph) == 2

    def test_result_dict(self, solvable):
        body = solve(solvable, "family").to_dict()
        assert body["verdict"] == "SAT"
        assert body["levels"] == [2, 3]
        assert "seconds" not in body["stats"]

    def test_levels_too_low_to_lift(self, solvable):
        with pytest.raises(LiftError) as excinfo:
            solve(solvable, levels=(2, 2))
        assert excinfo.value.step == "precondition"

    def test_capability_bound(self, solvable):
        with pytest.raises(CapabilityError):
            solve(solvable, levels=(2, 9))

    @pytest.mark.slow
    def test_fourary_instance_i(self):
        """The family levels refute the R_eq/R_neq clash."""
        assert solve(fourary_instance_i(), "family").verdict is Verdict.UNSAT


class TestOrbitInstance:
    """Test the finite orbit instance."""

    def test_shape(self, solvable, equality):
        minimized = establish_minimality(solvable, 2, 3)
        orbit = build_orbit_instance(minimized)
        assert orbit.k == 2
        assert set(orbit.finite.alphabet) == {"EQ", "NEQ"}
        assert len(orbit.finite.variables) == 3
        assert len(orbit.back_refs) == len(orbit.finite.constraints)
        assert orbit.summary()["alphabet"] == 2

    def test_level_one(self, solvable):
        orbit = build_orbit_instance(establish_minimality(solvable, 2, 3), 1)
        assert orbit.finite.alphabet == ("V",)
        assert orbit.finite.variables == (("x",), ("y",), ("z",))

    def test_k_out_of_range(self, solvable):
        with pytest.raises(InstanceError):
            build_orbit_instance(solvable, 3)

    def test_minimality_transfer(self, solvable):
        minimized = establish_minimality(solvable, 4, 6)
        assert check_minimality_transfer(minimized, 2, 3)

    def test_transfer_needs_stamp(self, solvable):
        minimized = establish_minimality(solvable, 2, 3)
        with pytest.raises(InstanceError):
            check_minimality_transfer(minimized, 2, 3)


class TestLifting:
    """Test lifting orbit solutions and checking witnesses."""

    def test_steps(self):
        assert LIFT_STEPS[0] == "precondition"
        assert "realizability" in LIFT_STEPS

    def test_unstamped_instance(self, solvable):
        with pytest.raises(LiftError) as excinfo:
            lift_solution(normalize(solvable), {})
        assert excinfo.value.step == "precondition"

    def test_non_transitive_identification(self, equality):
        minimized = establish_minimality(Instance.from_applications(equality, "xyz", []), 2, 3)
        h = {("x", "y"): "EQ", ("x", "z"): "NEQ", ("y", "z"): "EQ"}
        with pytest.raises(LiftError) as excinfo:
            lift_solution(minimized, h)
        assert excinfo.value.step == "equivalence"

    def test_constraint_violation(self, solvable):
        minimized = establish_minimality(solvable, 2, 3)
        h = {("x", "y"): "NEQ", ("x", "z"): "NEQ", ("y", "z"): "NEQ"}
        with pytest.raises(LiftError) as excinfo:
            lift_solution(minimized, h)
        assert excinfo.value.step == "constraints"

    def test_tampered_witness_rejected(self, solvable):
        merged = Witness(
            quotient={"x": 0, "y": 0, "z": 0},
            classes=(("x", "y", "z"),),
            structure=Pattern((0,), ("V",)),
            atlas_name="equality",
            family="equality",
        )
        check = verify_witness(solvable, merged)
        assert not check.ok
        assert any("violates" in p for p in check.problems)

    def test_wrong_atlas(self, solvable):
        witness = solve(solvable, "family").witness
        witness.atlas_name = "henson:3"
        check = verify_witness(solvable, witness)
        assert not check.ok
        assert "atlas" in check.problems[0]

    def test_witness_document(self, solvable):
        witness = solve(solvable, "family").witness
        decoded = witness_from_dict(witness.to_dict())
        assert decoded.quotient == witness.quotient
        assert verify_witness(solvable, decoded).ok

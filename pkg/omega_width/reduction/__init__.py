"""
Reduction to orbit instances, lifting and the solving pipeline.
"""

from .lifting import (
    LIFT_STEPS,
    LiftError,
    Witness,
    WitnessCheck,
    lift_coloring,
    lift_solution,
    verify_witness,
    witness_from_dict,
)
from .materialize import clique_number, materialize_witness, witness_graph
from .orbit import OrbitInstance, build_orbit_instance, check_minimality_transfer
from .pipeline import (
    MODES,
    CompletenessError,
    SolveResult,
    Verdict,
    resolve_levels,
    solve,
)

__all__ = [
    # Orbit instances
    "OrbitInstance",
    "build_orbit_instance",
    "check_minimality_transfer",
    # Lifting
    "Witness",
    "WitnessCheck",
    "lift_solution",
    "lift_coloring",
    "verify_witness",
    "witness_from_dict",
    "materialize_witness",
    "witness_graph",
    "clique_number",
    "LIFT_STEPS",
    # Pipeline
    "solve",
    "resolve_levels",
    "SolveResult",
    "Verdict",
    "MODES",
    # Exceptions
    "LiftError",
    "CompletenessError",
]

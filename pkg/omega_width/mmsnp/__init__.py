"""
Obstruction sets, color structures, Datalog rewritability and FPP solving.
"""

from .colors import (
    DATALOG,
    NOT_DATALOG,
    RewritabilityVerdict,
    allowed_colorings,
    canonical_shape,
    color_structure,
    datalog_rewritable,
    shape_inventory,
    shape_name,
)
from .fpp import ROUTES, FPPResult, check_coloring, fpp_solve, input_atoms
from .obstructions import (
    PRECOLOR_PREFIX,
    ColoredStructure,
    MMSNPError,
    ObstructionParseError,
    ObstructionSet,
    ensure_precolored,
    find_homomorphism,
    format_obstruction_set,
    iter_homomorphisms,
    obstruction_embedding,
    parse_obstruction_set,
    precolor,
    quotients,
    structure_from_atoms,
    validate_obstruction_set,
)

__all__ = [
    # Obstruction sets
    "ObstructionSet",
    "ColoredStructure",
    "parse_obstruction_set",
    "format_obstruction_set",
    "validate_obstruction_set",
    "precolor",
    "ensure_precolored",
    "structure_from_atoms",
    "PRECOLOR_PREFIX",
    # Homomorphisms
    "iter_homomorphisms",
    "find_homomorphism",
    "obstruction_embedding",
    "quotients",
    # Color structures
    "color_structure",
    "shape_inventory",
    "canonical_shape",
    "shape_name",
    "allowed_colorings",
    "datalog_rewritable",
    "RewritabilityVerdict",
    "DATALOG",
    "NOT_DATALOG",
    # FPP
    "fpp_solve",
    "FPPResult",
    "check_coloring",
    "input_atoms",
    "ROUTES",
    # Exceptions
    "ObstructionParseError",
    "MMSNPError",
]

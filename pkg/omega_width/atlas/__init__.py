"""
Pattern atlases: finite presentations of homogeneous templates.
"""

from .core import (
    AtlasError,
    ForbiddenKind,
    ForbiddenPattern,
    Label,
    Pattern,
    PatternAtlas,
    PatternError,
    RelationDef,
    Typing,
    ValidationReport,
    canonical_points,
    check_pattern,
    coherence_problem,
    enumerate_patterns,
    enumerate_typings,
    point_key,
    realizability_problem,
    realizable,
    restrict_pattern,
    validate_atlas,
    violation,
)
from .builder import derive_atlas
from .builtins import (
    equality_atlas,
    equivalence_atlas,
    henson_atlas,
    mmsnp_atlas,
    partition_atlas,
    random_graph_atlas,
    random_graph_fourary_atlas,
)
from .io import atlas_from_dict, atlas_to_dict, export_atlas, load_atlas
from .orbit import orbit_structure
from .registry import get_atlas, is_supported, list_families, register, resolve_atlas


def tuple_label(atlas: PatternAtlas, pattern: Pattern, points: tuple) -> Label:
    """Label of an arbitrary tuple of at most k points of a pattern."""
    positions = tuple(pattern.points.index(p) for p in points)
    return atlas.label_of(pattern.typing, pattern.size, positions)


__all__ = [
    # Core types
    "PatternAtlas",
    "Pattern",
    "ForbiddenPattern",
    "ForbiddenKind",
    "RelationDef",
    "ValidationReport",
    "Label",
    "Typing",
    # Pattern calculus
    "point_key",
    "canonical_points",
    "coherence_problem",
    "check_pattern",
    "violation",
    "realizable",
    "realizability_problem",
    "restrict_pattern",
    "tuple_label",
    "enumerate_patterns",
    "enumerate_typings",
    "validate_atlas",
    "orbit_structure",
    # Builtin families
    "derive_atlas",
    "equality_atlas",
    "equivalence_atlas",
    "henson_atlas",
    "random_graph_atlas",
    "random_graph_fourary_atlas",
    "partition_atlas",
    "mmsnp_atlas",
    # Files and registry
    "atlas_to_dict",
    "atlas_from_dict",
    "export_atlas",
    "load_atlas",
    "register",
    "get_atlas",
    "resolve_atlas",
    "list_families",
    "is_supported",
    # Exceptions
    "AtlasError",
    "PatternError",
]

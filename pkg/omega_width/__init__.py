"""Ω Width - local consistency, bounded width and MMSNP rewritability
over ω-categorical templates.
"""

from .logging_config import configure_logging, get_logger
from .atlas import PatternAtlas, get_atlas, resolve_atlas, AtlasError, PatternError
from .engine import (
    Instance,
    FiniteInstance,
    establish_minimality,
    is_minimal,
    search_solution,
    CapabilityError,
    InstanceError,
    SearchError,
)
from .algebra import FiniteStructure, core_of, find_linked_wnu_pair, StructureError
from .reduction import solve, verify_witness, SolveResult, Verdict, LiftError
from .mmsnp import parse_obstruction_set, datalog_rewritable, fpp_solve, MMSNPError
from .config import RunConfig, load_config, ConfigError
from .utils import FormatError

__version__ = "0.1.0"

__all__ = [
    # Logging
    "configure_logging",
    "get_logger",
    # Atlases
    "PatternAtlas",
    "get_atlas",
    "resolve_atlas",
    # Engine
    "Instance",
    "FiniteInstance",
    "establish_minimality",
    "is_minimal",
    "search_solution",
    # Algebra
    "FiniteStructure",
    "core_of",
    "find_linked_wnu_pair",
    # Reduction
    "solve",
    "verify_witness",
    "SolveResult",
    "Verdict",
    # MMSNP
    "parse_obstruction_set",
    "datalog_rewritable",
    "fpp_solve",
    # Configuration
    "RunConfig",
    "load_config",
    # Exceptions
    "AtlasError",
    "PatternError",
    "CapabilityError",
    "InstanceError",
    "SearchError",
    "StructureError",
    "LiftError",
    "MMSNPError",
    "ConfigError",
    "FormatError",
]

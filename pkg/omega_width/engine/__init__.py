"""
Minimality engine and finite search.
"""

from .generate import gen_random_instance
from .instance import (
    TOP_ORIGIN,
    Application,
    Constraint,
    FiniteConstraint,
    FiniteInstance,
    Instance,
    InstanceError,
    apply_relation,
    is_trivial,
    normalize,
)
from .minimality import (
    CapabilityError,
    MinimalityCheck,
    PropagationStats,
    check_levels,
    establish_minimality,
    is_minimal,
)
from .search import SearchError, SearchStats, search_solution

__all__ = [
    # Instances
    "Application",
    "Constraint",
    "Instance",
    "FiniteConstraint",
    "FiniteInstance",
    "TOP_ORIGIN",
    "apply_relation",
    "normalize",
    "is_trivial",
    "gen_random_instance",
    # Minimality
    "establish_minimality",
    "is_minimal",
    "check_levels",
    "MinimalityCheck",
    "PropagationStats",
    # Search
    "search_solution",
    "SearchStats",
    # Exceptions
    "InstanceError",
    "CapabilityError",
    "SearchError",
]

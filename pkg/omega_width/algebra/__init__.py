"""
Finite structures, operation tables and polymorphism searches.
"""

from .cores import (
    CoreResult,
    core_of,
    find_structure_homomorphism,
    homomorphism_instance,
)
from .cyclic import (
    CyclicRelation,
    HarnessReport,
    certificate_generators,
    close_cyclic,
    find_loop,
    is_linked,
    linkedness_congruence,
    loop_lemma_harness,
)
from .polymorphisms import (
    Identity,
    find_linked_wnu_pair,
    find_polymorphism,
    first_violation,
    has_ts_all_arities,
    is_idempotent,
    is_polymorphism,
    is_wnu,
    parse_identities,
    parse_identity,
    preserves,
    wnu_all_arities,
    wnu_identities,
)
from .structures import (
    FiniteStructure,
    OperationTable,
    StructureError,
    nonempty_subsets,
    singleton_name,
    table_from_function,
)

__all__ = [
    # Structures
    "FiniteStructure",
    "OperationTable",
    "table_from_function",
    "nonempty_subsets",
    "singleton_name",
    # Polymorphisms
    "Identity",
    "parse_identity",
    "parse_identities",
    "wnu_identities",
    "find_polymorphism",
    "find_linked_wnu_pair",
    "has_ts_all_arities",
    "wnu_all_arities",
    "preserves",
    "first_violation",
    "is_polymorphism",
    "is_idempotent",
    "is_wnu",
    # Cores
    "core_of",
    "CoreResult",
    "find_structure_homomorphism",
    "homomorphism_instance",
    # Cyclic relations
    "CyclicRelation",
    "close_cyclic",
    "linkedness_congruence",
    "is_linked",
    "find_loop",
    "loop_lemma_harness",
    "certificate_generators",
    "HarnessReport",
    # Exceptions
    "StructureError",
]

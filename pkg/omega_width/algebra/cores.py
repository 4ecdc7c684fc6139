"""
Homomorphisms between finite structures and cores.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Hashable, Iterable, Mapping

from ..engine.instance import FiniteConstraint, FiniteInstance
from ..engine.search import search_solution
from ..logging_config import get_logger
from .structures import FiniteStructure, Value

logger = get_logger(__name__)


def homomorphism_instance(
    source: FiniteStructure,
    target: FiniteStructure,
    values: Iterable[Value] | None = None,
) -> FiniteInstance:
    """Finite instance whose solutions are homomorphisms source -> target.

    Args:
        source: Domain structure.
        target: Codomain structure; relations missing here are empty.
        values: Allowed images, in search order (target domain by default).
    """
    alphabet = tuple(values) if values is not None else target.domain
    allowed_values = set(alphabet)
    constraints: dict[tuple[str, tuple[Value, ...]], FiniteConstraint] = {}
    for rel_name in source.relation_names():
        images = target.relations.get(rel_name, frozenset())
        for t in sorted(source.relations[rel_name], key=repr):
            scope = tuple(dict.fromkeys(t))
            key = (rel_name, t)
            if key in constraints:
                continue
            positions = [scope.index(v) for v in t]
            allowed = set()
            for image in images:
                if not allowed_values.issuperset(image):
                    continue
                assigned: dict[int, Value] = {}
                if all(assigned.setdefault(p, v) == v for p, v in zip(positions, image)):
                    allowed.add(tuple(assigned[i] for i in range(len(scope))))
            constraints[key] = FiniteConstraint(scope, frozenset(allowed), rel_name)
    return FiniteInstance(
        variables=source.domain,
        alphabet=alphabet,
        constraints=tuple(constraints.values()),
        name=f"hom[{source.name or 'source'} -> {target.name or 'target'}]",
    )


def find_structure_homomorphism(
    source: FiniteStructure,
    target: FiniteStructure,
    values: Iterable[Value] | None = None,
) -> dict[Value, Value] | None:
    """A homomorphism source -> target using only the given values, or None."""
    alphabet = tuple(values) if values is not None else target.domain
    if not alphabet:
        return {} if not source.domain else None
    return search_solution(homomorphism_instance(source, target, alphabet))


@dataclass(slots=True, kw_only=True)
class CoreResult:
    """Core of a finite structure.

    Attributes:
        core: The core, an induced substructure of the input.
        expanded: The core with one singleton relation per element.
        retraction: Homomorphism from the input onto the core fixing it.
    """

    core: FiniteStructure
    expanded: FiniteStructure
    retraction: dict[Value, Value]

    @property
    def is_proper(self) -> bool:
        return len(self.core.domain) < len(self.retraction)

    def to_dict(self) -> dict[str, Any]:
        return {
            "core_domain": list(self.core.domain),
            "retraction": [[str(k), str(v)] for k, v in self.retraction.items()],
        }


def _compose(outer: Mapping[Value, Value], inner: Mapping[Value, Value]) -> dict[Value, Value]:
    return {v: outer[inner[v]] for v in inner}


def core_of(structure: FiniteStructure) -> CoreResult:
    """Compute a core by shrinking along non-surjective endomorphisms.

    Elements are tried for removal in domain order; each success restricts
    the structure to the endomorphism's image. The final map is adjusted to
    fix the core pointwise.
    """
    current = structure
    retraction: dict[Hashable, Hashable] = {v: v for v in structure.domain}
    shrinking = True
    while shrinking and len(current.domain) > 1:
        shrinking = False
        for avoided in current.domain:
            values = [v for v in current.domain if v != avoided]
            endo = find_structure_homomorphism(current, current, values)
            if endo is None:
                continue
            image = set(endo.values())
            retraction = _compose(endo, retraction)
            current = current.induced(image)
            logger.debug("Core search: dropped to %d elements", len(current.domain))
            shrinking = True
            break

    # The map restricted to the core is an automorphism; undo it there
    inverse = {retraction[v]: v for v in current.domain}
    retraction = _compose(inverse, retraction)

    logger.info(
        "Core of %s has %d of %d elements",
        structure.name or "structure",
        len(current.domain),
        len(structure.domain),
    )
    return CoreResult(core=current, expanded=current.with_singletons(), retraction=retraction)

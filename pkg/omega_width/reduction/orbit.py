"""
Orbit instances: the finite instance over k-labels of a pattern-set instance,
and the minimality transfer check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable

from ..atlas.core import combinations_of
from ..engine.instance import (
    FiniteConstraint,
    FiniteInstance,
    Instance,
    InstanceError,
    is_trivial,
    normalize,
)
from ..engine.minimality import MinimalityCheck, is_minimal
from ..logging_config import get_logger

logger = get_logger(__name__)

Subset = tuple[Hashable, ...]


@dataclass(frozen=True, slots=True, kw_only=True)
class OrbitInstance:
    """Finite instance whose variables are the k-subsets of the source variables.

    Attributes:
        finite: The finite instance over ``labels[k]``.
        source: Instance it was built from.
        k: Subset size.
        back_refs: Index of the source constraint of each finite constraint.
    """

    finite: FiniteInstance
    source: Instance
    k: int
    back_refs: tuple[int, ...]

    def summary(self) -> dict[str, int]:
        return {
            "k": self.k,
            "variables": len(self.finite.variables),
            "alphabet": len(self.finite.alphabet),
            "constraints": len(self.finite.constraints),
            "tuples": sum(len(c.tuples) for c in self.finite.constraints),
        }


def build_orbit_instance(
    instance: Instance,
    k: int | None = None,
    *,
    prune_redundant_tops: bool = True,
) -> OrbitInstance:
    """Build the orbit instance of a normalized instance.

    Each constraint on U becomes a constraint on the k-subsets of U whose
    tuples are the restrictions of its allowed patterns to those subsets.

    Args:
        instance: Source instance.
        k: Subset size, at most the atlas k; defaults to the atlas k.
        prune_redundant_tops: Skip lazy tops on more than max(k+1, ell)
            variables; solutions stay liftable without them.

    Raises:
        InstanceError: If k is out of range or a non-trivial source yields
            an empty finite constraint.
    """
    atlas = instance.atlas
    k = atlas.k if k is None else k
    if not 1 <= k <= atlas.k:
        raise InstanceError(f"orbit instances need 1 <= k <= {atlas.k} (got {k})")
    if not instance.normalized or instance.applications:
        instance = normalize(instance)
    prune_above = max(k + 1, atlas.ell)

    variables = tuple(
        tuple(instance.variables[i] for i in combo)
        for combo in combinations_of(len(instance.variables), k)
    )
    constraints: list[FiniteConstraint] = []
    back_refs: list[int] = []
    shared: dict[int, frozenset[tuple[str, ...]]] = {}
    for index, constraint in enumerate(instance.constraints):
        size = len(constraint.scope)
        if constraint.is_top and prune_redundant_tops and size > prune_above:
            continue
        combos = combinations_of(size, k)
        scope = tuple(tuple(constraint.scope[i] for i in combo) for combo in combos)
        if constraint.is_top and size in shared:
            tuples = shared[size]
        else:
            typings = constraint.typings(atlas)
            if k == atlas.k and size >= k:
                tuples = frozenset(typings)
            else:
                tuples = frozenset(
                    tuple(atlas.label_of(t, size, combo) for combo in combos) for t in typings
                )
            if constraint.is_top:
                shared[size] = tuples
        constraints.append(FiniteConstraint(scope, tuples, constraint.origin))
        back_refs.append(index)

    finite = FiniteInstance(
        variables=variables,
        alphabet=atlas.labels[k],
        constraints=tuple(constraints),
        name=f"orbit[{atlas.name}, k={k}]",
    )
    if not is_trivial(instance) and any(not c.tuples for c in finite.constraints):
        raise InstanceError("non-trivial instance produced an empty orbit constraint")
    orbit = OrbitInstance(finite=finite, source=instance, k=k, back_refs=tuple(back_refs))
    logger.debug("Orbit instance: %s", orbit.summary())
    return orbit


def check_minimality_transfer(
    instance: Instance, a: int, b: int, k: int | None = None
) -> MinimalityCheck:
    """Check that an (a*k, b*k)-minimal instance has an (a, b)-minimal orbit instance.

    Raises:
        InstanceError: If the instance is not stamped minimal at (a*k, b*k).
    """
    k = instance.atlas.k if k is None else k
    stamp = instance.minimality_level
    if stamp is None or stamp[0] < a * k or stamp[1] < b * k:
        raise InstanceError(
            f"minimality transfer needs an instance stamped ({a * k},{b * k})-minimal "
            f"(got {stamp})"
        )
    orbit = build_orbit_instance(instance, k, prune_redundant_tops=False)
    check = is_minimal(orbit.finite, a, b)
    if not check:
        logger.error("Minimality transfer failed: %s", check.reason)
    return check

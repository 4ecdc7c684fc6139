"""
Instances over pattern atlases and finite instances over label alphabets.

An :class:`Instance` holds relation applications as written by the user and
pattern-set constraints; :func:`normalize` turns the former into the latter.
A constraint whose allowed set is ``None`` is a lazy top: it allows every
realizable pattern on its scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Hashable, Iterable, Sequence

from ..atlas.core import (
    Pattern,
    PatternAtlas,
    RelationDef,
    Typing,
    canonical_points,
    coherence_problem,
    combinations_of,
    point_key,
    violation,
)
from ..logging_config import get_logger

logger = get_logger(__name__)

Point = Hashable
TOP_ORIGIN = "top"


class InstanceError(Exception):
    """Raised for undeclared variables, unknown relations or arity mismatches."""

    pass


# ============================================================================
# Pattern-Set Instances
# ============================================================================


@dataclass(frozen=True, slots=True)
class Application:
    """A relation symbol applied to variables, e.g. ``EQ(x, y)``."""

    relation: str
    args: tuple[Point, ...]


@dataclass(frozen=True, slots=True)
class Constraint:
    """A scope with its allowed patterns.

    Attributes:
        scope: Variables in canonical order.
        allowed: Allowed typings over the scope, or None for a lazy top.
        origin: Relation name(s) the constraint came from, or ``top``.
    """

    scope: tuple[Point, ...]
    allowed: frozenset[Typing] | None
    origin: str = TOP_ORIGIN

    @property
    def is_top(self) -> bool:
        return self.allowed is None

    def typings(self, atlas: PatternAtlas) -> frozenset[Typing]:
        """Allowed typings, expanding a lazy top."""
        if self.allowed is None:
            return atlas.all_typings(len(self.scope))
        return self.allowed

    def sorted_typings(self, atlas: PatternAtlas) -> list[Typing]:
        return sorted(self.typings(atlas))

    def patterns(self, atlas: PatternAtlas) -> list[Pattern]:
        return [Pattern(self.scope, t) for t in self.sorted_typings(atlas)]

    def describe(self) -> str:
        size = "top" if self.allowed is None else f"{len(self.allowed)} patterns"
        return f"{self.origin}{list(self.scope)} ({size})"


def scope_key(scope: Sequence[Point]) -> tuple[int, tuple[tuple[int, Any], ...]]:
    return (len(scope), tuple(point_key(p) for p in scope))


@dataclass(frozen=True, slots=True, kw_only=True)
class Instance:
    """A CSP instance over a pattern atlas.

    Attributes:
        atlas: Template presentation.
        variables: Variables in canonical order.
        constraints: Pattern-set constraints.
        applications: Relation applications not yet normalized.
        minimality_level: Strongest (k', ell') minimality established.
        normalized: Whether :func:`normalize` produced this instance.
    """

    atlas: PatternAtlas
    variables: tuple[Point, ...]
    constraints: tuple[Constraint, ...] = ()
    applications: tuple[Application, ...] = ()
    minimality_level: tuple[int, int] | None = None
    normalized: bool = False

    @classmethod
    def from_applications(
        cls,
        atlas: PatternAtlas,
        variables: Iterable[Point],
        applications: Iterable[tuple[str, Sequence[Point]] | Application],
    ) -> "Instance":
        """Build an un-normalized instance from ``(relation, args)`` pairs."""
        apps = tuple(
            a if isinstance(a, Application) else Application(a[0], tuple(a[1]))
            for a in applications
        )
        return cls(atlas=atlas, variables=canonical_points(variables), applications=apps)

    def explicit_constraints(self) -> tuple[Constraint, ...]:
        return tuple(c for c in self.constraints if not c.is_top)

    def summary(self) -> dict[str, Any]:
        return {
            "atlas": self.atlas.name,
            "variables": len(self.variables),
            "constraints": len(self.constraints),
            "explicit": len(self.explicit_constraints()),
            "applications": len(self.applications),
            "minimality_level": self.minimality_level,
            "trivial": is_trivial(self),
        }


# ============================================================================
# Normalization
# ============================================================================


@lru_cache(maxsize=4096)
def _pullback(
    atlas: PatternAtlas, relation: RelationDef, positions: tuple[int, ...], n: int
) -> frozenset[Typing]:
    """Typings of n points satisfying a relation applied at the given positions."""
    firsts: list[int] = []
    for slot, block in enumerate(relation.partition):
        if block == len(firsts):
            firsts.append(positions[slot])
    k = atlas.k
    blocks = len(firsts)

    kept = set()
    for typing in atlas.all_typings(n):
        together = True
        for slot, block in enumerate(relation.partition):
            p, q = positions[slot], firsts[block]
            if p == q:
                continue
            if k < 2 or not atlas.is_diagonal(atlas.label_of(typing, n, (min(p, q), max(p, q)))):
                together = False
                break
        if not together:
            continue
        if blocks >= k:
            block_typing = tuple(
                atlas.label_of(typing, n, tuple(firsts[i] for i in combo))
                for combo in combinations_of(blocks, k)
            )
        else:
            block_typing = (atlas.label_of(typing, n, tuple(firsts)),)
        if block_typing in relation.allowed:
            kept.add(typing)
    return frozenset(kept)


def apply_relation(
    atlas: PatternAtlas, application: Application, declared: set[Point]
) -> Constraint:
    """Pattern-set constraint of one relation application.

    Raises:
        InstanceError: For unknown relations, arity mismatches or undeclared
            variables.
    """
    relation = atlas.relations.get(application.relation)
    if relation is None:
        raise InstanceError(
            f"Unknown relation {application.relation!r} for atlas {atlas.name} "
            f"(known: {', '.join(sorted(atlas.relations))})"
        )
    if len(application.args) != relation.arity:
        raise InstanceError(
            f"{relation.name} has arity {relation.arity}, applied to "
            f"{len(application.args)} arguments"
        )
    undeclared = [a for a in application.args if a not in declared]
    if undeclared:
        raise InstanceError(f"{relation.name}{application.args}: undeclared variables {undeclared}")
    scope = canonical_points(application.args)
    positions = tuple(scope.index(a) for a in application.args)
    allowed = _pullback(atlas, relation, positions, len(scope))
    return Constraint(scope, allowed, relation.name)


def _merge(first: Constraint, second: Constraint) -> Constraint:
    if first.allowed is None:
        allowed = second.allowed
    elif second.allowed is None:
        allowed = first.allowed
    else:
        allowed = first.allowed & second.allowed
    origins = sorted(set(first.origin.split("&")) | set(second.origin.split("&")))
    if len(origins) > 1 and TOP_ORIGIN in origins:
        origins.remove(TOP_ORIGIN)
    return Constraint(first.scope, allowed, "&".join(origins))


def normalize(instance: Instance, merge_duplicates: bool = True) -> Instance:
    """Convert applications to constraints and clean explicit constraints.

    Args:
        instance: Instance to normalize.
        merge_duplicates: Intersect constraints sharing a scope. With False,
            constraints on one scope stay separate, which keeps instances
            whose inconsistency only shows on the whole scope.

    Returns:
        Normalized instance with canonical scopes and sorted constraints.

    Raises:
        InstanceError: If a scope mentions an undeclared variable.
    """
    if instance.normalized and not instance.applications:
        return instance
    atlas = instance.atlas
    variables = canonical_points(instance.variables)
    if len(variables) != len(instance.variables):
        raise InstanceError("variables are not distinct")
    declared = set(variables)

    constraints: list[Constraint] = [
        apply_relation(atlas, app, declared) for app in instance.applications
    ]

    dropped = 0
    for constraint in instance.constraints:
        scope = canonical_points(constraint.scope)
        if len(scope) != len(constraint.scope):
            raise InstanceError(f"scope {list(constraint.scope)} repeats a variable")
        undeclared = [v for v in scope if v not in declared]
        if undeclared:
            raise InstanceError(
                f"scope {list(constraint.scope)} has undeclared variables {undeclared}"
            )
        if constraint.allowed is None:
            constraints.append(Constraint(scope, None, constraint.origin))
            continue
        n = len(scope)
        kept = frozenset(
            t
            for t in constraint.allowed
            if coherence_problem(atlas, t, n) is None and violation(atlas, t, n) is None
        )
        dropped += len(constraint.allowed) - len(kept)
        constraints.append(Constraint(scope, kept, constraint.origin))
    if dropped:
        logger.warning("Dropped %d unrealizable patterns while normalizing", dropped)

    if merge_duplicates:
        merged: dict[tuple[Point, ...], Constraint] = {}
        for constraint in constraints:
            previous = merged.get(constraint.scope)
            merged[constraint.scope] = (
                constraint if previous is None else _merge(previous, constraint)
            )
        constraints = list(merged.values())

    constraints.sort(key=lambda c: (scope_key(c.scope), c.origin))
    result = Instance(
        atlas=atlas,
        variables=variables,
        constraints=tuple(constraints),
        normalized=True,
    )
    logger.debug(
        "Normalized instance: %d variables, %d constraints", len(variables), len(constraints)
    )
    return result


def is_trivial(instance: Instance) -> bool:
    """Whether some constraint allows nothing."""
    return any(c.allowed is not None and not c.allowed for c in instance.constraints)


# ============================================================================
# Finite Instances
# ============================================================================


@dataclass(frozen=True, slots=True)
class FiniteConstraint:
    """Explicit tuples over a scope of distinct finite variables."""

    scope: tuple[Hashable, ...]
    tuples: frozenset[tuple[Hashable, ...]]
    origin: str = ""


@dataclass(frozen=True, slots=True, kw_only=True)
class FiniteInstance:
    """A CSP instance with an explicit finite alphabet.

    Attributes:
        variables: Variables in a fixed order.
        alphabet: Values, in the order the search tries them.
        constraints: Explicit constraints.
        name: Display name.
    """

    variables: tuple[Hashable, ...]
    alphabet: tuple[Hashable, ...]
    constraints: tuple[FiniteConstraint, ...] = ()
    name: str = ""
    _index: dict[Hashable, int] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.alphabet:
            raise InstanceError("finite instance needs a nonempty alphabet")
        index = {v: i for i, v in enumerate(self.variables)}
        if len(index) != len(self.variables):
            raise InstanceError("finite instance variables are not distinct")
        object.__setattr__(self, "_index", index)
        values = set(self.alphabet)
        for constraint in self.constraints:
            if len(set(constraint.scope)) != len(constraint.scope):
                raise InstanceError(f"scope {constraint.scope} repeats a variable")
            for v in constraint.scope:
                if v not in index:
                    raise InstanceError(f"scope variable {v!r} is not declared")
            for t in constraint.tuples:
                if len(t) != len(constraint.scope) or not values.issuperset(t):
                    raise InstanceError(
                        f"tuple {t} does not fit scope {constraint.scope} over the alphabet"
                    )

    def position(self, variable: Hashable) -> int:
        return self._index[variable]

    def is_satisfied_by(self, assignment: dict[Hashable, Hashable]) -> bool:
        return all(
            tuple(assignment[v] for v in c.scope) in c.tuples for c in self.constraints
        )

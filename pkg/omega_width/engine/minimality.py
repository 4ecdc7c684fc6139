"""
(k', ell')-minimality: establishing it by propagation and checking it literally.

Propagation keeps one shared domain Dom(K) per variable set K of at most k'
variables. A constraint is filtered so the restriction of each allowed
pattern to K stays inside Dom(K), and Dom(K) shrinks to the projection of
every constraint containing K, until nothing changes. At the fixpoint every
constraint containing K projects exactly onto Dom(K).

Top constraints stay lazy until propagation first touches them. While a
constraint is a lazy top its projection onto K is taken to be every
realizable pattern on K; this relies on realizable patterns extending by
duplicated points, which holds for every atlas the registry builds.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Sequence

from ..atlas.core import PatternAtlas, Typing, combinations_of, enumerate_typings
from ..logging_config import get_logger
from .instance import (
    TOP_ORIGIN,
    Constraint,
    FiniteInstance,
    Instance,
    normalize,
    scope_key,
)

logger = get_logger(__name__)


class CapabilityError(Exception):
    """Raised when minimality parameters exceed what the engine supports."""

    pass


def check_levels(atlas: PatternAtlas, k2: int, l2: int, unsafe: bool = False) -> None:
    """Validate (k', ell') against the engine capability bound.

    Raises:
        CapabilityError: If k' < 1, k' > ell', or ell' exceeds max(3k, ell)
            without the unsafe override.
    """
    if k2 < 1 or k2 > l2:
        raise CapabilityError(f"minimality levels must satisfy 1 <= k' <= ell' (got {k2}, {l2})")
    bound = atlas.capability_bound
    if l2 > bound and not unsafe:
        raise CapabilityError(
            f"ell'={l2} exceeds the capability bound {bound} of {atlas.name}; "
            "pass unsafe to override"
        )


# ============================================================================
# Propagation
# ============================================================================


@dataclass(slots=True)
class _Entry:
    """Working copy of one constraint during propagation."""

    scope: tuple[int, ...]
    allowed: set[Typing] | None
    origin: str
    subsets: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    dirty: bool = True


@dataclass(slots=True)
class PropagationStats:
    """Counters collected while establishing minimality."""

    processed: int = 0
    materialized: int = 0
    removed: int = 0
    domain_updates: int = 0
    trivial: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "processed": self.processed,
            "materialized": self.materialized,
            "removed": self.removed,
            "domain_updates": self.domain_updates,
            "trivial": self.trivial,
        }


def _local_subsets(size: int, k2: int) -> tuple[tuple[int, ...], ...]:
    return tuple(
        local for j in range(1, min(k2, size) + 1) for local in combinations_of(size, j)
    )


class _Propagator:
    def __init__(
        self,
        instance: Instance,
        k2: int,
        l2: int,
        pattern_cap: int | None,
        stats: PropagationStats,
    ) -> None:
        self.atlas = instance.atlas
        self.k2 = k2
        self.pattern_cap = pattern_cap
        self.stats = stats
        self.variables = instance.variables
        index = {v: i for i, v in enumerate(self.variables)}

        self.entries: list[_Entry] = []
        self.containing: dict[tuple[int, ...], list[int]] = {}
        self.domains: dict[tuple[int, ...], frozenset[Typing]] = {}
        self._projectors: dict[tuple[int, tuple[int, ...]], Callable[[Typing], Typing]] = {}

        scopes: set[tuple[int, ...]] = set()
        for constraint in instance.constraints:
            scope = tuple(index[v] for v in constraint.scope)
            scopes.add(scope)
            allowed = None if constraint.allowed is None else set(constraint.allowed)
            self._add(scope, allowed, constraint.origin)

        for size in range(1, min(l2, len(self.variables)) + 1):
            for scope in itertools.combinations(range(len(self.variables)), size):
                if scope not in scopes:
                    self._add(scope, None, TOP_ORIGIN)

        self.queue: list[tuple[int, int, int]] = []
        self.queued: set[int] = set()
        self.counter = itertools.count()
        for eid, entry in enumerate(self.entries):
            if entry.allowed is not None:
                self.push(eid)

    def _add(self, scope: tuple[int, ...], allowed: set[Typing] | None, origin: str) -> None:
        eid = len(self.entries)
        subsets = tuple(
            (tuple(scope[i] for i in local), local)
            for local in _local_subsets(len(scope), self.k2)
        )
        self.entries.append(_Entry(scope, allowed, origin, subsets))
        for key, _ in subsets:
            self.containing.setdefault(key, []).append(eid)

    def push(self, eid: int) -> None:
        if eid in self.queued:
            return
        self.queued.add(eid)
        heapq.heappush(self.queue, (len(self.entries[eid].scope), next(self.counter), eid))

    def projector(self, size: int, local: tuple[int, ...]) -> Callable[[Typing], Typing]:
        key = (size, local)
        found = self._projectors.get(key)
        if found is None:
            indices = self.atlas.restriction_indices(size, local)
            if indices is None:
                atlas = self.atlas

                def found(t: Typing) -> Typing:
                    return (atlas.label_of(t, size, local),)

            else:

                def found(t: Typing) -> Typing:
                    return tuple(t[i] for i in indices)  # type: ignore[union-attr]

            self._projectors[key] = found
        return found

    def domain(self, key: tuple[int, ...]) -> frozenset[Typing]:
        found = self.domains.get(key)
        return found if found is not None else self.atlas.all_typings(len(key))

    def _materialize(self, entry: _Entry) -> set[Typing]:
        domains = {
            local: self.domains[key] for key, local in entry.subsets if key in self.domains
        }
        size = len(entry.scope)
        allowed: set[Typing] = set()
        for typing in enumerate_typings(self.atlas, size, domains):
            allowed.add(typing)
            if self.pattern_cap is not None and len(allowed) > self.pattern_cap:
                raise CapabilityError(
                    f"constraint on {size} variables exceeds the pattern cap {self.pattern_cap}"
                )
        self.stats.materialized += 1
        return allowed

    def _filter(self, entry: _Entry) -> bool:
        """Drop patterns leaving a shrunk domain; True when something went."""
        assert entry.allowed is not None
        checks = [
            (self.projector(len(entry.scope), local), self.domains[key])
            for key, local in entry.subsets
            if key in self.domains
        ]
        if not checks:
            return False
        kept = {t for t in entry.allowed if all(p(t) in dom for p, dom in checks)}
        removed = len(entry.allowed) - len(kept)
        if removed:
            entry.allowed = kept
            self.stats.removed += removed
        return removed > 0

    def run(self) -> bool:
        """Propagate to the fixpoint; False when a constraint became empty."""
        while self.queue:
            _, _, eid = heapq.heappop(self.queue)
            self.queued.discard(eid)
            entry = self.entries[eid]
            self.stats.processed += 1

            if entry.allowed is None:
                entry.allowed = self._materialize(entry)
                entry.dirty = True
            elif self._filter(entry):
                entry.dirty = True
            if not entry.allowed:
                return False
            if not entry.dirty:
                continue
            entry.dirty = False

            size = len(entry.scope)
            for key, local in entry.subsets:
                project = self.projector(size, local)
                projection = {project(t) for t in entry.allowed}
                current = self.domain(key)
                if projection.issuperset(current):
                    continue
                shrunk = current.intersection(projection)
                self.domains[key] = shrunk
                self.stats.domain_updates += 1
                if not shrunk:
                    return False
                for other in self.containing[key]:
                    if other != eid:
                        self.push(other)
                if len(shrunk) != len(projection):
                    self.push(eid)
        return True

    def constraints(self, trivial: bool) -> tuple[Constraint, ...]:
        result = []
        for entry in self.entries:
            scope = tuple(self.variables[i] for i in entry.scope)
            if trivial:
                allowed: frozenset[Typing] | None = frozenset()
            else:
                allowed = None if entry.allowed is None else frozenset(entry.allowed)
            result.append(Constraint(scope, allowed, entry.origin))
        result.sort(key=lambda c: (scope_key(c.scope), c.origin))
        return tuple(result)


def establish_minimality(
    instance: Instance,
    k2: int,
    l2: int,
    *,
    unsafe: bool = False,
    pattern_cap: int | None = None,
    stats: PropagationStats | None = None,
) -> Instance:
    """Return the equivalent (k', ell')-minimal instance.

    Args:
        instance: Source instance; normalized first when needed.
        k2: Projection level k'.
        l2: Scope level ell'.
        unsafe: Allow ell' beyond the capability bound.
        pattern_cap: Largest allowed set a lazy top may materialize into.
        stats: Optional counters to fill in.

    Returns:
        Instance with a constraint on every set of at most ell' variables,
        stamped with ``minimality_level = (k', ell')``. When propagation
        empties a constraint every constraint of the result is empty.

    Raises:
        CapabilityError: If the levels are out of range or a cap is hit.
    """
    if not instance.normalized or instance.applications:
        instance = normalize(instance)
    check_levels(instance.atlas, k2, l2, unsafe)
    stats = stats if stats is not None else PropagationStats()

    propagator = _Propagator(instance, k2, l2, pattern_cap, stats)
    consistent = propagator.run()
    stats.trivial = not consistent
    constraints = propagator.constraints(trivial=not consistent)

    logger.info(
        "(%d,%d)-minimality on %s: %d variables, %d constraints, %s",
        k2,
        l2,
        instance.atlas.name,
        len(instance.variables),
        len(constraints),
        "trivial" if not consistent else "non-trivial",
    )
    logger.debug("Propagation counters: %s", stats.to_dict())
    return Instance(
        atlas=instance.atlas,
        variables=instance.variables,
        constraints=constraints,
        minimality_level=(k2, l2),
        normalized=True,
    )


# ============================================================================
# Checking
# ============================================================================


@dataclass(slots=True, kw_only=True)
class MinimalityCheck:
    """Verdict of a literal minimality check.

    Attributes:
        minimal: Whether both minimality conditions hold.
        levels: The (k', ell') checked.
        uncovered: A set of at most ell' variables inside no scope.
        subset: A set of at most k' variables with disagreeing projections.
        pair: Descriptions of the two disagreeing constraints.
    """

    minimal: bool
    levels: tuple[int, int]
    uncovered: tuple[Hashable, ...] | None = None
    subset: tuple[Hashable, ...] | None = None
    pair: tuple[str, str] | None = None

    def __bool__(self) -> bool:
        return self.minimal

    @property
    def reason(self) -> str:
        if self.minimal:
            return "minimal"
        if self.uncovered is not None:
            return f"variables {list(self.uncovered)} lie in no constraint scope"
        return (
            f"projections onto {list(self.subset or ())} differ between "
            f"{self.pair[0]} and {self.pair[1]}"  # type: ignore[index]
        )

    def log_summary(self) -> None:
        k2, l2 = self.levels
        if self.minimal:
            logger.info("Instance is (%d,%d)-minimal", k2, l2)
        else:
            logger.info("Instance is not (%d,%d)-minimal: %s", k2, l2, self.reason)

    def to_dict(self) -> dict[str, Any]:
        return {
            "minimal": self.minimal,
            "levels": list(self.levels),
            "uncovered": list(self.uncovered) if self.uncovered is not None else None,
            "subset": list(self.subset) if self.subset is not None else None,
            "pair": list(self.pair) if self.pair is not None else None,
        }


@dataclass(slots=True)
class _View:
    """Uniform access to the scopes and projections of either instance kind."""

    variables: tuple[Hashable, ...]
    scopes: list[tuple[int, ...]]
    names: list[str]
    project: Callable[[int, tuple[int, ...]], frozenset[Any]]
    cache: dict[tuple[int, tuple[int, ...]], frozenset[Any]] = field(default_factory=dict)

    def projection(self, cid: int, key: tuple[int, ...]) -> frozenset[Any]:
        found = self.cache.get((cid, key))
        if found is None:
            found = self.project(cid, key)
            self.cache[(cid, key)] = found
        return found


def _instance_view(instance: Instance) -> _View:
    atlas = instance.atlas
    index = {v: i for i, v in enumerate(instance.variables)}
    scopes = [tuple(index[v] for v in c.scope) for c in instance.constraints]

    def project(cid: int, key: tuple[int, ...]) -> frozenset[Any]:
        constraint = instance.constraints[cid]
        if constraint.allowed is None:
            return atlas.all_typings(len(key))
        scope = scopes[cid]
        local = tuple(scope.index(i) for i in key)
        size = len(scope)
        return frozenset(atlas.restrict_typing(t, size, local) for t in constraint.allowed)

    names = [c.describe() for c in instance.constraints]
    return _View(instance.variables, scopes, names, project)


def _finite_view(fi: FiniteInstance) -> _View:
    scopes = [tuple(fi.position(v) for v in c.scope) for c in fi.constraints]

    def project(cid: int, key: tuple[int, ...]) -> frozenset[Any]:
        positions = tuple(scopes[cid].index(i) for i in key)
        return frozenset(tuple(t[p] for p in positions) for t in fi.constraints[cid].tuples)

    names = [
        f"{c.origin or 'constraint'}{list(c.scope)} ({len(c.tuples)} tuples)"
        for c in fi.constraints
    ]
    return _View(fi.variables, scopes, names, project)


def is_minimal(
    instance: Instance | FiniteInstance, k2: int, l2: int
) -> MinimalityCheck:
    """Check (k', ell')-minimality literally.

    Every set of at most ell' variables must lie inside some constraint
    scope, and all constraints containing a set K of at most k' variables
    must have the same projection onto K.

    Returns:
        A :class:`MinimalityCheck` naming the first violation found.
    """
    if isinstance(instance, FiniteInstance):
        view = _finite_view(instance)
    else:
        view = _instance_view(instance)
    n = len(view.variables)
    by_variable: list[list[int]] = [[] for _ in range(n)]
    scope_sets = [frozenset(s) for s in view.scopes]
    for cid, scope in enumerate(view.scopes):
        for i in scope:
            by_variable[i].append(cid)

    def named(key: Sequence[int]) -> tuple[Hashable, ...]:
        return tuple(view.variables[i] for i in key)

    for size in range(1, min(l2, n) + 1):
        for subset in itertools.combinations(range(n), size):
            if not any(scope_sets[cid].issuperset(subset) for cid in by_variable[subset[0]]):
                return MinimalityCheck(minimal=False, levels=(k2, l2), uncovered=named(subset))

    for size in range(1, min(k2, n) + 1):
        for key in itertools.combinations(range(n), size):
            incident = [cid for cid in by_variable[key[0]] if scope_sets[cid].issuperset(key)]
            if len(incident) < 2:
                continue
            first = view.projection(incident[0], key)
            for cid in incident[1:]:
                if view.projection(cid, key) != first:
                    return MinimalityCheck(
                        minimal=False,
                        levels=(k2, l2),
                        subset=named(key),
                        pair=(view.names[incident[0]], view.names[cid]),
                    )
    return MinimalityCheck(minimal=True, levels=(k2, l2))

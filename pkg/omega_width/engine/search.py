"""
Backtracking search for finite instances.

Generalized arc consistency runs after every assignment; variables are chosen
by smallest remaining domain with ties broken by declaration order, and values
are tried in alphabet order, so results are deterministic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Any, Hashable, Iterable

from ..logging_config import get_logger
from .instance import FiniteInstance

logger = get_logger(__name__)


class SearchError(Exception):
    """Raised when a search or closure exceeds its state-space cap."""

    pass


@dataclass(slots=True)
class SearchStats:
    """Counters of one search run."""

    nodes: int = 0
    revisions: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {"nodes": self.nodes, "revisions": self.revisions}


Domains = list[frozenset[Hashable]]


def search_solution(
    fi: FiniteInstance,
    *,
    node_cap: int | None = None,
    stats: SearchStats | None = None,
) -> dict[Hashable, Hashable] | None:
    """Find a satisfying assignment of a finite instance.

    Args:
        fi: Instance to solve.
        node_cap: Largest number of search nodes before giving up.
        stats: Optional counters to fill in.

    Returns:
        A total assignment, or None when none exists.

    Raises:
        SearchError: If the node cap is exceeded.
    """
    stats = stats if stats is not None else SearchStats()
    n = len(fi.variables)
    rank = {value: i for i, value in enumerate(fi.alphabet)}
    constraints = [
        (tuple(fi.position(v) for v in c.scope), tuple(c.tuples)) for c in fi.constraints
    ]
    watch: list[list[int]] = [[] for _ in range(n)]
    for cid, (scope, _) in enumerate(constraints):
        for v in scope:
            watch[v].append(cid)

    def revise(domains: Domains, initial: Iterable[int]) -> bool:
        queue = deque(initial)
        queued = set(queue)
        while queue:
            cid = queue.popleft()
            queued.discard(cid)
            stats.revisions += 1
            scope, tuples = constraints[cid]
            if not scope:
                if not tuples:
                    return False
                continue
            supported: list[set[Hashable]] = [set() for _ in scope]
            for t in tuples:
                if all(t[i] in domains[v] for i, v in enumerate(scope)):
                    for i, value in enumerate(t):
                        supported[i].add(value)
            for i, v in enumerate(scope):
                current = domains[v]
                if len(supported[i]) == len(current):
                    continue
                if not supported[i]:
                    return False
                domains[v] = frozenset(supported[i])
                for other in watch[v]:
                    if other != cid and other not in queued:
                        queue.append(other)
                        queued.add(other)
        return True

    def choose(domains: Domains) -> int | None:
        best = None
        for v in range(n):
            size = len(domains[v])
            if size > 1 and (best is None or size < len(domains[best])):
                best = v
        return best

    root: Domains = [frozenset(fi.alphabet)] * n
    if not revise(root, range(len(constraints))):
        logger.debug("%s: inconsistent before search", fi.name or "finite instance")
        return None

    stack: list[list[Any]] = []
    current: Domains | None = root
    while True:
        assert current is not None
        var = choose(current)
        if var is None:
            break
        values = sorted(current[var], key=rank.__getitem__)
        stack.append([current, var, values, 0])
        current = None
        while stack:
            frame = stack[-1]
            base, var, values, i = frame
            if i >= len(values):
                stack.pop()
                continue
            frame[3] = i + 1
            stats.nodes += 1
            if node_cap is not None and stats.nodes > node_cap:
                raise SearchError(f"search exceeded {node_cap} nodes")
            trial = list(base)
            trial[var] = frozenset((values[i],))
            if revise(trial, watch[var]):
                current = trial
                break
        if current is None:
            logger.debug(
                "%s: no solution after %d nodes", fi.name or "finite instance", stats.nodes
            )
            return None

    assignment = {fi.variables[v]: next(iter(current[v])) for v in range(n)}
    if not fi.is_satisfied_by(assignment):
        raise SearchError("propagation accepted an assignment violating a constraint")
    logger.debug("%s: solved with %d nodes", fi.name or "finite instance", stats.nodes)
    return assignment

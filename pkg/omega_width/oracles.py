"""
Independent brute-force oracles used by tests and the acceptance runs.

None of these go through minimization or orbit instances; they decide small
inputs directly from the concrete meaning of the relations.
"""

from __future__ import annotations

import itertools
from typing import Hashable, Iterable, Iterator, Sequence

import networkx as nx
from networkx.utils import UnionFind

from .algebra.structures import FiniteStructure
from .atlas.core import Typing, enumerate_typings
from .engine.instance import Application, Instance, normalize
from .logging_config import get_logger
from .mmsnp.obstructions import ObstructionSet, obstruction_embedding, structure_from_atoms

logger = get_logger(__name__)

Point = Hashable
Pair = tuple[Point, Point]


def _pairs(args: Sequence[Point]) -> Iterator[Pair]:
    return itertools.combinations(args, 2)


# ============================================================================
# Equality
# ============================================================================


def equality_oracle(variables: Iterable[Point], applications: Iterable[Application]) -> bool:
    """Decide an =/≠ instance by union-find.

    ``EQ``/``EQ3`` merge their arguments; ``NEQ``/``NEQ3`` require all
    arguments pairwise apart.
    """
    classes = UnionFind(list(variables))
    apart: list[Pair] = []
    for app in applications:
        if app.relation in ("EQ", "EQ3"):
            classes.union(*app.args)
        elif app.relation in ("NEQ", "NEQ3"):
            apart.extend(_pairs(app.args))
        else:
            raise ValueError(f"equality oracle does not know relation {app.relation}")
    return all(classes[a] != classes[b] for a, b in apart)


# ============================================================================
# Graphs
# ============================================================================


def has_clique(graph: nx.Graph, size: int) -> bool:
    return any(len(c) >= size for c in nx.find_cliques(graph))


def set_partitions(items: Sequence[Point]) -> Iterator[list[list[Point]]]:
    """Every partition of the items into blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        yield [[first]] + partition
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1 :]


def graph_oracle(
    variables: Sequence[Point],
    applications: Iterable[Application],
    clique: int | None = None,
    max_points: int = 8,
) -> dict[Point, int] | None:
    """Find a graph witness on at most ``max_points`` points by exhaustive search.

    Every identification of the variables is tried. Pairs no constraint
    mentions are left as non-edges, which never creates a clique.

    Args:
        variables: Instance variables.
        applications: ``E``, ``N``, ``EQ`` and ``NEQ`` applications.
        clique: Size of the forbidden clique, or None for the random graph.
        max_points: Largest witness considered.

    Returns:
        Point of every variable, or None when no witness exists.
    """
    same: list[Pair] = []
    apart: list[Pair] = []
    edges: list[Pair] = []
    non_edges: list[Pair] = []
    for app in applications:
        a, b = app.args
        if app.relation == "EQ":
            same.append((a, b))
        elif app.relation == "NEQ":
            apart.append((a, b))
        elif app.relation == "E":
            edges.append((a, b))
        elif app.relation == "N":
            non_edges.append((a, b))
        else:
            raise ValueError(f"graph oracle does not know relation {app.relation}")

    for partition in set_partitions(list(variables)):
        if len(partition) > max_points:
            continue
        point = {v: i for i, block in enumerate(partition) for v in block}
        if any(point[a] != point[b] for a, b in same):
            continue
        if any(point[a] == point[b] for a, b in apart + edges + non_edges):
            continue
        forced = {frozenset((point[a], point[b])) for a, b in edges}
        if forced & {frozenset((point[a], point[b])) for a, b in non_edges}:
            continue
        graph = nx.Graph()
        graph.add_nodes_from(range(len(partition)))
        graph.add_edges_from(tuple(e) for e in forced)
        if clique is not None and has_clique(graph, clique):
            continue
        return point
    return None


# ============================================================================
# Generic exhaustive search
# ============================================================================


def brute_force_solutions(instance: Instance) -> Iterator[Typing]:
    """Every realizable typing of the variables satisfying all constraints.

    Intended for a handful of variables; the count grows quickly.
    """
    atlas = instance.atlas
    normalized = normalize(instance)
    variables = normalized.variables
    n = len(variables)
    if n == 0:
        yield ()
        return
    position = {v: i for i, v in enumerate(variables)}
    checks = [
        (tuple(position[v] for v in c.scope), c.allowed)
        for c in normalized.explicit_constraints()
    ]
    for typing in enumerate_typings(atlas, n):
        if all(
            atlas.restrict_typing(typing, n, subset) in allowed  # type: ignore[operator]
            for subset, allowed in checks
        ):
            yield typing


def brute_force_satisfiable(instance: Instance) -> bool:
    return next(brute_force_solutions(instance), None) is not None


# ============================================================================
# Forbidden-pattern problems
# ============================================================================


def fpp_brute_force(
    obstructions: ObstructionSet, structure: FiniteStructure
) -> dict[Point, str] | None:
    """First obstruction-free coloring of the input in enumeration order, or None."""
    atoms = [
        (symbol, args)
        for symbol in structure.relation_names()
        for args in sorted(structure.relations[symbol], key=repr)
    ]
    for colors in itertools.product(obstructions.colors, repeat=structure.size):
        coloring = dict(zip(structure.domain, colors))
        colored = structure_from_atoms(structure.domain, atoms, coloring)
        if obstruction_embedding(obstructions.members, colored) is None:
            return coloring
    return None

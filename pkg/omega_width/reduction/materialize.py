"""
Concrete values for witnesses of builtin template families.
"""

from __future__ import annotations

import itertools
from typing import Any

import networkx as nx

from ..atlas.builtins import label_color
from ..atlas.core import PatternAtlas
from ..logging_config import get_logger
from .lifting import Witness

logger = get_logger(__name__)

GRAPH_FAMILIES = ("henson", "random-graph", "random-graph-fourary")


def witness_graph(witness: Witness, atlas: PatternAtlas, edge: str = "E") -> nx.Graph:
    """Graph on the witness classes with the pairs labeled ``edge``."""
    graph = nx.Graph()
    graph.add_nodes_from(range(witness.size))
    for a, b in itertools.combinations(range(witness.size), 2):
        if atlas.label_of(witness.structure.typing, witness.size, (a, b)) == edge:
            graph.add_edge(a, b)
    return graph


def clique_number(graph: nx.Graph) -> int:
    return max((len(c) for c in nx.find_cliques(graph)), default=0)


def _blocks(witness: Witness, atlas: PatternAtlas, same: set[str]) -> list[int]:
    """Block index of each class, grouping classes whose pair label is in ``same``."""
    graph = nx.Graph()
    graph.add_nodes_from(range(witness.size))
    for a, b in itertools.combinations(range(witness.size), 2):
        if atlas.label_of(witness.structure.typing, witness.size, (a, b)) in same:
            graph.add_edge(a, b)
    block_of = [0] * witness.size
    components = sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])
    for index, component in enumerate(components):
        for c in component:
            block_of[c] = index
    return block_of


def materialize_witness(witness: Witness, atlas: PatternAtlas) -> dict[str, Any] | None:
    """Concrete assignment of a witness for a builtin family.

    Returns:
        A JSON-ready description, or None for families without one; the
        abstract witness structure stays available either way.
    """
    family = atlas.family
    size = witness.size
    if family == "equality":
        values = {str(v): c for v, c in witness.quotient.items()}
        return {"family": family, "values": values}

    if family == "equivalence":
        block_of = _blocks(witness, atlas, {"SAME"})
        values = {str(v): [block_of[c], c] for v, c in witness.quotient.items()}
        return {"family": family, "values": values}

    if family == "partition":
        counters: dict[str, int] = {}
        elements = []
        for c in range(size):
            block = atlas.label_of(witness.structure.typing, size, (c,))
            elements.append([block, counters.get(block, 0)])
            counters[block] = counters.get(block, 0) + 1
        values = {str(v): elements[c] for v, c in witness.quotient.items()}
        return {"family": family, "values": values}

    if family in GRAPH_FAMILIES:
        graph = witness_graph(witness, atlas)
        result: dict[str, Any] = {
            "family": family,
            "vertices": size,
            "edges": sorted([min(e), max(e)] for e in graph.edges),
            "values": {str(v): c for v, c in witness.quotient.items()},
        }
        if family == "henson":
            result["clique_number"] = clique_number(graph)
        return result

    if family == "mmsnp":
        colors = [
            label_color(atlas.label_of(witness.structure.typing, size, (c,))) for c in range(size)
        ]
        return {
            "family": family,
            "colors": {str(v): colors[c] for v, c in witness.quotient.items()},
        }

    logger.debug("No concrete materialization for family %s", family)
    return None

"""
Named fixtures: example instances, obstruction sets and finite structures
used by the acceptance runs and the tests.
"""

from __future__ import annotations

import itertools

import networkx as nx

from .algebra.structures import FiniteStructure, OperationTable, table_from_function
from .atlas.builtins import equality_atlas, henson_atlas, random_graph_fourary_atlas
from .engine.instance import Instance, normalize
from .mmsnp.obstructions import ObstructionSet, parse_obstruction_set

# ============================================================================
# Instances
# ============================================================================


def fourary_instance_i() -> Instance:
    """R_eq and R_neq on the same four variables, kept as two constraints.

    Non-trivial after (3,6)-minimization, trivial after (4,6).
    """
    atlas = random_graph_fourary_atlas()
    instance = Instance.from_applications(
        atlas, [1, 2, 3, 4], [("R_eq", (1, 2, 3, 4)), ("R_neq", (1, 2, 3, 4))]
    )
    return normalize(instance, merge_duplicates=False)


def fourary_instance_j() -> Instance:
    """Six variables: R_eq(1,2,3,4), R_neq(3,4,5,6), R_eq(1,2,5,6).

    Non-trivial after (4,5)-minimization, trivial after (4,6).
    """
    atlas = random_graph_fourary_atlas()
    return Instance.from_applications(
        atlas,
        range(1, 7),
        [
            ("R_eq", (1, 2, 3, 4)),
            ("R_neq", (3, 4, 5, 6)),
            ("R_eq", (1, 2, 5, 6)),
        ],
    )


def henson_triangle(n: int = 3) -> Instance:
    """An E-clique on n variables over the Henson graph omitting it."""
    atlas = henson_atlas(n)
    variables = list(range(1, n + 1))
    return Instance.from_applications(
        atlas, variables, [("E", pair) for pair in itertools.combinations(variables, 2)]
    )


def equality_triangle() -> Instance:
    """x = y, y = z, x ≠ z."""
    atlas = equality_atlas()
    return Instance.from_applications(
        atlas, ["x", "y", "z"], [("EQ", ("x", "y")), ("EQ", ("y", "z")), ("NEQ", ("x", "z"))]
    )


# ============================================================================
# Obstruction sets
# ============================================================================

TWO_COLORING = """\
# Proper 2-coloring of a graph
colors R, B;
relation E/2;
forbid mono_R = {v,w: E(v,w), R(v), R(w)}, mono_B = {v,w: E(v,w), B(v), B(w)};
normal-form;
"""

THREE_COLORING = """\
# Proper 3-coloring of a graph
colors R, G, B;
relation E/2;
forbid {v,w: E(v,w), R(v), R(w)}, {v,w: E(v,w), G(v), G(w)}, {v,w: E(v,w), B(v), B(w)};
normal-form;
"""

TRIANGLE_FREE = """\
# No triangle at all
colors C;
relation E/2;
forbid triangle = {u,v,w: E(u,v), E(v,w), E(w,u), C(u), C(v), C(w)};
normal-form;
"""

MONOCHROMATIC_TRIANGLE = """\
# 2-colorings without a monochromatic triangle
colors R, B;
relation E/2;
forbid mono_R = {u,v,w: E(u,v), E(v,w), E(w,u), R(u), R(v), R(w)},
       mono_B = {u,v,w: E(u,v), E(v,w), E(w,u), B(u), B(v), B(w)};
normal-form;
"""

MONOCHROMATIC_TRIPLE = """\
# 2-colorings of a ternary relation without a monochromatic triple
colors R, B;
relation T/3;
forbid mono_R = {u,v,w: T(u,v,w), R(u), R(v), R(w)},
       mono_B = {u,v,w: T(u,v,w), B(u), B(v), B(w)};
normal-form;
"""

OBSTRUCTION_TEXTS = {
    "two-coloring": TWO_COLORING,
    "three-coloring": THREE_COLORING,
    "triangle-free": TRIANGLE_FREE,
    "monochromatic-triangle": MONOCHROMATIC_TRIANGLE,
    "monochromatic-triple": MONOCHROMATIC_TRIPLE,
}

EXPECTED_REWRITABILITY = {
    "two-coloring": "datalog",
    "three-coloring": "not-datalog",
    "triangle-free": "datalog",
    "monochromatic-triangle": "not-datalog",
}


def obstruction_set(name: str) -> ObstructionSet:
    return parse_obstruction_set(OBSTRUCTION_TEXTS[name])


# ============================================================================
# Finite structures
# ============================================================================


def cycle_graph(n: int, symbol: str = "E") -> FiniteStructure:
    """Symmetric n-cycle on 0..n-1."""
    edges = {(i, (i + 1) % n) for i in range(n)}
    return FiniteStructure(
        tuple(range(n)), {symbol: edges | {(b, a) for a, b in edges}}, name=f"C{n}"
    )


def complete_graph(n: int, symbol: str = "E") -> FiniteStructure:
    """K_n on 0..n-1."""
    edges = {(a, b) for a in range(n) for b in range(n) if a != b}
    return FiniteStructure(tuple(range(n)), {symbol: edges}, name=f"K{n}")


def random_graph_structure(n: int, p: float, seed: int, symbol: str = "E") -> FiniteStructure:
    """Symmetric G(n, p) graph on 0..n-1."""
    graph = nx.gnp_random_graph(n, p, seed=seed)
    edges = {(a, b) for a, b in graph.edges} | {(b, a) for a, b in graph.edges}
    return FiniteStructure(
        tuple(range(n)), {symbol: edges}, {symbol: 2}, name=f"G({n},{p})#{seed}"
    )


def triple_path(n: int, symbol: str = "T") -> FiniteStructure:
    """Ternary relation of the consecutive triples (i, i+1, i+2) on 0..n-1."""
    triples = {(i, i + 1, i + 2) for i in range(n - 2)}
    return FiniteStructure(tuple(range(n)), {symbol: triples}, {symbol: 3}, name=f"P{n}/3")


def neq_structure() -> FiniteStructure:
    return FiniteStructure((0, 1), {"neq": {(0, 1), (1, 0)}}, name="neq")


def z2_linear_structure() -> FiniteStructure:
    """({0,1}; x+y+z=0, x+y+z=1)."""
    triples = list(itertools.product((0, 1), repeat=3))
    return FiniteStructure(
        (0, 1),
        {
            "sum0": {t for t in triples if sum(t) % 2 == 0},
            "sum1": {t for t in triples if sum(t) % 2 == 1},
        },
        name="z2-linear",
    )


def horn_structure() -> FiniteStructure:
    """Relations on {0,1} closed under min: x <= y and x ∧ y -> z."""
    triples = itertools.product((0, 1), repeat=3)
    return FiniteStructure(
        (0, 1),
        {
            "leq": {(0, 0), (0, 1), (1, 1)},
            "horn": {t for t in triples if not (t[0] and t[1]) or t[2]},
            "zero": {(0,)},
        },
        name="horn",
    )


def full_structure(size: int = 2) -> FiniteStructure:
    domain = tuple(range(size))
    return FiniteStructure(
        domain, {"full": set(itertools.product(domain, repeat=2))}, name=f"full{size}"
    )


def duplicated_point_structure() -> FiniteStructure:
    """K_2 on {0,1} plus 2 in the same position as 1."""
    return FiniteStructure(
        (0, 1, 2), {"E": {(0, 1), (1, 0), (0, 2), (2, 0)}}, name="k2-duplicated"
    )


def edgeless_structure(size: int = 2) -> FiniteStructure:
    return FiniteStructure(tuple(range(size)), {"E": set()}, {"E": 2}, name=f"edgeless{size}")


def small_structures() -> list[FiniteStructure]:
    """Structures on at most three elements for cross-checking decision routes."""
    return [
        neq_structure(),
        complete_graph(3),
        z2_linear_structure(),
        horn_structure(),
        full_structure(2),
        edgeless_structure(2),
    ]


# ============================================================================
# Generator sets
# ============================================================================


def majority_on_booleans() -> OperationTable:
    return table_from_function((0, 1), 3, lambda x, y, z: int(x + y + z >= 2), name="majority")


def semilattice_generators() -> list[OperationTable]:
    """The binary min operation on {0,1}."""
    return [table_from_function((0, 1), 2, min, name="min")]

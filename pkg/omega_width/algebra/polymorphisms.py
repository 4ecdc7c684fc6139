"""
Polymorphism search through indicator instances.

An identity system over one or more operation symbols is compiled into a
finite instance: its variables are the table cells (argument tuples) merged
along the identities, its alphabet is the domain, and every relation of the
structure contributes one constraint per choice of rows, saying the columns
of the rows are mapped back into the relation. A solution is a table.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from networkx.utils import UnionFind

from ..engine.instance import FiniteConstraint, FiniteInstance
from ..engine.search import SearchError, search_solution
from ..logging_config import get_logger
from .structures import (
    FiniteStructure,
    OperationTable,
    Row,
    StructureError,
    Value,
    nonempty_subsets,
)

logger = get_logger(__name__)

DEFAULT_CAP = 10**7

Term = tuple[str, tuple[str, ...]]


@dataclass(frozen=True, slots=True)
class Identity:
    """``left = right``; the right side is a term or a single variable."""

    left: Term
    right: Term | str

    def variables(self) -> list[str]:
        names = list(self.left[1])
        if isinstance(self.right, str):
            names.append(self.right)
        else:
            names.extend(self.right[1])
        return sorted(set(names))

    def symbols(self) -> set[str]:
        found = {self.left[0]}
        if not isinstance(self.right, str):
            found.add(self.right[0])
        return found

    def __str__(self) -> str:
        def show(side: Term | str) -> str:
            return side if isinstance(side, str) else f"{side[0]}({','.join(side[1])})"

        return f"{show(self.left)} = {show(self.right)}"


_TERM = re.compile(r"^\s*([A-Za-z_]\w*)\s*\(\s*([\w\s,]*)\)\s*$")


def _parse_side(text: str) -> Term | str:
    match = _TERM.match(text)
    if match:
        args = tuple(a.strip() for a in match.group(2).split(",") if a.strip())
        if not args:
            raise StructureError(f"term {text.strip()!r} has no arguments")
        return (match.group(1), args)
    name = text.strip()
    if not re.fullmatch(r"[A-Za-z_]\w*", name):
        raise StructureError(f"cannot parse identity side {text.strip()!r}")
    return name


def parse_identity(text: str) -> Identity:
    """Parse ``w(x,x,y) = w(x,y,x)`` or ``w(x,x,x) = x``."""
    left, sep, right = text.partition("=")
    if not sep:
        raise StructureError(f"identity {text!r} has no '='")
    parsed_left = _parse_side(left)
    if isinstance(parsed_left, str):
        raise StructureError(f"identity {text!r} needs a term on the left")
    return Identity(parsed_left, _parse_side(right))


def parse_identities(lines: Iterable[str] | str) -> list[Identity]:
    if isinstance(lines, str):
        lines = re.split(r"[;\n]", lines)
    return [parse_identity(line) for line in lines if line.strip()]


# ============================================================================
# Identity systems
# ============================================================================


def wnu_identities(arity: int, symbol: str = "w") -> list[Identity]:
    """w(y,x,...,x) = w(x,y,x,...,x) = ... = w(x,...,x,y)."""
    if arity < 2:
        raise StructureError(f"WNU operations need arity >= 2 (got {arity})")
    placements = [
        tuple("y" if i == position else "x" for i in range(arity)) for position in range(arity)
    ]
    return [
        Identity((symbol, placements[i]), (symbol, placements[i + 1]))
        for i in range(arity - 1)
    ]


def idempotence(arity: int, symbol: str = "w") -> Identity:
    return Identity((symbol, ("x",) * arity), "x")


def linking_identity(first: str = "w3", second: str = "w4") -> Identity:
    """w3(y,x,x) = w4(y,x,x,x)."""
    return Identity((first, ("y", "x", "x")), (second, ("y", "x", "x", "x")))


# ============================================================================
# Indicator instances
# ============================================================================


Cell = tuple[str, Row]


@dataclass(slots=True)
class _Indicator:
    instance: FiniteInstance
    cell_class: dict[Cell, Cell]


def _build_indicator(
    structure: FiniteStructure,
    symbols: Mapping[str, int],
    identities: Sequence[Identity],
    symmetric: Iterable[str] = (),
    cap: int = DEFAULT_CAP,
) -> _Indicator | None:
    """Compile an identity system; None when the identities clash outright."""
    domain = structure.domain
    cells: list[Cell] = [
        (symbol, args)
        for symbol, arity in symbols.items()
        for args in itertools.product(domain, repeat=arity)
    ]
    order = {cell: i for i, cell in enumerate(cells)}
    merged = UnionFind(cells)
    fixed: list[tuple[Cell, Value]] = []

    for identity in identities:
        unknown = identity.symbols() - set(symbols)
        if unknown:
            raise StructureError(f"identity {identity} uses undeclared symbols {sorted(unknown)}")
        names = identity.variables()
        for values in itertools.product(domain, repeat=len(names)):
            env = dict(zip(names, values))
            left = (identity.left[0], tuple(env[v] for v in identity.left[1]))
            if len(left[1]) != symbols[left[0]]:
                raise StructureError(f"identity {identity} applies {left[0]} with the wrong arity")
            if isinstance(identity.right, str):
                fixed.append((left, env[identity.right]))
            else:
                right = (identity.right[0], tuple(env[v] for v in identity.right[1]))
                if len(right[1]) != symbols[right[0]]:
                    raise StructureError(
                        f"identity {identity} applies {right[0]} with the wrong arity"
                    )
                merged.union(left, right)

    for symbol in symmetric:
        by_set: dict[frozenset, Cell] = {}
        for cell in cells:
            if cell[0] != symbol:
                continue
            first = by_set.setdefault(frozenset(cell[1]), cell)
            merged.union(first, cell)

    cell_class: dict[Cell, Cell] = {}
    for group in merged.to_sets():
        representative = min(group, key=order.__getitem__)
        for cell in group:
            cell_class[cell] = representative

    value_of: dict[Cell, Value] = {}
    for cell, value in fixed:
        representative = cell_class[cell]
        if value_of.setdefault(representative, value) != value:
            logger.debug("Identities force cell %s to two values", representative)
            return None

    constraints: dict[tuple[str, tuple[Cell, ...]], FiniteConstraint] = {}
    stored = 0
    for rel_name in structure.relation_names():
        tuples = structure.relations[rel_name]
        rows = sorted(tuples, key=repr)
        for symbol, arity in symbols.items():
            for chosen in itertools.product(rows, repeat=arity):
                columns = [cell_class[(symbol, column)] for column in zip(*chosen)]
                scope = tuple(dict.fromkeys(columns))
                key = (rel_name, tuple(columns))
                if key in constraints or not scope:
                    continue
                positions = [scope.index(c) for c in columns]
                allowed = set()
                for t in tuples:
                    assigned: dict[int, Value] = {}
                    if all(assigned.setdefault(p, v) == v for p, v in zip(positions, t)):
                        allowed.add(tuple(assigned[i] for i in range(len(scope))))
                stored += len(allowed)
                if stored > cap:
                    raise SearchError(f"indicator instance exceeds {cap} stored tuples")
                constraints[key] = FiniteConstraint(scope, frozenset(allowed), rel_name)

    for representative, value in sorted(value_of.items(), key=lambda item: order[item[0]]):
        constraints[("=", (representative,))] = FiniteConstraint(
            (representative,), frozenset({(value,)}), "identity"
        )

    variables = tuple(sorted(set(cell_class.values()), key=order.__getitem__))
    instance = FiniteInstance(
        variables=variables,
        alphabet=domain,
        constraints=tuple(constraints.values()),
        name=f"indicator[{','.join(f'{s}/{a}' for s, a in symbols.items())}]",
    )
    logger.debug(
        "Indicator instance: %d cell classes, %d constraints",
        len(variables),
        len(instance.constraints),
    )
    return _Indicator(instance, cell_class)


def _solve_indicator(
    structure: FiniteStructure,
    symbols: Mapping[str, int],
    identities: Sequence[Identity],
    symmetric: Iterable[str] = (),
    cap: int = DEFAULT_CAP,
) -> dict[str, OperationTable] | None:
    indicator = _build_indicator(structure, symbols, identities, symmetric, cap)
    if indicator is None:
        return None
    solution = search_solution(indicator.instance)
    if solution is None:
        return None
    tables = {}
    for symbol, arity in symbols.items():
        table = {
            args: solution[indicator.cell_class[(symbol, args)]]
            for args in itertools.product(structure.domain, repeat=arity)
        }
        tables[symbol] = OperationTable(structure.domain, arity, table=table, name=symbol)
    for symbol, table in tables.items():
        broken = first_violation(table, structure)
        if broken is not None:
            raise SearchError(f"{symbol} found by search does not preserve {broken}")
    for identity in identities:
        if not satisfies(tables, identity, structure.domain):
            raise SearchError(f"tables found by search break {identity}")
    return tables


# ============================================================================
# Direct checks
# ============================================================================


def preserves(operation: OperationTable, tuples: Iterable[Row]) -> bool:
    """Whether applying the operation to rows of a relation stays inside it."""
    rows = list(tuples)
    relation = set(rows)
    for chosen in itertools.product(rows, repeat=operation.arity):
        if tuple(operation(*column) for column in zip(*chosen)) not in relation:
            return False
    return True


def first_violation(operation: OperationTable, structure: FiniteStructure) -> str | None:
    """Name of the first relation the operation does not preserve."""
    for rel_name in structure.relation_names():
        if not preserves(operation, structure.relations[rel_name]):
            return rel_name
    return None


def is_polymorphism(operation: OperationTable, structure: FiniteStructure) -> bool:
    return first_violation(operation, structure) is None


def is_idempotent(operation: OperationTable) -> bool:
    return all(operation(*((d,) * operation.arity)) == d for d in operation.domain)


def is_wnu(operation: OperationTable, idempotent: bool = True) -> bool:
    """Whether all placements of one deviating argument give one value."""
    n = operation.arity
    if n < 2:
        return False
    if idempotent and not is_idempotent(operation):
        return False
    for x, y in itertools.permutations(operation.domain, 2):
        values = {
            operation(*(y if i == position else x for i in range(n))) for position in range(n)
        }
        if len(values) > 1:
            return False
    return True


def satisfies(
    tables: Mapping[str, OperationTable], identity: Identity, domain: Sequence[Value]
) -> bool:
    names = identity.variables()
    for values in itertools.product(domain, repeat=len(names)):
        env = dict(zip(names, values))
        left = tables[identity.left[0]](*(env[v] for v in identity.left[1]))
        if isinstance(identity.right, str):
            right = env[identity.right]
        else:
            right = tables[identity.right[0]](*(env[v] for v in identity.right[1]))
        if left != right:
            return False
    return True


# ============================================================================
# Searches
# ============================================================================


SPECS = ("wnu", "idempotent-wnu", "totally-symmetric", "idempotent")


def find_polymorphism(
    structure: FiniteStructure,
    spec: str | Sequence[Identity],
    arity: int,
    *,
    symbol: str = "w",
    cap: int = DEFAULT_CAP,
) -> OperationTable | None:
    """Search a polymorphism satisfying an identity system.

    Args:
        structure: Structure whose relations must be preserved.
        spec: ``wnu``, ``idempotent-wnu``, ``totally-symmetric``,
            ``idempotent`` or identities over the single symbol.
        arity: Arity of the operation, at least 2.
        symbol: Operation symbol used by custom identities.
        cap: Largest number of stored indicator tuples.

    Returns:
        The first table in cell order, or None when none exists.

    Raises:
        StructureError: For unknown specs or identities over several symbols.
        SearchError: If the indicator instance exceeds the cap.
    """
    if arity < 2:
        raise StructureError(f"polymorphism arity must be at least 2 (got {arity})")
    symmetric: list[str] = []
    if isinstance(spec, str):
        if spec == "wnu":
            identities = wnu_identities(arity, symbol)
        elif spec == "idempotent-wnu":
            identities = wnu_identities(arity, symbol) + [idempotence(arity, symbol)]
        elif spec == "totally-symmetric":
            identities, symmetric = [], [symbol]
        elif spec == "idempotent":
            identities = [idempotence(arity, symbol)]
        else:
            raise StructureError(f"unknown identity spec {spec!r} (known: {', '.join(SPECS)})")
        label = spec
    else:
        identities = list(spec)
        symbols = set().union(*(i.symbols() for i in identities)) if identities else {symbol}
        if len(symbols) > 1:
            raise StructureError(
                f"identity systems over several symbols {sorted(symbols)} need a dedicated search"
            )
        symbol = symbols.pop()
        label = "custom"

    tables = _solve_indicator(structure, {symbol: arity}, identities, symmetric, cap)
    found = None if tables is None else tables[symbol]
    logger.info(
        "%s polymorphism of arity %d on %s: %s",
        label,
        arity,
        structure.name or "structure",
        "found" if found is not None else "none",
    )
    return found


def find_linked_wnu_pair(
    structure: FiniteStructure, *, cap: int = DEFAULT_CAP
) -> tuple[OperationTable, OperationTable] | None:
    """Search WNU polymorphisms w3, w4 with w3(y,x,x) = w4(y,x,x,x).

    On a core expanded by singleton relations such a pair exists exactly
    when the structure has bounded width.
    """
    identities = (
        wnu_identities(3, "w3") + wnu_identities(4, "w4") + [linking_identity("w3", "w4")]
    )
    tables = _solve_indicator(structure, {"w3": 3, "w4": 4}, identities, cap=cap)
    if tables is None:
        logger.info("No linked WNU pair on %s", structure.name or "structure")
        return None
    logger.info("Linked WNU pair found on %s", structure.name or "structure")
    return tables["w3"], tables["w4"]


def _union_closure(rows: Iterable[Row]) -> set[tuple[frozenset, ...]]:
    """Coordinatewise unions of nonempty sets of rows."""
    closed = {tuple(frozenset((v,)) for v in row) for row in rows}
    frontier = set(closed)
    while frontier:
        fresh = set()
        for first in frontier:
            for second in closed:
                joined = tuple(a | b for a, b in zip(first, second))
                if joined not in closed:
                    fresh.add(joined)
        closed |= fresh
        frontier = fresh
    return closed


def has_ts_all_arities(
    structure: FiniteStructure, *, cap: int = DEFAULT_CAP
) -> OperationTable | None:
    """Search totally symmetric polymorphisms of all arities at once.

    A totally symmetric operation is a function of its argument set; one set
    function preserving every relation for argument sets of every size gives
    such polymorphisms at every arity.

    Returns:
        The set function as a compressed table of arity |domain|, or None.
    """
    if not structure.domain:
        raise StructureError("structure has an empty domain")
    subsets = nonempty_subsets(structure.domain)
    order = {s: i for i, s in enumerate(subsets)}
    constraints: dict[tuple[str, tuple[frozenset, ...]], FiniteConstraint] = {}
    stored = 0
    for rel_name in structure.relation_names():
        tuples = structure.relations[rel_name]
        for columns in sorted(_union_closure(tuples), key=lambda c: [order[s] for s in c]):
            scope = tuple(dict.fromkeys(columns))
            positions = [scope.index(c) for c in columns]
            allowed = set()
            for t in tuples:
                assigned: dict[int, Value] = {}
                if all(assigned.setdefault(p, v) == v for p, v in zip(positions, t)):
                    allowed.add(tuple(assigned[i] for i in range(len(scope))))
            stored += len(allowed)
            if stored > cap:
                raise SearchError(f"set-function instance exceeds {cap} stored tuples")
            constraints[(rel_name, columns)] = FiniteConstraint(scope, frozenset(allowed), rel_name)

    instance = FiniteInstance(
        variables=tuple(subsets),
        alphabet=structure.domain,
        constraints=tuple(constraints.values()),
        name="set-function",
    )
    solution = search_solution(instance)
    if solution is None:
        logger.info("No totally symmetric polymorphisms on %s", structure.name or "structure")
        return None
    table = OperationTable(
        structure.domain,
        structure.size,
        set_function={s: solution[s] for s in subsets},
        name="ts",
    )
    logger.info("Totally symmetric polymorphisms found on %s", structure.name or "structure")
    return table


def iter_wnu_arities(
    structure: FiniteStructure, arities: Iterable[int] = range(3, 7), cap: int = DEFAULT_CAP
) -> Iterator[tuple[int, OperationTable | None]]:
    """Direct idempotent WNU searches, one per arity."""
    for arity in arities:
        yield arity, find_polymorphism(structure, "idempotent-wnu", arity, cap=cap)


def wnu_all_arities(
    structure: FiniteStructure, arities: Iterable[int] = range(3, 7), cap: int = DEFAULT_CAP
) -> bool:
    """Whether direct searches find idempotent WNUs at every listed arity."""
    return all(table is not None for _, table in iter_wnu_arities(structure, arities, cap))

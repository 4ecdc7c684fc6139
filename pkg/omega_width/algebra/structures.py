"""
Finite relational structures and operation tables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping

from ..logging_config import get_logger

logger = get_logger(__name__)

Value = Hashable
Row = tuple[Value, ...]


class StructureError(Exception):
    """Raised for malformed structures, operation tables or relations."""

    pass


def singleton_name(value: Value) -> str:
    return f"const[{value}]"


@dataclass(frozen=True, slots=True)
class FiniteStructure:
    """A finite domain with named relations given by explicit tuples.

    Attributes:
        domain: Elements, in the order searches try them.
        relations: Relation name to its tuples.
        arities: Relation name to its arity; needed for empty relations.
        name: Display name.
    """

    domain: tuple[Value, ...]
    relations: Mapping[str, frozenset[Row]]
    arities: Mapping[str, int] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self) -> None:
        if len(set(self.domain)) != len(self.domain):
            raise StructureError(f"{self.name or 'structure'}: domain repeats an element")
        elements = set(self.domain)
        arities = dict(self.arities)
        relations = {}
        for rel_name, tuples in self.relations.items():
            tuples = frozenset(tuple(t) for t in tuples)
            sizes = {len(t) for t in tuples}
            if rel_name in arities:
                sizes.add(arities[rel_name])
            if len(sizes) > 1:
                raise StructureError(f"relation {rel_name} mixes arities {sorted(sizes)}")
            if not sizes:
                raise StructureError(f"relation {rel_name} is empty and has no declared arity")
            arities[rel_name] = sizes.pop()
            for t in tuples:
                if not elements.issuperset(t):
                    raise StructureError(f"relation {rel_name}: tuple {t} leaves the domain")
            relations[rel_name] = tuples
        object.__setattr__(self, "relations", relations)
        object.__setattr__(self, "arities", arities)

    @property
    def size(self) -> int:
        return len(self.domain)

    def relation_names(self) -> list[str]:
        return sorted(self.relations)

    def with_singletons(self) -> "FiniteStructure":
        """Expansion by one unary relation {(d,)} per element."""
        relations = dict(self.relations)
        arities = dict(self.arities)
        for value in self.domain:
            relations[singleton_name(value)] = frozenset({(value,)})
            arities[singleton_name(value)] = 1
        return FiniteStructure(self.domain, relations, arities, self.name)

    def induced(self, elements: Iterable[Value]) -> "FiniteStructure":
        """Substructure induced on a subset of the domain."""
        keep = set(elements)
        domain = tuple(d for d in self.domain if d in keep)
        relations = {
            rel_name: frozenset(t for t in tuples if keep.issuperset(t))
            for rel_name, tuples in self.relations.items()
        }
        return FiniteStructure(domain, relations, self.arities, self.name)

    def image(self, mapping: Mapping[Value, Value]) -> "FiniteStructure":
        """Image of the structure under a map of its domain."""
        targets = set(mapping.values())
        domain = tuple(d for d in self.domain if d in targets)
        relations = {
            rel_name: frozenset(tuple(mapping[v] for v in t) for t in tuples)
            for rel_name, tuples in self.relations.items()
        }
        return FiniteStructure(domain, relations, self.arities, self.name)

    def summary(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "domain": list(self.domain),
            "relations": {
                rel_name: {"arity": self.arities[rel_name], "tuples": len(tuples)}
                for rel_name, tuples in sorted(self.relations.items())
            },
        }


def nonempty_subsets(domain: Iterable[Value], max_size: int | None = None) -> list[frozenset]:
    """Nonempty subsets ordered by size, then by domain order."""
    elements = tuple(domain)
    top = len(elements) if max_size is None else min(max_size, len(elements))
    return [
        frozenset(combo)
        for size in range(1, top + 1)
        for combo in itertools.combinations(elements, size)
    ]


@dataclass(frozen=True, slots=True)
class OperationTable:
    """A total operation on a finite domain.

    Totally symmetric operations may be stored compressed as a map from
    nonempty argument sets to values.

    Attributes:
        domain: Domain elements.
        arity: Number of arguments.
        table: Full table from argument tuples to values.
        set_function: Compressed form for totally symmetric operations.
        name: Display name.
    """

    domain: tuple[Value, ...]
    arity: int
    table: Mapping[Row, Value] | None = None
    set_function: Mapping[frozenset, Value] | None = None
    name: str = ""

    def __post_init__(self) -> None:
        if self.arity < 1:
            raise StructureError(f"operation arity must be positive (got {self.arity})")
        if (self.table is None) == (self.set_function is None):
            raise StructureError("give exactly one of a full table and a set function")
        elements = set(self.domain)
        if self.table is not None:
            expected = len(self.domain) ** self.arity
            if len(self.table) != expected or not all(
                len(args) == self.arity and elements.issuperset(args) for args in self.table
            ):
                raise StructureError(f"operation table {self.name!r} is not total")
            if not elements.issuperset(self.table.values()):
                raise StructureError(f"operation table {self.name!r} leaves the domain")
        else:
            assert self.set_function is not None
            needed = set(nonempty_subsets(self.domain, self.arity))
            if not needed.issubset(self.set_function):
                raise StructureError(f"set function {self.name!r} misses argument sets")
            if not elements.issuperset(self.set_function.values()):
                raise StructureError(f"set function {self.name!r} leaves the domain")

    @property
    def is_compressed(self) -> bool:
        return self.set_function is not None

    def __call__(self, *args: Value) -> Value:
        if self.set_function is not None:
            return self.set_function[frozenset(args)]
        return self.table[args]  # type: ignore[index]

    def rows(self) -> Iterator[tuple[Row, Value]]:
        for args in itertools.product(self.domain, repeat=self.arity):
            yield args, self(*args)

    def expand(self) -> dict[Row, Value]:
        """Full table of the operation."""
        return dict(self.rows())

    def to_dict(self) -> dict[str, Any]:
        if self.set_function is not None:
            body: list[list[Any]] = [
                [sorted(s, key=self.domain.index), v]
                for s, v in sorted(
                    self.set_function.items(),
                    key=lambda item: (len(item[0]), sorted(self.domain.index(x) for x in item[0])),
                )
            ]
            return {
                "name": self.name,
                "domain": list(self.domain),
                "arity": self.arity,
                "sets": body,
            }
        return {
            "name": self.name,
            "domain": list(self.domain),
            "arity": self.arity,
            "rows": [[list(args), value] for args, value in self.rows()],
        }

    def at_arity(self, arity: int) -> "OperationTable":
        """The totally symmetric operation of another arity with the same set function."""
        if self.set_function is None:
            raise StructureError("only set functions can change arity")
        needed = nonempty_subsets(self.domain, arity)
        return OperationTable(
            self.domain,
            arity,
            set_function={s: self.set_function[s] for s in needed},
            name=f"{self.name}/{arity}" if self.name else "",
        )


def table_from_function(
    domain: Iterable[Value],
    arity: int,
    function: Callable[..., Value],
    name: str = "",
) -> OperationTable:
    """Tabulate a Python callable over the domain."""
    elements = tuple(domain)
    table = {args: function(*args) for args in itertools.product(elements, repeat=arity)}
    return OperationTable(elements, arity, table=table, name=name)

"""
Colored obstruction sets: data model, text format, precoloring and
homomorphism search.

Text format (``#`` starts a comment, statements end with ``;``)::

    colors R, B;
    relation E/2;            # ``edge`` is accepted as an alias
    forbid {v,w: E(v,w), R(v), R(w)}, {v,w: E(v,w), B(v), B(w)};
    normal-form;             # asserts the set is in normal form

A member may be named with ``name = {...}``; unnamed members are called
``F1``, ``F2``, ... in order of appearance. The ``precolored`` statement marks
a set that already carries its ``P_<color>`` predicates and mismatch members.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator, Mapping

import networkx as nx

from ..logging_config import get_logger

logger = get_logger(__name__)

Atom = tuple[str, tuple[Hashable, ...]]

PRECOLOR_PREFIX = "P_"


# ============================================================================
# Exceptions
# ============================================================================


class ObstructionParseError(Exception):
    """Raised for syntax or semantic errors in an obstruction-set text."""

    def __init__(
        self,
        message: str,
        line: int | None = None,
        column: int | None = None,
        member: str | None = None,
    ):
        self.message = message
        self.line = line
        self.column = column
        self.member = member
        where = []
        if line is not None:
            where.append(f"line {line}, column {column}")
        if member is not None:
            where.append(f"member {member}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


class MMSNPError(Exception):
    """Raised when an obstruction set cannot be processed as requested."""

    pass


# ============================================================================
# Data Model
# ============================================================================


@dataclass(slots=True, kw_only=True)
class ColoredStructure:
    """A finite relational structure with an optional vertex coloring.

    Attributes:
        name: Display name (member name for obstructions).
        vertices: Vertices in a fixed order.
        atoms: Relational atoms ``(symbol, arguments)``.
        coloring: Color of every vertex; empty for uncolored structures.
    """

    name: str = ""
    vertices: tuple[Hashable, ...]
    atoms: tuple[Atom, ...] = ()
    coloring: dict[Hashable, str] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.vertices)

    def atoms_by_symbol(self) -> dict[str, set[tuple[Hashable, ...]]]:
        index: dict[str, set[tuple[Hashable, ...]]] = {}
        for symbol, args in self.atoms:
            index.setdefault(symbol, set()).add(tuple(args))
        return index

    def gaifman_graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        for _, args in self.atoms:
            for a, b in zip(args, args[1:]):
                graph.add_edge(a, b)
        return graph

    def is_connected(self) -> bool:
        return bool(self.vertices) and nx.is_connected(self.gaifman_graph())


@dataclass(slots=True, kw_only=True)
class ObstructionSet:
    """A forbidden colored-pattern family defining an MMSNP problem.

    Attributes:
        signature: Input relation symbols with their arities.
        colors: Color names.
        members: Connected colored obstructions.
        precolored: Whether the precoloring predicates and mismatch members
            are present.
        normal_form: Whether the user asserted that the set is in normal form.
    """

    signature: dict[str, int]
    colors: tuple[str, ...]
    members: tuple[ColoredStructure, ...]
    precolored: bool = False
    normal_form: bool = False

    @property
    def max_member_size(self) -> int:
        return max((m.size for m in self.members), default=1)

    def precolor_symbol(self, color: str) -> str:
        return f"{PRECOLOR_PREFIX}{color}"

    @property
    def precolor_symbols(self) -> dict[str, str]:
        """Map from color to its precoloring predicate (empty if not precolored)."""
        if not self.precolored:
            return {}
        return {color: self.precolor_symbol(color) for color in self.colors}

    def is_mismatch_member(self, member: ColoredStructure) -> bool:
        """Whether a member is one of the singleton precoloring obstructions."""
        if not self.precolored or member.size != 1:
            return False
        symbols = set(self.precolor_symbols.values())
        return any(symbol in symbols for symbol, _ in member.atoms)

    def core_members(self) -> tuple[ColoredStructure, ...]:
        """Members other than the precoloring mismatch singletons."""
        return tuple(m for m in self.members if not self.is_mismatch_member(m))

    def summary(self) -> dict:
        return {
            "signature": dict(sorted(self.signature.items())),
            "colors": list(self.colors),
            "members": len(self.members),
            "max_member_size": self.max_member_size,
            "precolored": self.precolored,
            "normal_form": self.normal_form,
        }


# ============================================================================
# Validation
# ============================================================================


def validate_obstruction_set(obstructions: ObstructionSet) -> None:
    """Enforce connectivity, unique coloring and symbol consistency.

    Raises:
        ObstructionParseError: Naming the offending member.
    """
    colors = set(obstructions.colors)
    if not colors:
        raise ObstructionParseError("no colors declared")
    if len(colors) != len(obstructions.colors):
        raise ObstructionParseError("duplicate color names")
    clash = colors.intersection(obstructions.signature)
    if clash:
        raise ObstructionParseError(
            f"names used both as colors and relations: {sorted(clash)}"
        )

    for member in obstructions.members:
        if not member.vertices:
            raise ObstructionParseError("member has no vertices", member=member.name)
        declared = set(member.vertices)
        for symbol, args in member.atoms:
            arity = obstructions.signature.get(symbol)
            if arity is None:
                raise ObstructionParseError(f"unknown relation {symbol}", member=member.name)
            if arity != len(args):
                raise ObstructionParseError(
                    f"{symbol} has arity {arity}, used with {len(args)} arguments",
                    member=member.name,
                )
            stray = [a for a in args if a not in declared]
            if stray:
                raise ObstructionParseError(
                    f"atom {symbol}{tuple(args)} uses undeclared vertices {stray}",
                    member=member.name,
                )
        for vertex in member.vertices:
            color = member.coloring.get(vertex)
            if color is None:
                raise ObstructionParseError(f"uncolored vertex {vertex}", member=member.name)
            if color not in colors:
                raise ObstructionParseError(
                    f"vertex {vertex} has unknown color {color}", member=member.name
                )
        if not member.is_connected():
            raise ObstructionParseError("member is not connected", member=member.name)

    if obstructions.precolored:
        for color in obstructions.colors:
            symbol = obstructions.precolor_symbol(color)
            if obstructions.signature.get(symbol) != 1:
                raise ObstructionParseError(
                    f"precolored set lacks unary predicate {symbol}"
                )
        present = {
            (args_symbol, member.coloring[member.vertices[0]])
            for member in obstructions.members
            if member.size == 1
            for args_symbol, _ in member.atoms
        }
        for color in obstructions.colors:
            for other in obstructions.colors:
                if color != other and (obstructions.precolor_symbol(color), other) not in present:
                    raise ObstructionParseError(
                        f"precolored set lacks the mismatch member for "
                        f"{obstructions.precolor_symbol(color)} and color {other}"
                    )


# ============================================================================
# Parser
# ============================================================================


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<newline>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_\-]*)
  | (?P<punct>[;,{}():/=])
    """,
    re.VERBOSE,
)


@dataclass(slots=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


# name, vertices, atoms with their tokens, opening token
_RawMember = tuple[str, list[str], list[tuple[str, list[str], _Token]], _Token]


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise ObstructionParseError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = match.lastgroup or ""
        if kind == "newline":
            line += 1
            line_start = match.end()
        elif kind in ("int", "name", "punct"):
            tokens.append(_Token(kind, match.group(), line, pos - line_start + 1))
        pos = match.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    """Recursive-descent parser over the token list."""

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.colors: list[str] = []
        self.signature: dict[str, int] = {}
        self.raw_members: list[_RawMember] = []
        self.precolored = False
        self.normal_form = False

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def error(self, message: str, token: _Token | None = None) -> ObstructionParseError:
        token = token or self.current
        return ObstructionParseError(message, token.line, token.column)

    def advance(self) -> _Token:
        token = self.current
        self.pos += 1
        return token

    def expect(self, text: str) -> _Token:
        if self.current.text != text:
            found = self.current.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def name(self) -> _Token:
        if self.current.kind != "name":
            found = self.current.text or "end of input"
            raise self.error(f"expected a name, found {found!r}")
        return self.advance()

    def parse(self) -> None:
        while self.current.kind != "eof":
            if self.current.text == ";":
                self.advance()
                continue
            self.statement()
            if self.current.kind != "eof":
                self.expect(";")

    def statement(self) -> None:
        keyword = self.name()
        if keyword.text == "colors":
            self.colors.append(self.name().text)
            while self.current.text == ",":
                self.advance()
                self.colors.append(self.name().text)
        elif keyword.text in ("relation", "edge"):
            self.relation_decl()
            while self.current.text == ",":
                self.advance()
                self.relation_decl()
        elif keyword.text == "forbid":
            self.member()
            while self.current.text == ",":
                self.advance()
                self.member()
        elif keyword.text in ("normal-form", "normal_form"):
            self.normal_form = True
        elif keyword.text == "precolored":
            self.precolored = True
        else:
            raise self.error(f"unknown statement {keyword.text!r}", keyword)

    def relation_decl(self) -> None:
        symbol = self.name()
        self.expect("/")
        if self.current.kind != "int":
            raise self.error("expected an arity")
        arity = int(self.advance().text)
        if arity < 1:
            raise self.error("arity must be positive", symbol)
        if symbol.text in self.signature:
            raise self.error(f"relation {symbol.text} declared twice", symbol)
        self.signature[symbol.text] = arity

    def member(self) -> None:
        start = self.current
        name = f"F{len(self.raw_members) + 1}"
        if self.current.kind == "name" and self.tokens[self.pos + 1].text == "=":
            name = self.advance().text
            self.advance()
        self.expect("{")
        vertices = [self.name().text]
        while self.current.text == ",":
            self.advance()
            vertices.append(self.name().text)
        self.expect(":")
        atoms = [self.atom()]
        while self.current.text == ",":
            self.advance()
            atoms.append(self.atom())
        self.expect("}")
        self.raw_members.append((name, vertices, atoms, start))

    def atom(self) -> tuple[str, list[str], _Token]:
        symbol = self.name()
        self.expect("(")
        args = [self.name().text]
        while self.current.text == ",":
            self.advance()
            args.append(self.name().text)
        self.expect(")")
        return symbol.text, args, symbol


def parse_obstruction_set(text: str) -> ObstructionSet:
    """Parse and validate an obstruction set.

    Args:
        text: Obstruction-set source in the documented format.

    Returns:
        Validated obstruction set.

    Raises:
        ObstructionParseError: With line/column for syntax errors or the
            member name for semantic violations.
    """
    parser = _Parser(text)
    parser.parse()
    colors = set(parser.colors)

    members = []
    for name, vertices, raw_atoms, start in parser.raw_members:
        if len(set(vertices)) != len(vertices):
            raise ObstructionParseError(
                "vertex declared twice", start.line, start.column, member=name
            )
        coloring: dict[Hashable, str] = {}
        atoms: list[Atom] = []
        for symbol, args, token in raw_atoms:
            if symbol in colors:
                if len(args) != 1:
                    raise ObstructionParseError(
                        f"color {symbol} takes one argument",
                        token.line,
                        token.column,
                        member=name,
                    )
                vertex = args[0]
                previous = coloring.get(vertex)
                if previous is not None and previous != symbol:
                    raise ObstructionParseError(
                        f"vertex {vertex} is multi-colored ({previous}, {symbol})",
                        token.line,
                        token.column,
                        member=name,
                    )
                coloring[vertex] = symbol
            elif symbol in parser.signature:
                atoms.append((symbol, tuple(args)))
            else:
                raise ObstructionParseError(
                    f"unknown symbol {symbol}", token.line, token.column, member=name
                )
        members.append(
            ColoredStructure(
                name=name,
                vertices=tuple(vertices),
                atoms=tuple(atoms),
                coloring=coloring,
            )
        )

    obstructions = ObstructionSet(
        signature=dict(parser.signature),
        colors=tuple(parser.colors),
        members=tuple(members),
        precolored=parser.precolored,
        normal_form=parser.normal_form,
    )
    validate_obstruction_set(obstructions)
    logger.info(
        "Parsed obstruction set: %d colors, %d relations, %d members",
        len(obstructions.colors),
        len(obstructions.signature),
        len(obstructions.members),
    )
    return obstructions


def format_obstruction_set(obstructions: ObstructionSet) -> str:
    """Render an obstruction set in the text format it is parsed from."""
    lines = [f"colors {', '.join(obstructions.colors)};"]
    if obstructions.signature:
        decls = ", ".join(f"{s}/{a}" for s, a in obstructions.signature.items())
        lines.append(f"relation {decls};")
    for member in obstructions.members:
        parts = [f"{symbol}({','.join(map(str, args))})" for symbol, args in member.atoms]
        parts += [f"{member.coloring[v]}({v})" for v in member.vertices]
        vertices = ",".join(map(str, member.vertices))
        lines.append(f"forbid {member.name} = {{{vertices}: {', '.join(parts)}}};")
    if obstructions.precolored:
        lines.append("precolored;")
    if obstructions.normal_form:
        lines.append("normal-form;")
    return "\n".join(lines) + "\n"


# ============================================================================
# Precoloring
# ============================================================================


def precolor(obstructions: ObstructionSet) -> ObstructionSet:
    """Standard precoloration: add ``P_M`` predicates and mismatch members.

    Args:
        obstructions: A set that is not yet precolored.

    Returns:
        New set with one unary ``P_M`` per color and, for every ordered pair
        of distinct colors M, M', a one-vertex member in ``P_M`` colored M'.

    Raises:
        MMSNPError: If the set is already precolored or a ``P_M`` name clashes
            with an existing relation.
    """
    if obstructions.precolored:
        raise MMSNPError("obstruction set is already precolored")
    signature = dict(obstructions.signature)
    for color in obstructions.colors:
        symbol = obstructions.precolor_symbol(color)
        if symbol in signature or symbol in obstructions.colors:
            raise MMSNPError(f"precoloring predicate {symbol} clashes with an existing name")
        signature[symbol] = 1

    added = []
    for color in obstructions.colors:
        for other in obstructions.colors:
            if color == other:
                continue
            added.append(
                ColoredStructure(
                    name=f"pre_{color}_{other}",
                    vertices=("v",),
                    atoms=((obstructions.precolor_symbol(color), ("v",)),),
                    coloring={"v": other},
                )
            )

    logger.info("Precoloring added %d mismatch members", len(added))
    return ObstructionSet(
        signature=signature,
        colors=obstructions.colors,
        members=obstructions.members + tuple(added),
        precolored=True,
        normal_form=obstructions.normal_form,
    )


def ensure_precolored(obstructions: ObstructionSet) -> ObstructionSet:
    return obstructions if obstructions.precolored else precolor(obstructions)


# ============================================================================
# Homomorphism Search
# ============================================================================


def _search_order(structure: ColoredStructure) -> list[Hashable]:
    """Vertices in breadth-first order so atoms close early."""
    graph = structure.gaifman_graph()
    order: list[Hashable] = []
    seen: set[Hashable] = set()
    for start in structure.vertices:
        if start in seen:
            continue
        for vertex in [start] + [v for _, v in nx.bfs_edges(graph, start)]:
            if vertex not in seen:
                seen.add(vertex)
                order.append(vertex)
    return order


def iter_homomorphisms(
    source: ColoredStructure, target: ColoredStructure
) -> Iterator[dict[Hashable, Hashable]]:
    """Yield every color- and atom-preserving map from source to target.

    Colors are compared only when the target is colored.
    """
    order = _search_order(source)
    position = {v: i for i, v in enumerate(order)}
    target_atoms = target.atoms_by_symbol()

    # Atoms become checkable once their last vertex in search order is placed
    closing: list[list[Atom]] = [[] for _ in order]
    for symbol, args in source.atoms:
        closing[max(position[a] for a in args)].append((symbol, tuple(args)))

    colored = bool(target.coloring)
    candidates = []
    for vertex in order:
        color = source.coloring.get(vertex)
        candidates.append(
            [
                t
                for t in target.vertices
                if not colored or color is None or target.coloring.get(t) == color
            ]
        )

    mapping: dict[Hashable, Hashable] = {}

    def extend(i: int) -> Iterator[dict[Hashable, Hashable]]:
        if i == len(order):
            yield dict(mapping)
            return
        vertex = order[i]
        for image in candidates[i]:
            mapping[vertex] = image
            if all(
                tuple(mapping[a] for a in args) in target_atoms.get(symbol, ())
                for symbol, args in closing[i]
            ):
                yield from extend(i + 1)
            del mapping[vertex]

    yield from extend(0)


def find_homomorphism(
    source: ColoredStructure, target: ColoredStructure
) -> dict[Hashable, Hashable] | None:
    """First homomorphism from source to target, or None."""
    return next(iter_homomorphisms(source, target), None)


def obstruction_embedding(
    members: Iterable[ColoredStructure], target: ColoredStructure
) -> tuple[str, dict[Hashable, Hashable]] | None:
    """First member that maps homomorphically into the target."""
    for member in members:
        mapping = find_homomorphism(member, target)
        if mapping is not None:
            return member.name, mapping
    return None


def quotients(member: ColoredStructure) -> Iterator[ColoredStructure]:
    """All homomorphic images of a member obtained by merging same-colored vertices."""
    vertices = list(member.vertices)

    def partitions(i: int, blocks: list[list[Hashable]]) -> Iterator[list[list[Hashable]]]:
        if i == len(vertices):
            yield [list(b) for b in blocks]
            return
        vertex = vertices[i]
        for block in blocks:
            if member.coloring[block[0]] == member.coloring[vertex]:
                block.append(vertex)
                yield from partitions(i + 1, blocks)
                block.pop()
        blocks.append([vertex])
        yield from partitions(i + 1, blocks)
        blocks.pop()

    for blocks in partitions(0, []):
        image_of = {v: index for index, block in enumerate(blocks) for v in block}
        atoms = tuple(
            sorted({(s, tuple(image_of[a] for a in args)) for s, args in member.atoms})
        )
        yield ColoredStructure(
            name=member.name,
            vertices=tuple(range(len(blocks))),
            atoms=atoms,
            coloring={i: member.coloring[block[0]] for i, block in enumerate(blocks)},
        )


def structure_from_atoms(
    vertices: Iterable[Hashable],
    atoms: Iterable[Atom],
    coloring: Mapping[Hashable, str] | None = None,
    name: str = "",
) -> ColoredStructure:
    return ColoredStructure(
        name=name,
        vertices=tuple(vertices),
        atoms=tuple((s, tuple(a)) for s, a in atoms),
        coloring=dict(coloring or {}),
    )

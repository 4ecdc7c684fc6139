"""
Builtin template families.

The fixed families are 2-homogeneous: a pattern is a typing of point pairs.
Templates of obstruction sets are k-homogeneous for the largest arity k.
Each constructor returns a fresh atlas; the registry caches them by spec.
"""

from __future__ import annotations

import itertools
import math
from typing import TYPE_CHECKING, Any, Iterable, Iterator, Sequence

from ..logging_config import get_logger
from .builder import default_namer, derive_atlas, growth_strings
from .core import (
    AtlasError,
    ForbiddenKind,
    ForbiddenPattern,
    Label,
    Pattern,
    PatternAtlas,
    RelationDef,
    Typing,
    combinations_of,
    violation,
)

if TYPE_CHECKING:
    from ..mmsnp.obstructions import ColoredStructure, ObstructionSet

logger = get_logger(__name__)


def _symmetric_pairs(unary: Label) -> Any:
    """Action for templates with one 1-orbit and symmetric 2-orbits."""

    def act(label: Label, p: int, blocks: tuple[int, ...]) -> Label:
        return unary if len(blocks) == 1 else label

    return act


def _forbid(typing: Sequence[Label], size: int) -> ForbiddenPattern:
    return ForbiddenPattern(Pattern(tuple(range(size)), tuple(typing)))


def _relation(
    atlas: PatternAtlas,
    name: str,
    partition: Sequence[int],
    allowed: Iterable[Typing],
) -> RelationDef:
    """Relation definition keeping only realizable allowed typings."""
    partition = tuple(partition)
    blocks = max(partition) + 1
    kept = frozenset(t for t in allowed if violation(atlas, t, blocks) is None)
    return RelationDef(name=name, arity=len(partition), partition=partition, allowed=kept)


def _add_graph_relations(atlas: PatternAtlas, edge: Label, non_edge: Label) -> None:
    atlas.relations[edge] = _relation(atlas, edge, (0, 1), [(edge,)])
    atlas.relations[non_edge] = _relation(atlas, non_edge, (0, 1), [(non_edge,)])
    atlas.relations["EQ"] = _relation(atlas, "EQ", (0, 0), [(lab,) for lab in atlas.labels[1]])
    atlas.relations["NEQ"] = _relation(atlas, "NEQ", (0, 1), [(edge,), (non_edge,)])


# ============================================================================
# Equality and Equivalence
# ============================================================================


def equality_atlas() -> PatternAtlas:
    """The pure set (N; =): labels V, EQ and NEQ."""
    atlas = derive_atlas(
        name="equality",
        k=2,
        ell=3,
        injective={1: ("V",), 2: ("NEQ",)},
        act=_symmetric_pairs("V"),
        namer=lambda rgs, base: "EQ",
        forbidden=[_forbid(("EQ", "EQ", "NEQ"), 3)],
        paper_width=(2, 3),
        family="equality",
    )
    atlas.relations["EQ"] = _relation(atlas, "EQ", (0, 0), [("V",)])
    atlas.relations["NEQ"] = _relation(atlas, "NEQ", (0, 1), [("NEQ",)])
    atlas.relations["EQ3"] = _relation(atlas, "EQ3", (0, 0, 0), [("V",)])
    atlas.relations["NEQ3"] = _relation(atlas, "NEQ3", (0, 1, 2), [("NEQ", "NEQ", "NEQ")])
    return atlas


def equivalence_atlas() -> PatternAtlas:
    """Infinitely many infinite equivalence classes: EQ, SAME and DIFF."""
    atlas = derive_atlas(
        name="equivalence",
        k=2,
        ell=3,
        injective={1: ("V",), 2: ("SAME", "DIFF")},
        act=_symmetric_pairs("V"),
        namer=lambda rgs, base: "EQ",
        forbidden=[_forbid(("SAME", "SAME", "DIFF"), 3)],
        paper_width=(2, 3),
        family="equivalence",
    )
    atlas.relations["E"] = _relation(atlas, "E", (0, 1), [("EQ",), ("SAME",)])
    atlas.relations["N"] = _relation(atlas, "N", (0, 1), [("DIFF",)])
    atlas.relations["EQ"] = _relation(atlas, "EQ", (0, 0), [("V",)])
    atlas.relations["NEQ"] = _relation(atlas, "NEQ", (0, 1), [("SAME",), ("DIFF",)])
    return atlas


# ============================================================================
# Graphs
# ============================================================================


def _graph_atlas(
    name: str, ell: int, forbidden: Sequence[ForbiddenPattern], **kwargs: Any
) -> PatternAtlas:
    atlas = derive_atlas(
        name=name,
        k=2,
        ell=ell,
        injective={1: ("V",), 2: ("E", "N")},
        act=_symmetric_pairs("V"),
        namer=lambda rgs, base: "EQ",
        forbidden=forbidden,
        **kwargs,
    )
    _add_graph_relations(atlas, "E", "N")
    return atlas


def henson_atlas(n: int) -> PatternAtlas:
    """The Henson graph omitting the n-clique.

    Args:
        n: Size of the forbidden clique, at least 3.

    Raises:
        AtlasError: If n < 3.
    """
    if n < 3:
        raise AtlasError(f"Henson graphs need a forbidden clique of size >= 3 (got {n})")
    clique = _forbid(("E",) * len(combinations_of(n, 2)), n)
    return _graph_atlas(
        f"henson:{n}",
        n,
        [clique],
        paper_width=(2, max(3, n)),
        family="henson",
        params={"n": n},
    )


def random_graph_atlas() -> PatternAtlas:
    """The countable random graph: no forbidden patterns."""
    return _graph_atlas("random-graph", 3, [], paper_width=(4, 6), family="random-graph")


def random_graph_fourary_atlas() -> PatternAtlas:
    """Random graph with the four-ary relations R_eq and R_neq.

    ``R_eq(a,b,c,d)`` holds when ab and cd are both edges or both non-edges;
    ``R_neq`` when exactly one of them is an edge.
    """
    atlas = _graph_atlas(
        "random-graph-fourary", 3, [], paper_width=(4, 6), family="random-graph-fourary"
    )
    same, differ = [], []
    for typing in sorted(atlas.all_typings(4)):
        first = atlas.label_of(typing, 4, (0, 1))
        second = atlas.label_of(typing, 4, (2, 3))
        if first == "EQ" or second == "EQ":
            continue
        (same if first == second else differ).append(typing)
    atlas.relations["R_eq"] = _relation(atlas, "R_eq", (0, 1, 2, 3), same)
    atlas.relations["R_neq"] = _relation(atlas, "R_neq", (0, 1, 2, 3), differ)
    return atlas


# ============================================================================
# Stabilized Partitions
# ============================================================================


def _block_size(value: Any) -> int | float:
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinite", "infinity", "∞", "omega"):
            return math.inf
        try:
            value = int(text)
        except ValueError as e:
            raise AtlasError(f"Block size must be 1 or infinite (got {value!r})") from e
    if value is None or value == math.inf:
        return math.inf
    if value != 1:
        raise AtlasError(f"Block size must be 1 or infinite (got {value!r})")
    return 1


def partition_atlas(block_sizes: Sequence[Any]) -> PatternAtlas:
    """Partition of a countable set into singleton and infinite blocks.

    Args:
        block_sizes: One entry per block, 1 or infinite (``inf``/None).

    Returns:
        Atlas with unary labels V1..Vb, pair labels EQi and Nij.

    Raises:
        AtlasError: If there are no blocks or a size is neither 1 nor infinite.
    """
    sizes = [_block_size(v) for v in block_sizes]
    if not sizes:
        raise AtlasError("A partition needs at least one block")
    count = len(sizes)
    sep = "" if count < 10 else "."
    unary = tuple(f"V{i}" for i in range(1, count + 1))
    pairs: dict[Label, tuple[int, int]] = {}
    for i, j in itertools.product(range(1, count + 1), repeat=2):
        pairs[f"N{i}{sep}{j}"] = (i, j)
    by_blocks = {blocks: name for name, blocks in pairs.items()}

    def act(label: Label, p: int, blocks: tuple[int, ...]) -> Label:
        i, j = pairs[label]
        if blocks == (0,):
            return f"V{i}"
        if blocks == (1,):
            return f"V{j}"
        return by_blocks[(j, i)]

    forbidden = [
        _forbid((by_blocks[(i, i)],), 2)
        for i, size in enumerate(sizes, start=1)
        if size == 1
    ]
    spec = ",".join("1" if s == 1 else "inf" for s in sizes)
    atlas = derive_atlas(
        name=f"partition:{spec}",
        k=2,
        ell=3,
        injective={1: unary, 2: tuple(pairs)},
        act=act,
        namer=lambda rgs, base: "EQ" + base[1:],
        forbidden=forbidden,
        paper_width=(4, 6),
        family="partition",
        params={"blocks": ["1" if s == 1 else "inf" for s in sizes]},
    )

    for i in range(1, count + 1):
        atlas.relations[f"V{i}"] = _relation(atlas, f"V{i}", (0,), [(f"V{i}",)])
    atlas.relations["EQ"] = _relation(atlas, "EQ", (0, 0), [(u,) for u in unary])
    atlas.relations["NEQ"] = _relation(atlas, "NEQ", (0, 1), [(n,) for n in pairs])
    atlas.relations["SAME"] = _relation(
        atlas,
        "SAME",
        (0, 1),
        [(f"EQ{i}",) for i in range(1, count + 1)]
        + [(by_blocks[(i, i)],) for i in range(1, count + 1)],
    )
    atlas.relations["DIFF"] = _relation(
        atlas, "DIFF", (0, 1), [(n,) for n, (i, j) in pairs.items() if i != j]
    )
    return atlas


# ============================================================================
# MMSNP Templates
# ============================================================================


# Atom of an injective orbit: symbol and argument positions covering range(p)
LocalAtom = tuple[str, tuple[int, ...]]
# Points of an injective orbit by point label, plus the atoms spanning two or more
Content = tuple[tuple[Label, ...], frozenset[LocalAtom]]

# Largest number of orbits of injective p-tuples an mmsnp atlas may list
MMSNP_ORBIT_CAP = 20000


def _atom_text(symbol: str, args: tuple[int, ...]) -> str:
    if len(args) == 1:
        return symbol
    if len(set(args)) == 1:
        return f"{symbol}({','.join('x' * len(args))})"
    return f"{symbol}({','.join(map(str, args))})"


def _unary_name(color: str, atoms: tuple[str, ...]) -> Label:
    return color if not atoms else f"{color}[{','.join(atoms)}]"


def label_color(label: Label) -> str:
    """Color of an mmsnp point label or of its diagonal."""
    return label.lstrip("=").split(":")[-1].split("[", 1)[0]


def relevant_atoms(
    members: Iterable["ColoredStructure"],
) -> dict[tuple[str, ...], frozenset[LocalAtom]]:
    """Atoms some homomorphic image of a member uses, keyed by point colors.

    An atom is recorded on the colors of its distinct points, in every order.
    No obstruction ever maps onto an atom outside this table, so the template
    holds such atoms everywhere and orbit labels leave them out.
    """
    from ..mmsnp.obstructions import quotients

    found: dict[tuple[str, ...], set[LocalAtom]] = {}
    for member in members:
        for image in quotients(member):
            for symbol, args in image.atoms:
                for order in itertools.permutations(sorted(set(args))):
                    position = {v: i for i, v in enumerate(order)}
                    colors = tuple(image.coloring[v] for v in order)
                    found.setdefault(colors, set()).add(
                        (symbol, tuple(position[a] for a in args))
                    )
    return {colors: frozenset(atoms) for colors, atoms in found.items()}


class _OrbitCatalog:
    """Obstruction-free orbits of injective tuples, one length at a time.

    An orbit of p pairwise distinct points is its content: the point label of
    each position and the relevant atoms spanning at least two positions.
    Contents an obstruction maps into are dropped, so every restriction of a
    listed content is listed as well.
    """

    def __init__(
        self,
        members: tuple["ColoredStructure", ...],
        relevant: dict[tuple[str, ...], frozenset[LocalAtom]],
        cap: int,
    ):
        self.members = members
        self.relevant = relevant
        self.cap = cap
        self.units: dict[Label, tuple[str, frozenset[LocalAtom]]] = {}
        self.unit_by_parts: dict[tuple[str, frozenset[LocalAtom]], Label] = {}
        self.levels: dict[int, dict[Label, Content]] = {}
        self.by_content: dict[Content, Label] = {}

    def colors(self, units: Sequence[Label]) -> tuple[str, ...]:
        return tuple(self.units[u][0] for u in units)

    def is_relevant(self, colors: tuple[str, ...], atom: LocalAtom) -> bool:
        return atom in self.relevant.get(colors, frozenset())

    def structure(self, content: Content) -> "ColoredStructure":
        from ..mmsnp.obstructions import ColoredStructure

        units, atoms = content
        facts = [
            (symbol, tuple(i for _ in args))
            for i, unit in enumerate(units)
            for symbol, args in sorted(self.units[unit][1])
        ]
        facts.extend(sorted(atoms))
        return ColoredStructure(
            vertices=tuple(range(len(units))),
            atoms=tuple(facts),
            coloring={i: self.units[u][0] for i, u in enumerate(units)},
        )

    def obstruction_free(self, content: Content) -> bool:
        from ..mmsnp.obstructions import obstruction_embedding

        return obstruction_embedding(self.members, self.structure(content)) is None

    def _add(self, p: int, name: Label, content: Content) -> None:
        level = self.levels.setdefault(p, {})
        level[name] = content
        self.by_content[content] = name
        if len(level) > self.cap:
            raise AtlasError(
                f"more than {self.cap} orbits of injective {p}-tuples; "
                f"the template is too large to present explicitly"
            )

    def build_units(self, colors: Sequence[str]) -> None:
        for color in colors:
            candidates = sorted(
                self.relevant.get((color,), frozenset()), key=lambda a: (len(a[1]), a[0])
            )
            for size in range(len(candidates) + 1):
                for chosen in itertools.combinations(candidates, size):
                    name = _unary_name(color, tuple(_atom_text(s, a) for s, a in chosen))
                    self.units[name] = (color, frozenset(chosen))
                    if self.obstruction_free(((name,), frozenset())):
                        self.unit_by_parts[(color, frozenset(chosen))] = name
                        self._add(1, name, ((name,), frozenset()))
                    else:
                        del self.units[name]
        if not self.levels.get(1):
            raise AtlasError("every point type is forbidden; the template is empty")

    def restrict(self, content: Content, positions: Sequence[int]) -> Content:
        """Content of the tuple at the given distinct positions, in that order."""
        units, atoms = content
        index = {q: i for i, q in enumerate(positions)}
        kept = frozenset(
            (symbol, tuple(index[a] for a in args))
            for symbol, args in atoms
            if all(a in index for a in args)
        )
        return tuple(units[q] for q in positions), kept

    def build_level(self, p: int) -> None:
        """List the orbits of p-tuples by extending (p-1)-orbits with one point."""
        new = p - 1
        self.levels.setdefault(p, {})
        faces = [
            face
            for m in range(2, p + 1)
            for face in itertools.combinations(range(p), m)
            if new in face
        ]
        for prefix_units, prefix_atoms in list(self.levels[p - 1].values()):
            for unit in list(self.levels[1]):
                units = prefix_units + (unit,)
                colors = self.colors(units)
                options = []
                for face in faces:
                    local = tuple(colors[q] for q in face)
                    options.append(
                        sorted(
                            (symbol, tuple(face[a] for a in args))
                            for symbol, args in self.relevant.get(local, frozenset())
                            if len(set(args)) == len(face)
                        )
                    )
                for atoms in self._choose(units, faces, options, 0, prefix_atoms):
                    content = (units, atoms)
                    if self.obstruction_free(content):
                        self._add(p, self.name(content), content)

    def _choose(
        self,
        units: tuple[Label, ...],
        faces: list[tuple[int, ...]],
        options: list[list[LocalAtom]],
        i: int,
        atoms: frozenset[LocalAtom],
    ) -> Iterator[frozenset[LocalAtom]]:
        if i == len(faces):
            yield atoms
            return
        face, candidates = faces[i], options[i]
        seen = self.by_content
        for size in range(len(candidates) + 1):
            for chosen in itertools.combinations(candidates, size):
                grown = atoms | frozenset(chosen)
                # Smaller faces come first, so the face's restriction is settled
                if len(face) < len(units) and self.restrict((units, grown), face) not in seen:
                    continue
                yield from self._choose(units, faces, options, i + 1, grown)

    def name(self, content: Content) -> Label:
        units, atoms = content
        texts = sorted(f"{s}({','.join(map(str, args))})" for s, args in atoms)
        return f"{'|'.join(units)}|{','.join(texts)}"

    def act(self, label: Label, p: int, blocks: tuple[int, ...]) -> Label:
        return self.by_content[self.restrict(self.levels[p][label], blocks)]

    def holds(self, label: Label, p: int, atom: LocalAtom) -> bool:
        """Whether the template puts an atom on an injective p-tuple's orbit."""
        units, atoms = self.levels[p][label]
        colors = self.colors(units)
        if not self.is_relevant(colors, atom):
            return True
        if p == 1:
            return atom in self.units[units[0]][1]
        return atom in atoms

    def label_order(self) -> dict[Label, frozenset[Label]]:
        """Labels of the same colors whose points and atoms include a label's."""
        order: dict[Label, frozenset[Label]] = {}
        for p, level in sorted(self.levels.items()):
            by_colors: dict[tuple[str, ...], list[Label]] = {}
            for name, (units, _) in level.items():
                by_colors.setdefault(self.colors(units), []).append(name)
            for group in by_colors.values():
                for name in group:
                    units, atoms = level[name]
                    order[name] = frozenset(
                        other
                        for other in group
                        if atoms <= level[other][1]
                        and all(
                            self.units[a][1] <= self.units[b][1]
                            for a, b in zip(units, level[other][0])
                        )
                    )
        return order

    def image_label(
        self, image: "ColoredStructure", vertices: Sequence[Any], units: Sequence[Label]
    ) -> Label | None:
        """Label of the listed distinct image vertices, None when not listed."""
        index = {v: i for i, v in enumerate(vertices)}
        atoms = frozenset(
            (symbol, tuple(index[a] for a in args))
            for symbol, args in image.atoms
            if len(set(args)) > 1 and all(a in index for a in args)
        )
        return self.by_content.get((tuple(units[v] for v in vertices), atoms))

    def image_unit(self, image: "ColoredStructure", vertex: Any) -> Label | None:
        atoms = frozenset(
            (symbol, tuple(0 for _ in args))
            for symbol, args in image.atoms
            if set(args) == {vertex}
        )
        return self.unit_by_parts.get((image.coloring[vertex], atoms))


def mmsnp_atlas(obstructions: "ObstructionSet", *, cap: int = MMSNP_ORBIT_CAP) -> PatternAtlas:
    """Atlas of the template of a precolored obstruction set.

    Labels of injective p-tuples (p <= k) are the obstruction-free colored
    structures on p points, restricted to atoms some homomorphic image of a
    member can use; every other atom holds throughout the template. Atoms with
    repeated arguments belong to the orbit of their distinct arguments.
    Forbidden patterns are the member images on more than k points, matched
    up to additional atoms. The precoloring predicates become relation
    definitions forcing a color.

    Args:
        obstructions: Precolored obstruction set asserted in normal form.
        cap: Largest number of orbits per tuple length.

    Returns:
        Atlas with k = max(2, largest arity) and ell = max(k + 1, largest member).

    Raises:
        AtlasError: If the set is not precolored, lacks the normal-form
            assertion, is malformed, or has more orbits than ``cap``.
    """
    from ..mmsnp.obstructions import (
        ObstructionParseError,
        quotients,
        validate_obstruction_set,
    )

    if not obstructions.precolored:
        raise AtlasError("mmsnp_atlas needs a precolored obstruction set")
    if not obstructions.normal_form:
        raise AtlasError("mmsnp_atlas needs an obstruction set asserted in normal form")
    try:
        validate_obstruction_set(obstructions)
    except ObstructionParseError as e:
        raise AtlasError(f"Malformed obstruction set: {e}") from e

    precolor_symbols = obstructions.precolor_symbols
    p_symbols = set(precolor_symbols.values())
    tau = {s: a for s, a in obstructions.signature.items() if s not in p_symbols}
    members = obstructions.core_members()
    for member in members:
        if any(symbol in p_symbols for symbol, _ in member.atoms):
            raise AtlasError(
                f"member {member.name}: precoloring predicates may only occur in "
                f"the mismatch members"
            )

    k = max([2, *tau.values()])
    ell = max(k + 1, obstructions.max_member_size)
    catalog = _OrbitCatalog(members, relevant_atoms(members), cap)
    catalog.build_units(obstructions.colors)
    for p in range(2, k + 1):
        catalog.build_level(p)

    forbidden: dict[Typing, ForbiddenPattern] = {}
    for member in members:
        for image in quotients(member):
            if image.size <= k:
                continue
            units = [catalog.image_unit(image, v) for v in image.vertices]
            if any(u is None for u in units):
                continue
            # Canonical form: least typing over all vertex orders
            best: Typing | None = None
            for order in itertools.permutations(image.vertices):
                typing = []
                for combo in combinations_of(image.size, k):
                    label = catalog.image_label(
                        image, [order[i] for i in combo], units  # type: ignore[arg-type]
                    )
                    if label is None:
                        break
                    typing.append(label)
                else:
                    if best is None or tuple(typing) < best:
                        best = tuple(typing)
                    continue
                break
            if best is not None:
                forbidden.setdefault(
                    best,
                    ForbiddenPattern(
                        Pattern(tuple(range(image.size)), best), ForbiddenKind.HOMOMORPHISM
                    ),
                )

    def namer(rgs: tuple[int, ...], base: Label) -> Label:
        return f"={base}" if k == 2 else default_namer(rgs, base)

    injective = {p: tuple(level) for p, level in catalog.levels.items()}
    label_order = catalog.label_order()
    atlas = derive_atlas(
        name="mmsnp",
        k=k,
        ell=ell,
        injective=injective,
        act=catalog.act,
        namer=namer,
        forbidden=sorted(forbidden.values(), key=lambda f: (f.size, f.pattern.typing)),
        label_order=label_order,
        paper_width=(k, ell),
        family="mmsnp",
        params={
            "colors": list(obstructions.colors),
            "signature": dict(sorted(obstructions.signature.items())),
        },
    )
    for m in range(2, k + 1):
        for rgs in growth_strings(m):
            p = max(rgs) + 1
            if p < m:
                for base in injective[p]:
                    atlas.label_order[namer(rgs, base)] = frozenset(
                        namer(rgs, other) for other in label_order[base]
                    )

    for symbol, arity in sorted(tau.items()):
        allowed = []
        for rgs in growth_strings(arity):
            p = max(rgs) + 1
            for base in injective[p]:
                if catalog.holds(base, p, (symbol, rgs)):
                    allowed.append((base if p == arity else namer(rgs, base),))
        atlas.relations[symbol] = _relation(atlas, symbol, tuple(range(arity)), allowed)
    for color, symbol in precolor_symbols.items():
        allowed = [(name,) for name, (c, _) in catalog.units.items() if c == color]
        atlas.relations[symbol] = _relation(atlas, symbol, (0,), allowed)

    logger.info(
        "Built mmsnp atlas: k = %d, ell = %d, %s orbits, %d forbidden images",
        k,
        ell,
        "/".join(str(len(catalog.levels[p])) for p in range(1, k + 1)),
        len(atlas.forbidden),
    )
    return atlas

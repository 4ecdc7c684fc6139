"""
The finite color structure of an obstruction set and the Datalog
rewritability decision built on it.

Each relation of the color structure belongs to a shape: an uncolored
structure on a few vertices. A tuple of colors is in the relation exactly
when coloring the shape's vertices with it lets no obstruction map in.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Hashable

from ..algebra.cores import core_of
from ..algebra.polymorphisms import DEFAULT_CAP, find_linked_wnu_pair
from ..algebra.structures import FiniteStructure, OperationTable
from ..logging_config import get_logger
from .obstructions import (
    Atom,
    ColoredStructure,
    MMSNPError,
    ObstructionSet,
    ensure_precolored,
    format_obstruction_set,
    obstruction_embedding,
)

logger = get_logger(__name__)

DATALOG = "datalog"
NOT_DATALOG = "not-datalog"

Shape = tuple[int, tuple[Atom, ...]]


# ============================================================================
# Shapes
# ============================================================================


def _renamed(atoms: tuple[Atom, ...], rename: dict[Hashable, int]) -> tuple[Atom, ...]:
    return tuple(sorted((s, tuple(rename[a] for a in args)) for s, args in atoms))


def canonical_shape(atoms: tuple[Atom, ...]) -> Shape:
    """Vertex count and least atom list over all renamings to 0..m-1."""
    vertices = sorted({a for _, args in atoms for a in args}, key=str)
    best = min(
        _renamed(atoms, {v: i for i, v in enumerate(order)})
        for order in itertools.permutations(vertices)
    )
    return len(vertices), best


def shape_name(shape: Shape) -> str:
    return ";".join(f"{s}({','.join(map(str, args))})" for s, args in shape[1])


def shape_inventory(obstructions: ObstructionSet) -> list[Shape]:
    """Atom subsets of the members up to isomorphism, plus every single atom.

    Single atoms take distinct arguments; loops enter only through members.
    """
    shapes: set[Shape] = set()
    for member in obstructions.core_members():
        atoms = tuple(dict.fromkeys(member.atoms))
        for size in range(1, len(atoms) + 1):
            for subset in itertools.combinations(atoms, size):
                shapes.add(canonical_shape(subset))
    for symbol, arity in obstructions.signature.items():
        shapes.add((arity, ((symbol, tuple(range(arity))),)))
    return sorted(shapes, key=lambda s: (s[0], len(s[1]), s[1]))


def allowed_colorings(obstructions: ObstructionSet, shape: Shape) -> frozenset[tuple[str, ...]]:
    """Color tuples under which the shape receives no obstruction."""
    size, atoms = shape
    allowed = set()
    for colors in itertools.product(obstructions.colors, repeat=size):
        colored = ColoredStructure(
            vertices=tuple(range(size)),
            atoms=atoms,
            coloring=dict(enumerate(colors)),
        )
        if obstruction_embedding(obstructions.members, colored) is None:
            allowed.add(colors)
    return frozenset(allowed)


def color_structure(obstructions: ObstructionSet) -> FiniteStructure:
    """Finite structure on the colors with one relation per shape.

    Args:
        obstructions: Precolored set asserted in normal form.

    Raises:
        MMSNPError: If the set is not precolored or lacks the normal-form
            assertion.
    """
    if not obstructions.precolored:
        raise MMSNPError("color_structure needs a precolored obstruction set")
    if not obstructions.normal_form:
        raise MMSNPError("color_structure needs an obstruction set asserted in normal form")

    relations: dict[str, frozenset[tuple[str, ...]]] = {}
    arities: dict[str, int] = {}
    for shape in shape_inventory(obstructions):
        name = shape_name(shape)
        relations[name] = allowed_colorings(obstructions, shape)
        arities[name] = shape[0]

    # Colors no bare vertex may take
    vertex = allowed_colorings(obstructions, (1, ()))
    if len(vertex) < len(obstructions.colors):
        relations["vertex"] = vertex
        arities["vertex"] = 1

    structure = FiniteStructure(obstructions.colors, relations, arities, name="colors")
    logger.info(
        "Color structure: %d colors, %d shape relations",
        structure.size,
        len(structure.relations),
    )
    return structure


# ============================================================================
# Datalog rewritability
# ============================================================================


@dataclass(slots=True, kw_only=True)
class RewritabilityVerdict:
    """Outcome of :func:`datalog_rewritable`.

    Attributes:
        verdict: ``datalog`` or ``not-datalog``.
        certificate: Linked pair (w3, w4) on the core of the color structure.
        transcript: Steps taken, ending with the failed search for
            ``not-datalog``.
        provenance: Precoloration and color-structure artifacts.
    """

    verdict: str
    certificate: tuple[OperationTable, OperationTable] | None = None
    transcript: list[str] = field(default_factory=list)
    provenance: dict[str, Any] = field(default_factory=dict)

    @property
    def is_datalog(self) -> bool:
        return self.verdict == DATALOG

    def log_summary(self) -> None:
        logger.info("Datalog rewritability: %s", self.verdict)
        for step in self.transcript:
            logger.debug("  %s", step)

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict,
            "certificate": (
                None
                if self.certificate is None
                else {"w3": self.certificate[0].to_dict(), "w4": self.certificate[1].to_dict()}
            ),
            "transcript": list(self.transcript),
            "provenance": self.provenance,
        }


def datalog_rewritable(
    obstructions: ObstructionSet, *, cap: int = DEFAULT_CAP
) -> RewritabilityVerdict:
    """Decide whether the complement of FPP(F) is expressible in Datalog.

    Sets that are not precolored are precolored first; the verdict is the
    same for both.

    Args:
        obstructions: Obstruction set asserted in normal form.
        cap: State cap of the linked-pair search.

    Raises:
        MMSNPError: If the normal-form assertion is missing.
    """
    if not obstructions.normal_form:
        raise MMSNPError(
            "refusing to decide rewritability: the obstruction set is not asserted to be "
            "in normal form (use the normal-form statement or --assert-normal-form)"
        )
    transcript: list[str] = []
    precolored = ensure_precolored(obstructions)
    if precolored is not obstructions:
        added = len(precolored.members) - len(obstructions.members)
        transcript.append(f"precolored: {added} mismatch members added")

    structure = color_structure(precolored)
    transcript.append(
        f"color structure: {structure.size} colors, {len(structure.relations)} relations"
    )
    core = core_of(structure)
    transcript.append(f"core: {len(core.core.domain)} of {structure.size} colors")

    pair = find_linked_wnu_pair(core.expanded, cap=cap)
    provenance = {
        "precoloration": format_obstruction_set(precolored),
        "color_structure": structure.summary(),
        "core": core.to_dict(),
    }
    if pair is None:
        transcript.append("search for linked WNU pair (w3, w4) exhausted")
        result = RewritabilityVerdict(
            verdict=NOT_DATALOG, transcript=transcript, provenance=provenance
        )
    else:
        transcript.append("linked WNU pair (w3, w4) found")
        result = RewritabilityVerdict(
            verdict=DATALOG, certificate=pair, transcript=transcript, provenance=provenance
        )
    result.log_summary()
    return result

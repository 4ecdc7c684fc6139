"""
Lifting orbit-instance solutions to witnesses, and checking witnesses.

A solution h assigns a k-label to every k-subset of the variables. Variables
whose pair label is diagonal are identified; h must descend to the classes,
and the typing it induces on class representatives is the witness structure.
The witness is accepted once it is realizable and satisfies every source
constraint through the quotient map.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Hashable, Mapping

from networkx.utils import UnionFind

from ..atlas.core import (
    Pattern,
    PatternAtlas,
    Typing,
    coherence_problem,
    combinations_of,
    violation,
)
from ..engine.instance import Instance
from ..logging_config import get_logger

logger = get_logger(__name__)

Point = Hashable
Solution = Mapping[tuple[Point, ...], str]

LIFT_STEPS = (
    "precondition",
    "coherence",
    "equivalence",
    "descent",
    "realizability",
    "constraints",
    "coloring",
)


class LiftError(Exception):
    """Raised when a lifting verification step fails."""

    def __init__(self, step: str, message: str):
        super().__init__(f"{step}: {message}")
        self.step = step
        self.message = message


@dataclass(slots=True, kw_only=True)
class Witness:
    """A finite structure on identification classes solving an instance.

    Attributes:
        quotient: Class index of every variable.
        classes: Variables of each class; classes are ordered by their least
            variable.
        structure: Pattern on the class indices 0..m-1.
        atlas_name: Name of the atlas the pattern belongs to.
        family: Family of that atlas.
        materialization: Concrete assignment for builtin families.
    """

    quotient: dict[Point, int]
    classes: tuple[tuple[Point, ...], ...]
    structure: Pattern
    atlas_name: str
    family: str
    materialization: dict[str, Any] | None = None

    @property
    def size(self) -> int:
        return len(self.classes)

    def class_label(self, atlas: PatternAtlas, variables: tuple[Point, ...]) -> str:
        """Label the witness gives a tuple of variables."""
        positions = tuple(self.quotient[v] for v in variables)
        return atlas.label_of(self.structure.typing, self.size, positions)

    def pattern_on(self, atlas: PatternAtlas, scope: tuple[Point, ...]) -> Typing:
        """Typing the witness induces on a canonically ordered scope."""
        n = len(scope)
        if n < atlas.k:
            return (self.class_label(atlas, scope),)
        return tuple(
            self.class_label(atlas, tuple(scope[i] for i in combo))
            for combo in combinations_of(n, atlas.k)
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "atlas": self.atlas_name,
            "family": self.family,
            "classes": [list(c) for c in self.classes],
            "structure": list(self.structure.typing),
            "materialization": self.materialization,
        }


def _solution_typing(instance: Instance, h: Solution) -> Typing:
    atlas = instance.atlas
    variables = instance.variables
    n = len(variables)
    if n >= atlas.k:
        try:
            return tuple(
                h[tuple(variables[i] for i in combo)] for combo in combinations_of(n, atlas.k)
            )
        except KeyError as e:
            raise LiftError("precondition", f"solution misses the subset {e.args[0]}") from e
    for constraint in instance.constraints:
        if constraint.scope == variables:
            typings = constraint.sorted_typings(atlas)
            if typings:
                return typings[0]
    raise LiftError("precondition", "no constraint covers the variables")


def lift_solution(instance: Instance, h: Solution) -> Witness:
    """Lift a solution of the orbit instance to a verified witness.

    Args:
        instance: Instance stamped (k', ell')-minimal with k' >= k and
            ell' >= max(k+1, ell).
        h: Label of every k-subset of the variables.

    Returns:
        The witness.

    Raises:
        LiftError: Naming the step that failed.
    """
    atlas = instance.atlas
    k = atlas.k
    stamp = instance.minimality_level
    if stamp is None or stamp[0] < k or stamp[1] < atlas.lift_ell:
        raise LiftError(
            "precondition",
            f"instance must be ({k},{atlas.lift_ell})-minimal (stamped {stamp})",
        )
    variables = instance.variables
    n = len(variables)
    typing = _solution_typing(instance, h)
    problem = coherence_problem(atlas, typing, n) if n else None
    if problem:
        raise LiftError("coherence", problem)

    # Identification classes
    merged = UnionFind(range(n))
    related: set[tuple[int, int]] = set()
    for i, j in itertools.combinations(range(n), 2):
        if k >= 2:
            same = atlas.is_diagonal(atlas.label_of(typing, n, (i, j)))
        else:
            same = typing[i] == typing[j]
        if same:
            merged.union(i, j)
            related.add((i, j))
    groups = sorted((sorted(g) for g in merged.to_sets()), key=lambda g: g[0])
    for group in groups:
        for i, j in itertools.combinations(group, 2):
            if (i, j) not in related:
                raise LiftError(
                    "equivalence",
                    f"identification is not transitive on {variables[i]!r} and {variables[j]!r}",
                )
    class_of = {i: c for c, group in enumerate(groups) for i in group}
    representatives = tuple(group[0] for group in groups)
    m = len(groups)

    if m >= k:
        structure_typing = tuple(
            atlas.label_of(typing, n, tuple(representatives[c] for c in combo))
            for combo in combinations_of(m, k)
        )
    else:
        structure_typing = (atlas.label_of(typing, n, representatives),) if n else ()

    # h descends to the classes
    for index, combo in enumerate(combinations_of(n, k)):
        expected = typing[index]
        derived = atlas.label_of(structure_typing, m, tuple(class_of[i] for i in combo))
        if expected != derived:
            raise LiftError(
                "descent",
                f"{tuple(variables[i] for i in combo)} is typed {expected!r} but its "
                f"classes give {derived!r}",
            )

    if m:
        problem = coherence_problem(atlas, structure_typing, m) or violation(
            atlas, structure_typing, m
        )
        if problem:
            raise LiftError("realizability", problem)

    witness = Witness(
        quotient={variables[i]: class_of[i] for i in range(n)},
        classes=tuple(tuple(variables[i] for i in group) for group in groups),
        structure=Pattern(tuple(range(m)), structure_typing),
        atlas_name=atlas.name,
        family=atlas.family,
    )
    for constraint in instance.explicit_constraints():
        allowed = constraint.allowed or frozenset()
        if witness.pattern_on(atlas, constraint.scope) not in allowed:
            raise LiftError("constraints", f"witness violates {constraint.describe()}")
    logger.info("Lifted solution to a witness with %d classes", m)
    return witness


# ============================================================================
# Independent verification
# ============================================================================


@dataclass(slots=True, kw_only=True)
class WitnessCheck:
    """Result of checking a witness against an instance."""

    ok: bool
    problems: list[str] = field(default_factory=list)

    def log_summary(self) -> None:
        if self.ok:
            logger.info("Witness verified")
        else:
            logger.info("Witness rejected: %s", "; ".join(self.problems[:5]))

    def to_dict(self) -> dict[str, Any]:
        return {"ok": self.ok, "problems": self.problems}


def verify_witness(instance: Instance, witness: Witness) -> WitnessCheck:
    """Check a witness from scratch: realizability, quotient and constraints."""
    atlas = instance.atlas
    problems: list[str] = []
    if witness.atlas_name != atlas.name:
        problems.append(f"witness is for atlas {witness.atlas_name}, instance uses {atlas.name}")
    missing = [v for v in instance.variables if v not in witness.quotient]
    if missing:
        problems.append(f"variables {missing} have no class")
    m = witness.size
    if any(not 0 <= c < m for c in witness.quotient.values()):
        problems.append("quotient maps outside the classes")
    for c, members in enumerate(witness.classes):
        if any(witness.quotient.get(v) != c for v in members):
            problems.append(f"class {c} disagrees with the quotient map")
    if problems:
        return WitnessCheck(ok=False, problems=problems)

    typing = witness.structure.typing
    if m:
        problem = coherence_problem(atlas, typing, m) or violation(atlas, typing, m)
        if problem:
            problems.append(f"witness structure is not realizable: {problem}")
        elif atlas.k >= 2:
            for a, b in itertools.combinations(range(m), 2):
                if atlas.is_diagonal(atlas.label_of(typing, m, (a, b))):
                    problems.append(f"classes {a} and {b} are identified")
    if not problems:
        for constraint in instance.explicit_constraints():
            allowed = constraint.allowed or frozenset()
            if witness.pattern_on(atlas, constraint.scope) not in allowed:
                problems.append(f"violates {constraint.describe()}")
    check = WitnessCheck(ok=not problems, problems=problems)
    check.log_summary()
    return check


def witness_from_dict(data: Mapping[str, Any]) -> Witness:
    """Decode the body of a witness document."""
    classes = tuple(tuple(c) for c in data["classes"])
    quotient = {v: i for i, members in enumerate(classes) for v in members}
    typing = tuple(data["structure"])
    return Witness(
        quotient=quotient,
        classes=classes,
        structure=Pattern(tuple(range(len(classes))), typing),
        atlas_name=data["atlas"],
        family=data.get("family", "custom"),
        materialization=data.get("materialization"),
    )


# ============================================================================
# Colorings
# ============================================================================


def lift_coloring(
    vertices: tuple[Point, ...],
    atoms: tuple[tuple[str, tuple[Point, ...]], ...],
    h: Mapping[tuple[Point, ...], str],
    obstructions: Any,
) -> dict[Point, str]:
    """Color an input structure by a level-1 solution and check it.

    Each vertex takes the color of the point label h gives it; the colored
    input must receive no homomorphism from any obstruction.

    Args:
        vertices: Input vertices.
        atoms: Input atoms ``(symbol, args)``.
        h: Point label of every 1-subset ``(v,)``.
        obstructions: Obstruction set the coloring must avoid.

    Raises:
        LiftError: At step ``coloring`` when an obstruction maps in.
    """
    from ..atlas.builtins import label_color
    from ..mmsnp.obstructions import ColoredStructure, obstruction_embedding

    try:
        coloring = {v: label_color(h[(v,)]) for v in vertices}
    except KeyError as e:
        raise LiftError("precondition", f"solution misses the vertex {e.args[0]}") from e
    colored = ColoredStructure(name="input", vertices=vertices, atoms=atoms, coloring=coloring)
    found = obstruction_embedding(obstructions.members, colored)
    if found is not None:
        raise LiftError("coloring", f"obstruction maps into the coloring: {found}")
    logger.info("Lifted level-1 solution to a coloring of %d vertices", len(vertices))
    return coloring

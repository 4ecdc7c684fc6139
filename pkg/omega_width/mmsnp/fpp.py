"""
Solving forbidden-pattern problems through the generic pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Hashable

from ..algebra.structures import FiniteStructure
from ..atlas.builtins import label_color, mmsnp_atlas
from ..engine.instance import Instance, is_trivial
from ..engine.minimality import establish_minimality
from ..engine.search import search_solution
from ..logging_config import get_logger
from ..reduction.lifting import lift_coloring
from ..reduction.orbit import build_orbit_instance
from ..reduction.pipeline import CompletenessError, SolveResult, Verdict, resolve_levels, solve
from .obstructions import (
    Atom,
    MMSNPError,
    ObstructionSet,
    ensure_precolored,
    obstruction_embedding,
    structure_from_atoms,
)

logger = get_logger(__name__)

ROUTES = ("lift", "coloring")


@dataclass(slots=True, kw_only=True)
class FPPResult:
    """Outcome of :func:`fpp_solve`.

    Attributes:
        verdict: SAT, UNSAT or UNKNOWN.
        route: ``lift`` (witness of the template) or ``coloring`` (level-1 colors).
        coloring: Color of every input vertex for SAT.
        checked: Whether the coloring passed the obstruction-freeness check.
        solve_result: Pipeline result for the ``lift`` route.
        stats: Counters.
    """

    verdict: Verdict
    route: str
    coloring: dict[Hashable, str] | None = None
    checked: bool = False
    solve_result: SolveResult | None = None
    stats: dict[str, Any] = field(default_factory=dict)

    def log_summary(self) -> None:
        logger.info(
            "FPP verdict %s via %s%s",
            self.verdict.value,
            self.route,
            " (coloring checked)" if self.checked else "",
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "route": self.route,
            "coloring": (
                None
                if self.coloring is None
                else {str(v): c for v, c in self.coloring.items()}
            ),
            "checked": self.checked,
            "stats": self.stats,
        }


def input_atoms(obstructions: ObstructionSet, structure: FiniteStructure) -> tuple[Atom, ...]:
    """Atoms of an input structure, checked against the signature."""
    atoms: list[Atom] = []
    for symbol in structure.relation_names():
        arity = obstructions.signature.get(symbol)
        if arity is None:
            raise MMSNPError(f"input relation {symbol} is not in the signature")
        if arity != structure.arities[symbol]:
            raise MMSNPError(
                f"input relation {symbol} has arity {structure.arities[symbol]}, expected {arity}"
            )
        atoms.extend((symbol, args) for args in sorted(structure.relations[symbol], key=repr))
    return tuple(atoms)


def check_coloring(
    obstructions: ObstructionSet,
    structure: FiniteStructure,
    coloring: dict[Hashable, str],
) -> str | None:
    """Name of an obstruction mapping into the colored input, or None."""
    colored = structure_from_atoms(
        structure.domain, input_atoms(obstructions, structure), coloring, name="input"
    )
    found = obstruction_embedding(obstructions.members, colored)
    return None if found is None else found[0]


def fpp_solve(
    obstructions: ObstructionSet,
    structure: FiniteStructure,
    mode: str = "ts",
    *,
    certificate: Any = None,
    route: str = "lift",
    levels: tuple[int, int] | None = None,
    unsafe: bool = False,
) -> FPPResult:
    """Decide whether an input structure has an obstruction-free coloring.

    SAT comes with a checked coloring and UNSAT with a trivial minimal
    instance; both agree with exhaustive coloring. An exhausted orbit search
    without a certificate yields UNKNOWN: for sets that are not
    Datalog-rewritable a non-trivial minimal instance may have no coloring
    (K5 under the monochromatic-triangle set).

    Args:
        obstructions: Obstruction set asserted in normal form; precolored
            here if needed.
        structure: Input over the signature of the set.
        mode: Parameter mode of the pipeline.
        certificate: Bounded-width certificate of the color structure.
        route: ``lift`` or ``coloring``.
        levels: Explicit minimality levels.
        unsafe: Allow levels beyond the capability bound.

    Raises:
        MMSNPError: For unknown routes, missing assertions or foreign input
            relations, or a coloring that fails the independent check.
    """
    if route not in ROUTES:
        raise MMSNPError(f"unknown route {route!r} (known: {', '.join(ROUTES)})")
    if not obstructions.normal_form:
        raise MMSNPError("fpp_solve needs an obstruction set asserted in normal form")
    precolored = ensure_precolored(obstructions)
    atlas = mmsnp_atlas(precolored)
    atoms = input_atoms(precolored, structure)
    instance = Instance.from_applications(atlas, structure.domain, atoms)

    if route == "lift":
        solved = solve(instance, mode, levels=levels, certificate=certificate, unsafe=unsafe)
        coloring = None
        if solved.witness is not None:
            witness = solved.witness
            coloring = {
                v: label_color(witness.class_label(atlas, (v,))) for v in structure.domain
            }
        result = FPPResult(
            verdict=solved.verdict,
            route=route,
            coloring=coloring,
            solve_result=solved,
            stats=solved.stats,
        )
    else:
        k2, l2 = resolve_levels(atlas, mode, levels)
        minimized = establish_minimality(instance, k2, l2, unsafe=unsafe)
        if is_trivial(minimized):
            result = FPPResult(verdict=Verdict.UNSAT, route=route)
        else:
            orbit = build_orbit_instance(minimized, 1)
            h = search_solution(orbit.finite)
            if h is None:
                if certificate is not None:
                    raise CompletenessError(
                        "non-trivial minimal instance has no level-1 solution although the "
                        "color structure carries a certificate"
                    )
                result = FPPResult(verdict=Verdict.UNKNOWN, route=route, stats=orbit.summary())
            else:
                coloring = lift_coloring(structure.domain, atoms, h, precolored)
                result = FPPResult(
                    verdict=Verdict.SAT, route=route, coloring=coloring, stats=orbit.summary()
                )

    if result.coloring is not None:
        offending = check_coloring(precolored, structure, result.coloring)
        if offending is not None:
            raise MMSNPError(f"coloring admits obstruction {offending}")
        result.checked = True
    result.log_summary()
    return result

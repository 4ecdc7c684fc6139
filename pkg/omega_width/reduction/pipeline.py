"""
End-to-end solving: minimize, reduce to the orbit instance, search, lift.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from ..atlas.core import PatternAtlas
from ..engine.instance import Instance, is_trivial
from ..engine.minimality import CapabilityError, PropagationStats, establish_minimality
from ..engine.search import SearchStats, search_solution
from ..logging_config import get_logger
from .lifting import LiftError, Witness, lift_solution
from .materialize import materialize_witness
from .orbit import OrbitInstance, build_orbit_instance

logger = get_logger(__name__)

MODES = ("wnu", "ts", "family")


class Verdict(str, Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


class CompletenessError(Exception):
    """Raised when a certified template leaves a non-trivial minimal instance unsolved."""

    pass


@dataclass(slots=True, kw_only=True)
class SolveResult:
    """Outcome of :func:`solve`.

    Attributes:
        verdict: SAT, UNSAT or UNKNOWN.
        mode: Parameter mode used.
        levels: Minimality levels used.
        witness: Verified witness for SAT.
        minimized: The minimal instance.
        orbit: The orbit instance searched, if any.
        certificate: Description of the bounded-width certificate, if given.
        stats: Counters and timings.
    """

    verdict: Verdict
    mode: str
    levels: tuple[int, int]
    witness: Witness | None = None
    minimized: Instance | None = None
    orbit: OrbitInstance | None = None
    certificate: str | None = None
    stats: dict[str, Any] = field(default_factory=dict)

    @property
    def satisfiable(self) -> bool:
        return self.verdict is Verdict.SAT

    def log_summary(self) -> None:
        logger.info(
            "Verdict %s (mode %s, levels %s)%s",
            self.verdict.value,
            self.mode,
            self.levels,
            f", witness with {self.witness.size} classes" if self.witness else "",
        )

    def to_dict(self, timings: bool = False) -> dict[str, Any]:
        stats = dict(self.stats)
        if not timings:
            stats.pop("seconds", None)
        return {
            "verdict": self.verdict.value,
            "mode": self.mode,
            "levels": list(self.levels),
            "certificate": self.certificate,
            "witness": self.witness.to_dict() if self.witness else None,
            "stats": stats,
        }


def resolve_levels(
    atlas: PatternAtlas, mode: str, levels: tuple[int, int] | None = None
) -> tuple[int, int]:
    """Minimality levels for a mode, or the explicit override."""
    if levels is not None:
        return (int(levels[0]), int(levels[1]))
    if mode == "wnu":
        return atlas.wnu_levels
    if mode == "ts":
        return atlas.ts_levels
    if mode == "family":
        if atlas.paper_width is None:
            logger.warning("%s declares no family width; using wnu levels", atlas.name)
            return atlas.wnu_levels
        return atlas.paper_width
    raise CapabilityError(f"unknown mode {mode!r} (known: {', '.join(MODES)})")


def solve(
    instance: Instance,
    mode: str = "wnu",
    *,
    levels: tuple[int, int] | None = None,
    certificate: Any = None,
    unsafe: bool = False,
    node_cap: int | None = None,
    materialize: bool = True,
) -> SolveResult:
    """Decide an instance through minimization and the orbit instance.

    Args:
        instance: Instance to solve.
        mode: ``wnu``, ``ts`` or ``family``.
        levels: Explicit (k', ell') overriding the mode.
        certificate: Bounded-width certificate of the template; with one, a
            failed finite search is an error instead of UNKNOWN.
        unsafe: Allow levels beyond the capability bound.
        node_cap: Node cap of the finite search.
        materialize: Attach a concrete assignment for builtin families.

    Raises:
        CapabilityError: If the levels are out of range.
        LiftError: If the levels are too low to lift or lifting fails.
        CompletenessError: If a certified template leaves the search empty.
    """
    atlas = instance.atlas
    k2, l2 = resolve_levels(atlas, mode, levels)
    if k2 < atlas.k or l2 < atlas.lift_ell:
        raise LiftError(
            "precondition",
            f"levels ({k2},{l2}) are below ({atlas.k},{atlas.lift_ell}) needed to lift solutions",
        )
    started = time.perf_counter()
    propagation = PropagationStats()
    minimized = establish_minimality(instance, k2, l2, unsafe=unsafe, stats=propagation)
    stats: dict[str, Any] = {"propagation": propagation.to_dict()}
    described = None if certificate is None else str(getattr(certificate, "name", certificate))

    if is_trivial(minimized):
        stats["seconds"] = time.perf_counter() - started
        result = SolveResult(
            verdict=Verdict.UNSAT,
            mode=mode,
            levels=(k2, l2),
            minimized=minimized,
            certificate=described,
            stats=stats,
        )
        result.log_summary()
        return result

    orbit = build_orbit_instance(minimized)
    search_stats = SearchStats()
    h = search_solution(orbit.finite, node_cap=node_cap, stats=search_stats)
    stats["search"] = search_stats.to_dict()
    stats["orbit"] = orbit.summary()
    if h is None:
        if certificate is not None:
            raise CompletenessError(
                f"non-trivial ({k2},{l2})-minimal instance has no orbit solution although "
                f"{atlas.name} carries a certificate"
            )
        stats["seconds"] = time.perf_counter() - started
        result = SolveResult(
            verdict=Verdict.UNKNOWN,
            mode=mode,
            levels=(k2, l2),
            minimized=minimized,
            orbit=orbit,
            stats=stats,
        )
        result.log_summary()
        return result

    witness = lift_solution(minimized, h)
    if materialize:
        witness.materialization = materialize_witness(witness, atlas)
    stats["seconds"] = time.perf_counter() - started
    result = SolveResult(
        verdict=Verdict.SAT,
        mode=mode,
        levels=(k2, l2),
        witness=witness,
        minimized=minimized,
        orbit=orbit,
        certificate=described,
        stats=stats,
    )
    result.log_summary()
    return result

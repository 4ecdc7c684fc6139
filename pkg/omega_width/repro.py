"""
The acceptance table: exact width fixtures, agreement with oracles,
minimality transfer, finite algebra decisions, the loop harness and MMSNP
verdicts, run with one seed.

Reports hold no timings, so equal seeds give byte-identical reports.
"""

from __future__ import annotations

import random
from pathlib import Path
from typing import Any, Callable

from .algebra.cores import core_of
from .algebra.cyclic import certificate_generators, loop_lemma_harness
from .algebra.polymorphisms import (
    find_linked_wnu_pair,
    find_polymorphism,
    preserves,
    wnu_all_arities,
)
from .atlas.builtins import (
    equality_atlas,
    equivalence_atlas,
    henson_atlas,
    random_graph_fourary_atlas,
)
from .atlas.core import PatternAtlas
from .atlas.orbit import orbit_structure
from .engine.generate import gen_random_instance
from .engine.instance import Instance, is_trivial
from .engine.minimality import establish_minimality
from .fixtures import (
    EXPECTED_REWRITABILITY,
    complete_graph,
    fourary_instance_i,
    fourary_instance_j,
    henson_triangle,
    neq_structure,
    obstruction_set,
    semilattice_generators,
    small_structures,
    z2_linear_structure,
)
from .logging_config import get_logger
from .mmsnp.colors import datalog_rewritable
from .mmsnp.obstructions import precolor
from .oracles import brute_force_solutions, equality_oracle, graph_oracle
from .reduction.lifting import verify_witness
from .reduction.orbit import build_orbit_instance, check_minimality_transfer
from .reduction.pipeline import Verdict, solve
from .report import render_report
from .utils import envelope, save_document

logger = get_logger(__name__)

Criterion = dict[str, Any]

FULL_COUNTS = {"equality": 500, "henson": 200, "transfer": 200, "harness": 1000, "properties": 60}
QUICK_COUNTS = {"equality": 40, "henson": 20, "transfer": 16, "harness": 100, "properties": 12}


def _criterion(number: int, title: str, failures: list[str], **details: Any) -> Criterion:
    return {
        "id": number,
        "title": title,
        "ok": not failures,
        "details": details,
        "failures": failures[:20],
    }


def _random_instance(
    atlas: PatternAtlas,
    rng: random.Random,
    sizes: tuple[int, int],
    relations: tuple[str, ...],
) -> Instance:
    n_vars = rng.randint(*sizes)
    n_constraints = rng.randint(1, 2 * n_vars)
    return gen_random_instance(atlas, n_vars, n_constraints, rng.randrange(2**31), relations)


# ============================================================================
# Criteria
# ============================================================================


def exact_width_fixture(quick: bool = False) -> Criterion:
    failures = []
    i = fourary_instance_i()
    if is_trivial(establish_minimality(i, 3, 6)):
        failures.append("I is trivial after (3,6)-minimization")
    if not is_trivial(establish_minimality(i, 4, 6)):
        failures.append("I is not trivial after (4,6)-minimization")
    details: dict[str, Any] = {"instance_i": "checked"}
    if quick:
        details["instance_j"] = "skipped in quick runs"
    else:
        j = fourary_instance_j()
        if is_trivial(establish_minimality(j, 4, 5)):
            failures.append("J is trivial after (4,5)-minimization")
        if not is_trivial(establish_minimality(j, 4, 6)):
            failures.append("J is not trivial after (4,6)-minimization")
        details["instance_j"] = "checked"
    return _criterion(1, "Exact width (4,6) of the four-ary template", failures, **details)


def equality_agreement(count: int, seed: int) -> Criterion:
    atlas = equality_atlas()
    rng = random.Random(seed)
    failures = []
    sat = 0
    for trial in range(count):
        instance = _random_instance(atlas, rng, (2, 10), ("EQ", "NEQ"))
        expected = equality_oracle(instance.variables, instance.applications)
        result = solve(instance, "family")
        if result.verdict is Verdict.UNKNOWN or result.satisfiable != expected:
            failures.append(f"trial {trial}: pipeline {result.verdict.value}, oracle {expected}")
            continue
        if result.witness is not None:
            sat += 1
            check = verify_witness(instance, result.witness)
            if not check.ok:
                failures.append(f"trial {trial}: witness rejected: {check.problems[0]}")
    return _criterion(
        2, "Equality templates at (2,3) agree with union-find", failures, trials=count, sat=sat
    )


def henson_agreement(count: int, seed: int) -> Criterion:
    atlas = henson_atlas(3)
    failures = []
    if solve(henson_triangle(3), "family").verdict is not Verdict.UNSAT:
        failures.append("E-triangle is not UNSAT")
    rng = random.Random(seed)
    sat = 0
    for trial in range(count):
        instance = _random_instance(atlas, rng, (2, 8), ("E", "N", "NEQ"))
        expected = graph_oracle(instance.variables, instance.applications, clique=3) is not None
        result = solve(instance, "family")
        if result.verdict is Verdict.UNKNOWN or result.satisfiable != expected:
            failures.append(f"trial {trial}: pipeline {result.verdict.value}, oracle {expected}")
        elif result.witness is not None:
            sat += 1
            if not verify_witness(instance, result.witness).ok:
                failures.append(f"trial {trial}: witness rejected")
    return _criterion(
        3, "Henson H_3 agrees with brute force", failures, trials=count, sat=sat
    )


TRANSFER_FAMILIES: list[tuple[Callable[[], PatternAtlas], tuple[str, ...], tuple[int, int]]] = [
    (equality_atlas, ("EQ", "NEQ"), (3, 6)),
    (equivalence_atlas, ("E", "N"), (3, 6)),
    (lambda: henson_atlas(3), ("E", "N"), (3, 6)),
    (random_graph_fourary_atlas, ("R_eq", "R_neq", "E", "N"), (4, 5)),
]


def minimality_transfer(count: int, seed: int) -> Criterion:
    rng = random.Random(seed)
    failures = []
    checked = trivial = 0
    atlases = [(build(), relations, sizes) for build, relations, sizes in TRANSFER_FAMILIES]
    for trial in range(count):
        atlas, relations, sizes = atlases[trial % len(atlases)]
        instance = _random_instance(atlas, rng, sizes, relations)
        minimized = establish_minimality(instance, 2 * atlas.k, 3 * atlas.k)
        if is_trivial(minimized):
            trivial += 1
            continue
        checked += 1
        check = check_minimality_transfer(minimized, 2, 3)
        if not check:
            failures.append(f"trial {trial} over {atlas.name}: {check.reason}")
    return _criterion(
        4,
        "(2k,3k)-minimal instances give (2,3)-minimal orbit instances",
        failures,
        checked=checked,
        trivial=trivial,
    )


def finite_algebra_decisions() -> Criterion:
    failures = []
    if find_linked_wnu_pair(core_of(neq_structure()).expanded) is None:
        failures.append("({0,1}, !=) has no linked pair")
    if find_linked_wnu_pair(core_of(complete_graph(3)).expanded) is not None:
        failures.append("K3 has a linked pair")
    z2 = core_of(z2_linear_structure()).expanded
    if find_polymorphism(z2, "wnu", 3) is None:
        failures.append("Z2 linear structure has no WNU of arity 3")
    if find_linked_wnu_pair(z2) is not None:
        failures.append("Z2 linear structure has a linked pair")
    agreements = 0
    for structure in small_structures():
        expanded = core_of(structure).expanded
        linked = find_linked_wnu_pair(expanded) is not None
        direct = wnu_all_arities(expanded)
        if linked != direct:
            failures.append(f"{structure.name}: linked pair {linked}, direct WNUs {direct}")
        else:
            agreements += 1
    return _criterion(5, "Finite algebra decisions", failures, cross_checked=agreements)


def loop_harness(count: int, seed: int) -> Criterion:
    failures = []
    details = {}
    generator_sets = {
        "k2-clone": certificate_generators(complete_graph(2)),
        "semilattice": semilattice_generators(),
    }
    for name, generators in generator_sets.items():
        report = loop_lemma_harness(None, count, seed, generators=generators)
        details[f"{name}_linked"] = report.linked
        details[f"{name}_skipped"] = report.skipped
        failures.extend(
            f"{name}: linked closure without loop from {rows}" for rows in report.counterexamples
        )
    return _criterion(6, "Linked cyclic closures contain loops", failures, trials=count, **details)


def mmsnp_verdicts() -> Criterion:
    failures = []
    details = {}
    for name, expected in EXPECTED_REWRITABILITY.items():
        obstructions = obstruction_set(name)
        verdict = datalog_rewritable(obstructions)
        transferred = datalog_rewritable(precolor(obstructions))
        details[name] = verdict.verdict
        if verdict.verdict != expected:
            failures.append(f"{name}: {verdict.verdict}, expected {expected}")
        if transferred.verdict != verdict.verdict:
            failures.append(f"{name}: verdict changes under precoloring")
        if verdict.is_datalog and verdict.certificate is None:
            failures.append(f"{name}: datalog verdict without certificate")
    return _criterion(7, "MMSNP Datalog rewritability", failures, **details)


def _allowed_by_scope(instance: Instance) -> dict[tuple, frozenset]:
    return {c.scope: c.typings(instance.atlas) for c in instance.constraints}


def property_suites(count: int, seed: int) -> Criterion:
    """Minimization properties on small instances and preservation on orbit constraints."""
    rng = random.Random(seed)
    failures = []
    families = [
        (equality_atlas(), ("EQ", "NEQ")),
        (equivalence_atlas(), ("E", "N")),
        (henson_atlas(3), ("E", "N", "NEQ")),
    ]
    certificates = {}
    for atlas, _ in families:
        pair = find_linked_wnu_pair(orbit_structure(atlas).with_singletons())
        certificates[atlas.name] = list(pair) if pair else []
    preserved = 0
    for trial in range(count):
        atlas, relations = families[trial % len(families)]
        instance = _random_instance(atlas, rng, (2, 5), relations)
        weak = establish_minimality(instance, 2, 3)
        strong = establish_minimality(instance, 2, 4)
        if establish_minimality(weak, 2, 3).constraints != weak.constraints:
            failures.append(f"trial {trial}: minimization is not idempotent")
        weak_sets = _allowed_by_scope(weak)
        for scope, allowed in _allowed_by_scope(strong).items():
            if scope in weak_sets and not allowed <= weak_sets[scope]:
                failures.append(f"trial {trial}: stronger levels allow more on {scope}")
                break
        position = {v: i for i, v in enumerate(weak.variables)}
        n = len(weak.variables)
        for solution in brute_force_solutions(instance):
            lost = [
                c.scope
                for c in weak.constraints
                if atlas.restrict_typing(solution, n, tuple(position[v] for v in c.scope))
                not in c.typings(atlas)
            ]
            if lost:
                failures.append(f"trial {trial}: minimization removed a solution on {lost[0]}")
                break
        if is_trivial(weak):
            continue
        orbit = build_orbit_instance(weak)
        for operation in certificates[atlas.name]:
            for constraint in orbit.finite.constraints:
                if constraint.tuples and not preserves(operation, constraint.tuples):
                    failures.append(
                        f"trial {trial}: {operation.name} breaks orbit constraint "
                        f"{constraint.origin}"
                    )
                    break
            else:
                preserved += 1
    return _criterion(
        8,
        "Minimization properties and preservation on orbit constraints",
        failures,
        trials=count,
        preserved=preserved,
        certified=sorted(name for name, ops in certificates.items() if ops),
    )


# ============================================================================
# Runner
# ============================================================================


def run_acceptance(
    seed: int = 42,
    quick: bool = False,
    on_criterion: Callable[[Criterion], None] | None = None,
) -> dict[str, Any]:
    """Run every criterion and return the report document.

    Args:
        seed: Seed of every random choice.
        quick: Scale trial counts down.
        on_criterion: Called with each criterion as it completes.
    """
    counts = QUICK_COUNTS if quick else FULL_COUNTS
    steps: list[Callable[[], Criterion]] = [
        lambda: exact_width_fixture(quick),
        lambda: equality_agreement(counts["equality"], seed),
        lambda: henson_agreement(counts["henson"], seed),
        lambda: minimality_transfer(counts["transfer"], seed),
        finite_algebra_decisions,
        lambda: loop_harness(counts["harness"], seed),
        mmsnp_verdicts,
        lambda: property_suites(counts["properties"], seed),
    ]
    criteria = []
    for step in steps:
        criterion = step()
        logger.info(
            "Criterion %d %s: %s",
            criterion["id"],
            criterion["title"],
            "ok" if criterion["ok"] else "FAILED",
        )
        criteria.append(criterion)
        if on_criterion is not None:
            on_criterion(criterion)
    return envelope(
        "report",
        {
            "seed": seed,
            "quick": quick,
            "ok": all(c["ok"] for c in criteria),
            "criteria": criteria,
        },
    )


def write_report(report: dict[str, Any], output: str | Path) -> tuple[Path, Path]:
    """Write the report as canonical JSON and as Markdown next to it.

    Returns:
        Paths of the JSON and Markdown files.
    """
    json_path = save_document(report, Path(output))
    markdown_path = json_path.with_suffix(".md")
    markdown_path.write_text(render_report(report), encoding="utf-8")
    logger.info("Acceptance report written to %s and %s", json_path, markdown_path)
    return json_path, markdown_path

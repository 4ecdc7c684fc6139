"""
Cyclic relations: closure under a clone, linkedness and loops, and a
randomized harness checking that linked invariant relations contain loops.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import networkx as nx

from ..engine.search import SearchError
from ..logging_config import get_logger
from .polymorphisms import DEFAULT_CAP, find_linked_wnu_pair, is_idempotent, is_wnu
from .structures import FiniteStructure, OperationTable, Row, StructureError, Value

logger = get_logger(__name__)


def shifts(row: Row) -> Iterable[Row]:
    for i in range(len(row)):
        yield row[i:] + row[:i]


@dataclass(frozen=True, slots=True)
class CyclicRelation:
    """A relation closed under cyclic shifts of its coordinates."""

    arity: int
    tuples: frozenset[Row]

    def __post_init__(self) -> None:
        for row in self.tuples:
            if len(row) != self.arity:
                raise StructureError(f"tuple {row} does not have arity {self.arity}")
            if row[1:] + row[:1] not in self.tuples:
                raise StructureError(f"relation is not closed under shifting {row}")

    @classmethod
    def from_tuples(
        cls, rows: Iterable[Sequence[Value]], arity: int | None = None
    ) -> "CyclicRelation":
        """Shift closure of the given rows."""
        closed = {shifted for row in rows for shifted in shifts(tuple(row))}
        if arity is None:
            if not closed:
                raise StructureError("the arity of an empty relation must be given")
            arity = len(next(iter(closed)))
        return cls(arity, frozenset(closed))

    @property
    def support(self) -> frozenset[Value]:
        """Values occurring in the relation; every coordinate projects onto it."""
        return frozenset(v for row in self.tuples for v in row)

    def __len__(self) -> int:
        return len(self.tuples)


def linkedness_congruence(relation: CyclicRelation) -> list[frozenset[Value]]:
    """Blocks of the linkedness equivalence on the support.

    Two values are related when they are joined by a path in the bipartite
    graph linking each prefix of length arity - 1 to the last entries that
    complete it to a tuple of the relation.
    """
    graph = nx.Graph()
    for row in relation.tuples:
        graph.add_edge(("prefix", row[:-1]), ("value", row[-1]))
    blocks = []
    for component in nx.connected_components(graph):
        values = frozenset(node[1] for node in component if node[0] == "value")
        if values:
            blocks.append(values)
    return sorted(blocks, key=lambda b: sorted(map(repr, b)))


def is_linked(relation: CyclicRelation) -> bool:
    return bool(relation.tuples) and len(linkedness_congruence(relation)) == 1


def find_loop(relation: CyclicRelation) -> Row | None:
    """The constant tuple of the least value that has one, or None."""
    for value in sorted(relation.support, key=repr):
        loop = (value,) * relation.arity
        if loop in relation.tuples:
            return loop
    return None


def close_cyclic(
    seed: Iterable[Sequence[Value]],
    generators: Sequence[OperationTable],
    *,
    arity: int | None = None,
    cap: int = DEFAULT_CAP,
) -> CyclicRelation:
    """Least relation containing the seed closed under shifts and the generators.

    New tuples are produced semi-naively: every application uses at least one
    tuple found in the previous round.

    Raises:
        StructureError: If a generator is not idempotent.
        SearchError: If the relation grows past the cap.
    """
    for generator in generators:
        if not is_idempotent(generator):
            raise StructureError(f"generator {generator.name or generator.arity} is not idempotent")
    known = set(CyclicRelation.from_tuples(seed, arity).tuples)
    delta = set(known)
    while delta:
        old = known - delta
        fresh: set[Row] = set()
        for generator in generators:
            n = generator.arity
            pools_all = list(known)
            pools_old = list(old)
            pools_delta = list(delta)
            for first_new in range(n):
                pools = [pools_old] * first_new + [pools_delta] + [pools_all] * (n - first_new - 1)
                for chosen in itertools.product(*pools):
                    row = tuple(generator(*column) for column in zip(*chosen))
                    if row not in known and row not in fresh:
                        for shifted in shifts(row):
                            fresh.add(shifted)
                        if len(known) + len(fresh) > cap:
                            raise SearchError(f"cyclic closure exceeds {cap} tuples")
        fresh -= known
        known |= fresh
        delta = fresh
    closed = CyclicRelation.from_tuples(known, arity)
    logger.debug("Cyclic closure: %d tuples", len(closed))
    return closed


# ============================================================================
# Loop harness
# ============================================================================


@dataclass(slots=True, kw_only=True)
class HarnessReport:
    """Outcome of a randomized loop harness run."""

    trials: int
    seed: int
    generators: list[str]
    linked: int = 0
    loops: int = 0
    skipped: int = 0
    by_arity: dict[int, int] = field(default_factory=dict)
    counterexamples: list[list[Row]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def log_summary(self) -> None:
        logger.info(
            "Loop harness: %d trials, %d linked, %d loops, %d skipped, %d counterexamples",
            self.trials,
            self.linked,
            self.loops,
            self.skipped,
            len(self.counterexamples),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "generators": self.generators,
            "linked": self.linked,
            "loops": self.loops,
            "skipped": self.skipped,
            "by_arity": {str(k): v for k, v in sorted(self.by_arity.items())},
            "counterexamples": [[list(r) for r in rows] for rows in self.counterexamples],
        }


def certificate_generators(structure: FiniteStructure) -> list[OperationTable]:
    """Idempotent generators certifying a non-trivial clone for the structure."""
    from .cores import core_of

    pair = find_linked_wnu_pair(core_of(structure).expanded)
    if pair is None:
        raise StructureError(f"{structure.name or 'structure'} has no linked WNU pair")
    return list(pair)


def loop_lemma_harness(
    structure: FiniteStructure | None,
    trials: int,
    seed: int,
    *,
    generators: Sequence[OperationTable] | None = None,
    arities: Sequence[int] = (2, 3, 4),
    seed_size: int = 3,
    cap: int = DEFAULT_CAP,
) -> HarnessReport:
    """Close random seeds and check that every linked closure has a loop.

    Args:
        structure: Structure the generators come from when none are given.
        trials: Number of random seeds.
        seed: Random seed of the run.
        generators: Idempotent operations generating the clone.
        arities: Arities of the random cyclic relations.
        seed_size: Largest number of random tuples per seed.
        cap: Largest closure size; bigger trials are skipped.

    Raises:
        StructureError: If no generator is a WNU.
    """
    if generators is None:
        if structure is None:
            raise StructureError("give a structure or generators")
        generators = certificate_generators(structure)
    if not any(is_wnu(g) for g in generators):
        raise StructureError("the generators include no WNU operation")
    domain = generators[0].domain
    report = HarnessReport(
        trials=trials,
        seed=seed,
        generators=[g.name or f"op/{g.arity}" for g in generators],
    )
    rng = random.Random(seed)
    for _ in range(trials):
        m = rng.choice(list(arities))
        count = rng.randint(1, seed_size)
        rows = [tuple(rng.choice(domain) for _ in range(m)) for _ in range(count)]
        try:
            closed = close_cyclic(rows, generators, arity=m, cap=cap)
        except SearchError:
            report.skipped += 1
            logger.warning("Skipped harness trial with seed rows %s: closure cap", rows)
            continue
        if not is_linked(closed):
            continue
        report.linked += 1
        report.by_arity[m] = report.by_arity.get(m, 0) + 1
        if find_loop(closed) is None:
            report.counterexamples.append(rows)
            logger.error("Linked closure without a loop from seed rows %s", rows)
        else:
            report.loops += 1
    report.log_summary()
    return report

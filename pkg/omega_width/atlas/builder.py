"""
Derive complete subtype tables from injective orbit labels.

Most templates are easiest to describe by their injective orbits alone: the
labels of tuples with pairwise distinct entries, plus how such a label changes
when the tuple is restricted or permuted. A general tuple is then an
identification pattern (restricted growth string) together with the injective
label of its distinct entries, and every subtype table follows mechanically.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterator, Mapping, Sequence

from .core import AtlasError, ForbiddenPattern, Label, PatternAtlas, SubKey

# act(label, p, blocks) -> label of the tuple (t[blocks[0]], ...) for an
# injective p-tuple t carrying label; blocks is injective.
InjectiveAction = Callable[[Label, int, tuple[int, ...]], Label]
# namer(growth_string, injective_label) -> display name of a non-injective label
LabelNamer = Callable[[tuple[int, ...], Label], Label]


def growth_strings(length: int) -> Iterator[tuple[int, ...]]:
    """Restricted growth strings of a given length, lexicographically."""

    def extend(prefix: tuple[int, ...], top: int) -> Iterator[tuple[int, ...]]:
        if len(prefix) == length:
            yield prefix
            return
        for value in range(top + 2):
            yield from extend(prefix + (value,), max(top, value))

    if length == 0:
        yield ()
        return
    yield from extend((0,), 0)


def default_namer(rgs: tuple[int, ...], base: Label) -> Label:
    return "=" + "".join(str(x) for x in rgs) + ":" + base


def derive_atlas(
    *,
    name: str,
    k: int,
    ell: int,
    injective: Mapping[int, Sequence[Label]],
    act: InjectiveAction,
    namer: LabelNamer = default_namer,
    forbidden: Sequence[ForbiddenPattern] = (),
    label_order: Mapping[Label, frozenset[Label]] | None = None,
    paper_width: tuple[int, int] | None = None,
    family: str = "custom",
    params: dict | None = None,
) -> PatternAtlas:
    """Build an atlas from injective labels and their action.

    Args:
        name: Atlas name.
        k: Homogeneity arity.
        ell: Boundedness arity.
        injective: Injective labels for p = 1..k.
        act: Action of injective index maps on injective labels.
        namer: Naming scheme for labels of tuples with repeated entries.
        forbidden: Forbidden patterns (already expressed in full labels).
        label_order: Optional matching order for homomorphism patterns.
        paper_width: Claimed relational width.
        family: Family name.
        params: Family parameters.

    Returns:
        Atlas with every label and subtype table filled in.

    Raises:
        AtlasError: If some p has no injective labels or names collide.
    """
    for p in range(1, k + 1):
        if not injective.get(p):
            raise AtlasError(f"{name}: no injective labels for {p}-tuples")

    names: dict[tuple[tuple[int, ...], Label], Label] = {}
    full: dict[int, list[tuple[tuple[int, ...], Label]]] = {}
    for m in range(1, k + 1):
        entries = []
        for rgs in growth_strings(m):
            p = max(rgs) + 1
            for base in injective[p]:
                entries.append((rgs, base))
                names[(rgs, base)] = base if p == m else namer(rgs, base)
        full[m] = entries

    labels = {m: tuple(names[e] for e in full[m]) for m in full}
    for m, labs in labels.items():
        if len(set(labs)) != len(labs):
            raise AtlasError(f"{name}: label names collide for {m}-tuples")

    sub: dict[SubKey, dict[Label, Label]] = {}
    for source in range(1, k + 1):
        for length in range(1, k + 1):
            for u in itertools.product(range(source), repeat=length):
                table: dict[Label, Label] = {}
                for rgs, base in full[source]:
                    p = max(rgs) + 1
                    picked = tuple(rgs[i] for i in u)
                    blocks = tuple(dict.fromkeys(picked))
                    new_rgs = tuple(blocks.index(x) for x in picked)
                    new_base = base if blocks == tuple(range(p)) else act(base, p, blocks)
                    table[names[(rgs, base)]] = names[(new_rgs, new_base)]
                sub[(source, u)] = table

    return PatternAtlas(
        name=name,
        k=k,
        ell=ell,
        labels=labels,
        sub=sub,
        forbidden=tuple(forbidden),
        label_order=dict(label_order or {}),
        paper_width=paper_width,
        family=family,
        params=dict(params or {}),
    )

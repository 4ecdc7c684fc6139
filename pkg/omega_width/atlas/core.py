"""
Pattern calculus for finitely presented templates.

A template is presented through orbit labels for tuples of length at most k,
subtype tables describing how a label changes when its tuple is rearranged,
restricted or has entries repeated, and a finite list of forbidden patterns
of size at most ell. A pattern types every k-subset of a finite point set
(in canonical order); it is realizable when it is coherent, its identified
points behave like equal elements, and no forbidden pattern embeds into it.

Typings are handled positionally: the points of a pattern are numbered
0..n-1 in canonical order and a typing lists one label per k-subset in
``itertools.combinations`` order. Point sets smaller than k carry a single
label from ``labels[n]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any, Hashable, Iterable, Iterator, Mapping, Sequence

from ..logging_config import get_logger

logger = get_logger(__name__)

Label = str
Typing = tuple[Label, ...]
IndexMap = tuple[int, ...]
SubKey = tuple[int, IndexMap]
Point = Hashable


# ============================================================================
# Exceptions
# ============================================================================


class AtlasError(Exception):
    """Raised when an atlas is malformed or a family cannot be built."""

    pass


class PatternError(Exception):
    """Raised when a pattern violates a coherence rule."""

    pass


# ============================================================================
# Point helpers
# ============================================================================


def point_key(point: Point) -> tuple[int, Any]:
    """Sort key giving the canonical order on externally supplied points.

    Integers sort numerically and before every other identifier, which sort
    lexicographically by their string form.
    """
    if isinstance(point, int) and not isinstance(point, bool):
        return (0, point)
    return (1, str(point))


def canonical_points(points: Iterable[Point]) -> tuple[Point, ...]:
    """Deduplicate and sort points canonically."""
    return tuple(sorted(set(points), key=point_key))


@lru_cache(maxsize=None)
def combinations_of(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All k-subsets of range(n) in lexicographic order."""
    return tuple(itertools.combinations(range(n), k))


@lru_cache(maxsize=None)
def combination_index(n: int, k: int) -> Mapping[tuple[int, ...], int]:
    """Position of each k-subset of range(n) inside a typing."""
    return {combo: i for i, combo in enumerate(combinations_of(n, k))}


def typing_length(n: int, k: int) -> int:
    """Number of labels in a typing of n points."""
    return len(combinations_of(n, k)) if n >= k else 1


def subsets_containing(
    n: int, size: int, required: Sequence[int]
) -> Iterator[tuple[int, ...]]:
    """Sorted subsets of range(n) of the given size that contain ``required``."""
    required = tuple(sorted(set(required)))
    if len(required) > size or size > n:
        return
    others = [p for p in range(n) if p not in required]
    for extra in itertools.combinations(others, size - len(required)):
        yield tuple(sorted(required + extra))


# ============================================================================
# Patterns
# ============================================================================


class ForbiddenKind(str, Enum):
    """How a forbidden pattern is matched against a candidate."""

    SUBSTRUCTURE = "substructure"
    HOMOMORPHISM = "homomorphism"


@dataclass(frozen=True, slots=True)
class Pattern:
    """An atomic type on a finite, canonically ordered point set.

    Attributes:
        points: Points in canonical order.
        typing: One label per k-subset of positions, or a single label when
            there are fewer than k points.
    """

    points: tuple[Point, ...]
    typing: Typing

    @property
    def size(self) -> int:
        return len(self.points)

    @classmethod
    def on(cls, points: Iterable[Point], typing: Sequence[Label]) -> "Pattern":
        """Build a pattern, putting the points in canonical order first.

        The typing must already be listed for the canonical order.
        """
        ordered = canonical_points(points)
        return cls(ordered, tuple(typing))

    def to_dict(self) -> dict[str, Any]:
        return {"points": list(self.points), "typing": list(self.typing)}


@dataclass(frozen=True, slots=True)
class ForbiddenPattern:
    """A forbidden pattern together with its matching discipline."""

    pattern: Pattern
    kind: ForbiddenKind = ForbiddenKind.SUBSTRUCTURE

    @property
    def size(self) -> int:
        return self.pattern.size


@dataclass(frozen=True, slots=True)
class RelationDef:
    """A named template relation given by its allowed patterns.

    Attributes:
        name: Relation symbol.
        arity: Number of argument slots.
        partition: Block index of every slot as a restricted growth string;
            slots in one block always carry equal values.
        allowed: Typings of the allowed patterns on the blocks.
    """

    name: str
    arity: int
    partition: tuple[int, ...]
    allowed: frozenset[Typing]

    @property
    def blocks(self) -> int:
        return max(self.partition) + 1 if self.partition else 0


# ============================================================================
# Pattern Atlas
# ============================================================================


@dataclass(slots=True, kw_only=True, eq=False)
class PatternAtlas:
    """Finite presentation of a k-homogeneous, ell-bounded template.

    Attributes:
        name: Display name, e.g. ``henson:3``.
        k: Homogeneity arity.
        ell: Boundedness arity.
        labels: Orbit labels for m-tuples, m = 1..k (non-injective tuples
            included).
        sub: Subtype tables keyed by ``(m', u)``; ``sub[(m', u)][L]`` is the
            label of ``(t[u[0]], ..., t[u[m-1]])`` for an m'-tuple t of label L.
        forbidden: Forbidden patterns of size at most ell.
        relations: Named relation definitions.
        label_order: For homomorphism-forbidden matching, the labels each
            label may be matched against (reflexive); absent labels match
            only themselves.
        paper_width: Relational width claimed for the family, if any.
        family: Builtin family name or ``custom``.
        params: Family parameters, kept for export.
        diagonal_labels: Labels of pairs with equal entries; computed from
            the doubling table when not given.
    """

    name: str
    k: int
    ell: int
    labels: dict[int, tuple[Label, ...]]
    sub: dict[SubKey, dict[Label, Label]]
    forbidden: tuple[ForbiddenPattern, ...] = ()
    relations: dict[str, RelationDef] = field(default_factory=dict)
    label_order: dict[Label, frozenset[Label]] = field(default_factory=dict)
    paper_width: tuple[int, int] | None = None
    family: str = "custom"
    params: dict[str, Any] = field(default_factory=dict)
    diagonal_labels: frozenset[Label] | None = None

    _label_sets: dict[int, frozenset[Label]] = field(init=False, repr=False)
    _plans: dict[tuple[int, tuple[int, ...]], tuple[int, Any]] = field(
        init=False, repr=False
    )
    _all_typings: dict[int, frozenset[Typing]] = field(init=False, repr=False)
    _extension_plans: dict[int, Any] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.k < 1:
            raise AtlasError(f"k must be positive (got {self.k})")
        if self.ell < self.k:
            raise AtlasError(f"ell must be at least k (got k={self.k}, ell={self.ell})")
        missing = [m for m in range(1, self.k + 1) if not self.labels.get(m)]
        if missing:
            raise AtlasError(f"No labels declared for tuple lengths {missing}")

        self._label_sets = {m: frozenset(labs) for m, labs in self.labels.items()}
        self._plans = {}
        self._all_typings = {}
        self._extension_plans = {}

        if self.diagonal_labels is None:
            self.diagonal_labels = self.doubling_image()

    # ------------------------------------------------------------------
    # Derived parameters
    # ------------------------------------------------------------------

    @property
    def capability_bound(self) -> int:
        """Largest ell' the engine accepts without the unsafe override."""
        return max(3 * self.k, self.ell)

    @property
    def wnu_levels(self) -> tuple[int, int]:
        return (2 * self.k, max(3 * self.k, self.ell))

    @property
    def ts_levels(self) -> tuple[int, int]:
        return (self.k, max(self.k + 1, self.ell))

    @property
    def lift_ell(self) -> int:
        """Smallest ell' at which orbit-instance solutions lift."""
        return max(self.k + 1, self.ell)

    def label_set(self, m: int) -> frozenset[Label]:
        return self._label_sets.get(m, frozenset())

    def doubling_image(self) -> frozenset[Label]:
        """Image of ``labels[1]`` under the doubling map, empty when k = 1."""
        if self.k < 2:
            return frozenset()
        table = self.sub.get((1, (0, 0)), {})
        return frozenset(table[lab] for lab in self.labels[1] if lab in table)

    def is_diagonal(self, label: Label) -> bool:
        return label in self.diagonal_labels  # type: ignore[operator]

    def up(self, label: Label) -> frozenset[Label]:
        """Labels a homomorphism-forbidden label matches."""
        found = self.label_order.get(label)
        return found if found is not None else frozenset((label,))

    # ------------------------------------------------------------------
    # Label lookup
    # ------------------------------------------------------------------

    def _plan(self, n: int, positions: tuple[int, ...]) -> tuple[int, Any]:
        key = (n, positions)
        plan = self._plans.get(key)
        if plan is not None:
            return plan

        k = self.k
        m = len(positions)
        if m == 0 or m > k:
            raise PatternError(f"Cannot label a tuple of length {m} (k = {k})")
        if any(p < 0 or p >= n for p in positions):
            raise PatternError(f"Positions {positions} out of range for {n} points")

        if n < k:
            table = None if positions == tuple(range(n)) else self.sub[(n, positions)]
            plan = (0, table)
        else:
            distinct = sorted(set(positions))
            if len(distinct) < k:
                chosen = set(distinct)
                extra = [p for p in range(n) if p not in chosen][: k - len(distinct)]
                base = tuple(sorted(distinct + extra))
            else:
                base = tuple(distinct)
            index = combination_index(n, k)[base]
            u = tuple(base.index(p) for p in positions)
            table = None if u == tuple(range(k)) else self.sub[(k, u)]
            plan = (index, table)

        self._plans[key] = plan
        return plan

    def label_of(
        self, typing: Sequence[Label], n: int, positions: tuple[int, ...]
    ) -> Label:
        """Label of an arbitrary tuple of at most k positions of a typing.

        Args:
            typing: Typing of n points.
            n: Number of points.
            positions: Tuple of positions; may repeat and be in any order.

        Returns:
            The label the subtype tables derive for that tuple.
        """
        index, table = self._plan(n, positions)
        label = typing[index]
        return label if table is None else table[label]

    def restriction_indices(
        self, n: int, subset: tuple[int, ...]
    ) -> tuple[int, ...] | None:
        """Typing indices that restrict to a sorted subset of >= k points."""
        if len(subset) < self.k:
            return None
        key = (n, ("restrict",) + subset)
        plan = self._plans.get(key)  # type: ignore[arg-type]
        if plan is None:
            index = combination_index(n, self.k)
            plan = (
                0,
                tuple(index[combo] for combo in itertools.combinations(subset, self.k)),
            )
            self._plans[key] = plan  # type: ignore[index]
        return plan[1]

    def restrict_typing(
        self, typing: Sequence[Label], n: int, subset: tuple[int, ...]
    ) -> Typing:
        """Typing induced on a sorted subset of positions."""
        indices = self.restriction_indices(n, subset)
        if indices is None:
            return (self.label_of(typing, n, subset),)
        return tuple(typing[i] for i in indices)

    # ------------------------------------------------------------------
    # Cached enumerations
    # ------------------------------------------------------------------

    def all_typings(self, n: int) -> frozenset[Typing]:
        """All realizable typings of n points (cached)."""
        cached = self._all_typings.get(n)
        if cached is None:
            cached = frozenset(enumerate_typings(self, n))
            self._all_typings[n] = cached
            logger.debug("%s: %d realizable patterns on %d points", self.name, len(cached), n)
        return cached

    def summary(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "family": self.family,
            "k": self.k,
            "ell": self.ell,
            "labels": {m: len(labs) for m, labs in self.labels.items()},
            "forbidden": len(self.forbidden),
            "relations": sorted(self.relations),
            "paper_width": self.paper_width,
        }


# ============================================================================
# Coherence and realizability
# ============================================================================


def coherence_problem(atlas: PatternAtlas, typing: Sequence[Label], n: int) -> str | None:
    """Describe the first coherence rule a typing violates, or None."""
    k = atlas.k
    if n < 1:
        return "pattern has no points"
    if n < k:
        if len(typing) != 1:
            return f"typing of {n} points must be a single label"
        if typing[0] not in atlas.label_set(n):
            return f"label {typing[0]!r} is not a label for {n}-tuples"
        return None

    expected = typing_length(n, k)
    if len(typing) != expected:
        return f"typing has {len(typing)} labels, expected {expected}"
    labels_k = atlas.label_set(k)
    for combo, label in zip(combinations_of(n, k), typing):
        if label not in labels_k:
            return f"label {label!r} on points {combo} is not a label for {k}-tuples"
    if k == 1:
        return None

    # Restriction coherence: every (k-1)-face gets one label
    seen: dict[tuple[int, ...], Label] = {}
    for combo, label in zip(combinations_of(n, k), typing):
        for drop in range(k):
            face = combo[:drop] + combo[drop + 1 :]
            u = tuple(i for i in range(k) if i != drop)
            derived = atlas.sub[(k, u)][label]
            previous = seen.setdefault(face, derived)
            if previous != derived:
                return (
                    f"restriction coherence: points {face} typed {previous!r} "
                    f"and {derived!r}"
                )
    return None


def check_pattern(atlas: PatternAtlas, pattern: Pattern) -> None:
    """Raise PatternError when a pattern is incoherent."""
    if len(set(pattern.points)) != len(pattern.points):
        raise PatternError(f"pattern points are not distinct: {pattern.points}")
    problem = coherence_problem(atlas, pattern.typing, pattern.size)
    if problem:
        raise PatternError(problem)


def _congruence_problem(
    atlas: PatternAtlas, typing: Sequence[Label], n: int, must: tuple[int, ...]
) -> str | None:
    diagonal = atlas.diagonal_labels
    label_of = atlas.label_of
    k = atlas.k

    def identified(a: int, b: int) -> bool:
        return label_of(typing, n, (a, b)) in diagonal  # type: ignore[operator]

    for a, b, c in subsets_containing(n, 3, must):
        if identified(a, b) + identified(a, c) + identified(b, c) == 2:
            return f"identification is not transitive on points {(a, b, c)}"

    if n <= k:
        return None
    for group in subsets_containing(n, k + 1, must):
        for y in group:
            rest = tuple(p for p in group if p != y)
            base = label_of(typing, n, rest)
            for pos, x in enumerate(rest):
                if not identified(x, y):
                    continue
                swapped = rest[:pos] + (y,) + rest[pos + 1 :]
                if label_of(typing, n, swapped) != base:
                    return (
                        f"points {x} and {y} are identified but type {rest} "
                        f"differently"
                    )
    return None


def find_embedding(
    atlas: PatternAtlas,
    entry: ForbiddenPattern,
    typing: Sequence[Label],
    n: int,
    must: tuple[int, ...] = (),
) -> tuple[int, ...] | None:
    """Injective placement of a forbidden pattern into a typing.

    Args:
        atlas: Atlas both typings belong to.
        entry: Forbidden pattern and matching discipline.
        typing: Typing of the candidate.
        n: Number of candidate points.
        must: Candidate positions the image has to cover.

    Returns:
        Image positions of the forbidden pattern's points, or None.
    """
    pattern = entry.pattern
    s = pattern.size
    k = atlas.k
    if s > n or len(set(must)) > s:
        return None

    exact = entry.kind is ForbiddenKind.SUBSTRUCTURE
    checks: list[list[tuple[tuple[int, ...], Label]]] = [[] for _ in range(s)]
    if s >= k:
        for combo, label in zip(combinations_of(s, k), pattern.typing):
            checks[combo[-1]].append((combo, label))
    else:
        checks[s - 1].append((tuple(range(s)), pattern.typing[0]))

    must_set = set(must)
    image: list[int] = [0] * s
    used: set[int] = set()

    def matches(f_label: Label, p_label: Label) -> bool:
        return p_label == f_label if exact else p_label in atlas.up(f_label)

    def extend(t: int) -> bool:
        if t == s:
            return True
        remaining = s - t - 1
        for q in range(n):
            if q in used:
                continue
            if len(must_set - used - {q}) > remaining:
                continue
            image[t] = q
            if all(
                matches(f_label, atlas.label_of(typing, n, tuple(image[i] for i in combo)))
                for combo, f_label in checks[t]
            ):
                used.add(q)
                if extend(t + 1):
                    return True
                used.discard(q)
        return False

    return tuple(image) if extend(0) else None


def violation(
    atlas: PatternAtlas,
    typing: Sequence[Label],
    n: int,
    must: tuple[int, ...] = (),
) -> str | None:
    """First realizability violation of a coherent typing, or None.

    Only violations whose witnessing points include every position in
    ``must`` are reported; enumeration uses this to check each new point once.
    """
    must = tuple(sorted(set(must)))
    if atlas.k >= 2 and atlas.diagonal_labels and n >= 2:
        problem = _congruence_problem(atlas, typing, n, must)
        if problem:
            return problem
    for entry in atlas.forbidden:
        image = find_embedding(atlas, entry, typing, n, must)
        if image is not None:
            return (
                f"forbidden {entry.kind.value} pattern {list(entry.pattern.typing)} "
                f"embeds at positions {image}"
            )
    return None


def realizable(atlas: PatternAtlas, pattern: Pattern) -> bool:
    """Whether a pattern is realizable in the template.

    Raises:
        PatternError: If the pattern is incoherent.
    """
    check_pattern(atlas, pattern)
    return violation(atlas, pattern.typing, pattern.size) is None


def realizability_problem(atlas: PatternAtlas, pattern: Pattern) -> str | None:
    """Reason a pattern is not realizable, None when it is."""
    problem = coherence_problem(atlas, pattern.typing, pattern.size)
    if problem:
        return problem
    return violation(atlas, pattern.typing, pattern.size)


def restrict_pattern(
    atlas: PatternAtlas, pattern: Pattern, subset: Iterable[Point]
) -> Pattern:
    """Pattern induced on a nonempty subset of the points."""
    wanted = set(subset)
    if not wanted:
        raise PatternError("cannot restrict a pattern to the empty set")
    unknown = wanted.difference(pattern.points)
    if unknown:
        raise PatternError(f"points {sorted(map(str, unknown))} are not in the pattern")
    positions = tuple(i for i, p in enumerate(pattern.points) if p in wanted)
    points = tuple(pattern.points[i] for i in positions)
    return Pattern(points, atlas.restrict_typing(pattern.typing, pattern.size, positions))


# ============================================================================
# Enumeration
# ============================================================================


DomainMap = Mapping[tuple[int, ...], frozenset[Typing] | set[Typing]]


@dataclass(slots=True)
class _NewSubset:
    """One k-subset containing the new point, in assignment order."""

    index: int
    faces: tuple[tuple[tuple[int, ...], IndexMap], ...]
    boundary: int | None


def _extension_plan(atlas: PatternAtlas, j: int) -> tuple[tuple[int, ...], list[_NewSubset]]:
    cached = atlas._extension_plans.get(j)
    if cached is not None:
        return cached

    k = atlas.k
    new_index = combination_index(j + 1, k)
    old_slots = tuple(new_index[combo] for combo in combinations_of(j, k))

    # Colex order on the old part so every prefix of old points completes in turn
    olds = sorted(itertools.combinations(range(j), k - 1), key=lambda s: s[::-1])
    steps: list[_NewSubset] = []
    for pos, s in enumerate(olds):
        combo = s + (j,)
        faces = []
        if k >= 2:
            for drop in range(k):
                face = combo[:drop] + combo[drop + 1 :]
                faces.append((face, tuple(i for i in range(k) if i != drop)))
        boundary = None
        if k == 1:
            boundary = j - 1
        elif s == tuple(range(s[-1] - k + 2, s[-1] + 1)):
            boundary = s[-1]
        steps.append(_NewSubset(new_index[combo], tuple(faces), boundary))
        if k == 1:
            break

    plan = (old_slots, steps)
    atlas._extension_plans[j] = plan
    return plan


def _group_domains(
    atlas: PatternAtlas, domains: DomainMap | None
) -> dict[tuple[int, int], list[tuple[tuple[int, ...], frozenset[Typing] | set[Typing]]]]:
    """Bucket domain keys by (newest point, boundary at which they complete)."""
    groups: dict[tuple[int, int], list] = {}
    if not domains:
        return groups
    k = atlas.k
    for key, allowed in domains.items():
        key = tuple(key)
        top = key[-1]
        if top < k:
            slot = (top, -2)  # checked on the base typing
        elif k == 1:
            slot = (top, top - 1)
        else:
            second = key[-2] if len(key) >= 2 else -1
            slot = (top, max(second, k - 2))
        groups.setdefault(slot, []).append((key, allowed))
    return groups


def _domains_hold(
    atlas: PatternAtlas,
    typing: Sequence[Label],
    n: int,
    entries: Iterable[tuple[tuple[int, ...], frozenset[Typing] | set[Typing]]],
) -> bool:
    for key, allowed in entries:
        if atlas.restrict_typing(typing, n, key) not in allowed:
            return False
    return True


def enumerate_typings(
    atlas: PatternAtlas, n: int, domains: DomainMap | None = None
) -> Iterator[Typing]:
    """Yield every realizable typing of n points exactly once.

    The search adds one point at a time and assigns labels to the k-subsets
    containing it, pruning on restriction coherence, identification rules,
    forbidden patterns and the optional domains.

    Args:
        atlas: Template presentation.
        n: Number of points.
        domains: Optional map from sorted position tuples to the typings
            allowed on them; only typings respecting all of them are yielded.

    Yields:
        Typings in a deterministic order.
    """
    if n < 1:
        raise PatternError("patterns need at least one point")
    k = atlas.k
    groups = _group_domains(atlas, domains)

    if n < k:
        entries = [(key, allowed) for key, allowed in (domains or {}).items()]
        for label in atlas.labels[n]:
            typing = (label,)
            if violation(atlas, typing, n) is None and _domains_hold(
                atlas, typing, n, entries
            ):
                yield typing
        return

    base_entries = [item for slot, items in groups.items() if slot[1] == -2 for item in items]
    for label in atlas.labels[k]:
        base = (label,)
        if violation(atlas, base, k) is not None:
            continue
        if not _domains_hold(atlas, base, k, base_entries):
            continue
        yield from _grow(atlas, base, k, n, groups)


def _grow(
    atlas: PatternAtlas,
    typing: Typing,
    j: int,
    n: int,
    groups: Mapping[tuple[int, int], list],
) -> Iterator[Typing]:
    if j == n:
        yield typing
        return
    for extended in _extend(atlas, typing, j, groups):
        yield from _grow(atlas, extended, j + 1, n, groups)


def _extend(
    atlas: PatternAtlas,
    typing: Typing,
    j: int,
    groups: Mapping[tuple[int, int], list],
) -> Iterator[Typing]:
    """All coherent, locally realizable extensions of a typing by point j."""
    k = atlas.k
    old_slots, steps = _extension_plan(atlas, j)
    size = typing_length(j + 1, k)
    current: list[Label | None] = [None] * size
    for slot, label in zip(old_slots, typing):
        current[slot] = label

    known: dict[tuple[int, ...], Label] = {}
    fixed: dict[tuple[int, ...], Label] = {}
    labels_k = atlas.labels[k]
    sub = atlas.sub
    first_boundary = k - 2 if k >= 2 else j - 1

    def face_label(face: tuple[int, ...]) -> Label:
        found = known.get(face)
        if found is None:
            found = atlas.label_of(typing, j, face)
            known[face] = found
        return found

    def boundary_ok(m: int) -> bool:
        points = tuple(range(m + 1)) + (j,)
        local = atlas.restrict_typing(current, j + 1, points)  # type: ignore[arg-type]
        must = (len(points) - 1,) if m == first_boundary else (m, len(points) - 1)
        if violation(atlas, local, len(points), must) is not None:
            return False
        if m == first_boundary:
            entries = [
                item
                for (top, slot), items in groups.items()
                if top == j and slot <= m
                for item in items
            ]
        else:
            entries = groups.get((j, m), [])
        return _domains_hold(atlas, current, j + 1, entries)  # type: ignore[arg-type]

    def assign(step_no: int) -> Iterator[Typing]:
        if step_no == len(steps):
            yield tuple(current)  # type: ignore[arg-type]
            return
        step = steps[step_no]
        for label in labels_k:
            added: list[tuple[int, ...]] = []
            coherent = True
            for face, u in step.faces:
                derived = sub[(k, u)][label]
                if j not in face:
                    expected = face_label(face)
                elif face in fixed:
                    expected = fixed[face]
                else:
                    fixed[face] = derived
                    added.append(face)
                    continue
                if derived != expected:
                    coherent = False
                    break
            if coherent:
                current[step.index] = label
                if step.boundary is None or boundary_ok(step.boundary):
                    yield from assign(step_no + 1)
                current[step.index] = None
            for face in added:
                del fixed[face]

    yield from assign(0)


def enumerate_patterns(atlas: PatternAtlas, points: Iterable[Point]) -> Iterator[Pattern]:
    """Yield every realizable pattern on the given points exactly once.

    Args:
        atlas: Template presentation.
        points: Point identifiers; they are put in canonical order.

    Yields:
        Patterns in a deterministic order.
    """
    ordered = canonical_points(points)
    for typing in enumerate_typings(atlas, len(ordered)):
        yield Pattern(ordered, typing)


# ============================================================================
# Validation
# ============================================================================


@dataclass(slots=True, kw_only=True)
class ValidationReport:
    """Outcome of :func:`validate_atlas`.

    Attributes:
        atlas: Name of the validated atlas.
        errors: Invariant violations, each naming its witness.
        warnings: Findings that do not make the atlas invalid.
    """

    atlas: str
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.errors

    def log_summary(self) -> None:
        if self.valid:
            logger.info("Atlas %s is valid (%d warnings)", self.atlas, len(self.warnings))
        else:
            logger.error("Atlas %s is invalid: %d errors", self.atlas, len(self.errors))
        for message in self.errors:
            logger.error("  - %s", message)
        for message in self.warnings:
            logger.warning("  - %s", message)

    def to_dict(self) -> dict[str, Any]:
        return {
            "atlas": self.atlas,
            "valid": self.valid,
            "errors": list(self.errors),
            "warnings": list(self.warnings),
        }


def index_maps(source: int, length: int) -> Iterator[IndexMap]:
    """All maps from range(length) to range(source)."""
    return itertools.product(range(source), repeat=length)  # type: ignore[return-value]


def _check_tables(atlas: PatternAtlas, report: ValidationReport) -> bool:
    k = atlas.k
    complete = True
    for source in range(1, k + 1):
        for length in range(1, k + 1):
            for u in index_maps(source, length):
                table = atlas.sub.get((source, u))
                if table is None:
                    report.errors.append(f"subtype table sub[{source}, {list(u)}] is missing")
                    complete = False
                    continue
                for label in atlas.labels[source]:
                    if label not in table:
                        report.errors.append(
                            f"sub[{source}, {list(u)}] has no entry for label {label!r}"
                        )
                        complete = False
                    elif table[label] not in atlas.label_set(length):
                        report.errors.append(
                            f"sub[{source}, {list(u)}] maps {label!r} to unknown "
                            f"label {table[label]!r}"
                        )
                        complete = False
    return complete


def _check_functoriality(atlas: PatternAtlas, report: ValidationReport) -> None:
    k = atlas.k
    for source in range(1, k + 1):
        identity = atlas.sub[(source, tuple(range(source)))]
        for label in atlas.labels[source]:
            if identity[label] != label:
                report.errors.append(
                    f"sub[identity] on {source}-tuples moves label {label!r}"
                )
                break

    for source in range(1, k + 1):
        for a in range(1, k + 1):
            for u in index_maps(source, a):
                first = atlas.sub[(source, u)]
                for b in range(1, k + 1):
                    for v in index_maps(a, b):
                        second = atlas.sub[(a, v)]
                        composite = atlas.sub[(source, tuple(u[i] for i in v))]
                        for label in atlas.labels[source]:
                            if second[first[label]] != composite[label]:
                                report.errors.append(
                                    f"functoriality fails for u={list(u)}, v={list(v)} "
                                    f"at label {label!r}"
                                )
                                break


def validate_atlas(atlas: PatternAtlas) -> ValidationReport:
    """Check every atlas invariant and report violations with witnesses.

    Args:
        atlas: Atlas to validate.

    Returns:
        Report listing errors (invariant violations) and warnings.
    """
    report = ValidationReport(atlas=atlas.name)

    for m in range(1, atlas.k + 1):
        labs = atlas.labels[m]
        if len(set(labs)) != len(labs):
            report.errors.append(f"labels for {m}-tuples contain duplicates")

    if not _check_tables(atlas, report):
        report.log_summary()
        return report
    _check_functoriality(atlas, report)

    expected_diagonal = atlas.doubling_image()
    if atlas.diagonal_labels != expected_diagonal:
        report.errors.append(
            f"diagonal labels {sorted(atlas.diagonal_labels or ())} differ from the "
            f"doubling image {sorted(expected_diagonal)}"
        )

    for label, ups in atlas.label_order.items():
        if label not in ups:
            report.errors.append(f"label order is not reflexive at {label!r}")

    if report.errors:
        report.log_summary()
        return report

    for entry in atlas.forbidden:
        if entry.size > atlas.ell:
            report.errors.append(
                f"forbidden pattern {list(entry.pattern.typing)} has {entry.size} "
                f"points, more than ell = {atlas.ell}"
            )
            continue
        problem = coherence_problem(atlas, entry.pattern.typing, entry.size)
        if problem:
            report.errors.append(
                f"forbidden pattern {list(entry.pattern.typing)} is incoherent: {problem}"
            )
        elif violation(atlas, entry.pattern.typing, entry.size) is None:
            report.errors.append(
                f"forbidden pattern {list(entry.pattern.typing)} is reported realizable"
            )

    for relation in atlas.relations.values():
        partition = relation.partition
        if len(partition) != relation.arity or not _is_growth_string(partition):
            report.errors.append(
                f"relation {relation.name} has a malformed identification partition "
                f"{list(partition)}"
            )
            continue
        blocks = relation.blocks
        for typing in sorted(relation.allowed):
            problem = coherence_problem(atlas, typing, blocks) or violation(
                atlas, typing, blocks
            )
            if problem:
                report.errors.append(
                    f"relation {relation.name} allows unrealizable pattern "
                    f"{list(typing)}: {problem}"
                )
                break

    if not any(entry.size == atlas.ell for entry in atlas.forbidden):
        report.warnings.append(f"forbidden set empty at size {atlas.ell}")
    if atlas.diagonal_labels and atlas.ell < atlas.k + 1:
        report.warnings.append(
            "ell is below k + 1, so identifications are only checked up to ell points"
        )

    report.log_summary()
    return report


def _is_growth_string(values: Sequence[int]) -> bool:
    top = -1
    for value in values:
        if value < 0 or value > top + 1:
            return False
        top = max(top, value)
    return True

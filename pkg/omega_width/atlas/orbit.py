"""
The finite structure an atlas induces on its k-labels.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from ..logging_config import get_logger
from .core import PatternAtlas, typing_length

if TYPE_CHECKING:
    from ..algebra.structures import FiniteStructure

logger = get_logger(__name__)


def orbit_structure(atlas: PatternAtlas, size: int | None = None) -> "FiniteStructure":
    """Structure over ``labels[k]`` whose tuples are realizable typings.

    Relation ``top{n}`` holds the typings of all realizable patterns on n
    points for k < n <= size; every relation definition with at least k
    blocks contributes its allowed typings. Operations preserving these
    relations act on orbit-instance constraints built from them.

    Args:
        atlas: Atlas to read.
        size: Largest pattern size; defaults to ``atlas.lift_ell``.
    """
    from ..algebra.structures import FiniteStructure

    k = atlas.k
    size = atlas.lift_ell if size is None else size
    relations = {}
    arities = {}
    for n in range(k + 1, size + 1):
        relations[f"top{n}"] = atlas.all_typings(n)
        arities[f"top{n}"] = typing_length(n, k)
    for name, relation in sorted(atlas.relations.items()):
        if relation.blocks >= k:
            relations[name] = relation.allowed
            arities[name] = typing_length(relation.blocks, k)
    structure = FiniteStructure(
        domain=atlas.labels[k],
        relations=relations,
        arities=arities,
        name=f"orbits[{atlas.name}]",
    )
    logger.debug("Orbit structure of %s: %d relations", atlas.name, len(relations))
    return structure

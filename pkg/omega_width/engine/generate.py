"""
Seeded random instances over an atlas's declared relations.
"""

from __future__ import annotations

import random
from typing import Sequence

from ..atlas.core import PatternAtlas
from ..logging_config import get_logger
from .instance import Application, Instance, InstanceError

logger = get_logger(__name__)


def gen_random_instance(
    atlas: PatternAtlas,
    n_vars: int,
    n_constraints: int,
    seed: int,
    relations: Sequence[str] | None = None,
) -> Instance:
    """Generate a reproducible random instance.

    Variables are the integers 1..n_vars. Each constraint applies a relation
    chosen uniformly from ``relations`` (all declared relations by default)
    to arguments drawn without repetition when the arity allows it.

    Args:
        atlas: Atlas whose relations are used.
        n_vars: Number of variables.
        n_constraints: Number of relation applications.
        seed: Random seed; equal seeds give equal instances.
        relations: Relation names to draw from.

    Returns:
        An un-normalized instance.

    Raises:
        InstanceError: For non-positive sizes or unknown relation names.
    """
    if n_vars < 1 or n_constraints < 0:
        raise InstanceError(
            f"need n_vars >= 1 and n_constraints >= 0 (got {n_vars}, {n_constraints})"
        )
    names = sorted(relations if relations is not None else atlas.relations)
    unknown = [name for name in names if name not in atlas.relations]
    if unknown:
        raise InstanceError(f"atlas {atlas.name} has no relations {unknown}")
    if n_constraints and not names:
        raise InstanceError(f"atlas {atlas.name} declares no relations to draw from")

    rng = random.Random(seed)
    variables = list(range(1, n_vars + 1))
    applications = []
    for _ in range(n_constraints):
        name = rng.choice(names)
        arity = atlas.relations[name].arity
        if arity <= n_vars:
            args = rng.sample(variables, arity)
        else:
            args = rng.choices(variables, k=arity)
        applications.append(Application(name, tuple(args)))

    logger.debug(
        "Generated instance over %s: %d variables, %d applications (seed %d)",
        atlas.name,
        n_vars,
        n_constraints,
        seed,
    )
    return Instance(atlas=atlas, variables=tuple(variables), applications=tuple(applications))

"""
Atlas family registry.

Maps family names and aliases to constructors and resolves atlas specs such
as ``henson:3`` or ``partition:1,inf`` (or a path to an atlas file).
"""

from pathlib import Path
from typing import Callable

from ..logging_config import get_logger
from .builtins import (
    equality_atlas,
    equivalence_atlas,
    henson_atlas,
    partition_atlas,
    random_graph_atlas,
    random_graph_fourary_atlas,
)
from .core import AtlasError, PatternAtlas
from .io import load_atlas

logger = get_logger(__name__)

AtlasFactory = Callable[[list[str]], PatternAtlas]


# ============================================================================
# Family Registry (Module-Level)
# ============================================================================


# Family name -> factory taking the parameter list of the spec
_FAMILIES: dict[str, AtlasFactory] = {}

# Alias -> primary family name
_ALIASES: dict[str, str] = {}

# Constructed atlases by normalized spec
_CACHE: dict[str, PatternAtlas] = {}


def _no_params(name: str, build: Callable[[], PatternAtlas]) -> AtlasFactory:
    def factory(params: list[str]) -> PatternAtlas:
        if params:
            raise AtlasError(f"Family '{name}' takes no parameters (got {params})")
        return build()

    return factory


def _henson(params: list[str]) -> PatternAtlas:
    if len(params) != 1:
        raise AtlasError("Family 'henson' takes one parameter: the clique size")
    try:
        n = int(params[0])
    except ValueError as e:
        raise AtlasError(f"Invalid clique size: {params[0]!r}") from e
    return henson_atlas(n)


def _partition(params: list[str]) -> PatternAtlas:
    if not params:
        raise AtlasError("Family 'partition' needs block sizes, e.g. partition:1,inf")
    return partition_atlas(params)


# ============================================================================
# Registration Functions
# ============================================================================


def register(
    family: str,
    factory: AtlasFactory,
    aliases: list[str] | None = None,
    replace: bool = False,
) -> None:
    """Register an atlas family.

    Args:
        family: Primary family name.
        factory: Callable building an atlas from the spec's parameters.
        aliases: Alternative names.
        replace: Replace an existing registration instead of skipping it.

    Raises:
        AtlasError: If an alias conflicts with another family.
    """
    key = family.lower()
    if key in _FAMILIES and not replace:
        logger.debug("Family already registered: %s", family)
        return
    _FAMILIES[key] = factory
    for alias in aliases or []:
        alias_key = alias.lower()
        if alias_key == key:
            continue
        if not replace and (
            alias_key in _FAMILIES or _ALIASES.get(alias_key, key) != key
        ):
            raise AtlasError(f"Alias '{alias}' conflicts with an existing family")
        _ALIASES[alias_key] = key
    logger.debug("Registered atlas family: %s", family)


register("equality", _no_params("equality", equality_atlas), aliases=["eq", "pure-set"])
register("equivalence", _no_params("equivalence", equivalence_atlas), aliases=["equiv"])
register("henson", _henson, aliases=["h"])
register("random-graph", _no_params("random-graph", random_graph_atlas), aliases=["rado", "graph"])
register(
    "random-graph-fourary",
    _no_params("random-graph-fourary", random_graph_fourary_atlas),
    aliases=["fourary"],
)
register("partition", _partition, aliases=["unary"])


# ============================================================================
# Lookup Functions
# ============================================================================


def list_families() -> list[str]:
    return sorted(_FAMILIES)


def is_supported(family: str) -> bool:
    key = family.lower()
    return key in _FAMILIES or key in _ALIASES


def parse_spec(spec: str) -> tuple[str, list[str]]:
    """Split ``name:p1,p2`` into the primary family name and parameters."""
    name, _, rest = spec.strip().partition(":")
    key = name.strip().lower()
    key = _ALIASES.get(key, key)
    if key not in _FAMILIES:
        raise AtlasError(
            f"Unknown atlas family: {name}. Available: {', '.join(list_families())}"
        )
    params = [p.strip() for p in rest.split(",") if p.strip()] if rest else []
    return key, params


def get_atlas(spec: str) -> PatternAtlas:
    """Build (or reuse) the builtin atlas named by a spec.

    Raises:
        AtlasError: For unknown families or invalid parameters.
    """
    family, params = parse_spec(spec)
    normalized = f"{family}:{','.join(params)}" if params else family
    atlas = _CACHE.get(normalized)
    if atlas is None:
        atlas = _FAMILIES[family](params)
        _CACHE[normalized] = atlas
        logger.info("Built atlas %s", atlas.name)
    return atlas


def resolve_atlas(spec_or_path: str | Path) -> PatternAtlas:
    """Resolve a family spec or an atlas file path."""
    path = Path(spec_or_path)
    if path.suffix == ".json" or path.exists():
        return load_atlas(path)
    return get_atlas(str(spec_or_path))

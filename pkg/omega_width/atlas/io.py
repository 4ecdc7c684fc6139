"""
Atlas files: canonical JSON export and validated loading.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

from ..logging_config import get_logger
from ..utils import FormatError, check_envelope, envelope, load_document, save_document
from .core import (
    AtlasError,
    ForbiddenKind,
    ForbiddenPattern,
    Pattern,
    PatternAtlas,
    RelationDef,
    validate_atlas,
)

logger = get_logger(__name__)


def atlas_to_dict(atlas: PatternAtlas) -> dict[str, Any]:
    """Encode an atlas as a versioned, canonically ordered document."""
    tables = [
        {"source": source, "map": list(u), "table": dict(sorted(table.items()))}
        for (source, u), table in sorted(atlas.sub.items())
    ]
    relations = {
        name: {
            "arity": rel.arity,
            "partition": list(rel.partition),
            "allowed": [list(t) for t in sorted(rel.allowed)],
        }
        for name, rel in sorted(atlas.relations.items())
    }
    body = {
        "name": atlas.name,
        "family": atlas.family,
        "params": atlas.params,
        "k": atlas.k,
        "ell": atlas.ell,
        "labels": {str(m): list(labs) for m, labs in sorted(atlas.labels.items())},
        "subtype_tables": tables,
        "diagonal_labels": sorted(atlas.diagonal_labels or ()),
        "forbidden": [
            {
                "points": entry.size,
                "typing": list(entry.pattern.typing),
                "kind": entry.kind.value,
            }
            for entry in atlas.forbidden
        ],
        "relations": relations,
        "label_order": {
            label: sorted(ups) for label, ups in sorted(atlas.label_order.items())
        },
        "paper_width": list(atlas.paper_width) if atlas.paper_width else None,
    }
    return envelope("atlas", body)


def atlas_from_dict(data: Any, source: str = "<memory>", validate: bool = True) -> PatternAtlas:
    """Decode an atlas document.

    Args:
        data: Decoded JSON document.
        source: Description for error messages.
        validate: Run :func:`validate_atlas` and reject invalid atlases.

    Returns:
        The atlas.

    Raises:
        FormatError: If the document is structurally malformed.
        AtlasError: If the atlas violates its invariants.
    """
    document = check_envelope(data, "atlas", source)
    try:
        labels = {int(m): tuple(labs) for m, labs in document["labels"].items()}
        sub = {
            (int(t["source"]), tuple(int(i) for i in t["map"])): dict(t["table"])
            for t in document["subtype_tables"]
        }
        forbidden = tuple(
            ForbiddenPattern(
                Pattern(tuple(range(int(f["points"]))), tuple(f["typing"])),
                ForbiddenKind(f.get("kind", "substructure")),
            )
            for f in document.get("forbidden", [])
        )
        relations = {
            name: RelationDef(
                name=name,
                arity=int(rel["arity"]),
                partition=tuple(int(b) for b in rel["partition"]),
                allowed=frozenset(tuple(t) for t in rel["allowed"]),
            )
            for name, rel in document.get("relations", {}).items()
        }
        label_order = {
            label: frozenset(ups) for label, ups in document.get("label_order", {}).items()
        }
        width = document.get("paper_width")
        atlas = PatternAtlas(
            name=document.get("name", "custom"),
            k=int(document["k"]),
            ell=int(document["ell"]),
            labels=labels,
            sub=sub,
            forbidden=forbidden,
            relations=relations,
            label_order=label_order,
            paper_width=(int(width[0]), int(width[1])) if width else None,
            family=document.get("family", "custom"),
            params=dict(document.get("params") or {}),
            diagonal_labels=frozenset(document.get("diagonal_labels", [])),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"{source}: malformed atlas document: {e}") from e

    if validate:
        report = validate_atlas(atlas)
        if not report.valid:
            shown = "; ".join(report.errors[:3])
            raise AtlasError(f"{source}: invalid atlas ({len(report.errors)} errors): {shown}")
    return atlas


def export_atlas(atlas: PatternAtlas, path: str | Path) -> Path:
    """Write an atlas file; identical atlases produce identical bytes."""
    return save_document(atlas_to_dict(atlas), path)


def load_atlas(path: str | Path, validate: bool = True) -> PatternAtlas:
    """Read and validate an atlas file."""
    document = load_document(path, "atlas")
    atlas = atlas_from_dict(document, str(path), validate=validate)
    logger.info("Loaded atlas %s (k=%d, ell=%d)", atlas.name, atlas.k, atlas.ell)
    return atlas

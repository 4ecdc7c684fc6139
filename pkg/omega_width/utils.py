"""Utility functions for reading and writing versioned JSON artifacts.

Every artifact the toolkit produces is a JSON object carrying a ``format``
tag and a ``version`` number. This module owns the file handling and the
envelope checks; the per-artifact encoders live in :mod:`omega_width.formats`.
"""

import json
from pathlib import Path
from typing import Any

from .logging_config import get_logger

logger = get_logger(__name__)

FORMAT_VERSION = 1

KNOWN_FORMATS = frozenset(
    {
        "atlas",
        "instance",
        "finite-instance",
        "witness",
        "structure",
        "operation-table",
        "certificate",
        "verdict",
        "report",
        "config",
    }
)


class FormatError(Exception):
    """Raised when an artifact cannot be read or has the wrong envelope."""

    pass


def canonical_json(data: Any) -> str:
    """Serialize data deterministically.

    Args:
        data: JSON-compatible value.

    Returns:
        JSON text with sorted keys, two-space indent and a trailing newline.
    """
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def envelope(kind: str, body: dict[str, Any]) -> dict[str, Any]:
    """Wrap an artifact body with its format tag and version.

    Args:
        kind: Artifact format name.
        body: Artifact fields.

    Returns:
        New dictionary with ``format`` and ``version`` set.

    Raises:
        FormatError: If the format name is unknown.
    """
    if kind not in KNOWN_FORMATS:
        raise FormatError(f"Unknown artifact format: {kind}")
    return {"format": kind, "version": FORMAT_VERSION, **body}


def check_envelope(data: Any, kind: str, source: str = "<memory>") -> dict[str, Any]:
    """Validate the envelope of a decoded artifact.

    Args:
        data: Decoded JSON value.
        kind: Expected artifact format.
        source: Description of where the data came from, for messages.

    Returns:
        The artifact as a dictionary.

    Raises:
        FormatError: If the value is not an object of the expected format/version.
    """
    if not isinstance(data, dict):
        raise FormatError(f"{source}: artifact must be a JSON object")
    found = data.get("format")
    if found != kind:
        raise FormatError(f"{source}: expected format '{kind}', found '{found}'")
    version = data.get("version")
    if version != FORMAT_VERSION:
        raise FormatError(
            f"{source}: unsupported {kind} version {version} "
            f"(this build reads version {FORMAT_VERSION})"
        )
    return data


def load_json_file(file_path: str | Path) -> Any:
    """Load JSON data from a local file.

    Args:
        file_path: Path to the JSON file.

    Returns:
        Parsed JSON data.

    Raises:
        FormatError: If the file is missing, unreadable, or not valid JSON.
    """
    file_path = Path(file_path)
    logger.debug("Loading JSON from %s", file_path)

    if not file_path.exists():
        logger.error("File not found: %s", file_path)
        raise FormatError(f"File not found: {file_path}")

    try:
        with file_path.open("r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        logger.error("Invalid JSON in file %s: %s", file_path, e)
        raise FormatError(f"Invalid JSON in file {file_path}: {e}") from e
    except OSError as e:
        logger.error("Error reading file %s: %s", file_path, e)
        raise FormatError(f"Error reading file {file_path}: {e}") from e


def load_document(file_path: str | Path, kind: str) -> dict[str, Any]:
    """Load a versioned artifact and check its envelope.

    Args:
        file_path: Path to the artifact.
        kind: Expected artifact format.

    Returns:
        The decoded artifact.

    Raises:
        FormatError: On any read or envelope problem.
    """
    data = load_json_file(file_path)
    document = check_envelope(data, kind, str(file_path))
    logger.info("Loaded %s artifact from %s", kind, file_path)
    return document


def save_document(document: dict[str, Any], file_path: str | Path) -> Path:
    """Write an artifact canonically.

    Args:
        document: Artifact including its envelope.
        file_path: Destination path; parent directories are created.

    Returns:
        The written path.

    Raises:
        FormatError: If the file cannot be written.
    """
    path = Path(file_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(canonical_json(document), encoding="utf-8")
    except OSError as e:
        logger.error("Error writing file %s: %s", path, e)
        raise FormatError(f"Error writing file {path}: {e}") from e
    logger.info("Wrote %s artifact to %s", document.get("format", "?"), path)
    return path

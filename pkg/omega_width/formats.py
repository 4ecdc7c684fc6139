"""
JSON codecs for instances, finite instances, witnesses, structures,
operation tables, certificates and verdicts.

Atlases have their own codec in :mod:`omega_width.atlas.io`; obstruction sets
use the text grammar of :mod:`omega_width.mmsnp.obstructions`.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Hashable, Sequence

from .algebra.structures import FiniteStructure, OperationTable, StructureError
from .atlas.core import PatternAtlas
from .engine.instance import (
    Application,
    Constraint,
    FiniteConstraint,
    FiniteInstance,
    Instance,
    InstanceError,
)
from .logging_config import get_logger
from .reduction.lifting import Witness, witness_from_dict
from .utils import FormatError, check_envelope, envelope, load_document, save_document

logger = get_logger(__name__)


def freeze(value: Any) -> Hashable:
    """JSON value to a hashable point: lists become tuples, recursively."""
    if isinstance(value, list):
        return tuple(freeze(v) for v in value)
    return value


def thaw(value: Any) -> Any:
    """Hashable point to a JSON value: tuples become lists, recursively."""
    if isinstance(value, tuple):
        return [thaw(v) for v in value]
    return value


def _malformed(kind: str, source: str, error: Exception) -> FormatError:
    return FormatError(f"{source}: malformed {kind} document: {error}")


# ============================================================================
# Instances
# ============================================================================


def instance_to_dict(instance: Instance) -> dict[str, Any]:
    """Encode an instance; lazy tops are written as ``"top"``."""
    body = {
        "atlas": instance.atlas.name,
        "variables": [thaw(v) for v in instance.variables],
        "applications": [
            {"relation": a.relation, "args": [thaw(v) for v in a.args]}
            for a in instance.applications
        ],
        "constraints": [
            {
                "scope": [thaw(v) for v in c.scope],
                "origin": c.origin,
                "allowed": (
                    "top" if c.allowed is None else [list(t) for t in sorted(c.allowed)]
                ),
            }
            for c in instance.constraints
        ],
        "minimality_level": (
            list(instance.minimality_level) if instance.minimality_level else None
        ),
        "normalized": instance.normalized,
    }
    return envelope("instance", body)


def instance_from_dict(data: Any, atlas: PatternAtlas, source: str = "<memory>") -> Instance:
    """Decode an instance over the given atlas.

    Raises:
        FormatError: If the document is malformed.
        InstanceError: If it names an atlas other than the one given.
    """
    document = check_envelope(data, "instance", source)
    named = document.get("atlas")
    if named is not None and named != atlas.name:
        raise InstanceError(f"{source}: instance is over atlas {named}, not {atlas.name}")
    try:
        variables = [freeze(v) for v in document["variables"]]
        applications = [
            Application(a["relation"], tuple(freeze(v) for v in a["args"]))
            for a in document.get("applications", [])
        ]
        constraints = tuple(
            Constraint(
                tuple(freeze(v) for v in c["scope"]),
                None if c["allowed"] == "top" else frozenset(tuple(t) for t in c["allowed"]),
                c.get("origin", "top"),
            )
            for c in document.get("constraints", [])
        )
        level = document.get("minimality_level")
    except (KeyError, TypeError) as e:
        raise _malformed("instance", source, e) from e

    base = Instance.from_applications(atlas, variables, applications)
    if not constraints:
        return base
    return Instance(
        atlas=atlas,
        variables=base.variables,
        constraints=constraints,
        applications=base.applications,
        minimality_level=(int(level[0]), int(level[1])) if level else None,
        normalized=bool(document.get("normalized", False)),
    )


def save_instance(instance: Instance, path: str | Path) -> Path:
    return save_document(instance_to_dict(instance), path)


def load_instance(path: str | Path, atlas: PatternAtlas) -> Instance:
    return instance_from_dict(load_document(path, "instance"), atlas, str(path))


def finite_instance_to_dict(fi: FiniteInstance) -> dict[str, Any]:
    body = {
        "name": fi.name,
        "variables": [thaw(v) for v in fi.variables],
        "alphabet": [thaw(a) for a in fi.alphabet],
        "constraints": [
            {
                "scope": [thaw(v) for v in c.scope],
                "origin": c.origin,
                "tuples": sorted([thaw(x) for x in t] for t in c.tuples),
            }
            for c in fi.constraints
        ],
    }
    return envelope("finite-instance", body)


def finite_instance_from_dict(data: Any, source: str = "<memory>") -> FiniteInstance:
    document = check_envelope(data, "finite-instance", source)
    try:
        return FiniteInstance(
            variables=tuple(freeze(v) for v in document["variables"]),
            alphabet=tuple(freeze(a) for a in document["alphabet"]),
            constraints=tuple(
                FiniteConstraint(
                    tuple(freeze(v) for v in c["scope"]),
                    frozenset(tuple(freeze(x) for x in t) for t in c["tuples"]),
                    c.get("origin", ""),
                )
                for c in document["constraints"]
            ),
            name=document.get("name", ""),
        )
    except (KeyError, TypeError) as e:
        raise _malformed("finite-instance", source, e) from e


# ============================================================================
# Witnesses
# ============================================================================


def witness_to_dict(witness: Witness) -> dict[str, Any]:
    body = witness.to_dict()
    body["classes"] = [[thaw(v) for v in c] for c in witness.classes]
    return envelope("witness", body)


def load_witness(path: str | Path) -> Witness:
    document = load_document(path, "witness")
    try:
        body = dict(document)
        body["classes"] = [[freeze(v) for v in c] for c in document["classes"]]
        return witness_from_dict(body)
    except (KeyError, TypeError) as e:
        raise _malformed("witness", str(path), e) from e


# ============================================================================
# Structures and operation tables
# ============================================================================


def structure_to_dict(structure: FiniteStructure) -> dict[str, Any]:
    body = {
        "name": structure.name,
        "domain": [thaw(d) for d in structure.domain],
        "relations": {
            name: {
                "arity": structure.arities[name],
                "tuples": sorted([thaw(x) for x in t] for t in structure.relations[name]),
            }
            for name in structure.relation_names()
        },
    }
    return envelope("structure", body)


def structure_from_dict(data: Any, source: str = "<memory>") -> FiniteStructure:
    document = check_envelope(data, "structure", source)
    try:
        relations = {
            name: frozenset(tuple(freeze(x) for x in t) for t in rel["tuples"])
            for name, rel in document["relations"].items()
        }
        arities = {name: int(rel["arity"]) for name, rel in document["relations"].items()}
        return FiniteStructure(
            tuple(freeze(d) for d in document["domain"]),
            relations,
            arities,
            document.get("name", ""),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise _malformed("structure", source, e) from e
    except StructureError as e:
        raise FormatError(f"{source}: {e}") from e


def load_structure(path: str | Path) -> FiniteStructure:
    return structure_from_dict(load_document(path, "structure"), str(path))


def operation_table_from_dict(data: Any, source: str = "<memory>") -> OperationTable:
    """Decode an operation-table body (with or without its envelope)."""
    if isinstance(data, dict) and "format" in data:
        data = check_envelope(data, "operation-table", source)
    try:
        domain = tuple(freeze(d) for d in data["domain"])
        arity = int(data["arity"])
        name = data.get("name", "")
        if "sets" in data:
            sets = {frozenset(freeze(x) for x in s): freeze(v) for s, v in data["sets"]}
            return OperationTable(domain, arity, set_function=sets, name=name)
        table = {tuple(freeze(x) for x in args): freeze(v) for args, v in data["rows"]}
        return OperationTable(domain, arity, table=table, name=name)
    except (KeyError, TypeError, ValueError) as e:
        raise _malformed("operation-table", source, e) from e
    except StructureError as e:
        raise FormatError(f"{source}: {e}") from e


def certificate_to_dict(
    kind: str, structure: FiniteStructure, operations: Sequence[OperationTable]
) -> dict[str, Any]:
    """Encode a certificate: the operations found on a named structure."""
    body = {
        "kind": kind,
        "structure": structure.name,
        "domain": [thaw(d) for d in structure.domain],
        "operations": [op.to_dict() for op in operations],
    }
    return envelope("certificate", body)


def load_certificate(path: str | Path) -> tuple[str, list[OperationTable]]:
    document = load_document(path, "certificate")
    try:
        operations = [
            operation_table_from_dict(op, str(path)) for op in document["operations"]
        ]
        return document["kind"], operations
    except (KeyError, TypeError) as e:
        raise _malformed("certificate", str(path), e) from e


# ============================================================================
# Verdicts
# ============================================================================


def verdict_document(kind: str, body: dict[str, Any]) -> dict[str, Any]:
    """Wrap a result body (``solve``, ``fpp``, ``mmsnp``, ...) as a verdict."""
    return envelope("verdict", {"kind": kind, **body})


def save_verdict(kind: str, body: dict[str, Any], path: str | Path) -> Path:
    return save_document(verdict_document(kind, body), path)

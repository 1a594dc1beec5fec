"""JSON documents for triplets, witnesses and reports.

Matrices are stored row-major with explicit block names so any other
implementation can interoperate without guessing conventions. Floats
round-trip bitwise (shortest-representation formatting on write, exact
binary64 parsing on read). Serialization is deterministic: sorted keys,
fixed separators, no timestamps.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .constraints import EssentialTriplet
from .errors import NonFiniteValue, SchemaError
from .synthesis import CameraTriple, ChainWitness

SCHEMA_VERSION = "1"

KIND_ESSENTIAL = "essential"
KIND_FUNDAMENTAL = "fundamental"

_BLOCK_NAMES = {
    KIND_ESSENTIAL: ("E12", "E23", "E31"),
    KIND_FUNDAMENTAL: ("F12", "F23", "F31"),
}


@dataclass
class TripletDocument:
    """Parsed triplet file: three named 3x3 blocks plus free metadata."""

    kind: str
    blocks: dict[str, np.ndarray]
    metadata: dict | None = None
    schema_version: str = SCHEMA_VERSION

    def block_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        names = _BLOCK_NAMES[self.kind]
        return tuple(self.blocks[n] for n in names)

    def essential_triplet(self) -> EssentialTriplet:
        if self.kind != KIND_ESSENTIAL:
            raise SchemaError(f"expected an essential triplet, got kind "
                              f"{self.kind!r}", "/kind")
        return EssentialTriplet(*self.block_arrays())


def _reject_constant(token: str):
    raise NonFiniteValue(f"non-finite JSON token {token!r}")


def _require(condition: bool, message: str, path: str) -> None:
    if not condition:
        raise SchemaError(message, path)


def _parse_matrix(obj, path: str) -> np.ndarray:
    _require(isinstance(obj, list) and len(obj) == 3, "expected 3 rows", path)
    rows = []
    for r, row in enumerate(obj):
        _require(isinstance(row, list) and len(row) == 3,
                 "expected 3 columns", f"{path}/{r}")
        for c, x in enumerate(row):
            _require(isinstance(x, (int, float)) and not isinstance(x, bool),
                     "expected a number", f"{path}/{r}/{c}")
            if not math.isfinite(x):
                raise NonFiniteValue("matrix entry is not finite",
                                     f"{path}/{r}/{c}")
        rows.append([float(x) for x in row])
    return np.array(rows)


def parse_triplet(text: str) -> TripletDocument:
    """Parse and validate a triplet document.

    Raises :class:`SchemaError` (with a JSON-pointer path) on structural
    problems and :class:`NonFiniteValue` on NaN or infinite entries.
    """
    try:
        obj = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", "") from exc
    _require(isinstance(obj, dict), "expected a JSON object", "")
    version = obj.get("schema_version")
    _require(version == SCHEMA_VERSION,
             f"unrecognized schema_version {version!r}", "/schema_version")
    kind = obj.get("kind")
    _require(kind in _BLOCK_NAMES, f"unrecognized kind {kind!r}", "/kind")
    blocks_obj = obj.get("blocks")
    _require(isinstance(blocks_obj, dict), "expected a blocks object", "/blocks")
    blocks = {}
    for name in _BLOCK_NAMES[kind]:
        _require(name in blocks_obj, f"missing block {name}", f"/blocks/{name}")
        blocks[name] = _parse_matrix(blocks_obj[name], f"/blocks/{name}")
    metadata = obj.get("metadata")
    if metadata is not None:
        _require(isinstance(metadata, dict), "expected an object", "/metadata")
    return TripletDocument(kind, blocks, metadata)


def _matrix_list(m: np.ndarray) -> list[list[float]]:
    if not np.all(np.isfinite(m)):
        raise NonFiniteValue("matrix entry is not finite")
    return [[float(x) for x in row] for row in np.asarray(m, dtype=float)]


def serialize_triplet(doc: TripletDocument) -> str:
    payload = {
        "schema_version": doc.schema_version,
        "kind": doc.kind,
        "blocks": {name: _matrix_list(doc.blocks[name])
                   for name in _BLOCK_NAMES[doc.kind]},
    }
    if doc.metadata is not None:
        payload["metadata"] = doc.metadata
    return dumps(payload)


def triplet_document(t: EssentialTriplet, metadata: dict | None = None,
                     kind: str = KIND_ESSENTIAL) -> TripletDocument:
    names = _BLOCK_NAMES[kind]
    return TripletDocument(kind, dict(zip(names, t.blocks())), metadata)


def dumps(payload) -> str:
    """Deterministic JSON text (sorted keys, two-space indent)."""
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# --- witness sidecars -------------------------------------------------------

def camera_witness_payload(c: CameraTriple) -> dict:
    return {
        "kind": "cameras",
        "rotations": [_matrix_list(r) for r in c.rotations],
        "baselines": [[float(x) for x in b] for b in c.baselines],
    }


def chain_witness_payload(w: ChainWitness) -> dict:
    def edge(r, b):
        return {"rotation": _matrix_list(r), "baseline": [float(x) for x in b]}

    return {
        "kind": "chain",
        "edges": {
            "12": edge(w.r12, w.b12),
            "23": edge(w.r23, w.b23),
            "31": edge(w.r31, w.b31),
        },
    }


def parse_witness(text: str) -> CameraTriple | ChainWitness:
    try:
        obj = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", "") from exc
    _require(isinstance(obj, dict), "expected a JSON object", "")
    kind = obj.get("kind")
    if kind == "cameras":
        rotations = obj.get("rotations")
        baselines = obj.get("baselines")
        _require(isinstance(rotations, list) and len(rotations) == 3,
                 "expected 3 rotations", "/rotations")
        _require(isinstance(baselines, list) and len(baselines) == 3,
                 "expected 3 baselines", "/baselines")
        rs = tuple(_parse_matrix(r, f"/rotations/{i}")
                   for i, r in enumerate(rotations))
        bs = tuple(np.array([float(x) for x in b]) for b in baselines)
        return CameraTriple(rs, bs)
    if kind == "chain":
        edges = obj.get("edges")
        _require(isinstance(edges, dict), "expected an edges object", "/edges")
        parsed = {}
        for name in ("12", "23", "31"):
            _require(name in edges, f"missing edge {name}", f"/edges/{name}")
            e = edges[name]
            parsed[name] = (
                _parse_matrix(e.get("rotation"), f"/edges/{name}/rotation"),
                np.array([float(x) for x in e.get("baseline", [])]),
            )
        return ChainWitness(
            r12=parsed["12"][0], b12=parsed["12"][1],
            r23=parsed["23"][0], b23=parsed["23"][1],
            r31=parsed["31"][0], b31=parsed["31"][1],
        )
    raise SchemaError(f"unrecognized witness kind {kind!r}", "/kind")

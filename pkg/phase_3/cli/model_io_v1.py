"""
Versioned JSON files for models, states, Kraus families, generator sets and run
records. Complex entries are [re, im] pairs; matrices are lists of rows. The
grammar is documented in docs/file_formats.md.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from phase_1.core.errors_v1 import ModelFileError
from phase_1.core.matcore_v1 import CMat
from phase_1.core.settings_v1 import DEFAULT_TOLERANCES, MODEL_FORMAT_VERSION
from phase_2.eventum.blocks_v1 import MODES, STRICT
from phase_2.eventum.compatibility_v1 import model_from_unitary
from phase_2.eventum.model_v1 import Branch, CQState, EventumModel, Window

MODEL_FORMAT = "eventum-model"
STATE_FORMAT = "eventum-state"
KRAUS_FORMAT = "eventum-kraus"
GENERATORS_FORMAT = "eventum-generators"
RUN_FORMAT = "eventum-run"

MATRIX_TAG = "__matrix__"


def encode_matrix(m: CMat) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(obj: Any, location: str, dim: int | None = None) -> CMat:
    try:
        arr = np.asarray(obj, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ModelFileError(f"not a matrix of [re, im] pairs ({exc})", location) from exc
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise ModelFileError(f"expected a square matrix of [re, im] pairs, got shape {arr.shape}", location)
    if dim is not None and arr.shape[0] != dim:
        raise ModelFileError(f"expected a {dim} x {dim} matrix, got {arr.shape[0]} x {arr.shape[1]}", location)
    return arr[..., 0] + 1j * arr[..., 1]


def _encode_value(v: Any) -> Any:
    if isinstance(v, np.ndarray):
        return {MATRIX_TAG: encode_matrix(v)}
    if isinstance(v, dict):
        return {str(k): _encode_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_encode_value(x) for x in v]
    if isinstance(v, np.generic):
        return v.item()
    return v


def _decode_value(v: Any, location: str) -> Any:
    if isinstance(v, dict):
        if set(v) == {MATRIX_TAG}:
            return decode_matrix(v[MATRIX_TAG], location)
        return {k: _decode_value(x, f"{location}.{k}") for k, x in v.items()}
    if isinstance(v, list):
        return [_decode_value(x, f"{location}[{i}]") for i, x in enumerate(v)]
    return v


def write_json(path: str | Path, doc: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def read_json(path: str | Path, expected_format: str) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelFileError(f"cannot read file ({exc.strerror})", str(path)) from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from exc
    if not isinstance(doc, dict):
        raise ModelFileError("top level must be an object", str(path))
    if doc.get("format") != expected_format:
        raise ModelFileError(f"format must be {expected_format!r}, got {doc.get('format')!r}", f"{path}:format")
    if doc.get("version") != MODEL_FORMAT_VERSION:
        raise ModelFileError(f"unsupported version {doc.get('version')!r}", f"{path}:version")
    return doc


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _require(doc: dict, key: str, where: str) -> Any:
    if not isinstance(doc, dict):
        raise ModelFileError("expected an object", where)
    if key not in doc:
        raise ModelFileError(f"missing field {key!r}", where)
    return doc[key]


def _require_dim(doc: dict, key: str, where: str) -> int:
    value = _require(doc, key, where)
    # bool is an int subclass
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ModelFileError(f"{key} must be a positive integer, got {value!r}", f"{where}:{key}")
    return value


def _require_list(doc: dict, key: str, where: str) -> list:
    value = _require(doc, key, where)
    if not isinstance(value, list):
        raise ModelFileError(f"{key} must be a list, got {type(value).__name__}", f"{where}:{key}")
    return value


def _require_number(doc: dict, key: str, where: str) -> float:
    value = _require(doc, key, where)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ModelFileError(f"{key} must be a number, got {value!r}", f"{where}.{key}")
    return float(value)


def _label_map(obj: Any, where: str) -> dict:
    """f as {label: label | null}."""
    if not isinstance(obj, dict):
        raise ModelFileError(f"f must be an object mapping labels, got {type(obj).__name__}", where)
    for x, y in obj.items():
        if y is not None and not isinstance(y, str):
            raise ModelFileError(f"f({x!r}) must be a label or null, got {y!r}", f"{where}.{x}")
    return obj


@dataclass
class ModelFile:
    """
    Decoded model file, not yet validated. f and blocks may be absent when only
    the unitary is given, and vice versa.
    """

    labels: list
    dim_l: int
    mode: str
    f: dict | None
    blocks: dict | None
    window: Window | None
    unitary: CMat | None
    structure: dict | None
    provenance: dict | None

    def to_model(self, tol: float = DEFAULT_TOLERANCES["compatibility"]) -> EventumModel:
        if self.f is None or self.blocks is None:
            return model_from_unitary(
                self.unitary, self.labels, self.dim_l, window=self.window, structure=self.structure, provenance=self.provenance, tol=tol
            )
        return EventumModel(
            labels=tuple(self.labels),
            dim_l=self.dim_l,
            f=self.f,
            blocks=self.blocks,
            mode=self.mode,
            window=self.window,
            unitary=self.unitary,
            structure=self.structure,
            provenance=self.provenance,
            tol=tol,
        )


def model_to_document(model: EventumModel, include_unitary: bool = True) -> dict:
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_FORMAT_VERSION,
        "mode": model.mode,
        "dim_l": model.dim_l,
        "labels": list(model.labels),
        "f": {x: model.f[x] for x in model.labels},
        "blocks": {x: encode_matrix(b) for x, b in model.blocks.items()},
    }
    if model.window is not None:
        doc["window"] = {
            "live_labels": [x for x in model.labels if x in model.window.live_labels],
            "live_projector": encode_matrix(model.window.live_projector),
            "step_budget": model.window.step_budget,
        }
    if include_unitary and model.unitary is not None:
        doc["unitary"] = encode_matrix(model.unitary)
    if model.structure is not None:
        doc["structure"] = _encode_value(model.structure)
    if model.provenance is not None:
        doc["provenance"] = _encode_value(model.provenance)
    return doc


def read_model_file(path: str | Path) -> ModelFile:
    path = str(path)
    doc = read_json(path, MODEL_FORMAT)
    mode = doc.get("mode", STRICT)
    if mode not in MODES:
        raise ModelFileError(f"mode must be one of {MODES}, got {mode!r}", f"{path}:mode")
    dim_l = _require_dim(doc, "dim_l", path)
    labels = _require_list(doc, "labels", path)
    if not all(isinstance(x, str) for x in labels):
        raise ModelFileError("labels must be a list of strings", f"{path}:labels")

    f = _label_map(doc["f"], f"{path}:f") if doc.get("f") is not None else None
    blocks = None
    if "blocks" in doc:
        if not isinstance(doc["blocks"], dict):
            raise ModelFileError("blocks must be an object mapping labels to matrices", f"{path}:blocks")
        blocks = {x: decode_matrix(m, f"{path}:blocks.{x}", dim_l) for x, m in doc["blocks"].items()}
    unitary = None
    if "unitary" in doc:
        unitary = decode_matrix(doc["unitary"], f"{path}:unitary", len(labels) * dim_l)
    if unitary is None and (f is None or blocks is None):
        raise ModelFileError("a model needs either f and blocks or a unitary", path)

    window = None
    if "window" in doc:
        w = doc["window"]
        where = f"{path}:window"
        if not isinstance(w, dict):
            raise ModelFileError("window must be an object", where)
        budget = _require(w, "step_budget", where) if "step_budget" in w else None
        if budget is not None and (isinstance(budget, bool) or not isinstance(budget, int)):
            raise ModelFileError(f"step_budget must be an integer or null, got {budget!r}", f"{where}.step_budget")
        window = Window(
            live_labels=frozenset(_require_list(w, "live_labels", where)),
            live_projector=decode_matrix(_require(w, "live_projector", where), f"{where}.live_projector", dim_l),
            step_budget=budget,
        )
    return ModelFile(
        labels=labels,
        dim_l=dim_l,
        mode=mode,
        f=f,
        blocks=blocks,
        window=window,
        unitary=unitary,
        structure=_decode_value(doc["structure"], f"{path}:structure") if "structure" in doc else None,
        provenance=_decode_value(doc["provenance"], f"{path}:provenance") if "provenance" in doc else None,
    )


def write_model(path: str | Path, model: EventumModel, include_unitary: bool = True) -> None:
    write_json(path, model_to_document(model, include_unitary))


def read_model(path: str | Path) -> EventumModel:
    return read_model_file(path).to_model()


def write_state(path: str | Path, state: CQState) -> None:
    write_json(path, {
        "format": STATE_FORMAT,
        "version": MODEL_FORMAT_VERSION,
        "dim": state.dim,
        "branches": [{"label": br.label, "weight": br.weight, "dm": encode_matrix(br.dm)} for br in state.branches],
    })


def read_state(path: str | Path) -> CQState:
    path = str(path)
    doc = read_json(path, STATE_FORMAT)
    dim = _require_dim(doc, "dim", path)
    branches = []
    for i, br in enumerate(_require_list(doc, "branches", path)):
        where = f"{path}:branches[{i}]"
        label = _require(br, "label", where)
        if not isinstance(label, str):
            raise ModelFileError(f"label must be a string, got {label!r}", f"{where}.label")
        branches.append(Branch(
            label=label,
            weight=_require_number(br, "weight", where),
            dm=decode_matrix(_require(br, "dm", where), f"{where}.dm", dim),
        ))
    return CQState(tuple(branches))


def write_kraus(path: str | Path, dim_s: int, ops) -> None:
    write_json(path, {
        "format": KRAUS_FORMAT,
        "version": MODEL_FORMAT_VERSION,
        "dim_s": dim_s,
        "outcomes": len(ops),
        "ops": [encode_matrix(a) for a in ops],
    })


def read_kraus(path: str | Path) -> tuple[int, list[CMat]]:
    """(dim_s, operators); completeness is left to KrausFamily."""
    path = str(path)
    doc = read_json(path, KRAUS_FORMAT)
    dim_s = _require_dim(doc, "dim_s", path)
    ops = [decode_matrix(m, f"{path}:ops[{i}]", dim_s) for i, m in enumerate(_require_list(doc, "ops", path))]
    if doc.get("outcomes", len(ops)) != len(ops):
        raise ModelFileError(f"outcomes says {doc['outcomes']} but {len(ops)} operators are given", f"{path}:outcomes")
    if not ops:
        raise ModelFileError("at least one Kraus operator is required", f"{path}:ops")
    return dim_s, ops


def write_generators(path: str | Path, dim: int, generators) -> None:
    write_json(path, {
        "format": GENERATORS_FORMAT,
        "version": MODEL_FORMAT_VERSION,
        "dim": dim,
        "generators": [encode_matrix(g) for g in generators],
    })


def read_generators(path: str | Path) -> tuple[int, list[CMat]]:
    path = str(path)
    doc = read_json(path, GENERATORS_FORMAT)
    dim = _require_dim(doc, "dim", path)
    return dim, [decode_matrix(g, f"{path}:generators[{i}]", dim) for i, g in enumerate(_require_list(doc, "generators", path))]

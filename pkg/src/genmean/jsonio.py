"""JSON documents for spaces, grid functions, densities and reports.

Space::

    {"atoms": ["a", "b"], "weights": [0.5, 0.5]}

Function (``space`` is an inline space document or a path relative to the
function document)::

    {"space": "s.json", "arity": 2, "values": [... n**k floats, row-major ...]}

Density: a function document plus ``"normalized": true|false``.

Floats are written with ``repr`` precision, so a write/read cycle is exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .densities import SymmetricDensity
from .errors import InvalidInput
from .measure_space import GridFunction, MeasureSpace, make_space


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2, allow_nan=False) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    return obj


def write_json(obj, path: str | Path | None) -> str:
    text = dumps(obj)
    if path is not None:
        Path(path).write_text(text)
    return text


def read_json(path: str | Path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise InvalidInput(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: invalid JSON ({exc.msg})") from exc


def space_to_dict(space: MeasureSpace) -> dict:
    return {"atoms": list(space.atoms), "weights": [float(w) for w in space.weights]}


def space_from_dict(doc: dict) -> MeasureSpace:
    try:
        return make_space(doc["atoms"], doc["weights"])
    except (KeyError, TypeError) as exc:
        raise InvalidInput("space document needs 'atoms' and 'weights' lists") from exc


def load_space(path: str | Path) -> MeasureSpace:
    return space_from_dict(read_json(path))


def function_to_dict(f: GridFunction, space_ref: str | None = None) -> dict:
    return {
        "space": space_ref if space_ref is not None else space_to_dict(f.space),
        "arity": f.arity,
        "values": [float(v) for v in f.flat],
    }


def _resolve_space(doc: dict, base: Path | None, space: MeasureSpace | None) -> MeasureSpace:
    if space is not None:
        return space
    ref = doc.get("space")
    if isinstance(ref, dict):
        return space_from_dict(ref)
    if isinstance(ref, str):
        path = Path(ref)
        if not path.is_absolute() and base is not None and (base / path).exists():
            path = base / path
        return load_space(path)
    raise InvalidInput("function document has no usable 'space' entry")


def function_from_dict(doc: dict, space: MeasureSpace | None = None, base: Path | None = None) -> GridFunction:
    sp = _resolve_space(doc, base, space)
    try:
        return GridFunction(sp, int(doc["arity"]), np.asarray(doc["values"], dtype=np.float64))
    except (KeyError, TypeError) as exc:
        raise InvalidInput("function document needs 'arity' and 'values'") from exc


def load_function(path: str | Path, space: MeasureSpace | None = None) -> GridFunction:
    path = Path(path)
    return function_from_dict(read_json(path), space, path.parent)


def density_to_dict(P: SymmetricDensity, space_ref: str | None = None) -> dict:
    doc = function_to_dict(P.inner, space_ref)
    doc["normalized"] = bool(P.normalized)
    return doc


def load_density(path: str | Path, space: MeasureSpace | None = None) -> SymmetricDensity:
    path = Path(path)
    doc = read_json(path)
    f = function_from_dict(doc, space, path.parent)
    return SymmetricDensity(f, bool(doc.get("normalized", True)))

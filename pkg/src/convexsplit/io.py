"""JSON operator format, instance bundles, CSV output and run manifests.

An operator is stored as::

    {"kind": "density", "dims": [2, 2], "matrix": [[[re, im], ...], ...]}

with the matrix row-major. ``kind`` is one of ``hermitian``, ``density``
or ``test`` and selects the validation applied on load; a missing kind
loads the matrix without checks beyond shape.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .linalg import as_operator, check_density, check_hermitian, check_test
from .testkit import CqState

KINDS = {"hermitian": check_hermitian, "density": check_density, "test": check_test}


class InstanceError(ValueError):
    """An instance file is malformed or fails validation."""


def encode_matrix(x: np.ndarray) -> list:
    x = np.asarray(x, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in x]


def decode_matrix(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 2:
        return arr.astype(complex)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise InstanceError("matrix must be a 2-d array of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def encode_operator(x: np.ndarray, dims: Sequence[int] | None = None, kind: str | None = "density") -> dict:
    x = np.asarray(x)
    out = {"dims": [int(d) for d in (dims if dims is not None else [x.shape[0]])], "matrix": encode_matrix(x)}
    if kind is not None:
        out = {"kind": kind, **out}
    return out


def decode_operator(obj: dict, kind: str | None = None) -> tuple[np.ndarray, tuple]:
    """Matrix and dims of an operator record, validated per its kind."""
    if not isinstance(obj, dict) or "matrix" not in obj:
        raise InstanceError("operator record needs a 'matrix' field")
    x = decode_matrix(obj["matrix"])
    dims = tuple(int(d) for d in obj.get("dims", [x.shape[0]]))
    kind = kind or obj.get("kind")
    try:
        if kind is None:
            x = as_operator(x, dims)
        elif kind in KINDS:
            x = KINDS[kind](x, dims)
        else:
            raise InstanceError(f"unknown operator kind {kind!r}")
    except InstanceError:
        raise
    except ValueError as exc:
        raise InstanceError(str(exc)) from exc
    return x, dims


def encode_cq(state: CqState) -> dict:
    return {"type": "cq", "probs": [float(p) for p in state.probs], "dims": list(state.dims),
            "conditionals": [encode_operator(c, state.dims) for c in state.conditionals]}


def decode_cq(obj: dict) -> CqState:
    try:
        conds = [decode_operator(c, "density")[0] for c in obj["conditionals"]]
        return CqState(obj["probs"], conds, obj.get("dims"))
    except KeyError as exc:
        raise InstanceError(f"cq record is missing {exc}") from exc
    except InstanceError:
        raise
    except ValueError as exc:
        raise InstanceError(str(exc)) from exc


def read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InstanceError(f"cannot read {path}: {exc}") from exc


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def load_operator(path, kind: str | None = None) -> tuple[np.ndarray, tuple]:
    return decode_operator(read_json(path), kind)


def load_convex_split(path) -> dict:
    """Convex-split instance file: ``{"type": "convex_split", "rho_AB": op, "tau_A": op, "M": int}``."""
    obj = read_json(path)
    if obj.get("type") != "convex_split":
        raise InstanceError(f"{path}: expected type 'convex_split'")
    try:
        rho, rdims = decode_operator(obj["rho_AB"], "density")
        tau, _ = decode_operator(obj["tau_A"], "density")
    except KeyError as exc:
        raise InstanceError(f"{path}: missing field {exc}") from exc
    if len(rdims) != 2:
        raise InstanceError(f"{path}: rho_AB must declare dims [dA, dB]")
    return {"name": obj.get("name", Path(path).stem), "rho_AB": rho, "tau_A": tau, "dims": rdims,
            "M": int(obj.get("M", 1))}


def save_convex_split(path, rho_AB, tau_A, dims, M: int = 1, name: str | None = None) -> None:
    obj = {"type": "convex_split", "M": M, "rho_AB": encode_operator(rho_AB, dims),
           "tau_A": encode_operator(tau_A)}
    if name:
        obj["name"] = name
    write_json(path, obj)


def load_bundle(path) -> dict:
    """Protocol bundle: ``{"type": "protocol", "protocol": ..., "states": {...}, "rates": {...}}``.

    Operator entries in ``states`` are decoded to arrays (cq records to
    :class:`CqState`); ``channel.kraus`` becomes a list of arrays.
    """
    obj = read_json(path)
    if obj.get("type") != "protocol":
        raise InstanceError(f"{path}: expected type 'protocol'")
    if "protocol" not in obj:
        raise InstanceError(f"{path}: missing 'protocol'")
    states = {}
    for key, val in obj.get("states", {}).items():
        if isinstance(val, dict) and val.get("type") == "cq":
            states[key] = decode_cq(val)
        elif isinstance(val, dict) and "matrix" in val:
            states[key] = decode_operator(val)
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            states[key] = [decode_operator(v)[0] for v in val]
        else:
            states[key] = val
    channel = obj.get("channel")
    if channel is not None:
        channel = {**channel, "kraus": [decode_matrix(k) for k in channel.get("kraus", [])]}
    return {"name": obj.get("name", Path(path).stem), "protocol": obj["protocol"], "states": states,
            "rates": obj.get("rates", {}), "channel": channel}


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def format_value(v) -> str:
    """Deterministic text form of a CSV cell."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return "" if v is None else str(v)


def csv_text(columns: Sequence[str], rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()


def to_jsonable(obj):
    """Recursively convert numpy scalars and arrays for ``json.dumps``."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return encode_matrix(obj) if obj.ndim == 2 else [to_jsonable(complex(v)) for v in obj]
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v) or math.isinf(v):
            return format_value(v)
        return v
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def manifest(command: str, args: dict, seed, inputs: Sequence, started: float, rows: int,
             outputs: Sequence = ()) -> dict:
    return {
        "tool": "convexsplit",
        "version": __version__,
        "command": command,
        "arguments": to_jsonable(args),
        "seed": seed,
        "inputs": {str(p): sha256_file(p) for p in inputs},
        "outputs": [str(p) for p in outputs],
        "rows": rows,
        "row_provenance": "row i is grid index i",
        "wall_clock_seconds": round(time.time() - started, 3),
        "started_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(started)),
    }

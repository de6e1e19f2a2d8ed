"""JSON process files: ``{"dims": {"A1":..,"A2":..,"B1":..,"B2":..}, "matrix": [[[re, im], ...], ...]}``.

Matrices are row-major in canonical factor order. Floats are written with
Python's shortest round-trip repr, so write -> read is bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .process import ProcessMatrix
from .tensor import LabSystems


class FormatError(ValueError):
    """Malformed process file."""


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"matrix is not a numeric array of [re, im] pairs: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise FormatError(f"matrix must be a square array of [re, im] pairs, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise FormatError("matrix has non-finite entries")
    # assign parts separately: re + 1j*im would drop the sign of -0.0
    out = np.empty(arr.shape[:2], dtype=complex)
    out.real, out.imag = arr[..., 0], arr[..., 1]
    return out


def process_to_dict(pm: ProcessMatrix) -> dict:
    return {"dims": pm.systems.to_dict(), "matrix": matrix_to_json(pm.w)}


def process_from_dict(data) -> ProcessMatrix:
    if not isinstance(data, dict) or "dims" not in data or "matrix" not in data:
        raise FormatError("process file needs 'dims' and 'matrix' fields")
    try:
        systems = LabSystems.from_dict(data["dims"])
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    w = matrix_from_json(data["matrix"])
    try:
        return ProcessMatrix(systems, w)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def dumps(pm: ProcessMatrix) -> str:
    return json.dumps(process_to_dict(pm))


def loads(text: str) -> ProcessMatrix:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc
    return process_from_dict(data)


def write_process(pm: ProcessMatrix, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(pm) + "\n")


def read_process(path) -> ProcessMatrix:
    return loads(Path(path).read_text())

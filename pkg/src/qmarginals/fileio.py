"""Matrix and spectrum files.

A matrix file is JSON with the subsystem dimensions and the complex entries
in row-major order as [re, im] pairs; a spectrum file holds a flat list of
real values. Plain text keeps fixture diffs readable, and Python's float
repr round-trips exactly, so write-then-read is bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .tensorcore import SystemDims, as_dims, hermitize


def write_matrix(path, matrix, dims) -> None:
    m = np.asarray(getattr(matrix, "matrix", matrix), dtype=complex)
    dims = as_dims(dims)
    if m.shape != (dims.total, dims.total):
        raise ValueError(f"matrix shape {m.shape} does not match dims {dims.dims}")
    payload = {
        "dims": list(dims.dims),
        "entries": [[float(z.real), float(z.imag)] for z in m.ravel()],
    }
    Path(path).write_text(json.dumps(payload, indent=1) + "\n")


def read_matrix(path) -> tuple[np.ndarray, SystemDims]:
    """Parse a matrix file; the matrix is validated Hermitian (within 1e-12)."""
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(payload, dict) or "dims" not in payload or "entries" not in payload:
        raise ValueError(f"{path}: expected an object with 'dims' and 'entries'")
    dims = as_dims(payload["dims"])
    n = dims.total
    entries = payload["entries"]
    if len(entries) != n * n:
        raise ValueError(f"{path}: expected {n * n} entries for dims {dims.dims}, "
                         f"got {len(entries)}")
    try:
        flat = np.array([complex(re, im) for re, im in entries])
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{path}: entries must be [re, im] pairs") from exc
    m = flat.reshape(n, n)
    if np.max(np.abs(m - m.conj().T)) > 1e-12:
        raise ValueError(f"{path}: matrix is not Hermitian within 1e-12")
    return hermitize(m), dims


def write_spectrum(path, values) -> None:
    v = np.asarray(values, dtype=float).ravel()
    Path(path).write_text(json.dumps({"values": [float(x) for x in v]}, indent=1) + "\n")


def read_spectrum(path, *, renormalize: bool = True) -> np.ndarray:
    """Parse a spectrum file, sorted descending.

    Values printed to few decimals may sum slightly off 1; deviations up to
    1e-3 are renormalized (larger ones are rejected as not a probability
    vector).
    """
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(payload, dict) or "values" not in payload:
        raise ValueError(f"{path}: expected an object with 'values'")
    v = np.sort(np.asarray(payload["values"], dtype=float).ravel())[::-1]
    if v.size == 0:
        raise ValueError(f"{path}: empty spectrum")
    if renormalize:
        s = float(v.sum())
        if abs(s - 1.0) > 1e-3:
            raise ValueError(f"{path}: values sum to {s}, not a probability vector")
        if s != 0:
            v = v / s
    return v

"""Matrix and report serialization.

Binary matrix layout (all little-endian)::

    8 bytes   magic b"PHOPMAT1"
    u64       rows
    u64       cols
    f64[2*rows*cols]  row-major entries, each as (real, imag)
"""

from __future__ import annotations

import csv
import io
import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"PHOPMAT1"
MATRIX_HEADER = ("row", "col", "re", "im")


def fmt(x) -> str:
    """Fixed 17-significant-digit rendering; round-trips every float64."""
    return format(float(x), ".17g")


def write_matrix_binary(path, matrix) -> None:
    m = np.ascontiguousarray(matrix, dtype="<c16")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<QQ", *m.shape))
        fh.write(m.tobytes(order="C"))


def read_matrix_binary(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if data[:8] != MAGIC:
        raise ValueError(f"{path}: not a PHOPMAT1 file")
    rows, cols = struct.unpack("<QQ", data[8:24])
    expected = 24 + 16 * rows * cols
    if len(data) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(data)}")
    return np.frombuffer(data, dtype="<c16", offset=24).reshape(rows, cols).astype(complex)


def write_matrix_csv(path, matrix) -> None:
    """One line per entry, zeros included, so the shape survives the round trip."""
    m = np.asarray(matrix, dtype=complex)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MATRIX_HEADER)
        for (i, j), z in np.ndenumerate(m):
            w.writerow((i, j, fmt(z.real), fmt(z.imag)))


def read_matrix_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != MATRIX_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        rows = [(int(i), int(j), float(re), float(im)) for i, j, re, im in reader]
    n_rows = max(r[0] for r in rows) + 1
    n_cols = max(r[1] for r in rows) + 1
    m = np.zeros((n_rows, n_cols), dtype=complex)
    for i, j, re, im in rows:
        m[i, j] = complex(re, im)
    return m


def _cell(v):
    if isinstance(v, bool) or v is None:
        return str(v).lower() if isinstance(v, bool) else ""
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def render_rows(rows: list[dict], out_format: str) -> str:
    """Render report rows as CSV (header from the first row) or a JSON array."""
    if out_format == "json":
        return json.dumps(rows, indent=2) + "\n"
    if out_format != "csv":
        raise ValueError(f"unknown output format {out_format!r}")
    buf = io.StringIO()
    if rows:
        w = csv.writer(buf, lineterminator="\n")
        keys = list(rows[0])
        w.writerow(keys)
        for row in rows:
            w.writerow([_cell(row.get(k)) for k in keys])
    return buf.getvalue()

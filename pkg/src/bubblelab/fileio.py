"""File formats: binary field container, CSV and JSON emission.

Field container layout (little-endian, documented for external readers):

    bytes 0:4    magic b"BLF1"
    bytes 4:8    uint32 version (currently 1)
    bytes 8:20   int32 nx, ny, m
    bytes 20:36  float64 lx, ly
    bytes 36:    float64 node values, C order, shape (nx, ny, m)

Round trips are bit-exact. CSV floats are printed with 17 significant
digits so numeric regressions are visible bitwise; JSON floats use the
shortest exact repr, which also round-trips bitwise.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .grid import DomainGrid, MapField
from .sphere import Sphere

MAGIC = b"BLF1"
VERSION = 1
_HEADER = struct.Struct("<4sIiiidd")


def write_field(path, field: MapField) -> None:
    g = field.grid
    header = _HEADER.pack(MAGIC, VERSION, g.nx, g.ny,
                          field.target.ambient_dim, g.lx, g.ly)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())


def read_field(path) -> MapField:
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, nx, ny, m, lx, ly = _HEADER.unpack(raw)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        data = np.frombuffer(fh.read(), dtype="<f8")
    expected = nx * ny * m
    if data.size != expected:
        raise ValueError(f"{path}: expected {expected} values, got {data.size}")
    grid = DomainGrid(nx, ny, lx=lx, ly=ly)
    return MapField(grid, Sphere(m - 1), data.reshape(nx, ny, m).copy())


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(x) for x in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path) -> tuple[list[str], list[list]]:
    text = Path(path).read_text().strip().splitlines()
    header = text[0].split(",")
    rows = []
    for line in text[1:]:
        row = []
        for tok in line.split(","):
            try:
                row.append(float(tok))
            except ValueError:
                row.append(tok)
        rows.append(row)
    return header, rows


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())

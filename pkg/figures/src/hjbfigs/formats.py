"""Readers for the exported field, trajectory, front, and stats files.

These parse the solver's documented file layouts directly; nothing here
recomputes solver quantities.  Field files come in two flavors: a text layout
(header ``ncols nrows dx dy``, rows top-down) and a packed layout (magic
``HJBF``, version 1, little-endian uint32 dims, float64 values row-major in
the same top-down order).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

PACKED_MAGIC = b"HJBF"


class InputError(ValueError):
    """Missing or malformed input file."""


@dataclass(frozen=True)
class FieldData:
    """Gridded values indexed [i, j] with j increasing upward."""

    values: np.ndarray
    dx: float
    dy: float

    @property
    def extent(self) -> tuple[float, float, float, float]:
        nx1, ny1 = self.values.shape
        return (0.0, (nx1 - 1) * self.dx, 0.0, (ny1 - 1) * self.dy)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        nx1, ny1 = self.values.shape
        return np.meshgrid(
            np.arange(nx1) * self.dx, np.arange(ny1) * self.dy, indexing="ij"
        )


def read_field(path) -> FieldData:
    path = Path(path)
    if not path.exists():
        raise InputError(f"input file not found: {path}")
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == PACKED_MAGIC:
        return _read_packed(path)
    return _read_text(path)


def _read_text(path) -> FieldData:
    rows = []
    header = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            toks = body.split()
            if header is None:
                if len(toks) != 4:
                    raise InputError(f"{path}:{lineno}: expected 4 header fields")
                header = [float(t) for t in toks]
                continue
            try:
                rows.append([float(t) for t in toks])
            except ValueError:
                raise InputError(f"{path}:{lineno}: non-numeric value") from None
    if header is None:
        raise InputError(f"{path}: empty field file")
    ncols, nrows = int(header[0]), int(header[1])
    if len(rows) != nrows or any(len(r) != ncols for r in rows):
        raise InputError(f"{path}: data does not match {ncols}x{nrows} header")
    values = np.array(rows)[::-1].T.copy()  # top-down rows -> [i, j] bottom-up
    return FieldData(values=values, dx=header[2], dy=header[3])


def _read_packed(path) -> FieldData:
    raw = Path(path).read_bytes()
    if len(raw) < 13 or raw[4] != 1:
        raise InputError(f"{path}: not a version-1 packed field")
    ncols, nrows = struct.unpack_from("<II", raw, 5)
    if len(raw) != 13 + 8 * ncols * nrows:
        raise InputError(f"{path}: payload does not match {ncols}x{nrows} dims")
    flat = np.frombuffer(raw, dtype="<f8", count=ncols * nrows, offset=13)
    values = flat.reshape(nrows, ncols)[::-1].T.copy()
    return FieldData(values=values, dx=1.0, dy=1.0)


def read_trajectories(path) -> list[np.ndarray]:
    """One (n, 5) array per polyline: columns x, y, t, J1, J2."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"input file not found: {path}")
    out = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        body = line.strip()
        if not body:
            continue
        toks = [float(t) for t in body.split()]
        if len(toks) % 5 != 0 or not toks:
            raise InputError(f"{path}:{lineno}: vertex tokens not a multiple of 5")
        out.append(np.array(toks).reshape(-1, 5))
    if not out:
        raise InputError(f"{path}: no polylines")
    return out


def read_front(path) -> np.ndarray:
    """Rows (lambda, J1, J2, payoff)."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"input file not found: {path}")
    rows = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        body = line.strip()
        if not body:
            continue
        toks = body.split()
        if len(toks) != 4:
            raise InputError(f"{path}:{lineno}: expected 'lambda J1 J2 payoff'")
        rows.append([float(t) for t in toks])
    if not rows:
        raise InputError(f"{path}: empty front file")
    return np.array(rows)


def read_stats(path) -> dict[str, float]:
    path = Path(path)
    if not path.exists():
        raise InputError(f"input file not found: {path}")
    out = {}
    for line in path.read_text().splitlines():
        if "=" in line:
            k, v = line.split("=", 1)
            try:
                out[k.strip()] = float(v)
            except ValueError:
                pass
    return out


def non_dominated(j1: np.ndarray, j2: np.ndarray) -> np.ndarray:
    """Indices of the non-dominated (J1, J2) pairs, J1 ascending."""
    order = np.lexsort((j2, j1))
    keep = []
    best_j2 = np.inf
    seen = set()
    for idx in order:
        key = (j1[idx], j2[idx])
        if key in seen:
            continue
        seen.add(key)
        if j2[idx] < best_j2:
            keep.append(idx)
            best_j2 = j2[idx]
    return np.array(keep, dtype=int)

"""Field/raster file formats, terrain ingestion, and the slope-speed law.

Two self-describing layouts are supported:

* text field:  header ``ncols nrows dx dy`` then nrows rows of ncols decimal
  values (17 significant digits, ``inf`` for unreachable points), top row
  first (largest y); internally rows are flipped to bottom-up j indexing.
* packed field: magic ``HJBF``, version byte 1, little-endian uint32 ncols
  and nrows, then float64 little-endian values in the same row order as the
  text layout.

Elevation rasters use the text layout with the extended header
``ncols nrows dx dy xorigin yorigin nodata``; nodata entries mark gridpoints
outside the domain.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .grid import DomainMask, Grid2D, ScalarField

PACKED_MAGIC = b"HJBF"
PACKED_VERSION = 1


class RasterParseError(ValueError):
    """Malformed field/raster file; carries the offending line number."""

    def __init__(self, path, lineno, message):
        super().__init__(f"{path}:{lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class ElevationRaster:
    """Elevation per gridpoint with nodata-derived domain mask."""

    dx: float
    dy: float
    xorigin: float
    yorigin: float
    nodata: float
    z: np.ndarray = field(repr=False)  # (ncols, nrows), j bottom-up, nodata -> nan

    @property
    def ncols(self) -> int:
        return self.z.shape[0]

    @property
    def nrows(self) -> int:
        return self.z.shape[1]

    def to_grid(self) -> Grid2D:
        return Grid2D(
            self.ncols - 1,
            self.nrows - 1,
            xmax=(self.ncols - 1) * self.dx,
            ymax=(self.nrows - 1) * self.dy,
        )

    def domain_mask(self) -> DomainMask:
        return DomainMask(self.to_grid(), np.isfinite(self.z))


def _format_value(v: float) -> str:
    if np.isposinf(v):
        return "inf"
    if np.isneginf(v):
        return "-inf"
    return f"{v:.17g}"


def _rows_top_down(values: np.ndarray):
    # values indexed [i, j] with j bottom-up; emit rows from the top
    for j in range(values.shape[1] - 1, -1, -1):
        yield values[:, j]


def export_field(fld: ScalarField, path, fmt: str = "text") -> None:
    """Write a field in the text or packed layout."""
    path = Path(path)
    g = fld.grid
    ncols, nrows = g.nx + 1, g.ny + 1
    if fmt == "text":
        with open(path, "w") as fh:
            fh.write(f"{ncols} {nrows} {g.dx:.17g} {g.dy:.17g}\n")
            for row in _rows_top_down(fld.values):
                fh.write(" ".join(_format_value(v) for v in row) + "\n")
    elif fmt == "packed":
        with open(path, "wb") as fh:
            fh.write(PACKED_MAGIC)
            fh.write(bytes([PACKED_VERSION]))
            fh.write(struct.pack("<II", ncols, nrows))
            buf = np.ascontiguousarray(
                np.stack([row for row in _rows_top_down(fld.values)]), dtype="<f8"
            )
            fh.write(buf.tobytes())
    else:
        raise ValueError(f"unknown field format {fmt!r} (expected 'text' or 'packed')")


def _parse_text_lines(path):
    with open(path, "r") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if body:
                yield lineno, body.split()


def _to_float(tok: str, path, lineno) -> float:
    try:
        return float(tok)
    except ValueError:
        raise RasterParseError(path, lineno, f"non-numeric token {tok!r}") from None


def _read_text_grid(path, header_len):
    lines = _parse_text_lines(path)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise RasterParseError(path, 0, "empty file") from None
    if len(header) != header_len:
        raise RasterParseError(
            path, lineno, f"expected {header_len} header fields, got {len(header)}"
        )
    hdr = [_to_float(t, path, lineno) for t in header]
    ncols, nrows = int(hdr[0]), int(hdr[1])
    if ncols < 2 or nrows < 2 or ncols != hdr[0] or nrows != hdr[1]:
        raise RasterParseError(path, lineno, f"bad dimensions {header[0]} x {header[1]}")
    rows = []
    for lineno, toks in lines:
        if len(toks) != ncols:
            raise RasterParseError(path, lineno, f"expected {ncols} values, got {len(toks)}")
        rows.append([_to_float(t, path, lineno) for t in toks])
        if len(rows) > nrows:
            raise RasterParseError(path, lineno, "more data rows than the header declares")
    if len(rows) != nrows:
        raise RasterParseError(path, 0, f"expected {nrows} data rows, got {len(rows)}")
    # top-down rows -> internal [i, j] with j bottom-up
    values = np.array(rows, dtype=np.float64)[::-1].T.copy()
    return hdr, values


def load_field(path) -> ScalarField:
    """Read a field file in either layout (packed detected by magic)."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == PACKED_MAGIC:
        return _load_packed(path)
    hdr, values = _read_text_grid(path, 4)
    ncols, nrows, dx, dy = int(hdr[0]), int(hdr[1]), hdr[2], hdr[3]
    grid = Grid2D(ncols - 1, nrows - 1, xmax=(ncols - 1) * dx, ymax=(nrows - 1) * dy)
    return ScalarField(grid, values)


def _load_packed(path) -> ScalarField:
    # the packed layout carries no spacing, so the loaded grid gets unit cells
    raw = Path(path).read_bytes()
    if len(raw) < 13 or raw[:4] != PACKED_MAGIC:
        raise RasterParseError(path, 0, "not a packed field file")
    if raw[4] != PACKED_VERSION:
        raise RasterParseError(path, 0, f"unsupported packed version {raw[4]}")
    ncols, nrows = struct.unpack_from("<II", raw, 5)
    expected = 13 + 8 * ncols * nrows
    if len(raw) != expected:
        raise RasterParseError(
            path, 0, f"payload of {len(raw)} bytes does not match {ncols}x{nrows} dims"
        )
    flat = np.frombuffer(raw, dtype="<f8", count=ncols * nrows, offset=13)
    values = flat.reshape(nrows, ncols)[::-1].T.copy()
    grid = Grid2D(ncols - 1, nrows - 1, xmax=float(ncols - 1), ymax=float(nrows - 1))
    return ScalarField(grid, values)


def load_raster(path) -> ElevationRaster:
    """Read an elevation raster (extended 7-field header); nodata -> NaN."""
    hdr, values = _read_text_grid(path, 7)
    nodata = hdr[6]
    z = np.where(values == nodata, np.nan, values)
    return ElevationRaster(
        dx=hdr[2], dy=hdr[3], xorigin=hdr[4], yorigin=hdr[5], nodata=nodata, z=z
    )


def export_raster(raster: ElevationRaster, path) -> None:
    path = Path(path)
    z = np.where(np.isfinite(raster.z), raster.z, raster.nodata)
    with open(path, "w") as fh:
        fh.write(
            f"{raster.ncols} {raster.nrows} {raster.dx:.17g} {raster.dy:.17g} "
            f"{raster.xorigin:.17g} {raster.yorigin:.17g} {raster.nodata:.17g}\n"
        )
        for row in _rows_top_down(z):
            fh.write(" ".join(_format_value(v) for v in row) + "\n")


def slope_magnitude(z: np.ndarray, dx: float, dy: float) -> np.ndarray:
    """|grad z| via central differences, one-sided next to nodata/edges."""
    fin = np.isfinite(z)
    nan = np.nan

    def axis_grad(zm, zp, ok_m, ok_p, h):
        both = ok_m & ok_p
        with np.errstate(invalid="ignore"):
            g = np.where(
                both,
                (zp - zm) / (2 * h),
                np.where(ok_p, (zp - z) / h, np.where(ok_m, (z - zm) / h, 0.0)),
            )
        return g

    zl = np.full_like(z, nan)
    zr = np.full_like(z, nan)
    zl[1:, :] = z[:-1, :]
    zr[:-1, :] = z[1:, :]
    ok_l = np.isfinite(zl)
    ok_r = np.isfinite(zr)
    gx = axis_grad(zl, zr, ok_l, ok_r, dx)

    zd = np.full_like(z, nan)
    zu = np.full_like(z, nan)
    zd[:, 1:] = z[:, :-1]
    zu[:, :-1] = z[:, 1:]
    gy = axis_grad(zd, zu, np.isfinite(zd), np.isfinite(zu), dy)

    s = np.hypot(gx, gy)
    s[~fin] = 0.0
    return s


def speed_from_slope(z: ElevationRaster | np.ndarray, dx: float | None = None, dy: float | None = None) -> np.ndarray:
    """Walking speed from terrain grade: 1.11 * exp(-(100 s + 2)^2 / 2345).

    Steep ground drives the speed to zero (up to machine precision); the
    solvers then treat those gridpoints as impassable via their f_min cutoff.
    """
    if isinstance(z, ElevationRaster):
        zv, dx, dy = z.z, z.dx, z.dy
    else:
        zv = z
        if dx is None or dy is None:
            raise ValueError("dx and dy are required with a bare elevation array")
    s = slope_magnitude(zv, dx, dy)
    f = 1.11 * np.exp(-((100.0 * s + 2.0) ** 2) / 2345.0)
    f[~np.isfinite(zv)] = 0.0
    return f

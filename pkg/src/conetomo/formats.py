"""Binary containers for rasters and sinograms, plus a 16-bit PGM preview.

Everything is little-endian and self-describing behind a short magic string.
Values are stored as raw float64, so write-then-read reproduces arrays
bit-exactly.
"""

from __future__ import annotations

import math
import struct

import numpy as np

from .geometry import TWO_PI, ConeSinogram, ImageGrid, RadonSinogram

_IMG_MAGIC = b"IMG1"
_CONE_MAGIC = b"CONESG01"
_RADON_MAGIC = b"RADSG001"


def _read_exact(fh, count: int, what: str) -> bytes:
    buf = fh.read(count)
    if len(buf) != count:
        raise ValueError(f"truncated file while reading {what}")
    return buf


def _expect_end(fh, kind: str):
    if fh.read(1):
        raise ValueError(f"trailing bytes after {kind} payload")


def _values_bytes(values) -> bytes:
    return np.ascontiguousarray(values, dtype="<f8").tobytes()


def write_image_raw(path, grid: ImageGrid):
    """Square raster: 16-byte header (magic, u32 rows, u32 cols, f32 half
    extent) followed by row-major float64 pixels."""
    header = _IMG_MAGIC + struct.pack("<IIf", grid.n_px, grid.n_px, grid.half_extent)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(_values_bytes(grid.values))


def read_image_raw(path) -> ImageGrid:
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 4, "magic")
        if magic != _IMG_MAGIC:
            raise ValueError(f"not a raster file: magic {magic!r}")
        rows, cols, half = struct.unpack("<IIf", _read_exact(fh, 12, "raster header"))
        if rows != cols:
            raise ValueError(f"raster must be square, got {rows}x{cols}")
        data = np.frombuffer(_read_exact(fh, 8 * rows * cols, "pixel data"), dtype="<f8")
        _expect_end(fh, "raster")
    return ImageGrid(n_px=int(rows), half_extent=float(half), values=data.reshape(rows, cols))


def write_pgm16(path, values) -> tuple[float, float]:
    """16-bit binary PGM preview, min-max scaled to 0..65535.

    Raster rows advance along +y, PGM rows top-down, so the image is flipped
    on write. Returns (vmin, vmax) so callers can record the scaling.
    """
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 2:
        raise ValueError("expected a 2D array")
    vmin, vmax = float(vals.min()), float(vals.max())
    span = vmax - vmin
    scaled = np.zeros_like(vals) if span == 0.0 else (vals - vmin) * (65535.0 / span)
    pix = np.rint(scaled).astype(">u2")[::-1]
    with open(path, "wb") as fh:
        fh.write(f"P5\n{vals.shape[1]} {vals.shape[0]}\n65535\n".encode("ascii"))
        fh.write(pix.tobytes())
    return vmin, vmax


def write_cone_sinogram(path, sino: ConeSinogram):
    """Header: magic, u32 vertex/axis/opening counts, four f64 giving the
    axis origin/step and opening origin/step; then f64 vertex coordinates and
    values in vertex-major, axis-middle, opening-minor order."""
    head = _CONE_MAGIC + struct.pack("<III", sino.vertices.shape[0], sino.n_beta, sino.n_psi)
    lattice = struct.pack(
        "<4d",
        0.0,
        TWO_PI / sino.n_beta,
        0.5 * math.pi / sino.n_psi,
        math.pi / sino.n_psi,
    )
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(lattice)
        fh.write(_values_bytes(sino.vertices))
        fh.write(_values_bytes(sino.values))


def read_cone_sinogram(path) -> ConeSinogram:
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 8, "magic")
        if magic != _CONE_MAGIC:
            raise ValueError(f"not a cone sinogram: magic {magic!r}")
        n_vert, n_beta, n_psi = struct.unpack("<III", _read_exact(fh, 12, "counts"))
        _read_exact(fh, 32, "lattice metadata")
        verts = np.frombuffer(_read_exact(fh, 16 * n_vert, "vertices"), dtype="<f8")
        vals = np.frombuffer(
            _read_exact(fh, 8 * n_vert * n_beta * n_psi, "values"), dtype="<f8"
        )
        _expect_end(fh, "cone sinogram")
    return ConeSinogram(
        vertices=verts.reshape(n_vert, 2),
        n_beta=int(n_beta),
        n_psi=int(n_psi),
        values=vals.reshape(n_vert, n_beta, n_psi),
    )


def write_radon_sinogram(path, sino: RadonSinogram):
    """Header: magic, u32 angle/offset counts, f64 offset half-range; values
    angle-major."""
    head = _RADON_MAGIC + struct.pack("<IId", sino.n_theta, sino.n_s, sino.s_max)
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(_values_bytes(sino.values))


def read_radon_sinogram(path) -> RadonSinogram:
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 8, "magic")
        if magic != _RADON_MAGIC:
            raise ValueError(f"not a radon sinogram: magic {magic!r}")
        n_theta, n_s, s_max = struct.unpack("<IId", _read_exact(fh, 16, "header"))
        vals = np.frombuffer(_read_exact(fh, 8 * n_theta * n_s, "values"), dtype="<f8")
        _expect_end(fh, "radon sinogram")
    return RadonSinogram(
        n_theta=int(n_theta),
        n_s=int(n_s),
        s_max=float(s_max),
        values=vals.reshape(n_theta, n_s),
    )

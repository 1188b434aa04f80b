"""Analytic 2D phantoms built from disks and Gaussian blobs.

Primitives add; a point covered by several primitives carries the sum of their
densities. Every integral transform of these phantoms (ray, line, cone) has a
closed form, which the rest of the package uses as ground truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .geometry import ImageGrid, axis_angles, opening_midpoints, pixel_centers

_SQRT_HALF_PI = math.sqrt(0.5 * math.pi)
_GAUSS_CUTOFF = 6.0  # beyond this many sigmas a blob is treated as supported


@dataclass(frozen=True)
class Disk:
    """Constant density on a closed disk."""

    center: tuple[float, float]
    radius: float
    density: float

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("disk radius must be positive")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))


@dataclass(frozen=True)
class GaussianBlob:
    """Isotropic Gaussian bump amp * exp(-|x - c|^2 / (2 sigma^2))."""

    center: tuple[float, float]
    sigma: float
    amplitude: float

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise ValueError("blob width must be positive")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))


@dataclass(frozen=True)
class Phantom:
    disks: tuple[Disk, ...] = field(default=())
    blobs: tuple[GaussianBlob, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "disks", tuple(self.disks))
        object.__setattr__(self, "blobs", tuple(self.blobs))

    @property
    def is_empty(self) -> bool:
        return not self.disks and not self.blobs


def centered_disk_phantom() -> Phantom:
    """Unit-density disk of radius 0.5 at the origin."""
    return Phantom(disks=(Disk((0.0, 0.0), 0.5, 1.0),))


def overlapping_disks_phantom() -> Phantom:
    """Two overlapping disks (densities 0.3 and 0.7) whose lens sums to 1.0."""
    return Phantom(
        disks=(
            Disk((0.0, 0.0), 0.5, 0.3),
            Disk((0.5, 0.0), 0.3, 0.7),
        )
    )


def eval_phantom(phantom: Phantom, points) -> np.ndarray:
    """Pointwise density at ``points`` of shape (..., 2)."""
    pts = np.asarray(points, dtype=float)
    if pts.shape[-1] != 2:
        raise ValueError("points must have a trailing axis of length 2")
    out = np.zeros(pts.shape[:-1], dtype=float)
    x = pts[..., 0]
    y = pts[..., 1]
    for d in phantom.disks:
        r2 = (x - d.center[0]) ** 2 + (y - d.center[1]) ** 2
        out += d.density * (r2 <= d.radius * d.radius)
    for b in phantom.blobs:
        r2 = (x - b.center[0]) ** 2 + (y - b.center[1]) ** 2
        out += b.amplitude * np.exp(-r2 / (2.0 * b.sigma * b.sigma))
    return out


def translated(phantom: Phantom, offset) -> Phantom:
    """Phantom moved by ``offset``: every primitive center shifts."""
    ox, oy = float(offset[0]), float(offset[1])
    return Phantom(
        disks=tuple(
            Disk((d.center[0] + ox, d.center[1] + oy), d.radius, d.density)
            for d in phantom.disks
        ),
        blobs=tuple(
            GaussianBlob((b.center[0] + ox, b.center[1] + oy), b.sigma, b.amplitude)
            for b in phantom.blobs
        ),
    )


def rotated(phantom: Phantom, angle: float) -> Phantom:
    """Phantom rotated counterclockwise about the origin by ``angle`` radians."""
    c, s = math.cos(angle), math.sin(angle)

    def rot(p):
        return (c * p[0] - s * p[1], s * p[0] + c * p[1])

    return Phantom(
        disks=tuple(Disk(rot(d.center), d.radius, d.density) for d in phantom.disks),
        blobs=tuple(GaussianBlob(rot(b.center), b.sigma, b.amplitude) for b in phantom.blobs),
    )


def support_radius(phantom: Phantom) -> float:
    """Radius of an origin-centered ball that holds the (effective) support."""
    bound = 0.0
    for d in phantom.disks:
        bound = max(bound, math.hypot(*d.center) + d.radius)
    for b in phantom.blobs:
        bound = max(bound, math.hypot(*b.center) + _GAUSS_CUTOFF * b.sigma)
    return bound


def support_halfwidth(phantom: Phantom) -> float:
    """Half side of an origin-centered square that holds the (effective) support."""
    bound = 0.0
    for d in phantom.disks:
        bound = max(bound, abs(d.center[0]) + d.radius, abs(d.center[1]) + d.radius)
    for b in phantom.blobs:
        reach = _GAUSS_CUTOFF * b.sigma
        bound = max(bound, abs(b.center[0]) + reach, abs(b.center[1]) + reach)
    return bound


def _ray_disk_lengths(disk: Disk, qx, qy, dirx, diry):
    """Length of {origin + t*dir : t >= 0} inside the disk, q = center - origin."""
    m = dirx * qx + diry * qy
    disc = m * m - (qx * qx + qy * qy - disk.radius * disk.radius)
    hit = disc > 0.0
    root = np.sqrt(np.where(hit, disc, 0.0))
    t_far = m + root
    t_near = m - root
    length = np.maximum(t_far, 0.0) - np.maximum(t_near, 0.0)
    return np.where(hit, length, 0.0)


def _ray_blob_integrals(blob: GaussianBlob, qx, qy, dirx, diry):
    """Integral of the blob over {origin + t*dir : t >= 0}, q = center - origin."""
    m = dirx * qx + diry * qy
    perp2 = np.maximum(qx * qx + qy * qy - m * m, 0.0)
    sig = blob.sigma
    profile = np.exp(-perp2 / (2.0 * sig * sig))
    # int_0^inf exp(-(t-m)^2/(2 sig^2)) dt = sig*sqrt(pi/2)*erfc(-m/(sig*sqrt(2)))
    tail = erfc(-m / (sig * math.sqrt(2.0)))
    return blob.amplitude * profile * sig * _SQRT_HALF_PI * tail


def ray_integral(phantom: Phantom, origin, angle):
    """Integral of the phantom along the ray from ``origin`` toward
    ``(sin angle, cos angle)``. ``angle`` may be an array; the result
    broadcasts with it."""
    ox, oy = float(origin[0]), float(origin[1])
    a = np.asarray(angle, dtype=float)
    dirx, diry = np.sin(a), np.cos(a)
    out = np.zeros(np.broadcast(dirx, diry).shape, dtype=float)
    for d in phantom.disks:
        out += d.density * _ray_disk_lengths(d, d.center[0] - ox, d.center[1] - oy, dirx, diry)
    for b in phantom.blobs:
        out += _ray_blob_integrals(b, b.center[0] - ox, b.center[1] - oy, dirx, diry)
    if np.isscalar(angle) or np.ndim(angle) == 0:
        return float(out)
    return out


def ray_integral_table(phantom: Phantom, origins, angles) -> np.ndarray:
    """Ray integrals for every (origin, angle) pair.

    Parameters
    ----------
    origins : (P, 2) array of ray start points.
    angles : (A,) array of direction angles.

    Returns
    -------
    (P, A) array; entry [p, a] integrates the phantom along the ray leaving
    ``origins[p]`` toward ``(sin angles[a], cos angles[a])``.
    """
    org = np.asarray(origins, dtype=float)
    ang = np.asarray(angles, dtype=float)
    dirx = np.sin(ang)[None, :]
    diry = np.cos(ang)[None, :]
    out = np.zeros((org.shape[0], ang.size), dtype=float)
    ox = org[:, 0][:, None]
    oy = org[:, 1][:, None]
    for d in phantom.disks:
        out += d.density * _ray_disk_lengths(d, d.center[0] - ox, d.center[1] - oy, dirx, diry)
    for b in phantom.blobs:
        out += _ray_blob_integrals(b, b.center[0] - ox, b.center[1] - oy, dirx, diry)
    return out


def radon_analytic(phantom: Phantom, angle, offset):
    """Line integral over {x : x . (sin angle, cos angle) = offset}.

    Broadcasts over ``angle`` and ``offset``. Even in the pair
    (direction, offset): negating both leaves the line unchanged.
    """
    a = np.asarray(angle, dtype=float)
    s = np.asarray(offset, dtype=float)
    wx, wy = np.sin(a), np.cos(a)
    out = np.zeros(np.broadcast(wx * s, s).shape, dtype=float)
    for d in phantom.disks:
        dist = np.abs(s - (wx * d.center[0] + wy * d.center[1]))
        gap2 = d.radius * d.radius - dist * dist
        out += d.density * 2.0 * np.sqrt(np.where(gap2 > 0.0, gap2, 0.0))
    for b in phantom.blobs:
        dist = s - (wx * b.center[0] + wy * b.center[1])
        out += (
            b.amplitude
            * math.sqrt(2.0 * math.pi)
            * b.sigma
            * np.exp(-dist * dist / (2.0 * b.sigma * b.sigma))
        )
    if np.ndim(angle) == 0 and np.ndim(offset) == 0:
        return float(out)
    return out


def cone_analytic_2d(phantom: Phantom, vertex, axis_angle, opening):
    """Cone (V-line) transform: sum of the two ray integrals from ``vertex``
    whose directions make the angle ``opening`` with the axis
    ``(sin axis_angle, cos axis_angle)``.

    ``axis_angle`` and ``opening`` broadcast together. Openings must lie
    strictly inside (0, pi).
    """
    psi = np.asarray(opening, dtype=float)
    if np.any(psi <= 0.0) or np.any(psi >= math.pi):
        raise ValueError("opening angles must lie strictly between 0 and pi")
    phi = np.asarray(axis_angle, dtype=float)
    first = ray_integral(phantom, vertex, phi + psi)
    second = ray_integral(phantom, vertex, phi - psi)
    out = first + second
    if np.ndim(axis_angle) == 0 and np.ndim(opening) == 0:
        return float(out)
    return out


def cone_block_analytic(phantom: Phantom, vertex, n_beta: int, n_psi: int) -> np.ndarray:
    """Cone-transform samples at one vertex over the standard lattice:
    axis angles uniform on [0, 2*pi), openings at midpoints of (0, pi).
    Entry [j, k] sums the closed-form ray integrals at angles phi_j +- psi_k."""
    phis = axis_angles(n_beta)
    psis = opening_midpoints(n_psi)
    plus = (phis[:, None] + psis[None, :]).ravel()
    minus = (phis[:, None] - psis[None, :]).ravel()
    rays = ray_integral(phantom, vertex, np.concatenate([plus, minus]))
    return (rays[: plus.size] + rays[plus.size :]).reshape(n_beta, n_psi)


def rasterize(phantom: Phantom, n_px: int, half_extent: float, subsamples: int = 4) -> ImageGrid:
    """Antialiased raster: each pixel is the mean of the density over a
    subsamples x subsamples lattice inside the pixel."""
    if subsamples < 1:
        raise ValueError("subsamples must be at least 1")
    fine = pixel_centers(n_px * subsamples, half_extent)
    X, Y = np.meshgrid(fine, fine)
    vals = eval_phantom(phantom, np.stack([X, Y], axis=-1))
    pooled = vals.reshape(n_px, subsamples, n_px, subsamples).mean(axis=(1, 3))
    return ImageGrid(n_px, half_extent, pooled)


def parse_phantom_text(text: str) -> Phantom:
    """Parse the plain-text phantom description.

    One primitive per line: ``disk cx cy radius density`` or
    ``gauss cx cy sigma amplitude``. ``#`` starts a comment; blank lines are
    skipped.
    """
    disks: list[Disk] = []
    blobs: list[GaussianBlob] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0].lower()
        if len(parts) != 5:
            raise ValueError(f"line {lineno}: expected 'kind cx cy a b', got {raw!r}")
        try:
            nums = [float(p) for p in parts[1:]]
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad number in {raw!r}") from exc
        if kind == "disk":
            disks.append(Disk((nums[0], nums[1]), nums[2], nums[3]))
        elif kind == "gauss":
            blobs.append(GaussianBlob((nums[0], nums[1]), nums[2], nums[3]))
        else:
            raise ValueError(f"line {lineno}: unknown primitive {kind!r}")
    return Phantom(disks=tuple(disks), blobs=tuple(blobs))


def load_phantom_file(path) -> Phantom:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_phantom_text(fh.read())

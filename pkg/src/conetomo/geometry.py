"""Geometric primitives and sample-lattice containers shared by all modules.

Angle convention used throughout the package: an angle ``a`` on the circle maps
to the unit vector ``(sin a, cos a)``, so angle 0 points along +y and the angle
grows toward +x. Every operation that takes or returns directions relies on
this single convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


def direction_vector(angle):
    """Unit vector(s) ``(sin angle, cos angle)`` for scalar or array input."""
    a = np.asarray(angle, dtype=float)
    return np.stack([np.sin(a), np.cos(a)], axis=-1)


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^(n-1) in R^n, 2*pi^(n/2)/Gamma(n/2)."""
    if n < 1:
        raise ValueError(f"dimension must be a positive integer, got {n}")
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def _freeze(obj, name, value):
    object.__setattr__(obj, name, value)


def _owned_array(values, dtype=float):
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Direction2:
    """Direction on the circle, stored as an angle reduced to [0, 2*pi)."""

    phi: float

    def __post_init__(self):
        _freeze(self, "phi", float(self.phi) % TWO_PI)

    @property
    def vector(self) -> np.ndarray:
        return direction_vector(self.phi)


@dataclass(frozen=True)
class DirectionN:
    """Unit vector in R^n; the constructor rejects non-unit input."""

    components: np.ndarray

    def __post_init__(self):
        v = _owned_array(self.components)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("direction needs a flat vector with at least 2 entries")
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise ValueError("direction vector must have unit length (within 1e-12)")
        _freeze(self, "components", v)

    @classmethod
    def normalized(cls, vector) -> "DirectionN":
        v = np.asarray(vector, dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(v / norm)

    @classmethod
    def last_axis(cls, dim: int) -> "DirectionN":
        """The vertical axis e_n = (0, ..., 0, 1)."""
        v = np.zeros(dim)
        v[-1] = 1.0
        return cls(v)

    @property
    def dim(self) -> int:
        return self.components.size


@dataclass(frozen=True)
class Cone:
    """Right circular cone: vertex, unit axis, and half-opening angle.

    The surface consists of the points x with ``(x - vertex) . axis =
    |x - vertex| * cos(opening)``. The opening is restricted to the open
    interval (0, pi): the degenerate ray and the flipped ray are excluded.
    """

    vertex: np.ndarray
    axis: DirectionN
    opening: float

    def __post_init__(self):
        v = _owned_array(self.vertex)
        if v.ndim != 1 or v.size != self.axis.dim:
            raise ValueError("vertex and axis must live in the same R^n")
        if not 0.0 < self.opening < math.pi:
            raise ValueError("opening angle must lie strictly between 0 and pi")
        _freeze(self, "vertex", v)
        _freeze(self, "opening", float(self.opening))


def cone_contains(cone: Cone, point, tol: float = 1e-9) -> bool:
    """Whether a point lies on the cone surface, up to an absolute slack.

    The defining relation is scale-dependent, so the slack applies to
    ``(x - vertex) . axis - |x - vertex| cos(opening)`` relative to
    ``1 + |x - vertex|``.
    """
    d = np.asarray(point, dtype=float) - cone.vertex
    r = np.linalg.norm(d)
    lhs = float(d @ cone.axis.components)
    return abs(lhs - r * math.cos(cone.opening)) <= tol * (1.0 + r)


def reflect_cone(cone: Cone) -> Cone:
    """The same surface parametrized by the flipped axis and opening pi - psi."""
    return Cone(cone.vertex, DirectionN(-cone.axis.components), math.pi - cone.opening)


def pixel_centers(n_px: int, half_extent: float) -> np.ndarray:
    """Per-axis pixel-center coordinates -L + (i + 0.5) * (2L / n)."""
    h = 2.0 * half_extent / n_px
    return -half_extent + (np.arange(n_px) + 0.5) * h


@dataclass(frozen=True)
class ImageGrid:
    """Square pixel raster over [-half_extent, half_extent]^2.

    ``values[iy, ix]`` holds the sample at ``(x, y) = (c[ix], c[iy])`` where
    ``c = pixel_centers(n_px, half_extent)``; rows advance along +y. Writers
    that need top-down row order (PGM) flip at output time.
    """

    n_px: int
    half_extent: float
    values: np.ndarray

    def __post_init__(self):
        if self.n_px < 2:
            raise ValueError("raster needs at least 2 pixels per side")
        if self.half_extent <= 0.0:
            raise ValueError("half_extent must be positive")
        v = _owned_array(self.values)
        if v.shape != (self.n_px, self.n_px):
            raise ValueError(
                f"values shape {v.shape} does not match n_px {self.n_px}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("raster values must be finite")
        _freeze(self, "values", v)

    @property
    def pixel_size(self) -> float:
        return 2.0 * self.half_extent / self.n_px

    @property
    def coords(self) -> np.ndarray:
        return pixel_centers(self.n_px, self.half_extent)


@dataclass(frozen=True)
class RadonSinogram:
    """Line-integral samples on the lattice theta_i = i*pi/n_theta,
    s_j uniform on [-s_max, s_max] endpoints included."""

    n_theta: int
    n_s: int
    s_max: float
    values: np.ndarray

    def __post_init__(self):
        if self.n_theta < 1 or self.n_s < 2:
            raise ValueError("sinogram lattice needs n_theta >= 1 and n_s >= 2")
        if self.s_max <= 0.0:
            raise ValueError("s_max must be positive")
        v = _owned_array(self.values)
        if v.shape != (self.n_theta, self.n_s):
            raise ValueError(
                f"values shape {v.shape} does not match ({self.n_theta}, {self.n_s})"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("sinogram values must be finite")
        _freeze(self, "values", v)

    @property
    def thetas(self) -> np.ndarray:
        return np.arange(self.n_theta) * (math.pi / self.n_theta)

    @property
    def offsets(self) -> np.ndarray:
        return np.linspace(-self.s_max, self.s_max, self.n_s)


def axis_angles(n_beta: int) -> np.ndarray:
    """Cone-axis angle lattice: n_beta angles uniform on [0, 2*pi)."""
    return np.arange(n_beta) * (TWO_PI / n_beta)


def opening_midpoints(n_psi: int) -> np.ndarray:
    """Half-opening lattice: midpoints (k + 0.5) * pi / n_psi, never 0 or pi."""
    return (np.arange(n_psi) + 0.5) * (math.pi / n_psi)


@dataclass(frozen=True)
class ConeSinogram:
    """Cone-transform samples, indexed [vertex, axis angle, opening].

    Axis angles run over ``axis_angles(n_beta)`` and openings over
    ``opening_midpoints(n_psi)``; the midpoint lattice keeps every opening
    strictly inside (0, pi) so the transform is defined at every sample.
    """

    vertices: np.ndarray
    n_beta: int
    n_psi: int
    values: np.ndarray

    def __post_init__(self):
        verts = _owned_array(self.vertices)
        if verts.ndim != 2 or verts.shape[1] != 2:
            raise ValueError("vertices must be an array of 2D points")
        if self.n_beta < 1 or self.n_psi < 1:
            raise ValueError("lattice sizes must be positive")
        v = _owned_array(self.values)
        expect = (verts.shape[0], self.n_beta, self.n_psi)
        if v.shape != expect:
            raise ValueError(f"values shape {v.shape} does not match {expect}")
        if not np.all(np.isfinite(v)):
            raise ValueError("cone sinogram values must be finite")
        _freeze(self, "vertices", verts)
        _freeze(self, "values", v)

    @property
    def betas(self) -> np.ndarray:
        return axis_angles(self.n_beta)

    @property
    def openings(self) -> np.ndarray:
        return opening_midpoints(self.n_psi)

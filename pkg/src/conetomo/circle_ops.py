"""Operators on functions sampled over the circle, plus sphere eigenvalues.

Samples live on the uniform lattice ``angles = 2*pi*j/M``. The cosine
transform, quarter-turn average, and Laplace-type polynomials are all Fourier
multipliers on this lattice, so the spectral forms below are exact on the
trigonometric interpolant of the samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import eval_chebyt, eval_gegenbauer, eval_legendre

from .geometry import TWO_PI, sphere_area, _freeze, _owned_array


@dataclass(frozen=True)
class CircleFunction:
    """Real samples on the uniform circle lattice; M must be even and >= 8."""

    samples: np.ndarray

    def __post_init__(self):
        v = _owned_array(self.samples)
        if v.ndim != 1:
            raise ValueError("samples must form a flat array")
        if v.size < 8 or v.size % 2:
            raise ValueError("need an even sample count of at least 8")
        _freeze(self, "samples", v)

    @property
    def size(self) -> int:
        return self.samples.size

    @property
    def angles(self) -> np.ndarray:
        return np.arange(self.size) * (TWO_PI / self.size)


def cosine_kernel_eigenvalues(num_modes: int) -> np.ndarray:
    """Per-frequency eigenvalues of the normalized |t| kernel on the circle.

    The kernel average (1/2pi) int |cos(a - b)| f(b) db maps the frequency-m
    harmonic to lambda_m times itself with lambda_m = 0 for odd m and
    lambda_m = (2/pi) (-1)^(m/2+1) / (m^2 - 1) for even m (so 2/pi at m = 0).
    """
    m = np.arange(num_modes)
    vals = np.zeros(num_modes)
    even = m % 2 == 0
    me = m[even]
    sign = np.where((me // 2) % 2 == 0, -1.0, 1.0)
    vals[even] = (2.0 / math.pi) * sign / (me.astype(float) ** 2 - 1.0)
    return vals


def cosine_transform_s1(f: CircleFunction) -> CircleFunction:
    """Cosine transform on the circle: average of f against |dot product|.

    Computed exactly on the trigonometric interpolant of the samples: the
    |t| kernel is diagonal in frequency with the closed-form eigenvalues of
    ``cosine_kernel_eigenvalues``. Annihilates odd harmonics.
    """
    spec = np.fft.rfft(f.samples)
    lam = cosine_kernel_eigenvalues(spec.size)
    return CircleFunction(np.fft.irfft(spec * lam, n=f.size))


def cosine_transform_s1_quadrature(f: CircleFunction) -> CircleFunction:
    """Lattice Riemann-sum form of the cosine transform.

    (1/2pi) (2pi/M) sum_k f_k |cos(a_k - a_j)|. Kept as an independent
    cross-check of the spectral route; the kernel kinks limit it to roughly
    O(M^-2) accuracy per mode.
    """
    kernel = np.abs(np.cos(f.angles))
    spec = np.fft.rfft(f.samples) * np.fft.rfft(kernel)
    return CircleFunction(np.fft.irfft(spec, n=f.size) / f.size)


def funk_transform_s1(f: CircleFunction) -> CircleFunction:
    """Average of f over the two lattice points a quarter turn away."""
    m = f.size
    if m % 4:
        raise ValueError("sample count must be divisible by 4 so the quarter turn lands on the lattice")
    q = m // 4
    s = f.samples
    return CircleFunction(0.5 * (np.roll(s, -q) + np.roll(s, q)))


def beltrami_poly_multipliers(num_modes: int, n: int, r: int) -> np.ndarray:
    """Frequency response of the degree-r sphere-Laplacian polynomial.

    The polynomial is 4^(-r) prod_{k=0}^{r-1} (-Lap + (2k-1)(n-1-2k)); on the
    circle the Laplacian acts as -m^2, so frequency m picks up
    4^(-r) prod_k (m^2 + (2k-1)(n-1-2k)).
    """
    if r < 1:
        raise ValueError("polynomial degree must be at least 1")
    m2 = np.arange(num_modes, dtype=float) ** 2
    mult = np.ones(num_modes)
    for k in range(r):
        mult *= m2 + (2 * k - 1) * (n - 1 - 2 * k)
    return mult / 4.0**r


def _second_difference_5pt(samples: np.ndarray, h: float) -> np.ndarray:
    return (
        -np.roll(samples, -2)
        + 16.0 * np.roll(samples, -1)
        - 30.0 * samples
        + 16.0 * np.roll(samples, 1)
        - np.roll(samples, 2)
    ) / (12.0 * h * h)


def beltrami_poly_apply(
    f: CircleFunction,
    n: int = 2,
    r: int = 1,
    max_harmonic: int | None = None,
    mode: str = "spectral",
) -> CircleFunction:
    """Apply the degree-r sphere-Laplacian polynomial to circle samples.

    ``mode="spectral"`` multiplies Fourier modes by the exact response
    (optionally zeroing frequencies above ``max_harmonic``); ``mode="fd5"``
    realizes the Laplacian with the periodic 5-point stencil instead, as an
    independent cross-check (``max_harmonic`` is ignored there).
    """
    if mode == "spectral":
        spec = np.fft.rfft(f.samples)
        mult = beltrami_poly_multipliers(spec.size, n, r)
        if max_harmonic is not None:
            mult = np.where(np.arange(spec.size) <= max_harmonic, mult, 0.0)
        return CircleFunction(np.fft.irfft(spec * mult, n=f.size))
    if mode == "fd5":
        h = TWO_PI / f.size
        g = np.array(f.samples)
        for k in range(r):
            g = 0.25 * (-_second_difference_5pt(g, h) + (2 * k - 1) * (n - 1 - 2 * k) * g)
        return CircleFunction(g)
    raise ValueError(f"unknown mode {mode!r}")


def _dimension_legendre(m: int, n: int, t):
    """Degree-m Legendre polynomial attached to the sphere S^(n-1), P_m(1) = 1."""
    if n == 2:
        return eval_chebyt(m, t)
    if n == 3:
        return eval_legendre(m, t)
    lam = 0.5 * (n - 2)
    norm = eval_gegenbauer(m, lam, 1.0)
    return eval_gegenbauer(m, lam, t) / norm


def funk_hecke_lambda(m: int, n: int) -> float:
    """Eigenvalue of the un-normalized |t| kernel on degree-m harmonics in R^n.

    lambda_m = |S^(n-2)| int_-1^1 |t| P_m(t) (1 - t^2)^((n-3)/2) dt, evaluated
    by adaptive quadrature split at the kink. For n = 2 the endpoint weight is
    removed with t = cos(theta). Odd m yields 0; the n = 2 closed form is
    4 (-1)^(m/2+1) / (m^2 - 1) for even m.
    """
    if m < 0:
        raise ValueError("harmonic degree must be nonnegative")
    if n < 2:
        raise ValueError("the kernel needs ambient dimension n >= 2")
    if n == 2:
        val, _ = quad(
            lambda th: abs(math.cos(th)) * math.cos(m * th),
            0.0,
            math.pi,
            points=[math.pi / 2.0],
            limit=200,
        )
        return 2.0 * val
    power = 0.5 * (n - 3)

    def integrand(t):
        return abs(t) * _dimension_legendre(m, n, t) * (1.0 - t * t) ** power

    val, _ = quad(integrand, -1.0, 1.0, points=[0.0], limit=200)
    return sphere_area(n - 1) * val

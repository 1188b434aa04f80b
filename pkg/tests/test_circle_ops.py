import math

import numpy as np
import pytest
from scipy.integrate import quad

from conetomo.circle_ops import (
    CircleFunction,
    beltrami_poly_apply,
    beltrami_poly_multipliers,
    cosine_kernel_eigenvalues,
    cosine_transform_s1,
    cosine_transform_s1_quadrature,
    funk_hecke_lambda,
    funk_transform_s1,
)
from conetomo.geometry import sphere_area


def harmonic(m, M=512, kind="cos", phase=0.0):
    a = np.arange(M) * (2 * math.pi / M) + phase
    return CircleFunction(np.cos(m * a) if kind == "cos" else np.sin(m * a))


def test_circle_function_validation():
    with pytest.raises(ValueError):
        CircleFunction(np.zeros((4, 4)))
    with pytest.raises(ValueError):
        CircleFunction(np.zeros(7))  # odd length
    f = CircleFunction(np.zeros(16))
    assert f.size == 16
    assert np.allclose(np.diff(f.angles), 2 * math.pi / 16)


def test_cosine_kernel_eigenvalue_table():
    vals = cosine_kernel_eigenvalues(9)
    assert vals[0] == pytest.approx(2 / math.pi)
    assert vals[2] == pytest.approx(2 / (3 * math.pi))
    assert vals[4] == pytest.approx(-2 / (15 * math.pi))
    assert vals[6] == pytest.approx(2 / (35 * math.pi))
    assert np.all(vals[1::2] == 0.0)


def test_cosine_eigenvalues_match_quadrature_oracle():
    # averaged kernel: eigenvalue_m = (1/2pi) * 2 * int_0^pi |cos t| cos(m t) dt
    vals = cosine_kernel_eigenvalues(11)
    for m in range(0, 11, 2):
        want, _ = quad(lambda t, m=m: abs(math.cos(t)) * math.cos(m * t), 0, math.pi, points=[math.pi / 2])
        assert vals[m] == pytest.approx(want / math.pi, abs=1e-12)


def test_cosine_transform_eigenvectors():
    for m in range(0, 10, 2):
        f = harmonic(m, phase=0.37)
        out = cosine_transform_s1(f)
        lam = cosine_kernel_eigenvalues(m + 1)[m]
        assert np.max(np.abs(out.samples - lam * f.samples)) < 1e-6 * abs(lam)


def test_cosine_transform_annihilates_odd():
    for m in (1, 3, 5, 9):
        out = cosine_transform_s1(harmonic(m, kind="sin"))
        assert np.max(np.abs(out.samples)) < 1e-10


def test_cosine_transform_quadrature_variant_agrees():
    rng = np.random.default_rng(5)
    coeffs = rng.normal(size=8)
    a = np.arange(512) * (2 * math.pi / 512)
    f = CircleFunction(sum(c * np.cos(2 * k * a) for k, c in enumerate(coeffs)))
    spec = cosine_transform_s1(f)
    quad_v = cosine_transform_s1_quadrature(f)
    assert np.max(np.abs(spec.samples - quad_v.samples)) < 1e-4


def test_funk_transform_quarter_turn():
    a = np.arange(64) * (2 * math.pi / 64)
    f2 = CircleFunction(np.cos(2 * a))
    f4 = CircleFunction(np.cos(4 * a))
    assert np.allclose(funk_transform_s1(f2).samples, -np.cos(2 * a), atol=1e-12)
    assert np.allclose(funk_transform_s1(f4).samples, np.cos(4 * a), atol=1e-12)
    # odd harmonics vanish
    f3 = CircleFunction(np.sin(3 * a))
    assert np.max(np.abs(funk_transform_s1(f3).samples)) < 1e-12
    with pytest.raises(ValueError):
        funk_transform_s1(CircleFunction(np.zeros(10)))  # length not divisible by 4


def test_beltrami_multipliers():
    mult = beltrami_poly_multipliers(6, n=2, r=1)
    assert np.allclose(mult, (np.arange(6) ** 2 - 1) / 4.0)
    with pytest.raises(ValueError):
        beltrami_poly_multipliers(4, n=2, r=0)
    # product runs k = 0 .. r-1: n=3 r=1 gives (m^2 - 2)/4, n=2 r=2 squares
    m = np.arange(5)
    assert np.allclose(beltrami_poly_multipliers(5, n=3, r=1), (m**2 - 2) / 4.0)
    assert np.allclose(beltrami_poly_multipliers(5, n=2, r=2), ((m**2 - 1) / 4.0) ** 2)


def test_beltrami_apply_spectral_vs_fd5():
    a = np.arange(256) * (2 * math.pi / 256)
    f = CircleFunction(1.3 * np.cos(2 * a) - 0.4 * np.cos(6 * a) + 0.2 * np.sin(4 * a))
    spec = beltrami_poly_apply(f, n=2, r=1, mode="spectral")
    fd = beltrami_poly_apply(f, n=2, r=1, mode="fd5")
    assert np.max(np.abs(spec.samples - fd.samples)) < 1e-4
    with pytest.raises(ValueError):
        beltrami_poly_apply(f, mode="exact")


def test_beltrami_apply_max_harmonic_truncates():
    a = np.arange(64) * (2 * math.pi / 64)
    f = CircleFunction(np.cos(2 * a) + np.cos(10 * a))
    out = beltrami_poly_apply(f, n=2, r=1, max_harmonic=4)
    want = (4 - 1) / 4.0 * np.cos(2 * a)
    assert np.allclose(out.samples, want, atol=1e-12)


def test_composite_multiplier_identity():
    # -2 pi * P1(beltrami) . funk . cosine = identity on even harmonics
    rng = np.random.default_rng(11)
    a = np.arange(512) * (2 * math.pi / 512)
    f = np.zeros(512)
    for m in range(0, 42, 2):
        f += rng.normal() * np.cos(m * a) + rng.normal() * np.sin(m * a)
    g = cosine_transform_s1(CircleFunction(f))
    g = funk_transform_s1(g)
    g = beltrami_poly_apply(g, n=2, r=1)
    out = -2 * math.pi * g.samples
    assert np.max(np.abs(out - f)) < 1e-6 * np.max(np.abs(f))


def test_funk_hecke_lambda_values():
    assert funk_hecke_lambda(0, 2) == pytest.approx(4.0, abs=1e-10)
    assert funk_hecke_lambda(2, 2) == pytest.approx(4.0 / 3.0, abs=1e-10)
    assert funk_hecke_lambda(4, 2) == pytest.approx(-4.0 / 15.0, abs=1e-10)
    assert abs(funk_hecke_lambda(1, 2)) < 1e-12
    assert abs(funk_hecke_lambda(3, 2)) < 1e-12
    assert funk_hecke_lambda(0, 3) == pytest.approx(2 * math.pi, abs=1e-10)
    assert funk_hecke_lambda(2, 3) == pytest.approx(math.pi / 2, abs=1e-10)
    assert abs(funk_hecke_lambda(1, 3)) < 1e-12
    # n=4, m=0: |S^2| * int |t| sqrt(1-t^2) dt = 4 pi * 2/3
    assert funk_hecke_lambda(0, 4) == pytest.approx(8 * math.pi / 3, abs=1e-8)
    with pytest.raises(ValueError):
        funk_hecke_lambda(-1, 2)
    with pytest.raises(ValueError):
        funk_hecke_lambda(0, 1)


def test_cosine_eigenvalues_consistent_with_funk_hecke():
    # the averaged-kernel eigenvalues are lambda_m / |S^1|
    vals = cosine_kernel_eigenvalues(7)
    for m in range(0, 7, 2):
        assert vals[m] == pytest.approx(funk_hecke_lambda(m, 2) / sphere_area(2), abs=1e-10)

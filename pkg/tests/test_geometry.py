import math

import numpy as np
import pytest

from conetomo.geometry import (
    Cone,
    ConeSinogram,
    Direction2,
    DirectionN,
    ImageGrid,
    RadonSinogram,
    axis_angles,
    cone_contains,
    direction_vector,
    opening_midpoints,
    pixel_centers,
    reflect_cone,
    sphere_area,
)


def test_direction_convention():
    # angle a maps to (sin a, cos a): 0 -> +y, pi/2 -> +x
    assert np.allclose(direction_vector(0.0), [0.0, 1.0])
    assert np.allclose(direction_vector(math.pi / 2), [1.0, 0.0])
    assert np.allclose(direction_vector(math.pi), [0.0, -1.0])
    a = np.linspace(0, 2 * math.pi, 17)
    v = direction_vector(a)
    assert v.shape == (17, 2)
    assert np.allclose(np.hypot(v[:, 0], v[:, 1]), 1.0)


def test_direction2_wraps_angle():
    d = Direction2(7.0)
    assert np.allclose(d.vector, direction_vector(7.0))


def test_directionn_validation():
    with pytest.raises(ValueError):
        DirectionN([1.0, 1.0])
    with pytest.raises(ValueError):
        DirectionN.normalized([0.0, 0.0, 0.0])
    d = DirectionN.normalized([3.0, 4.0])
    assert np.allclose(d.components, [0.6, 0.8])
    assert DirectionN.last_axis(3).components[2] == 1.0
    assert DirectionN.last_axis(3).dim == 3


def test_sphere_area_values():
    assert sphere_area(1) == pytest.approx(2.0)
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)
    assert sphere_area(4) == pytest.approx(2 * math.pi**2)


def test_cone_validation_and_containment():
    axis = DirectionN([0.0, 1.0])
    with pytest.raises(ValueError):
        Cone(np.zeros(3), axis, 0.5)  # dim mismatch
    with pytest.raises(ValueError):
        Cone(np.zeros(2), axis, 0.0)
    cone = Cone(np.array([0.5, -0.25]), axis, math.pi / 3)
    # points on the two boundary rays
    for sgn in (1.0, -1.0):
        p = cone.vertex + 2.0 * direction_vector(sgn * math.pi / 3)
        assert cone_contains(cone, p)
    assert not cone_contains(cone, cone.vertex + [0.0, 1.0])


def test_reflect_cone_same_surface(rng):
    for _ in range(20):
        vertex = rng.uniform(-1, 1, size=2)
        axis = DirectionN.normalized(rng.normal(size=2))
        opening = rng.uniform(0.1, math.pi - 0.1)
        cone = Cone(vertex, axis, opening)
        other = reflect_cone(cone)
        assert other.opening == pytest.approx(math.pi - opening)
        # sample points on the original surface, check membership in the reflection
        base = math.atan2(axis.components[0], axis.components[1])
        for sgn in (1.0, -1.0):
            p = vertex + rng.uniform(0.5, 3.0) * direction_vector(base + sgn * opening)
            assert cone_contains(other, p)


def test_pixel_centers():
    c = pixel_centers(4, 1.0)
    assert np.allclose(c, [-0.75, -0.25, 0.25, 0.75])
    assert np.allclose(c, -c[::-1])  # symmetric about 0


def test_lattices():
    b = axis_angles(8)
    assert b[0] == 0.0 and len(b) == 8
    assert np.allclose(np.diff(b), math.pi / 4)
    p = opening_midpoints(4)
    assert np.allclose(p, [math.pi / 8, 3 * math.pi / 8, 5 * math.pi / 8, 7 * math.pi / 8])
    assert 0.0 < p[0] and p[-1] < math.pi


def test_image_grid_validation():
    with pytest.raises(ValueError):
        ImageGrid(2, 1.0, np.zeros((3, 3)))
    with pytest.raises(ValueError):
        ImageGrid(2, -1.0, np.zeros((2, 2)))
    with pytest.raises(ValueError):
        ImageGrid(2, 1.0, np.full((2, 2), np.nan))
    g = ImageGrid(4, 2.0, np.zeros((4, 4)))
    assert g.pixel_size == pytest.approx(1.0)
    assert np.allclose(g.coords, pixel_centers(4, 2.0))


def test_sinogram_containers():
    r = RadonSinogram(3, 5, 1.0, np.zeros((3, 5)))
    assert np.allclose(r.thetas, [0, math.pi / 3, 2 * math.pi / 3])
    assert np.allclose(r.offsets, np.linspace(-1, 1, 5))
    with pytest.raises(ValueError):
        RadonSinogram(3, 5, 1.0, np.zeros((5, 3)))
    c = ConeSinogram(np.zeros((2, 2)), 4, 3, np.zeros((2, 4, 3)))
    assert np.allclose(c.betas, axis_angles(4))
    assert np.allclose(c.openings, opening_midpoints(3))
    with pytest.raises(ValueError):
        ConeSinogram(np.zeros((2, 3)), 4, 3, np.zeros((2, 4, 3)))
    with pytest.raises(ValueError):
        ConeSinogram(np.zeros((2, 2)), 4, 3, np.zeros((1, 4, 3)))


def test_containers_copy_input():
    vals = np.zeros((2, 2))
    g = ImageGrid(2, 1.0, vals)
    vals[0, 0] = 5.0
    assert g.values[0, 0] == 0.0

import numpy as np
import pytest

from spectral_shapes.geometry import uniform_boundary_measure
from spectral_shapes.moebius import (
    DiskAutomorphism, HyperbolicCap, d, pseudo_hyperbolic_distance, pushforward, reflect_diameter,
    rotation,
)


def _disk_points(rng, n=200, rmax=0.95):
    r = rmax * np.sqrt(rng.random(n))
    return r * np.exp(2j * np.pi * rng.random(n))


def test_automorphism_preserves_disk_and_circle(rng):
    m = DiskAutomorphism(0.4 - 0.3j, np.exp(0.7j))
    z = _disk_points(rng)
    assert np.all(np.abs(m(z)) < 1)
    t = np.exp(2j * np.pi * rng.random(50))
    np.testing.assert_allclose(np.abs(m(t)), 1, atol=1e-14)


def test_d_xi_maps_zero_to_xi():
    assert d(0.3)(0) == pytest.approx(0.3)
    assert d(0.3)(-0.3) == pytest.approx(0)


def test_compose_and_inverse(rng):
    a = DiskAutomorphism(0.2 + 0.5j, np.exp(1j))
    b = DiskAutomorphism(-0.6j, np.exp(-0.3j))
    z = _disk_points(rng)
    np.testing.assert_allclose((a @ b)(z), a(b(z)), atol=1e-13)
    np.testing.assert_allclose(a.inverse()(a(z)), z, atol=1e-13)


def test_derivative_by_finite_differences(rng):
    m = DiskAutomorphism(0.3 + 0.1j, 1j)
    z = _disk_points(rng, 20, 0.8)
    h = 1e-6
    fd = (m(z + h) - m(z - h)) / (2 * h)
    np.testing.assert_allclose(m.derivative(z), fd, rtol=1e-8)


def test_pseudo_hyperbolic_distance_invariant(rng):
    m = DiskAutomorphism(-0.45 + 0.2j, np.exp(2j))
    z, w = _disk_points(rng, 50), _disk_points(rng, 50)
    np.testing.assert_allclose(pseudo_hyperbolic_distance(m(z), m(w)), pseudo_hyperbolic_distance(z, w),
                               atol=1e-12)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        DiskAutomorphism(1.0)
    with pytest.raises(ValueError):
        DiskAutomorphism(0.1, 2.0)
    with pytest.raises(ValueError):
        HyperbolicCap(0.0)
    with pytest.raises(ValueError):
        HyperbolicCap(1.0, 0.5)


def test_pushforward_keeps_weights_and_circle():
    nu = uniform_boundary_measure(64)
    mu = pushforward(d(0.9), nu)
    np.testing.assert_array_equal(mu.weights, nu.weights)
    np.testing.assert_allclose(np.abs(mu.nodes), 1, atol=1e-15)
    assert mu.part == "boundary"


@pytest.mark.parametrize("l,angle", [(0.3, 0.0), (2.0, 1.0), (np.pi, -2.0), (4.0, 3.0), (6.0, 0.5)])
def test_cap_geometry(l, angle):
    cap = HyperbolicCap.from_angle(l, angle)
    vm, vp = cap.vertices
    # the arc between the vertices through p has length l
    assert abs(np.angle(vp / cap.p) - np.angle(vm / cap.p)) == pytest.approx(l)
    assert cap.side(cap.eta) == pytest.approx(0, abs=1e-14)
    assert cap.contains(cap.p) and cap.contains(0.999 * cap.p)
    assert not cap.contains(-0.999 * cap.p)
    circ = cap.geodesic_circle
    if circ is not None:
        c, r = circ
        # geodesic circles meet the unit circle orthogonally
        assert abs(c) ** 2 == pytest.approx(1 + r * r)
        assert abs(vm - c) == pytest.approx(r) and abs(vp - c) == pytest.approx(r)


@pytest.mark.parametrize("l,angle", [(0.8, 0.2), (2.5, -1.0), (5.0, 2.0)])
def test_reflection_is_circle_inversion(l, angle, rng):
    cap = HyperbolicCap.from_angle(l, angle)
    c, r = cap.geodesic_circle
    z = _disk_points(rng, 100, 0.9)
    inversion = c + r * r / np.conj(z - c)
    np.testing.assert_allclose(cap.reflect(z), inversion, atol=1e-11)
    np.testing.assert_allclose(cap.reflect(cap.reflect(z)), z, atol=1e-11)
    # the reflection swaps the cap and its complement
    inside = cap.contains(z, closed=False)
    assert np.all(cap.contains(cap.reflect(z[~inside])))


def test_reflection_scale_factor(rng):
    cap = HyperbolicCap.from_angle(2.2, 0.4)
    c, r = cap.geodesic_circle
    z = _disk_points(rng, 30, 0.8)
    # |d/dzbar (c + r^2 / conj(z - c))| = r^2 / |z - c|^2
    np.testing.assert_allclose(cap.reflect_dzbar_modulus(z), r * r / np.abs(z - c) ** 2, rtol=1e-11)


def test_diameter_cap_and_adjacent():
    cap = HyperbolicCap(np.pi, 1j)
    assert cap.is_diameter and cap.geodesic_circle is None
    assert cap.reflect(0.3 + 0.5j) == pytest.approx(reflect_diameter(0.3 + 0.5j, 1j))
    adj = HyperbolicCap.from_angle(1.0, 0.0).adjacent()
    assert adj.l == pytest.approx(2 * np.pi - 1.0) and adj.p == pytest.approx(-1)


def test_from_angle_clamps():
    assert HyperbolicCap.from_angle(0.0, 0.0).l == pytest.approx(1e-6)
    assert rotation(np.pi / 2)(1) == pytest.approx(1j)

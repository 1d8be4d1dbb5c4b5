import numpy as np
import pytest

from spectral_shapes.geometry import (
    DiskQuadrature, polymap, pullback_area_measure, pullback_boundary_measure, uniform_boundary_measure,
)
from spectral_shapes.folding import (
    CapChain, CapConformalMap, cap_integral, fold, folded_rayleigh_bound, harmonic_extension, lift,
    lifted_test_function, rearranged, strictness_margin, test_function_energies,
)
from spectral_shapes.hersch import PSI_BESSEL, PSI_ID, renormalized
from spectral_shapes.inertia import inertia_form, rp1_distance
from spectral_shapes.moebius import HyperbolicCap, pushforward, rotation
from spectral_shapes.spectral import neumann_spectrum, steklov_spectrum

CAPS = [(0.4, 0.0), (1.5, 2.0), (np.pi, -1.0), (4.2, 0.7), (5.9, 3.0)]


def _lens_area(c, r):
    """Area of D intersected with the disk |z - c| < r (two circular segments)."""
    dist = abs(c)
    a1 = np.arccos((dist**2 + 1 - r * r) / (2 * dist))
    a2 = np.arccos((dist**2 + r * r - 1) / (2 * dist * r))
    return a1 - 0.5 * np.sin(2 * a1) + r * r * (a2 - 0.5 * np.sin(2 * a2))


@pytest.fixture(scope="module")
def nu_bdry():
    nu = pullback_boundary_measure(polymap(0, 1, 0.25), DiskQuadrature())
    return renormalized(nu, PSI_ID)[0]


@pytest.mark.parametrize("l,angle", CAPS)
def test_chain_roundtrip_and_normalisation(l, angle):
    cap = HyperbolicCap.from_angle(l, angle)
    chain = CapChain(cap)
    zeta = 0.97 * np.exp(2j * np.pi * np.arange(64) / 64) * np.linspace(0.1, 1, 64)
    z = chain.forward(zeta)
    assert np.all(cap.contains(z))
    np.testing.assert_allclose(chain.inverse(z), zeta, atol=1e-11)
    assert chain.forward(0) == pytest.approx(chain.base_point, abs=1e-12)
    h = 1e-7
    deriv = (chain.forward(h) - chain.forward(-h)) / (2 * h)
    assert deriv.real > 0 and abs(deriv.imag) < 1e-6 * deriv.real     # psi_a'(0) > 0
    # the circle goes onto the boundary of the cap
    bd = chain.forward(np.exp(1j * np.linspace(0.1, 6.2, 50)))
    on_circle = np.abs(np.abs(bd) - 1) < 1e-9
    on_geodesic = np.abs(cap.side(bd)) < 1e-9
    assert np.all(on_circle | on_geodesic)


def test_inverse_derivative_by_finite_differences():
    cmap = CapConformalMap(CapChain(HyperbolicCap.from_angle(2.0, 0.5)), 0.2 - 0.1j)
    z = cmap.forward(np.array([0.1, -0.3j, 0.5 + 0.2j]))
    h = 1e-6
    fd = (cmap.inverse(z + h) - cmap.inverse(z - h)) / (2 * h)
    np.testing.assert_allclose(cmap.inverse_derivative(z), fd, rtol=1e-7)


@pytest.mark.parametrize("l,angle", [(0.8, 0.3), (2.0, 1.0), (4.5, -2.0)])
def test_cap_integral_area(l, angle):
    cap = HyperbolicCap.from_angle(l, angle)
    c, r = cap.geodesic_circle
    lens = _lens_area(c, r)
    area = lens if l < np.pi else np.pi - _lens_area(*cap.adjacent().geodesic_circle)
    assert cap_integral(cap, lambda z: np.ones(z.shape)) == pytest.approx(area, rel=1e-10)


@pytest.mark.parametrize("l,angle", CAPS)
def test_fold_conserves_mass(l, angle, nu_bdry):
    cap = HyperbolicCap.from_angle(l, angle)
    f = fold(nu_bdry, cap)
    assert f.mass() == nu_bdry.mass()
    np.testing.assert_array_equal(f.weights, nu_bdry.weights)
    assert np.all(cap.contains(f.nodes) | (np.abs(cap.side(f.nodes)) < 1e-12))
    np.testing.assert_allclose(np.abs(f.nodes), 1, atol=1e-15)
    R = rearranged(nu_bdry, cap)
    assert R.measure.mass() == pytest.approx(nu_bdry.mass(), rel=1e-15)
    assert R.mass_loss == 0


def test_lift_is_reflection_invariant(rng):
    cap = HyperbolicCap.from_angle(2.5, 1.2)
    u = lift(lambda z: np.real(z) ** 2 + np.imag(z), cap)
    z = 0.9 * np.sqrt(rng.random(50)) * np.exp(2j * np.pi * rng.random(50))
    np.testing.assert_allclose(u(cap.reflect(z)), u(z), atol=1e-12)


@pytest.mark.parametrize("psi", [PSI_ID, PSI_BESSEL])
@pytest.mark.parametrize("l,angle", [(0.7, 0.0), (np.pi, 2.0), (5.0, -1.0)])
def test_energy_doubling(psi, l, angle):
    cmap = CapConformalMap(CapChain(HyperbolicCap.from_angle(l, angle)), 0.1 + 0.2j)
    for t in (1.0, np.exp(0.8j)):
        e_cap, e_adj = test_function_energies(cmap, t, psi)
        assert e_cap == pytest.approx(psi.dirichlet_energy(), abs=1e-8)
        assert e_cap + e_adj == pytest.approx(2 * psi.dirichlet_energy(), abs=1e-8)


def test_harmonic_extension_exact():
    theta = 2 * np.pi * np.arange(256) / 256
    z = np.exp(1j * theta)
    g = np.real(z**2) + 0.5 * np.imag(z**3) + 0.25
    ext = harmonic_extension(g)
    assert ext.energy() == pytest.approx(np.pi * (2 + 3 * 0.25), rel=1e-13)
    w = 0.3 - 0.4j
    assert ext(w) == pytest.approx(np.real(w**2) + 0.5 * np.imag(w**3) + 0.25, abs=1e-13)


@pytest.mark.parametrize("l,angle", [(0.5, 0.0), (2.0, 2.0), (4.0, 4.0), (6.0, 1.0)])
def test_strict_energy_drop(l, angle, nu_bdry):
    R = rearranged(nu_bdry, (l, angle))
    sc = strictness_margin(R.map, 1.0, PSI_ID)
    assert sc.folded_energy == pytest.approx(2 * np.pi, abs=1e-8)
    assert sc.margin > 1e-3
    # the lifted function is continuous across the geodesic
    u = lifted_test_function(R.map, 1.0, PSI_ID)
    c, r = R.cap.geodesic_circle
    pts = c + r * np.exp(1j * np.linspace(0, 2 * np.pi, 400))
    pts = pts[np.abs(pts) < 0.99]
    np.testing.assert_allclose(u(pts * (1 + 1e-9)), u(pts * (1 - 1e-9)), atol=1e-6)


def test_rayleigh_bound_dominates_sigma2(nu_bdry):
    phi = polymap(0, 1, 0.25)
    sigma2 = steklov_spectrum(phi).values[2]
    for cap in CAPS:
        assert folded_rayleigh_bound(nu_bdry, cap) >= sigma2 * (1 - 1e-10)


def test_rayleigh_bound_dominates_mu2():
    phi = polymap(0, 1, 0.2, 0.05j)
    nu = renormalized(pullback_area_measure(phi, DiskQuadrature(24, 64)), PSI_BESSEL)[0]
    mu2 = neumann_spectrum(phi).values[2]
    for cap in CAPS[:3]:
        assert folded_rayleigh_bound(nu, cap, PSI_BESSEL) >= mu2 * (1 - 1e-10)


@pytest.mark.parametrize("th", [0.0, 0.7, 2.5])
def test_degenerate_cap_limits(th, nu_bdry):
    q = inertia_form(nu_bdry, PSI_ID)
    nu = pushforward(rotation(-q.direction), nu_bdry)      # maximising direction [e1]
    small = rearranged(nu, (1e-3, th)).measure
    assert rp1_distance(inertia_form(small).direction, 2 * th) < 1e-2
    full = rearranged(nu, (2 * np.pi - 1e-3, th)).measure
    assert rp1_distance(inertia_form(full).direction, 0.0) < 1e-2


def test_uniform_measure_has_isotropic_rearrangements():
    nu = uniform_boundary_measure(2048)
    R = rearranged(nu, (np.pi, 0.0))
    # folding the uniform measure across a diameter is symmetric about that diameter
    q = inertia_form(R.measure)
    assert abs(q.q[0, 1]) < 1e-10

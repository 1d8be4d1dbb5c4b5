import time

import numpy as np
import pytest
from scipy import special

from spectral_shapes.bessel import MU1_DISK
from spectral_shapes.geometry import DiskQuadrature, const_density, polymap
from spectral_shapes.spectral import (
    EigenSolveError, GeneralizedEigProblem, assemble_neumann, assemble_steklov, eigen_k,
    neumann_basis, neumann_spectrum, solve, steklov_spectrum, zernike_indices,
)

# P1 FEM on the 512-gon image of z + 0.25 z^2, Richardson over two red
# refinements (2171 -> 8169 -> 31649 vertices); frozen independent oracle.
FEM_QUAD025 = {"mu1": 2.76976175, "mu2": 3.26125148, "sigma1": 0.87841203, "sigma2": 1.00165613}


def _disk_neumann_reference(n):
    vals = []
    for m in range(8):
        z = special.jnp_zeros(m, 4) if m else special.jnp_zeros(0, 5)[:4]
        vals += list(z**2) * (1 if m == 0 else 2)
    return np.sort(vals)[:n]


def test_disk_steklov_exact():
    t = time.perf_counter()
    s = steklov_spectrum(polymap(0, 1), degree=64)
    assert time.perf_counter() - t < 1.0
    np.testing.assert_allclose(s.values[:9], [0, 1, 1, 2, 2, 3, 3, 4, 4], atol=1e-8)
    assert s.meta["mass"] == pytest.approx(2 * np.pi)


def test_disk_neumann_against_bessel_zeros():
    s = neumann_spectrum(polymap(0, 1), degree=20)
    assert s.values[0] == 0
    np.testing.assert_allclose(s.values[1:10], _disk_neumann_reference(9), rtol=1e-8)
    assert abs(s.values[1] - MU1_DISK) < 1e-10


def test_cross_check_against_fem():
    phi = polymap(0, 1, 0.25)
    n = neumann_spectrum(phi).values
    s = steklov_spectrum(phi).values
    assert n[1] == pytest.approx(FEM_QUAD025["mu1"], rel=1e-4)
    assert n[2] == pytest.approx(FEM_QUAD025["mu2"], rel=1e-4)
    assert s[1] == pytest.approx(FEM_QUAD025["sigma1"], rel=1e-4)
    assert s[2] == pytest.approx(FEM_QUAD025["sigma2"], rel=1e-4)


def test_degree_convergence():
    phi = polymap(0, 1, 0.2, 0.05j)
    a = neumann_spectrum(phi, degree=16).values[1:5]
    b = neumann_spectrum(phi, degree=20).values[1:5]
    np.testing.assert_allclose(a, b, rtol=1e-8)
    c = steklov_spectrum(phi, degree=48).values[1:9]
    d = steklov_spectrum(phi, degree=64).values[1:9]
    np.testing.assert_allclose(c, d, rtol=1e-10)


def test_rigid_motion_and_scaling():
    phi = polymap(0, 1, 0.3 - 0.1j)
    moved = polymap(2 - 1j, *(np.exp(0.7j) * phi.c[1:]))
    big = polymap(0, *(3 * phi.c[1:]))
    n, s = neumann_spectrum(phi), steklov_spectrum(phi)
    np.testing.assert_allclose(neumann_spectrum(moved).values[:6], n.values[:6], rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(steklov_spectrum(moved).values[:6], s.values[:6], rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(9 * neumann_spectrum(big).values[:6], n.values[:6], rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(3 * steklov_spectrum(big).values[:6], s.values[:6], rtol=1e-10, atol=1e-12)


def test_constant_density_scales():
    phi = polymap(0, 1, 0.1)
    n = neumann_spectrum(phi).values[1]
    s = steklov_spectrum(phi).values[1]
    rho = const_density(2.0)
    assert neumann_spectrum(phi, rho).values[1] == pytest.approx(n / 2, rel=1e-12)
    assert steklov_spectrum(phi, rho).values[1] == pytest.approx(s / 2, rel=1e-12)


def test_basis_orthonormal():
    quad = DiskQuadrature()
    b = neumann_basis(12, quad)
    assert b.size == len(zernike_indices(12)) == 13 * 14 // 2
    gram = (b.values * quad.weights) @ b.values.T
    np.testing.assert_allclose(gram, np.eye(b.size), atol=1e-12)


def test_basis_check_detects_underresolved_quadrature():
    with pytest.raises(EigenSolveError):
        neumann_basis(20, DiskQuadrature(6, 12, 16, self_test=False))


def test_invalid_weights():
    quad = DiskQuadrature(16, 32, 64)
    with pytest.raises(ValueError):
        assemble_neumann(-np.ones(quad.weights.shape), 4, quad)
    with pytest.raises(ValueError):
        assemble_steklov(np.zeros(quad.n_b), 4, quad)
    with pytest.raises(ValueError):
        assemble_steklov(np.ones(3), 4, quad)


def test_eigen_k_residual():
    A = np.diag([0.0, 1.0, 2.0])
    B = np.eye(3)
    lam, v = eigen_k(GeneralizedEigProblem(A, B), 1)
    assert lam == pytest.approx(1.0) and abs(v[1]) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        eigen_k(GeneralizedEigProblem(A, B), 3)


def test_indefinite_pencil_rejected():
    with pytest.raises(EigenSolveError):
        solve(GeneralizedEigProblem(np.diag([-1.0, 1.0]), np.eye(2)))

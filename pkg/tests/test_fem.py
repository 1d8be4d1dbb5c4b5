import numpy as np
import pytest

from spectral_shapes.fem import (
    boundary_mass_matrix, mass_matrix, observed_order, region_fraction, richardson,
    solve_neumann_fem, solve_steklov_fem, stiffness_matrix,
)
from spectral_shapes.mesh import disk_polygon, ellipse, square_mesh


@pytest.fixture(scope="module")
def ell():
    return ellipse(1.5, 1.0, n=128, h=0.1)


def test_matrix_identities(ell):
    A, M, B = stiffness_matrix(ell), mass_matrix(ell), boundary_mass_matrix(ell)
    one = np.ones(ell.n_vertices)
    assert np.abs(A @ one).max() < 1e-12
    assert one @ (M @ one) == pytest.approx(ell.area, rel=1e-13)
    assert one @ (B @ one) == pytest.approx(ell.perimeter, rel=1e-13)
    # P1 reproduces linear functions: energy of u = x is the area
    x = ell.vertices[:, 0]
    assert x @ (A @ x) == pytest.approx(ell.area, rel=1e-12)
    # consistent mass integrates x^2 exactly over the polygon: close to pi a^3 b / 4
    assert x @ (M @ x) == pytest.approx(np.pi * 1.5**3 / 4, rel=2e-3)
    assert abs(A - A.T).max() < 1e-14


def test_square_spectrum():
    m = square_mesh(0.02)          # 2601 vertices: sparse shift-invert path
    s = solve_neumann_fem(m, k=6)
    exact = np.pi**2 * np.array([0, 1, 1, 2, 4, 4])
    assert s.values[0] == 0
    np.testing.assert_allclose(s.values[1:], exact[1:], rtol=1e-2)
    assert s.values[1] >= exact[1]          # conforming elements overestimate


def test_dense_and_sparse_paths_agree():
    m = square_mesh(1 / 46)        # 2209 vertices, just above the dense limit
    sparse = solve_neumann_fem(m, k=5).values
    from spectral_shapes import fem
    old = fem.DENSE_LIMIT
    fem.DENSE_LIMIT = 10**6
    try:
        dense = solve_neumann_fem(m, k=5).values
    finally:
        fem.DENSE_LIMIT = old
    np.testing.assert_allclose(sparse, dense, rtol=1e-9, atol=1e-10)


def test_steklov_disk():
    m = disk_polygon(512, h=0.1)
    s = solve_steklov_fem(m, k=5)
    np.testing.assert_allclose(s.values[:5], [0, 1, 1, 2, 2], rtol=1e-2, atol=1e-10)
    assert s.meta["mass"] == pytest.approx(m.perimeter)


def test_scale_invariance(ell):
    big = ell.scaled(3.0)
    n1, n2 = solve_neumann_fem(ell, k=3), solve_neumann_fem(big, k=3)
    np.testing.assert_allclose(n1.values[1:] * ell.area, n2.values[1:] * big.area, rtol=1e-10)
    s1, s2 = solve_steklov_fem(ell, k=3), solve_steklov_fem(big, k=3)
    np.testing.assert_allclose(s1.values[1:] * ell.perimeter, s2.values[1:] * big.perimeter, rtol=1e-10)


def test_eigenvectors_are_mass_orthonormal(ell):
    s = solve_neumann_fem(ell, k=4)
    M = mass_matrix(ell)
    G = s.vectors.T @ (M @ s.vectors)
    np.testing.assert_allclose(G, np.eye(4), atol=1e-9)


def test_richardson_helpers():
    h = np.array([0.1, 0.05, 0.025])
    vals = 2.0 + 3.0 * h**2
    assert richardson(vals[1], vals[2]) == pytest.approx(2.0, abs=1e-14)
    assert observed_order(*vals) == pytest.approx(2.0, abs=1e-10)


def test_region_fraction(ell):
    one = np.ones(ell.n_vertices)
    frac = region_fraction(ell, one, lambda xy: xy[:, 0] > 0)
    assert frac == pytest.approx(0.5, abs=0.02)
    assert region_fraction(ell, one, lambda xy: np.ones(len(xy), bool)) == pytest.approx(1.0)

"""P1 finite elements for Neumann and Steklov eigenvalues on TriMesh domains."""

import logging

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh, splu

from .spectral import ZERO_CLAMP, EigenSolveError, Spectrum

log = logging.getLogger(__name__)

DENSE_LIMIT = 2000
DEFAULT_K = 12


def _gradients(mesh):
    p = mesh.vertices[mesh.triangles]
    x, y = p[..., 0], p[..., 1]
    area = 0.5 * ((x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0]))
    # gradient of barycentric coordinate i is (y_j - y_k, x_k - x_j) / (2 area)
    bx = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    by = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    return bx / (2 * area[:, None]), by / (2 * area[:, None]), area


def stiffness_matrix(mesh):
    gx, gy, area = _gradients(mesh)
    local = (gx[:, :, None] * gx[:, None, :] + gy[:, :, None] * gy[:, None, :]) * area[:, None, None]
    return _scatter(mesh.triangles, local, mesh.n_vertices)


def mass_matrix(mesh):
    area = mesh.areas()
    ref = (np.ones((3, 3)) + np.eye(3)) / 12.0
    local = area[:, None, None] * ref[None]
    return _scatter(mesh.triangles, local, mesh.n_vertices)


def boundary_mass_matrix(mesh):
    """Consistent P1 mass on boundary edges: (l / 6) [[2, 1], [1, 2]]."""
    length = mesh.boundary_lengths()
    ref = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0
    local = length[:, None, None] * ref[None]
    return _scatter(mesh.boundary, local, mesh.n_vertices)


def _scatter(cells, local, n):
    k = cells.shape[1]
    rows = np.repeat(cells, k, axis=1).ravel()
    cols = np.tile(cells, (1, k)).ravel()
    return sp.csr_matrix((local.ravel(), (rows, cols)), shape=(n, n))


def _finish(vals, vecs, meta):
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    vals = np.where(np.abs(vals) < ZERO_CLAMP * max(1.0, abs(vals).max()), 0.0, vals)
    if np.any(vals < -1e-8 * max(1.0, abs(vals).max())):
        raise EigenSolveError(f"negative eigenvalue {vals.min():.3e}")
    return Spectrum(np.maximum(vals, 0.0), vecs, meta)


def _generalized(A, B, k, sigma):
    n = A.shape[0]
    if n <= DENSE_LIMIT:
        vals, vecs = scipy.linalg.eigh(A.toarray(), B.toarray(), subset_by_index=[0, min(k, n) - 1])
        return vals, vecs
    try:
        return eigsh(A, k=k, M=B, sigma=sigma, which="LM", tol=1e-12)
    except Exception as exc:  # ARPACK failures carry their own message
        raise EigenSolveError(f"sparse eigensolve failed: {exc}") from exc


def solve_neumann_fem(mesh, k=DEFAULT_K, sigma=-1e-2):
    """Lowest ``k`` Neumann eigenvalues (mu_0 = 0 included) of a P1 mesh."""
    A = stiffness_matrix(mesh)
    B = mass_matrix(mesh)
    vals, vecs = _generalized(A, B, k, sigma)
    meta = {"problem": "neumann", "method": "fem-p1", "n_vertices": mesh.n_vertices,
            "h": mesh.h, "mass": mesh.area, "mesh": mesh.name}
    return _finish(vals, vecs, meta)


def solve_steklov_fem(mesh, k=DEFAULT_K):
    """Lowest ``k`` Steklov eigenvalues via the Schur complement on boundary nodes.

    The pencil (A, B_boundary) has an infinite eigenvalue for every interior
    node; eliminating the interior (harmonic extension) leaves the discrete
    Dirichlet-to-Neumann matrix S = A_bb - A_bi A_ii^{-1} A_ib.
    """
    A = stiffness_matrix(mesh).tocsc()
    Bb = boundary_mass_matrix(mesh)
    bnd = mesh.boundary_vertices
    mask = np.zeros(mesh.n_vertices, bool)
    mask[bnd] = True
    inner = np.flatnonzero(~mask)
    A_bb = A[bnd][:, bnd].toarray()
    if len(inner):
        A_ii = A[inner][:, inner].tocsc()
        A_ib = A[inner][:, bnd].toarray()
        X = splu(A_ii).solve(A_ib)
        S = A_bb - A_ib.T @ X
    else:
        X = np.zeros((0, len(bnd)))
        S = A_bb
    S = 0.5 * (S + S.T)
    M = Bb[bnd][:, bnd].toarray()
    kk = min(k, len(bnd))
    vals, vb = scipy.linalg.eigh(S, M, subset_by_index=[0, kk - 1])
    vecs = np.zeros((mesh.n_vertices, kk))
    vecs[bnd] = vb
    if len(inner):
        vecs[inner] = -X @ vb
    meta = {"problem": "steklov", "method": "fem-p1", "n_vertices": mesh.n_vertices,
            "n_boundary": len(bnd), "h": mesh.h, "mass": mesh.perimeter, "mesh": mesh.name}
    return _finish(vals, vecs, meta)


# --------------------------------------------------------------------------
# diagnostics
# --------------------------------------------------------------------------

def richardson(coarse, fine, order=2.0, ratio=2.0):
    """Extrapolate values computed at h and h / ratio assuming error ~ h^order."""
    coarse, fine = np.asarray(coarse, float), np.asarray(fine, float)
    f = ratio**order
    return (f * fine - coarse) / (f - 1)


def observed_order(v1, v2, v3, ratio=2.0):
    """Observed convergence order from values at h, h/ratio, h/ratio^2."""
    d1, d2 = np.asarray(v1) - np.asarray(v2), np.asarray(v2) - np.asarray(v3)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(np.abs(d1 / d2)) / np.log(ratio)


def refinement_study(mesh, solver, levels=3, k=DEFAULT_K, index=1):
    """Solve on ``levels`` successive red refinements of ``mesh``.

    Returns the per-level values of eigenvalue ``index``, the observed order
    and the Richardson extrapolant from the two finest levels.
    """
    values = []
    m = mesh
    for level in range(levels):
        if level:
            m = m.refine()
        values.append(float(solver(m, k=k).values[index]))
    order = float(observed_order(*values[-3:])) if levels >= 3 else 2.0
    return {"values": values, "order": order, "extrapolated": float(richardson(values[-2], values[-1]))}


def region_fraction(mesh, vector, inside):
    """Share of the L^2 mass of a P1 function on triangles whose centroid
    satisfies ``inside(xy)``."""
    M = mass_matrix(mesh)
    total = float(vector @ (M @ vector))
    cen = mesh.vertices[mesh.triangles].mean(axis=1)
    sel = inside(cen)
    sub = type(mesh)(mesh.vertices, mesh.triangles[sel], np.zeros((0, 2), int), mesh.name)
    part = float(vector @ (mass_matrix(sub) @ vector))
    return part / total


def passage_modes(mesh, spectrum, L, eps, threshold=0.5):
    """Eigenvalues whose eigenfunction concentrates in the passage |x| < L/2."""
    inside = lambda xy: (np.abs(xy[:, 0]) < 0.5 * L) & (np.abs(xy[:, 1]) < eps)
    out = []
    for j, lam in enumerate(spectrum.values):
        frac = region_fraction(mesh, spectrum.vectors[:, j], inside)
        if frac >= threshold:
            out.append((j, float(lam), frac))
    return out

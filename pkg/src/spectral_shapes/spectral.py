"""Galerkin eigensolvers on the unit disk for the pulled-back problems

    Neumann:  -Lap u = mu * delta(z) u in D,  du/dr = 0 on S^1,
    Steklov:   Lap u = 0 in D,               du/dr = sigma * w(theta) u on S^1,

with delta = rho(phi) |phi'|^2 and w = rho(phi) |phi'|.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg
from scipy.special import eval_jacobi

from .geometry import DiskQuadrature, pullback_density

log = logging.getLogger(__name__)

NEUMANN_DEGREE = 20
STEKLOV_DEGREE = 64
ZERO_CLAMP = 1e-10
GRAM_TOL = 1e-10
RESIDUAL_TOL = 1e-8


class EigenSolveError(RuntimeError):
    pass


@lru_cache(maxsize=8)
def default_quadrature(n_r=64, n_theta=256, n_b=1024):
    return DiskQuadrature(n_r, n_theta, n_b)


# --------------------------------------------------------------------------
# bases
# --------------------------------------------------------------------------

def zernike_indices(degree):
    """(n, m, kind) for all real Zernike functions of total degree <= degree.

    kind is +1 for cos(m theta), -1 for sin(m theta) (m >= 1 only).
    """
    out = []
    for n in range(degree + 1):
        for m in range(n % 2, n + 1, 2):
            out.append((n, m, 1))
            if m > 0:
                out.append((n, m, -1))
    return out


def _zernike_radial(n, m, r):
    """R_n^m(r), R_n^m(r)/r (m >= 1, else 0) and dR_n^m/dr."""
    k = (n - m) // 2
    x = 1.0 - 2.0 * r * r
    sign = -1.0 if k % 2 else 1.0
    p = eval_jacobi(k, m, 0, x)
    dp = 0.5 * (k + m + 1) * eval_jacobi(k - 1, m + 1, 1, x) if k > 0 else np.zeros_like(r)
    rm = r**m
    val = sign * rm * p
    over_r = sign * r ** (m - 1) * p if m > 0 else np.zeros_like(r)
    dval = sign * ((m * r ** (m - 1) if m > 0 else 0.0) * p + rm * dp * (-4.0 * r))
    return val, over_r, dval


@dataclass
class GalerkinBasis:
    """Values and gradients of a basis at quadrature nodes.

    ``values`` has shape (n_basis, n_nodes); ``grad_r`` and ``grad_t`` hold
    the radial and tangential ((1/r) d/dtheta) derivatives.
    """

    kind: str
    degree: int
    values: np.ndarray
    grad_r: np.ndarray = field(default=None, repr=False)
    grad_t: np.ndarray = field(default=None, repr=False)
    labels: list = field(default_factory=list, repr=False)

    @property
    def size(self):
        return self.values.shape[0]


def neumann_basis(degree=NEUMANN_DEGREE, quad=None, check=True):
    """L^2(D)-orthonormal real Zernike functions up to total degree ``degree``."""
    quad = quad or default_quadrature()
    idx = zernike_indices(degree)
    r = np.abs(quad.nodes)
    t = np.angle(quad.nodes)
    vals, gr, gt = [], [], []
    for n, m, kind in idx:
        R, R_r, dR = _zernike_radial(n, m, r)
        norm = np.sqrt((n + 1) / np.pi) * (1.0 if m == 0 else np.sqrt(2.0))
        c, s = np.cos(m * t), np.sin(m * t)
        ang, dang = (c, -m * s) if kind > 0 else (s, m * c)
        vals.append(norm * R * ang)
        gr.append(norm * dR * ang)
        gt.append(norm * R_r * dang)
    basis = GalerkinBasis("neumann", degree, np.array(vals), np.array(gr), np.array(gt), idx)
    if check:
        gram = (basis.values * quad.weights) @ basis.values.T
        err = np.abs(gram - np.eye(basis.size)).max()
        if err > GRAM_TOL:
            raise EigenSolveError(f"Neumann basis Gram matrix off identity by {err:.2e}")
    return basis


def steklov_basis(degree=STEKLOV_DEGREE, quad=None):
    """Harmonic basis 1, r^n cos(n theta), r^n sin(n theta) traced on S^1."""
    quad = quad or default_quadrature()
    t = quad.boundary_theta
    vals = [np.ones_like(t)]
    labels = [(0, 1)]
    for n in range(1, degree + 1):
        vals += [np.cos(n * t), np.sin(n * t)]
        labels += [(n, 1), (n, -1)]
    return GalerkinBasis("steklov", degree, np.array(vals), labels=labels)


# --------------------------------------------------------------------------
# pencils
# --------------------------------------------------------------------------

@dataclass
class GeneralizedEigProblem:
    """Symmetric pencil (A, B) with B positive definite."""

    A: np.ndarray
    B: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.A = 0.5 * (self.A + self.A.T)
        self.B = 0.5 * (self.B + self.B.T)


@dataclass
class Spectrum:
    """Ascending eigenvalues (lambda_0 included) with B-orthonormal vectors."""

    values: np.ndarray
    vectors: np.ndarray = field(repr=False)
    meta: dict = field(default_factory=dict)

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return len(self.values)


def _check_pd(B):
    try:
        np.linalg.cholesky(B)
    except np.linalg.LinAlgError as exc:
        raise EigenSolveError("mass matrix is not positive definite (quadrature failure?)") from exc


def assemble_neumann(delta, degree=NEUMANN_DEGREE, quad=None, basis=None):
    """Stiffness and weighted mass for the Neumann pencil.

    ``delta`` holds samples of the weight at the interior nodes of ``quad``.
    """
    quad = quad or default_quadrature()
    delta = np.asarray(delta, dtype=float)
    if delta.shape != quad.weights.shape:
        raise ValueError("delta must be sampled at the interior quadrature nodes")
    if np.any(~(delta > 0)):
        raise ValueError("weight samples must be positive")
    basis = basis or neumann_basis(degree, quad)
    w = quad.weights
    A = (basis.grad_r * w) @ basis.grad_r.T + (basis.grad_t * w) @ basis.grad_t.T
    B = (basis.values * (w * delta)) @ basis.values.T
    _check_pd(B)
    meta = {"problem": "neumann", "degree": degree, "n_r": quad.n_r, "n_theta": quad.n_theta}
    return GeneralizedEigProblem(A, B, meta)


def assemble_steklov(weight, degree=STEKLOV_DEGREE, quad=None):
    """Exact harmonic stiffness diag(0, pi n, pi n) and boundary mass."""
    quad = quad or default_quadrature()
    weight = np.asarray(weight, dtype=float)
    if weight.shape != quad.boundary_weights.shape:
        raise ValueError("weight must be sampled at the boundary quadrature nodes")
    if np.any(~(weight > 0)):
        raise ValueError("weight samples must be positive")
    basis = steklov_basis(degree, quad)
    diag = [0.0] + [np.pi * n for n in range(1, degree + 1) for _ in (0, 1)]
    A = np.diag(diag)
    B = (basis.values * (quad.boundary_weights * weight)) @ basis.values.T
    _check_pd(B)
    meta = {"problem": "steklov", "degree": degree, "n_b": quad.n_b}
    return GeneralizedEigProblem(A, B, meta)


def solve(problem, clamp=ZERO_CLAMP):
    vals, vecs = scipy.linalg.eigh(problem.A, problem.B)
    vals = np.where(np.abs(vals) < clamp, 0.0, vals)
    if np.any(vals < -1e-8 * max(1.0, abs(vals).max())):
        raise EigenSolveError(f"negative eigenvalue {vals.min():.3e} in a semidefinite pencil")
    return Spectrum(np.maximum(vals, 0.0), vecs, dict(problem.meta))


def eigen_k(problem, k, tol=RESIDUAL_TOL):
    """k-th eigenvalue (0-based, lambda_0 = 0) of the pencil and its vector.

    The residual ||A v - lambda B v|| <= tol ||B v|| is verified.
    """
    n = problem.A.shape[0]
    if not 0 <= k < n:
        raise ValueError(f"k must lie in [0, {n})")
    vals, vecs = scipy.linalg.eigh(problem.A, problem.B, subset_by_index=[0, k])
    lam, v = vals[k], vecs[:, k]
    res = np.linalg.norm(problem.A @ v - lam * (problem.B @ v))
    scale = np.linalg.norm(problem.B @ v)
    if res > tol * max(scale, 1.0) * max(1.0, abs(lam)):
        raise EigenSolveError(
            f"eigenpair {k} residual {res:.3e} exceeds {tol:.1e} * ||Bv|| = {tol * scale:.3e}")
    if abs(lam) < ZERO_CLAMP:
        lam = 0.0
    return float(lam), v


# --------------------------------------------------------------------------
# conformal-map drivers
# --------------------------------------------------------------------------

def neumann_spectrum(phi, density=None, degree=NEUMANN_DEGREE, quad=None):
    """Neumann spectrum of phi(D) (with density rho) and its area mass."""
    quad = quad or default_quadrature()
    delta = pullback_density(phi, density)(quad.nodes)
    spec = solve(assemble_neumann(delta, degree, quad))
    spec.meta["mass"] = float(quad.integrate(delta))
    return spec


def steklov_spectrum(phi, density=None, degree=STEKLOV_DEGREE, quad=None):
    """Steklov spectrum of phi(D) (boundary density rho) and its boundary mass."""
    quad = quad or default_quadrature()
    z = quad.boundary_nodes
    rho = 1.0 if density is None else density(phi(z))
    w = rho * np.abs(phi.derivative(z))
    spec = solve(assemble_steklov(w, degree, quad))
    spec.meta["mass"] = float(quad.integrate_boundary(w))
    return spec

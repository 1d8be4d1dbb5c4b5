"""Folding across hyperbolic caps: cap uniformisations, folded and rearranged
measures, lifted test functions and harmonic extensions.

The cap uniformisation psi_a : D -> a is the chain

    z  --m-->  sector of angle pi/2  --square-->  half plane  --Cayley-->  D  --A-->  D

where ``m(z) = (z - v_-) / (z - v_+)`` sends the cap vertices to 0 and
infinity, and ``A`` is the automorphism normalising ``psi_a(0) = x_l p`` with
``psi_a'(0) > 0``.  ``x_l = (1 + tan((pi - l)/4)) / 2`` moves continuously
from the arc midpoint (l -> 0) to the origin (l -> 2 pi), so psi_a -> id as
the cap fills the disk.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import BOUNDARY, DiscreteMeasure
from .hersch import PSI_ID, as_psi, renormalize
from .inertia import inertia_form
from .moebius import HyperbolicCap, d, pushforward

VERTEX_GUARD = 1e-10
VERTEX_NUDGE = 1e-8
MASS_LOSS_LIMIT = 1e-8


class FoldingError(RuntimeError):
    pass


@dataclass(frozen=True)
class CapChain:
    """psi_a^{-1}: closed cap -> closed disk and its inverse."""

    cap: HyperbolicCap
    beta: float = field(init=False)
    omega0: complex = field(init=False)
    gamma: float = field(init=False)

    def __post_init__(self):
        cap = self.cap
        vm, vp = cap.vertices
        m = lambda z: (z - vm) / (z - vp)
        a1 = np.angle(m(cap.p))
        a2 = np.angle(m(cap.eta))
        diff = np.angle(np.exp(1j * (a2 - a1)))
        beta = a1 + 0.5 * diff
        object.__setattr__(self, "beta", float(beta))
        c0 = self.base_point
        u0 = np.exp(-2j * beta) * m(c0) ** 2
        w0 = (u0 - 1) / (u0 + 1)
        object.__setattr__(self, "omega0", complex(w0))
        du = np.exp(-2j * beta) * 2 * m(c0) * (vm - vp) / (c0 - vp) ** 2
        dc = 2 / (u0 + 1) ** 2
        object.__setattr__(self, "gamma", float(-np.angle(dc * du)))

    @property
    def base_point(self):
        q = math.tan((np.pi - self.cap.l) / 4)
        return self.cap.p * 0.5 * (1 + q)

    def _m(self, z):
        vm, vp = self.cap.vertices
        return (z - vm) / (z - vp)

    def inverse(self, z):
        """psi_a^{-1}(z) for z in the closed cap."""
        with np.errstate(divide="ignore", invalid="ignore"):
            u = np.exp(-2j * self.beta) * self._m(z) ** 2
            w = (u - 1) / (u + 1)
        w = np.where(np.isfinite(u), w, 1.0 + 0j)
        o = self.omega0
        return np.exp(1j * self.gamma) * (w - o) / (1 - np.conj(o) * w)

    def inverse_derivative(self, z):
        vm, vp = self.cap.vertices
        with np.errstate(divide="ignore", invalid="ignore"):
            mz = self._m(z)
            u = np.exp(-2j * self.beta) * mz**2
            w = (u - 1) / (u + 1)
            o = self.omega0
            da = np.exp(1j * self.gamma) * (1 - abs(o) ** 2) / (1 - np.conj(o) * w) ** 2
            return da * 2 / (u + 1) ** 2 * np.exp(-2j * self.beta) * 2 * mz * (vm - vp) / (z - vp) ** 2

    def forward(self, zeta):
        """psi_a(zeta): closed disk -> closed cap."""
        o = self.omega0
        e = np.exp(-1j * self.gamma) * np.asarray(zeta, dtype=complex)
        w = (e + o) / (1 + np.conj(o) * e)
        u = (1 + w) / (1 - w)
        s = np.exp(1j * self.beta) * np.sqrt(u)
        vm, vp = self.cap.vertices
        return (s * vp - vm) / (s - 1)


@dataclass(frozen=True)
class CapConformalMap:
    """phi_a = psi_a o d_{-xi}: D -> a, so that phi_a^{-1} = d_xi o psi_a^{-1}."""

    chain: CapChain
    xi: complex = 0j

    @property
    def cap(self):
        return self.chain.cap

    def inverse(self, z):
        w = self.chain.inverse(z)
        xi = self.xi
        return (w + xi) / (np.conj(xi) * w + 1)

    def inverse_derivative(self, z):
        w = self.chain.inverse(z)
        xi = self.xi
        return (1 - abs(xi) ** 2) / (np.conj(xi) * w + 1) ** 2 * self.chain.inverse_derivative(z)

    def forward(self, zeta):
        xi = self.xi
        zeta = np.asarray(zeta, dtype=complex)
        return self.chain.forward((zeta - xi) / (1 - np.conj(xi) * zeta))


def _as_cap(cap):
    if isinstance(cap, HyperbolicCap):
        return cap
    l, angle = cap
    return HyperbolicCap.from_angle(l, angle)


# --------------------------------------------------------------------------
# folding and lifting
# --------------------------------------------------------------------------

def fold(nu, cap):
    """Folded measure: nodes of nu in a* are reflected into the closed cap."""
    cap = _as_cap(cap)
    z = nu.nodes
    outside = ~cap.contains(z)
    z = np.where(outside, cap.reflect(z), z)
    if nu.part == BOUNDARY:
        z = z / np.abs(z)
    return DiscreteMeasure(z, nu.weights, nu.part)


def lift(u, cap):
    """Lift of a function on the closed cap to the disk, u~ o tau = u~."""
    cap = _as_cap(cap)

    def lifted(z):
        z = np.asarray(z, dtype=complex)
        return u(np.where(cap.contains(z), z, cap.reflect(z)))

    return lifted


def _nudge_vertices(z, cap):
    vm, vp = cap.vertices
    out = z.copy()
    for v, sign in ((vm, 1.0), (vp, -1.0)):
        near = np.abs(out - v) < VERTEX_GUARD
        if np.any(near):
            # slide along the circle towards the arc midpoint
            out[near] = v * np.exp(1j * sign * VERTEX_NUDGE)
    return out


@dataclass
class RearrangedMeasure:
    measure: DiscreteMeasure
    folded: DiscreteMeasure
    map: CapConformalMap
    mass_loss: float

    @property
    def cap(self):
        return self.map.cap


def rearranged(nu, cap, psi=PSI_ID, xi0=0j):
    """zeta_a = (phi_a^{-1})_* nu_a, renormalised relative to ``psi``.

    ``nu`` should itself be renormalised: the limits zeta_a -> nu (a -> D)
    and zeta_a -> (R_p)_* nu (a -> p) are stated for renormalised input.
    """
    cap = _as_cap(cap)
    psi = as_psi(psi)
    chain = CapChain(cap)
    folded = fold(nu, cap)
    z = _nudge_vertices(folded.nodes, cap)
    w = chain.inverse(z)
    r = np.abs(w)
    good = np.isfinite(w) & (r <= 1 + 1e-9)
    lost = float(folded.weights[~good].sum())
    total = folded.mass()
    if lost > MASS_LOSS_LIMIT * total:
        raise FoldingError(f"cap inversion dropped {lost / total:.2e} of the mass")
    w = w[good]
    r = r[good]
    if nu.part == BOUNDARY:
        w = w / r
    else:
        w = np.where(r > 1, w / r, w)
    pre = DiscreteMeasure(w, folded.weights[good], nu.part)
    xi = renormalize(pre, psi, xi0=xi0)
    zeta = pushforward(d(xi), pre)
    return RearrangedMeasure(zeta, folded, CapConformalMap(chain, xi), lost)


def lifted_test_function(cmap, t=1.0, psi=PSI_ID):
    """u~_a^t: X_t o phi_a^{-1} on the cap, reflected onto a*."""
    psi = as_psi(psi)

    def u(z):
        return np.real(psi(cmap.inverse(z)) * np.conj(t))

    return lift(u, cmap.cap)


# --------------------------------------------------------------------------
# energies
# --------------------------------------------------------------------------

def cap_integral(cap, integrand, n_angle=64, s_max=24.0, ds=0.02):
    """Integrate ``integrand(z)`` over a cap.

    The cap is opened to the sector ``|arg w - beta| < pi/4`` by
    ``w = (z - v_-)/(z - v_+)``; log-polar coordinates ``w = e^{s + i t}``
    give an analytic, exponentially decaying integrand in ``s``
    (trapezoid) and a smooth one in ``t`` (Gauss-Legendre).
    """
    chain = CapChain(cap)
    vm, vp = cap.vertices
    x, wt = np.polynomial.legendre.leggauss(n_angle)
    t = chain.beta + 0.25 * np.pi * x
    wt = 0.25 * np.pi * wt
    s = np.arange(-s_max, s_max + ds / 2, ds)
    ss, tt = np.meshgrid(s, t, indexing="ij")
    w = np.exp(ss + 1j * tt)
    z = (w * vp - vm) / (w - 1)
    jac = np.abs((vm - vp) / (w - 1) ** 2) ** 2 * np.abs(w) ** 2
    vals = integrand(z) * jac
    vals = np.where(np.isfinite(vals), vals, 0.0)
    return float(ds * np.sum(vals * wt[None, :]))


def test_function_energies(cmap, t=1.0, psi=PSI_ID, **quad):
    """Dirichlet energy of u~_a^t on the cap and on the adjacent cap.

    Each half is integrated directly in the physical disk, with the chain
    rule for phi_a^{-1} and the reflection scale factor on a*.
    """
    psi = as_psi(psi)
    cap = cmap.cap
    t = t / abs(t)

    def on_cap(z):
        return psi.grad_sq(cmap.inverse(z), t) * np.abs(cmap.inverse_derivative(z)) ** 2

    def on_adjacent(z):
        return on_cap(cap.reflect(z)) * cap.reflect_dzbar_modulus(z) ** 2

    return cap_integral(cap, on_cap, **quad), cap_integral(cap.adjacent(), on_adjacent, **quad)


test_function_energies.__test__ = False


@dataclass
class HarmonicExtension:
    """Harmonic function on D with prescribed values on the circle."""

    mean: float
    cos_coeffs: np.ndarray    # a_n, n = 1..K
    sin_coeffs: np.ndarray    # b_n, n = 1..K

    @classmethod
    def from_samples(cls, values):
        v = np.asarray(values, dtype=float)
        n = v.size
        c = np.fft.rfft(v) / n
        a = 2 * c[1:].real
        b = -2 * c[1:].imag
        if n % 2 == 0:
            a[-1] *= 0.5
            b[-1] = 0.0
        return cls(float(c[0].real), a, b)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        k = np.arange(1, self.cos_coeffs.size + 1)
        zk = z[..., None] ** k
        return self.mean + np.sum(self.cos_coeffs * zk.real + self.sin_coeffs * zk.imag, axis=-1)

    def energy(self):
        """int_D |grad w|^2 = pi sum n (a_n^2 + b_n^2)."""
        k = np.arange(1, self.cos_coeffs.size + 1)
        return float(np.pi * np.sum(k * (self.cos_coeffs**2 + self.sin_coeffs**2)))


def harmonic_extension(values):
    return HarmonicExtension.from_samples(values)


@dataclass
class StrictnessCheck:
    folded_energy: float
    harmonic_energy: float

    @property
    def margin(self):
        return self.folded_energy - self.harmonic_energy


def strictness_margin(cmap, t=1.0, psi=PSI_ID, n_boundary=4096):
    """Energy of u~_a^t minus that of the harmonic extension of its trace."""
    theta = 2 * np.pi * np.arange(n_boundary) / n_boundary
    u = lifted_test_function(cmap, t, psi)
    trace = u(np.exp(1j * theta))
    ext = harmonic_extension(trace)
    e_cap, e_adj = test_function_energies(cmap, t, psi)
    return StrictnessCheck(e_cap + e_adj, ext.energy())


# --------------------------------------------------------------------------
# Rayleigh bound
# --------------------------------------------------------------------------

def folded_rayleigh_bound(nu, cap, psi=PSI_ID, zeta=None):
    """2 sup_t  int |grad X_t|^2 dz / int X_t^2 dzeta_a, sup taken exactly
    through the smallest eigenvalue of the inertia form of zeta_a."""
    psi = as_psi(psi)
    if zeta is None:
        zeta = rearranged(nu, cap, psi).measure
    q = inertia_form(zeta, psi)
    if not q.lam_min > 0:
        raise FoldingError("degenerate rearranged measure: zero moment of inertia")
    return 2 * psi.dirichlet_energy() / q.lam_min

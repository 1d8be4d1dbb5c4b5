"""Centre of mass relative to a boundary-fixing map Psi and Hersch's
renormalisation: find xi with C((d_xi)_* nu) = 0."""

import logging
from dataclasses import dataclass

import numpy as np

from .bessel import PROFILE, ZETA
from .moebius import d, pushforward

log = logging.getLogger(__name__)

IDENTITY = "identity"
BESSEL = "bessel_radial"


def _ratio_coefficients(n_terms=20):
    # f(r) / r = (zeta / 2) / J1(zeta) * sum_k (-zeta^2 / 4)^k / (k! (k+1)!) r^(2k)
    q = -0.25 * ZETA * ZETA
    c = [0.5 * ZETA / PROFILE.norm]
    for k in range(1, n_terms):
        c.append(c[-1] * q / (k * (k + 1)))
    return np.array(c[::-1])


_RATIO_COEFFS = _ratio_coefficients()


def _bessel_ratio(r):
    """f(r) / r on [0, 1], finite at r = 0 (Horner in r^2)."""
    r = np.asarray(r, dtype=float)
    return np.polyval(_RATIO_COEFFS, r * r)


@dataclass(frozen=True)
class RenormalizationWeight:
    """Psi: closed disk -> closed disk with Psi = id on the circle.

    ``identity``: Psi(z) = z.  ``bessel_radial``: Psi(r e^{it}) = f(r) e^{it}.
    """

    variant: str = IDENTITY

    def __post_init__(self):
        aliases = {"id": IDENTITY, "bessel": BESSEL}
        v = aliases.get(self.variant, self.variant)
        if v not in (IDENTITY, BESSEL):
            raise ValueError(f"unknown Psi variant {self.variant!r}")
        object.__setattr__(self, "variant", v)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.variant == IDENTITY:
            return z
        return z * _bessel_ratio(np.minimum(np.abs(z), 1.0))

    def radial(self, r):
        """|Psi| as a function of |z|."""
        r = np.asarray(r, dtype=float)
        return r if self.variant == IDENTITY else PROFILE.f(r)

    def grad_sq(self, z, t=1.0):
        """|grad X_t|^2 at z for a unit direction t."""
        z = np.asarray(z, dtype=complex)
        if self.variant == IDENTITY:
            return np.ones(z.shape)
        r = np.abs(z)
        cos_ = np.real(z * np.conj(t)) / np.where(r > 0, r, 1.0)
        sin2 = np.where(r > 0, 1 - cos_**2, 1.0)
        fr = PROFILE.f(r)
        dfr = PROFILE.df(r)
        tang = np.where(r > 0, (fr / np.where(r > 0, r, 1.0)) ** 2, dfr**2)
        return dfr**2 * np.where(r > 0, cos_**2, 1.0) + tang * np.where(r > 0, sin2, 0.0)

    def dirichlet_energy(self):
        """int_D |grad X_t|^2 dz for |t| = 1 (same for every t)."""
        if self.variant == IDENTITY:
            return np.pi
        return 0.5 * ZETA**2 * PROFILE.f_squared_disk_integral()


PSI_ID = RenormalizationWeight(IDENTITY)
PSI_BESSEL = RenormalizationWeight(BESSEL)


def as_psi(psi):
    if isinstance(psi, RenormalizationWeight):
        return psi
    return RenormalizationWeight(psi or IDENTITY)


@dataclass(frozen=True)
class TestFunction:
    """X_t(z) = <Psi(z), t>."""

    t: complex
    psi: RenormalizationWeight = PSI_ID

    def __call__(self, z):
        return np.real(self.psi(z) * np.conj(self.t))


TestFunction.__test__ = False  # not a pytest class


def center_of_mass(nu, psi=PSI_ID):
    m = nu.mass()
    if not m > 0:
        raise ValueError("center of mass of a zero-mass measure")
    return complex(np.sum(nu.weights * as_psi(psi)(nu.nodes)) / m)


class RenormalizationError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass
class RenormalizationInfo:
    xi: complex
    residual: float
    iterations: int
    seeded_by_scan: bool


def _residual_fn(nu, psi):
    z, w = nu.nodes, nu.weights
    m = w.sum()

    def F(xi):
        dz = (z + xi) / (np.conj(xi) * z + 1)
        return complex(np.sum(w * psi(dz)) / m)

    return F


def _newton(F, xi, tol, max_iter, step=1e-6):
    f = F(xi)
    it = 0
    polish = 0
    while it < max_iter:
        if abs(f) <= tol:
            # two extra steps tighten agreement between initialisations
            polish += 1
            if polish > 2:
                break
        it += 1
        h = step
        fx = (F(xi + h) - F(xi - h)) / (2 * h)
        fy = (F(xi + 1j * h) - F(xi - 1j * h)) / (2 * h)
        jac = np.array([[fx.real, fy.real], [fx.imag, fy.imag]])
        try:
            delta = np.linalg.solve(jac, -np.array([f.real, f.imag]))
        except np.linalg.LinAlgError:
            return xi, f, it, False
        dxi = complex(delta[0], delta[1])
        alpha = 1.0
        while alpha > 1e-12:
            cand = xi + alpha * dxi
            if abs(cand) < 1:
                fc = F(cand)
                if abs(fc) < abs(f) or (abs(f) <= tol and abs(fc) <= tol):
                    break
            alpha *= 0.5
        else:
            return xi, f, it, abs(f) <= tol
        xi, f = cand, fc
    return xi, f, it, abs(f) <= tol


def _scan_seed(F, n=32):
    g = (np.arange(n) + 0.5) / n * 2 - 1
    best, best_val = 0j, np.inf
    for x in g:
        for y in g:
            xi = complex(x, y)
            if abs(xi) >= 0.999:
                continue
            val = abs(F(xi))
            if val < best_val:
                best, best_val = xi, val
    return best


def renormalize(nu, psi=PSI_ID, xi0=0j, tol=1e-10, max_iter=200, full_output=False):
    """Find xi in D such that the Psi-centre of mass of (d_xi)_* nu vanishes.

    Damped Newton with a central-difference Jacobian; if it stalls from
    ``xi0``, a 32 x 32 scan over the disk provides a new starting point.
    """
    psi = as_psi(psi)
    if not nu.mass() > 0:
        raise ValueError("cannot renormalize a zero-mass measure")
    F = _residual_fn(nu, psi)
    xi, f, it, ok = _newton(F, complex(xi0), tol, max_iter)
    seeded = False
    if not ok:
        log.debug("Newton from %s stalled at residual %.3e; scanning", xi0, abs(f))
        seeded = True
        xi, f, it2, ok = _newton(F, _scan_seed(F), tol, max_iter)
        it += it2
    if not ok:
        raise RenormalizationError("renormalization did not converge; measure may concentrate at a boundary point", abs(f))
    if full_output:
        return xi, RenormalizationInfo(xi, abs(f), it, seeded)
    return xi


def renormalized(nu, psi=PSI_ID, **kw):
    """Return ``(d_xi)_* nu`` together with xi."""
    xi = renormalize(nu, psi, **kw)
    return pushforward(d(xi), nu), xi

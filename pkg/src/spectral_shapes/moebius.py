"""Disk automorphisms, hyperbolic caps and their reflections."""

import math
from dataclasses import dataclass

import numpy as np

from .geometry import DiscreteMeasure

_CLAMP = 1e-6


@dataclass(frozen=True)
class DiskAutomorphism:
    """z -> omega (z + xi) / (conj(xi) z + 1) with |xi| < 1, |omega| = 1."""

    xi: complex = 0j
    omega: complex = 1 + 0j

    def __post_init__(self):
        xi, omega = complex(self.xi), complex(self.omega)
        if not abs(xi) < 1:
            raise ValueError(f"|xi| must be < 1, got {abs(xi)!r}")
        if abs(abs(omega) - 1) > 1e-10:
            raise ValueError("omega must be unimodular")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "omega", omega / abs(omega))

    def __call__(self, z):
        xi = self.xi
        return self.omega * (z + xi) / (np.conj(xi) * z + 1)

    def derivative(self, z):
        xi = self.xi
        return self.omega * (1 - abs(xi) ** 2) / (np.conj(xi) * z + 1) ** 2

    def matrix(self):
        return np.array([[self.omega, self.omega * self.xi], [np.conj(self.xi), 1.0]], dtype=complex)

    @classmethod
    def from_matrix(cls, m):
        a, b, d = m[0, 0], m[0, 1], m[1, 1]
        return cls(xi=b / a, omega=a / d)

    def compose(self, other):
        """Return ``self o other``."""
        return DiskAutomorphism.from_matrix(self.matrix() @ other.matrix())

    def inverse(self):
        return DiskAutomorphism(-self.omega * self.xi, np.conj(self.omega))

    def __matmul__(self, other):
        return self.compose(other)


def d(xi):
    """The Hersch automorphism d_xi(z) = (z + xi) / (conj(xi) z + 1)."""
    return DiskAutomorphism(xi)


def rotation(angle):
    return DiskAutomorphism(0j, np.exp(1j * angle))


def pushforward(m, nu):
    """Image measure: nodes mapped by ``m``, weights untouched."""
    z = m(nu.nodes)
    if nu.part == "boundary":
        z = z / np.abs(z)
    else:
        # guard roundoff pushing nodes a hair outside the closed disk
        r = np.abs(z)
        z = np.where(r > 1, z / np.maximum(r, 1e-300), z)
    return DiscreteMeasure(z, nu.weights, nu.part)


def pseudo_hyperbolic_distance(z, w):
    return np.abs(z - w) / np.abs(1 - np.conj(w) * z)


def reflect_diameter(z, p):
    """Reflection across the diameter orthogonal to the unit vector p."""
    return -p * p * np.conj(z)


@dataclass(frozen=True)
class HyperbolicCap:
    """Cap a_{l,p}: the part of D cut off by a geodesic whose boundary arc
    has length ``l`` and is centred at ``p``."""

    l: float
    p: complex = 1 + 0j

    def __post_init__(self):
        l = float(self.l)
        if not 0 < l < 2 * np.pi:
            raise ValueError("cap arc length must lie in (0, 2 pi)")
        p = complex(self.p)
        if abs(abs(p) - 1) > 1e-12:
            raise ValueError("cap centre must lie on the unit circle")
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "p", p / abs(p))

    @classmethod
    def from_angle(cls, l, angle, clamp=True):
        if clamp:
            l = min(max(l, _CLAMP), 2 * np.pi - _CLAMP)
        return cls(l, np.exp(1j * angle))

    @property
    def angle(self):
        return math.atan2(self.p.imag, self.p.real)

    @property
    def vertices(self):
        """(v_minus, v_plus) = p e^{-il/2}, p e^{+il/2}."""
        return self.p * np.exp(-0.5j * self.l), self.p * np.exp(0.5j * self.l)

    @property
    def eta(self):
        """Point where the geodesic crosses the diameter through p."""
        return self.p * math.tan((np.pi - self.l) / 4)

    @property
    def is_diameter(self):
        return abs(math.cos(self.l / 2)) < 1e-12

    @property
    def geodesic_circle(self):
        """(centre, radius) of the circle carrying the geodesic, or None."""
        if self.is_diameter:
            return None
        cl = math.cos(self.l / 2)
        return self.p / cl, abs(math.tan(self.l / 2))

    def _straighten(self, z):
        e = self.eta
        return (z - e) / (1 - np.conj(e) * z)

    def _unstraighten(self, w):
        e = self.eta
        return (w + e) / (1 + np.conj(e) * w)

    def side(self, z):
        """Signed coordinate: > 0 inside the cap, 0 on the geodesic, < 0 in a*."""
        return np.real(self._straighten(z) * np.conj(self.p))

    def contains(self, z, closed=True):
        s = self.side(z)
        return s >= 0 if closed else s > 0

    def reflect(self, z):
        """The anticonformal inversion fixing the bounding geodesic."""
        return self._unstraighten(reflect_diameter(self._straighten(z), self.p))

    def reflect_dzbar_modulus(self, z):
        """|d tau / d conj(z)|, the local scale factor of the reflection."""
        e = self.eta
        s = 1 - abs(e) ** 2
        w = self._straighten(z)
        u = reflect_diameter(w, self.p)
        # tau = U(R(S(z))) with S, U Moebius and R isometric
        ds = s / np.abs(1 - np.conj(e) * z) ** 2
        du = s / np.abs(1 + np.conj(e) * u) ** 2
        return ds * du

    def adjacent(self):
        """The cap a* = tau_a(a) on the other side of the geodesic."""
        return HyperbolicCap(2 * np.pi - self.l, -self.p)

"""Conformal maps, disk quadrature, discrete measures and densities.

A planar domain is represented by a polynomial conformal map
``phi(z) = c0 + c1 z + ... + cm z^m`` from the unit disk.  Measures on the
closed disk are plain weighted point sets.
"""

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

INTERIOR = "interior"
BOUNDARY = "boundary"


# --------------------------------------------------------------------------
# conformal maps
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConformalMap:
    """Polynomial map ``phi(z) = sum_k c_k z^k`` of the unit disk.

    Construction rejects maps with a critical point in the closed disk
    (roots of phi') and re-checks ``|phi'| > 0`` on ``check_samples``
    points.  Local injectivity only; global injectivity is not certified
    (see :attr:`univalence_certified`).
    """

    coeffs: tuple
    check_samples: int = 4096

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if c.ndim != 1 or c.size < 2:
            raise ValueError("need at least coefficients c0, c1")
        object.__setattr__(self, "coeffs", tuple(complex(v) for v in c))
        if self.check_samples:
            crit = self.critical_points()
            inside = crit[np.abs(crit) <= 1 + 1e-12]
            if inside.size:
                raise ValueError(f"phi' vanishes in the closed disk at {inside[0]:.6g}")
            m = self.min_derivative_modulus(self.check_samples)
            if not m > 0:
                raise ValueError(f"phi' vanishes on the disk sample (min |phi'| = {m:.3e})")

    def critical_points(self):
        """Zeros of phi' (roots of a polynomial, so exact up to rounding)."""
        k = np.arange(1, len(self.coeffs))
        d = np.trim_zeros(k * self.c[1:], "b")
        return np.roots(d[::-1]) if d.size > 1 else np.zeros(0, complex)

    @property
    def c(self):
        return np.asarray(self.coeffs, dtype=complex)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, z):
        # np.polyval wants highest degree first
        return np.polyval(self.c[::-1], z)

    def derivative(self, z):
        k = np.arange(1, len(self.coeffs))
        return np.polyval((k * self.c[1:])[::-1], z)

    def second_derivative(self, z):
        k = np.arange(2, len(self.coeffs))
        if k.size == 0:
            return np.zeros_like(np.asarray(z, dtype=complex))
        return np.polyval((k * (k - 1) * self.c[2:])[::-1], z)

    def dilate(self, factor):
        return ConformalMap(tuple(np.asarray(self.coeffs) * factor), self.check_samples)

    def area(self):
        """Exact area of phi(D): pi * sum k |c_k|^2."""
        k = np.arange(len(self.coeffs))
        return float(np.pi * np.sum(k * np.abs(self.c) ** 2))

    @property
    def univalence_certified(self):
        """Noshiro-Warschawski: sum_{k>=2} k|c_k| < |c_1| implies injective."""
        k = np.arange(2, len(self.coeffs))
        return bool(np.sum(k * np.abs(self.c[2:])) < abs(self.coeffs[1]))

    def min_derivative_modulus(self, n_samples=4096):
        n_b = max(n_samples // 4, 16)
        theta = 2 * np.pi * np.arange(n_b) / n_b
        n_side = int(math.ceil(math.sqrt(n_samples - n_b)))
        x = np.linspace(-1, 1, n_side)
        xx, yy = np.meshgrid(x, x)
        zi = (xx + 1j * yy).ravel()
        zi = zi[np.abs(zi) <= 1]
        z = np.concatenate([np.exp(1j * theta), zi])
        return float(np.min(np.abs(self.derivative(z))))


def polymap(*coeffs, **kw):
    """Convenience constructor: ``polymap(0, 1, 0.2)`` is ``z + 0.2 z^2``."""
    return ConformalMap(tuple(coeffs), **kw)


IDENTITY_MAP = ConformalMap((0.0, 1.0))


# --------------------------------------------------------------------------
# quadrature
# --------------------------------------------------------------------------

def _disk_monomial_integral(a, b):
    if a % 2 or b % 2:
        return 0.0
    return (2.0 * math.gamma((a + 1) / 2) * math.gamma((b + 1) / 2)
            / ((a + b + 2) * math.gamma((a + b + 2) / 2)))


@dataclass(frozen=True)
class DiskQuadrature:
    """Tensor Gauss-Legendre (radius) x trapezoid (angle) rule on the disk,
    plus a uniform trapezoid rule on the unit circle."""

    n_r: int = 64
    n_theta: int = 256
    n_b: int = 1024
    self_test: bool = True
    r: np.ndarray = field(init=False, repr=False, compare=False)
    theta: np.ndarray = field(init=False, repr=False, compare=False)
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)
    boundary_theta: np.ndarray = field(init=False, repr=False, compare=False)
    boundary_nodes: np.ndarray = field(init=False, repr=False, compare=False)
    boundary_weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        x, w = np.polynomial.legendre.leggauss(self.n_r)
        r = 0.5 * (x + 1.0)
        wr = 0.5 * w * r
        theta = 2 * np.pi * np.arange(self.n_theta) / self.n_theta
        rr, tt = np.meshgrid(r, theta, indexing="ij")
        nodes = (rr * np.exp(1j * tt)).ravel()
        weights = np.outer(wr, np.full(self.n_theta, 2 * np.pi / self.n_theta)).ravel()
        bt = 2 * np.pi * np.arange(self.n_b) / self.n_b
        setattr_ = object.__setattr__
        setattr_(self, "r", r)
        setattr_(self, "theta", theta)
        setattr_(self, "nodes", nodes)
        setattr_(self, "weights", weights)
        setattr_(self, "boundary_theta", bt)
        setattr_(self, "boundary_nodes", np.exp(1j * bt))
        setattr_(self, "boundary_weights", np.full(self.n_b, 2 * np.pi / self.n_b))
        if abs(weights.sum() - np.pi) > 1e-12 or abs(self.boundary_weights.sum() - 2 * np.pi) > 1e-12:
            raise RuntimeError("quadrature weights do not sum to pi / 2 pi")
        if self.self_test:
            self.check_exactness(min(self.degree, 24))

    @property
    def degree(self):
        """Total polynomial degree integrated exactly on the disk."""
        return min(2 * self.n_r - 2, self.n_theta - 1)

    def integrate(self, values):
        return np.sum(self.weights * values)

    def integrate_boundary(self, values):
        return np.sum(self.boundary_weights * values)

    def check_exactness(self, degree):
        x, y = self.nodes.real, self.nodes.imag
        worst = 0.0
        for a in range(degree + 1):
            for b in range(degree + 1 - a):
                err = abs(self.integrate(x**a * y**b) - _disk_monomial_integral(a, b))
                worst = max(worst, err)
        if worst > 1e-12:
            raise RuntimeError(f"quadrature self-test failed (error {worst:.2e})")
        return worst


# --------------------------------------------------------------------------
# measures
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscreteMeasure:
    """Weighted nodes in the closed unit disk."""

    nodes: np.ndarray
    weights: np.ndarray
    part: str = INTERIOR

    def __post_init__(self):
        z = np.asarray(self.nodes, dtype=complex).ravel()
        w = np.asarray(self.weights, dtype=float).ravel()
        if z.shape != w.shape:
            raise ValueError("nodes and weights differ in length")
        if self.part not in (INTERIOR, BOUNDARY):
            raise ValueError(f"unknown part tag {self.part!r}")
        if np.any(~np.isfinite(w)) or np.any(w < 0):
            raise ValueError("measure weights must be finite and nonnegative")
        if np.any(np.abs(z) > 1 + 1e-12):
            raise ValueError("measure nodes must lie in the closed unit disk")
        z.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "nodes", z)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.nodes.size

    def mass(self):
        return float(np.sum(self.weights))

    def integrate(self, f):
        return np.sum(self.weights * f(self.nodes))

    def scaled(self, factor):
        return DiscreteMeasure(self.nodes, self.weights * factor, self.part)

    def with_nodes(self, nodes):
        return DiscreteMeasure(nodes, self.weights, self.part)

    def rotated(self, angle):
        return self.with_nodes(self.nodes * np.exp(1j * angle))

    def to_csv(self, path=None):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["re", "im", "weight", "part"])
        for z, w in zip(self.nodes, self.weights):
            writer.writerow([repr(float(z.real)), repr(float(z.imag)), repr(float(w)), self.part])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source):
        text = Path(source).read_text() if not isinstance(source, str) or "\n" not in source else source
        rows = list(csv.DictReader(io.StringIO(text)))
        parts = {r["part"].strip() for r in rows}
        if len(parts) > 1:
            raise ValueError("mixed interior/boundary rows in one measure")
        z = np.array([float(r["re"]) + 1j * float(r["im"]) for r in rows])
        w = np.array([float(r["weight"]) for r in rows])
        return cls(z, w, parts.pop() if parts else INTERIOR)


def uniform_boundary_measure(n=1024):
    theta = 2 * np.pi * np.arange(n) / n
    return DiscreteMeasure(np.exp(1j * theta), np.full(n, 2 * np.pi / n), BOUNDARY)


def lebesgue_measure(quad):
    return DiscreteMeasure(quad.nodes, quad.weights, INTERIOR)


# --------------------------------------------------------------------------
# densities
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityField:
    """Positive density on the physical domain.

    ``func`` maps complex points to values.  ``lap_log`` optionally gives
    the closed-form Laplacian of ``log func`` (analytic densities).
    """

    func: Callable
    tag: str = "sampled"
    lap_log: Optional[Callable] = None

    def __call__(self, w):
        return np.asarray(self.func(w), dtype=float) * np.ones(np.shape(w))

    def samples(self, w):
        vals = self(w)
        if np.any(~np.isfinite(vals)) or np.any(vals <= 0):
            raise ValueError("density must be positive at every sample")
        return vals


def const_density(value=1.0):
    if value <= 0:
        raise ValueError("density must be positive")
    return DensityField(lambda w: np.full(np.shape(w), float(value)), f"const:{value:g}",
                        lambda w: np.zeros(np.shape(w)))


def exp_r2_density():
    """rho(w) = exp(|w|^2), with Laplacian of log rho equal to 4."""
    return DensityField(lambda w: np.exp(np.abs(w) ** 2), "exp_r2",
                        lambda w: np.full(np.shape(w), 4.0))


def file_density(path):
    """Density interpolated (C1 Clough-Tocher) from a CSV ``x,y,value`` file."""
    from scipy.interpolate import CloughTocher2DInterpolator

    data = np.loadtxt(path, delimiter=",", ndmin=2, comments="#")
    interp = CloughTocher2DInterpolator(data[:, :2], data[:, 2])

    def func(w):
        w = np.asarray(w)
        return interp(np.real(w), np.imag(w))

    return DensityField(func, f"file:{path}")


def density_from_spec(spec):
    spec = spec.strip()
    if spec.startswith("const:"):
        return const_density(float(spec.split(":", 1)[1]))
    if spec == "exp_r2":
        return exp_r2_density()
    if spec.startswith("file:"):
        return file_density(spec.split(":", 1)[1])
    raise ValueError(f"unknown density spec {spec!r}")


UNIT_DENSITY = const_density(1.0)


# --------------------------------------------------------------------------
# pullbacks
# --------------------------------------------------------------------------

def pullback_area_measure(phi, quad, density=None):
    """Interior measure with weights rho(phi(z)) |phi'(z)|^2 q_j."""
    density = density or UNIT_DENSITY
    z = quad.nodes
    rho = density.samples(phi(z))
    return DiscreteMeasure(z, rho * np.abs(phi.derivative(z)) ** 2 * quad.weights, INTERIOR)


def pullback_boundary_measure(phi, quad, density=None):
    """Boundary measure with weights rho(phi(z)) |phi'(z)| q_j on the circle."""
    density = density or UNIT_DENSITY
    z = quad.boundary_nodes
    rho = density.samples(phi(z))
    return DiscreteMeasure(z, rho * np.abs(phi.derivative(z)) * quad.boundary_weights, BOUNDARY)


def pullback_density(phi, density=None):
    """delta(z) = rho(phi(z)) |phi'(z)|^2 as a function on the disk."""
    density = density or UNIT_DENSITY

    def delta(z):
        return density(phi(z)) * np.abs(phi.derivative(z)) ** 2

    return delta


# --------------------------------------------------------------------------
# curvature
# --------------------------------------------------------------------------

class CurvatureResolutionError(ValueError):
    pass


def _five_point_lap_log(func, w, h):
    c = np.log(func(w))
    s = (np.log(func(w + h)) + np.log(func(w - h))
         + np.log(func(w + 1j * h)) + np.log(func(w - 1j * h)))
    return (s - 4 * c) / (h * h)


def gaussian_curvature(density, points, h=1 / 128, tol=None, analytic=True):
    """Gaussian curvature K = -(1/2 rho) Lap log rho of the metric rho|dw|^2.

    Uses the closed form when the density carries one (and ``analytic``),
    otherwise a 5-point stencil with spacing ``h``.  If ``tol`` is given,
    the stencil error is estimated by comparing spacings h and h/2; an
    estimate above ``tol`` raises :class:`CurvatureResolutionError`.  The
    returned stencil values are Richardson-extrapolated from h and h/2.
    """
    w = np.asarray(points, dtype=complex)
    rho = density.samples(w)
    if analytic and density.lap_log is not None:
        lap = np.asarray(density.lap_log(w), dtype=float)
    else:
        coarse = _five_point_lap_log(density, w, h)
        fine = _five_point_lap_log(density, w, h / 2)
        lap = (4 * fine - coarse) / 3
        err = float(np.max(np.abs(fine - coarse)) / 3) if w.size else 0.0
        if tol is not None and err / (2 * np.min(rho)) > tol:
            raise CurvatureResolutionError(
                f"5-point stencil at h={h:g} too coarse: estimated curvature error {err:.2e} > {tol:.1e}")
    return -lap / (2 * rho)


def is_log_subharmonic(density, points, h=1 / 128, tol=1e-8):
    return bool(np.all(gaussian_curvature(density, points, h) <= tol))


# --------------------------------------------------------------------------
# growth of subharmonic densities
# --------------------------------------------------------------------------

def growth_function(nu, r):
    """G(r) as the total weight of nodes with |z| <= r."""
    if nu.part != INTERIOR:
        raise ValueError("growth function is defined for interior measures")
    return float(np.sum(nu.weights[np.abs(nu.nodes) <= r]))


def growth_profile(delta, quad, radii):
    """G(r) = int_{B(0,r)} delta dz = r^2 int_D delta(r z) dz, by quadrature."""
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    return np.array([r * r * quad.integrate(delta(r * quad.nodes)) for r in radii])


@dataclass
class GrowthReport:
    radii: np.ndarray
    defect: np.ndarray           # G(r) - pi r^2 after normalising G(1) = pi
    max_defect: float
    harmonic_candidate: bool
    passed: bool


def check_subharmonic_growth(delta, quad, n_radii=200, tol=1e-8):
    """Check G(r) <= pi r^2 for the density normalised to G(1) = pi.

    ``harmonic_candidate`` flags the equality profile G(r) = pi r^2.
    """
    radii = np.linspace(0.0, 1.0, n_radii)
    g = growth_profile(delta, quad, radii)
    g *= np.pi / g[-1]
    defect = g - np.pi * radii**2
    worst = float(defect.max())
    return GrowthReport(radii, defect, worst, bool(np.max(np.abs(defect)) <= tol), worst <= tol)


def _check_increasing(h, n=1000):
    r = np.linspace(0.0, 1.0, n)
    vals = np.asarray(h(r), dtype=float)
    if abs(vals[0]) > 1e-14 or np.any(np.diff(vals) <= 0):
        raise ValueError("radial profile must be strictly increasing with h(0) = 0")


def radial_comparison(h, nu, n_gauss=64):
    """Compare int h(|z|) dnu with int h(|z|) dz after normalising mass to pi.

    Returns a dict with ``lhs``, ``rhs`` and ``defect = lhs - rhs``.
    """
    _check_increasing(h)
    m = nu.mass()
    if m <= 0:
        raise ValueError("measure has zero mass")
    lhs = float(np.sum(nu.weights * h(np.abs(nu.nodes))) * np.pi / m)
    x, w = np.polynomial.legendre.leggauss(n_gauss)
    r = 0.5 * (x + 1)
    rhs = float(2 * np.pi * np.sum(0.5 * w * h(r) * r))
    return {"lhs": lhs, "rhs": rhs, "defect": lhs - rhs}


# --------------------------------------------------------------------------
# domain spec files
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DomainSpec:
    map: ConformalMap
    density: DensityField
    name: str = "domain"
    density_spec: str = "const:1"


def parse_coeffs(text):
    coeffs = []
    for item in text.strip().split(";"):
        if not item.strip():
            continue
        re_, im_ = (float(v) for v in item.split(","))
        coeffs.append(complex(re_, im_))
    return tuple(coeffs)


def format_coeffs(coeffs):
    return ";".join(f"{c.real:g},{c.imag:g}" for c in np.asarray(coeffs, dtype=complex))


def parse_key_values(text):
    """Parse ``key=value`` lines; ``#`` starts a comment; repeated keys accumulate."""
    out = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"malformed line {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out.setdefault(key, []).append(value)
    return out


def parse_domain_spec(text, name="domain"):
    kv = parse_key_values(text)
    kind = kv.get("kind", ["polymap"])[-1]
    if kind != "polymap":
        raise ValueError(f"unsupported domain kind {kind!r}")
    if "coeffs" not in kv:
        raise ValueError("domain spec needs coeffs=")
    phi = ConformalMap(parse_coeffs(kv["coeffs"][-1]))
    dspec = kv.get("density", ["const:1"])[-1]
    if not phi.univalence_certified:
        warnings.warn(f"{name}: injectivity of phi is not certified (only |phi'| > 0 was checked)")
    return DomainSpec(phi, density_from_spec(dspec), kv.get("name", [name])[-1], dspec)


def read_domain_file(path):
    path = Path(path)
    return parse_domain_spec(path.read_text(), name=path.stem)

"""Moments of inertia V(t) = int X_t^2 dnu and the search for caps whose
rearranged measure has an isotropic inertia form."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .hersch import PSI_ID, as_psi

log = logging.getLogger(__name__)

MULTIPLICITY_TOL = 1e-6
GRID_L = 24
GRID_P = 48
L_MARGIN = 0.02


@dataclass(frozen=True)
class InertiaForm:
    """Symmetric 2x2 form Q with V(t) = t^T Q t."""

    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float).reshape(2, 2)
        q = 0.5 * (q + q.T)
        object.__setattr__(self, "q", q)

    def __call__(self, t):
        t = complex(t)
        v = np.array([t.real, t.imag])
        return float(v @ self.q @ v)

    @property
    def trace(self):
        return float(self.q[0, 0] + self.q[1, 1])

    @property
    def anisotropy(self):
        """lambda_1 - lambda_2."""
        a, b, c = self.q[0, 0], self.q[0, 1], self.q[1, 1]
        return float(math.hypot(a - c, 2 * b))

    @property
    def eigenvalues(self):
        half = 0.5 * self.anisotropy
        mid = 0.5 * self.trace
        return mid + half, mid - half

    @property
    def lam_max(self):
        return self.eigenvalues[0]

    @property
    def lam_min(self):
        return self.eigenvalues[1]

    @property
    def direction(self):
        """Angle in (-pi/2, pi/2] of the maximising direction class."""
        a, b, c = self.q[0, 0], self.q[0, 1], self.q[1, 1]
        return 0.5 * math.atan2(2 * b, a - c)

    def is_multiple(self, tol=MULTIPLICITY_TOL):
        return self.anisotropy <= tol * self.trace

    def rotated(self, angle):
        c, s = math.cos(angle), math.sin(angle)
        r = np.array([[c, -s], [s, c]])
        return InertiaForm(r @ self.q @ r.T)


def inertia_form(nu, psi=PSI_ID):
    w = as_psi(psi)(nu.nodes)
    x, y = w.real, w.imag
    wt = nu.weights
    q = np.array([[np.sum(wt * x * x), np.sum(wt * x * y)],
                  [np.sum(wt * x * y), np.sum(wt * y * y)]])
    return InertiaForm(q)


def classify(q, tol=MULTIPLICITY_TOL):
    """'multiple' iff lambda_1 - lambda_2 <= tol * trace, else 'simple'."""
    if not isinstance(q, InertiaForm):
        q = InertiaForm(q)
    return "multiple" if q.is_multiple(tol) else "simple"


def maximizing_direction(q, tol=MULTIPLICITY_TOL):
    """Maximising direction class as an angle mod pi, or None if multiple."""
    if not isinstance(q, InertiaForm):
        q = InertiaForm(q)
    return None if q.is_multiple(tol) else q.direction


def rp1_distance(a, b):
    """Distance between two direction classes given by angles (mod pi)."""
    d = (a - b) % math.pi
    return min(d, math.pi - d)


def reflected_direction(direction, p_angle):
    """Image of the class [e^{i direction}] under reflection across the
    diameter orthogonal to e^{i p_angle}."""
    return (2 * p_angle - direction) % math.pi


@dataclass
class CapSearchResult:
    """Cap (l, p_angle) found for the renormalised input measure."""

    l: float
    p_angle: float
    anisotropy: float
    trace: float
    multiple: bool
    trivial: bool = False
    trace_log: list = field(default_factory=list, repr=False)
    landscape: np.ndarray = field(default=None, repr=False)

    @property
    def relative_anisotropy(self):
        return self.anisotropy / self.trace if self.trace else float("nan")


class CapSearchError(RuntimeError):
    pass


def _cap_objective(nu, psi):
    from .folding import FoldingError, rearranged

    cache = {}
    penalty = np.array([10.0, 10.0])

    def vec(x):
        l, ang = float(x[0]), float(x[1])
        l = min(max(l, 1e-6), 2 * np.pi - 1e-6)
        key = (l, ang % (2 * np.pi))
        if key not in cache:
            try:
                q = inertia_form(rearranged(nu, (l, ang), psi).measure, psi)
            except FoldingError:
                # near the cylinder ends the cap chain loses accuracy
                cache[key] = (penalty, None)
            else:
                tr = q.trace
                cache[key] = (np.array([(q.q[0, 0] - q.q[1, 1]) / tr, 2 * q.q[0, 1] / tr]), q)
        return cache[key]

    return vec


def _winding(values):
    """Winding number of a closed polyline of complex values around 0."""
    a = np.angle(values)
    steps = np.angle(np.exp(1j * (np.roll(a, -1) - a)))
    return int(round(steps.sum() / (2 * np.pi)))


class _Field:
    """Complex-valued objective on the (l, p) cylinder with edge refinement."""

    def __init__(self, vec):
        self.vec = vec

    def __call__(self, l, p):
        v, _ = self.vec((l, p))
        return complex(v[0], v[1])

    def edge(self, a, b, depth=0):
        # sample a segment until consecutive angles differ by < pi/2
        fa, fb = self(*a), self(*b)
        if depth >= 6 or abs(np.angle(fb / fa)) < 0.5 * np.pi or fa == 0 or fb == 0:
            return [fa]
        m = (0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]))
        return self.edge(a, m, depth + 1) + self.edge(m, b, depth + 1)

    def cell_winding(self, l0, l1, p0, p1):
        corners = [(l0, p0), (l1, p0), (l1, p1), (l0, p1)]
        vals = []
        for k in range(4):
            vals += self.edge(corners[k], corners[(k + 1) % 4])
        return _winding(np.array(vals))


def _bisect_zero(field, cell, tol, max_depth=60):
    """Shrink a cell of nonzero winding number around a zero of ``field``."""
    l0, l1, p0, p1 = cell
    best = None
    for _ in range(max_depth):
        lm, pm = 0.5 * (l0 + l1), 0.5 * (p0 + p1)
        val = abs(field(lm, pm))
        if best is None or val < best[0]:
            best = (val, lm, pm)
        if val <= tol or max(l1 - l0, p1 - p0) < 1e-13:
            break
        for sub in ((l0, lm, p0, pm), (lm, l1, p0, pm), (lm, l1, pm, p1), (l0, lm, pm, p1)):
            if field.cell_winding(*sub) != 0:
                l0, l1, p0, p1 = sub
                break
        else:
            break  # zero on a sub-cell edge: keep the best centre found
    return best


def _cap_grid(n_l, n_p):
    ls = np.linspace(L_MARGIN, 2 * np.pi - L_MARGIN, n_l + 1)
    ps = np.arange(n_p) / n_p * 2 * np.pi
    return ls, ps


def find_multiple_cap(nu, psi=PSI_ID, tol=MULTIPLICITY_TOL, n_l=GRID_L, n_p=GRID_P,
                      refine_steps=200):
    """Locate a cap whose rearranged measure is multiple.

    The objective is the complex number (Q11 - Q22 + 2i Q12) / trace Q of
    the rearranged measure.  A coarse (l, p) grid gives its winding number
    around every cell; cells with nonzero winding contain a zero and are
    bisected down to it.  If no such cell exists, Nelder-Mead on the
    modulus from the best grid point takes over, followed by a root polish.
    ``nu`` is renormalised first.
    """
    from scipy.optimize import minimize, root

    from .hersch import renormalized

    psi = as_psi(psi)
    nu, _ = renormalized(nu, psi)
    q0 = inertia_form(nu, psi)
    if q0.is_multiple(tol):
        return CapSearchResult(2 * np.pi, 0.0, q0.anisotropy, q0.trace, True, trivial=True)

    vec = _cap_objective(nu, psi)
    field = _Field(vec)
    ls, ps = _cap_grid(n_l, n_p)
    grid = np.array([[field(l, p) for p in ps] for l in ls])
    land = np.abs(grid)
    trace_log = []

    cells = []
    for i in range(n_l):
        for j in range(n_p):
            jn = (j + 1) % n_p
            corners = np.array([grid[i, j], grid[i + 1, j], grid[i + 1, jn], grid[i, jn]])
            p1 = ps[j] + 2 * np.pi / n_p
            w = field.cell_winding(ls[i], ls[i + 1], ps[j], p1)
            if w != 0:
                cells.append((np.abs(corners).min(), (ls[i], ls[i + 1], ps[j], p1)))
    cells.sort(key=lambda c: c[0])
    x = None
    for _, cell in cells:
        val, l, p = _bisect_zero(field, cell, 0.01 * tol)
        trace_log.append(("winding-bisection", l, p, val))
        if x is None or val < abs(field(*x)):
            x = np.array([l, p])
        if val <= tol:
            break

    if x is None or abs(field(*x)) > tol:
        i, j = np.unravel_index(np.argmin(land), land.shape)
        start = [ls[i], ps[j]] if x is None or land[i, j] < abs(field(*x)) else list(x)
        trace_log.append(("grid", start[0], start[1], abs(field(*start))))
        obj = lambda y: abs(field(y[0], y[1]))
        dl, dp = ls[1] - ls[0], ps[1] - ps[0]
        res = minimize(obj, start, method="Nelder-Mead",
                       options={"maxiter": refine_steps, "xatol": 1e-12, "fatol": 1e-15,
                                "initial_simplex": [start, [start[0] + 0.5 * dl, start[1]],
                                                    [start[0], start[1] + 0.5 * dp]]})
        x = res.x
        trace_log.append(("nelder-mead", x[0], x[1], res.fun))
        if res.fun > tol:
            try:
                sol = root(lambda y: vec(y)[0], x, method="hybr", options={"xtol": 1e-13})
                if 0 < sol.x[0] < 2 * np.pi and obj(sol.x) < res.fun:
                    x = sol.x
                    trace_log.append(("root", x[0], x[1], obj(x)))
            except Exception as exc:  # noqa: BLE001 - keep Nelder-Mead result
                log.debug("root polish failed: %s", exc)

    _, q = vec(x)
    if q is None:
        raise CapSearchError("cap search ended on a cap where folding breaks down")
    result = CapSearchResult(float(x[0]), float(x[1] % (2 * np.pi)), q.anisotropy, q.trace,
                             q.is_multiple(tol), trace_log=trace_log, landscape=land)
    if not result.multiple:
        raise CapSearchError(
            f"no multiple cap found: best relative anisotropy {result.relative_anisotropy:.3e} "
            "(existence is guaranteed, so this is a numerical breakdown)")
    return result


def anisotropy_landscape_csv(result, n_l=GRID_L, n_p=GRID_P):
    ls, ps = _cap_grid(n_l, n_p)
    lines = ["l,p_angle,relative_anisotropy"]
    for i, l in enumerate(ls):
        for j, p in enumerate(ps):
            lines.append(f"{l:.12g},{p:.12g},{result.landscape[i, j]:.12g}")
    return "\n".join(lines) + "\n"

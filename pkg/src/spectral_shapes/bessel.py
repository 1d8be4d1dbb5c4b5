"""Bessel J0/J1, the first critical point of J1, and the radial Neumann profile.

Power series below ``SERIES_CUTOFF``; Miller's backward recurrence above it
(the series loses digits to cancellation once the largest term grows past
~1e2).
"""

from dataclasses import dataclass

import numpy as np

X_MAX = 20.0
SERIES_CUTOFF = 8.0
_SERIES_TERMS = 40


def _series(n, x):
    half = 0.5 * x
    term = half**n / float(np.prod(np.arange(1, n + 1)))
    total = np.array(term, dtype=float)
    q = -half * half
    for k in range(_SERIES_TERMS):
        term = term * q / ((k + 1) * (k + 1 + n))
        total = total + term
        if np.all(np.abs(term) <= 1e-18 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _miller(x):
    # backward recurrence normalised by J0 + 2*sum J_{2k} = 1
    x = np.asarray(x, dtype=float)
    start = 2 * (int(np.ceil(x.max())) + 30)
    j_next = np.zeros_like(x)
    j_cur = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    j0 = j1 = None
    for k in range(start, 0, -1):
        j_prev = (2.0 * k / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        # j_cur now holds J_{k-1}
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm = norm + 2.0 * j_cur
        if k - 1 == 1:
            j1 = j_cur.copy()
        # rescale to avoid overflow
        big = np.abs(j_cur) > 1e200
        if np.any(big):
            for arr in (j_next, j_cur, norm):
                arr[big] *= 1e-200
            if j1 is not None:
                j1[big] *= 1e-200
    j0 = j_cur
    norm = norm + j0
    return j0 / norm, j1 / norm


def _eval(n, x):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x <= SERIES_CUTOFF
    if np.any(small):
        out[small] = _series(n, x[small])
    if np.any(~small):
        j0, j1 = _miller(x[~small])
        out[~small] = j0 if n == 0 else j1
    return out


def _check_range(x):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0) or np.any(x > X_MAX):
        raise ValueError(f"Bessel argument outside [0, {X_MAX}]")
    return x


def bessel_j0(x):
    x = _check_range(x)
    out = _eval(0, x)
    return out if out.ndim else float(out)


def bessel_j1(x):
    """First Bessel function of the first kind, J1(x) for 0 <= x <= 20."""
    x = _check_range(x)
    out = _eval(1, x)
    return out if out.ndim else float(out)


def bessel_j1_prime(x):
    """J1'(x) = (J0(x) - J2(x)) / 2, evaluated as J0 - J1/x away from zero."""
    x = _check_range(x)
    out = np.empty_like(x)
    tiny = x < 1e-3
    if np.any(tiny):
        out[tiny] = 0.5 * (_series(0, x[tiny]) - _series(2, x[tiny]))
    if np.any(~tiny):
        xs = x[~tiny]
        out[~tiny] = _eval(0, xs) - _eval(1, xs) / xs
    return out if out.ndim else float(out)


def find_zeta(lo=1.5, hi=2.5):
    """Smallest positive zero of J1', located by bisection on [lo, hi]."""
    f_lo = bessel_j1_prime(lo)
    if f_lo * bessel_j1_prime(hi) > 0:
        raise ValueError("J1' does not change sign on the bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        f_mid = bessel_j1_prime(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return lo if abs(bessel_j1_prime(lo)) <= abs(bessel_j1_prime(hi)) else hi


ZETA = find_zeta()
if not (1.84 <= ZETA <= 1.85 and abs(bessel_j1_prime(ZETA)) <= 1e-13):
    raise RuntimeError(f"zeta self-check failed: {ZETA!r}")

#: First nonzero Neumann eigenvalue of the unit disk (double).
MU1_DISK = ZETA * ZETA
_J1_ZETA = bessel_j1(ZETA)


@dataclass(frozen=True)
class BesselProfile:
    """Radial profile f(r) = J1(zeta r) / J1(zeta) of the first Neumann mode."""

    zeta: float = ZETA

    @property
    def norm(self):
        return _J1_ZETA if self.zeta == ZETA else bessel_j1(self.zeta)

    def f(self, r):
        r = np.asarray(r, dtype=float)
        out = _series(1, self.zeta * r) / self.norm
        return out if out.ndim else float(out)

    def df(self, r):
        r = np.asarray(r, dtype=float)
        out = self.zeta * bessel_j1_prime(self.zeta * r) / self.norm
        return out if np.ndim(out) else float(out)

    def __call__(self, r):
        return self.f(r), self.df(r)

    def f_squared_disk_integral(self, n=64):
        """Integral of f(|z|)^2 over the unit disk (Gauss-Legendre in r)."""
        x, w = np.polynomial.legendre.leggauss(n)
        r = 0.5 * (x + 1.0)
        return float(2.0 * np.pi * np.sum(0.5 * w * r * self.f(r) ** 2))


PROFILE = BesselProfile()


def neumann_profile(r):
    """Return ``(f(r), f'(r))`` for the radial Neumann profile."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r > 1 + 1e-12):
        raise ValueError("profile radius must lie in [0, 1]")
    return PROFILE(r)

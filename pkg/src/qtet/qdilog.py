"""Quantum dilogarithm, classical dilogarithm and the Lobachevsky function.

The quantum dilogarithm is the contour integral

    phi_r(z) = (4*pi*i/r) * int_Omega exp((2z - pi) x) / (4x sinh(pi x) sinh(2 pi x / r)) dx

over the real line indented by a semicircle of radius epsilon above the
origin.  It is holomorphic on the strip -pi/r < Re z < pi + pi/r and is
continued to a meromorphic function by its product recursion.
"""

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .qkernel import QContext

PI = math.pi
ZETA2 = PI ** 2 / 6


class PoleError(ValueError):
    """The requested point is (numerically) a pole of phi_r."""


class ContourError(ValueError):
    """The contour parameters cannot deliver the requested accuracy."""


@dataclass(frozen=True)
class ContourSpec:
    """Quadrature settings for the contour integral.

    ``truncation`` is the cut-off of the two rays; ``None`` picks it from the
    exponential decay of the integrand so the neglected tail stays below
    ``abs_tol / 10``.
    """

    epsilon: float = 0.5
    truncation: float | None = None
    abs_tol: float = 1e-10

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.abs_tol <= 0:
            raise ValueError("abs_tol must be positive")
        if self.truncation is not None and self.truncation <= self.epsilon:
            raise ValueError("truncation must exceed epsilon")


def _level(ctx):
    return ctx.r if isinstance(ctx, QContext) else QContext(int(ctx)).r


def in_strip(z, r):
    return -PI / r < z.real < PI + PI / r


def _ray_integrand(x, a, r):
    # 2 sinh(a x) / (4 x sinh(pi x) sinh(2 pi x / r)), written with decaying
    # exponentials so nothing overflows far out on the ray
    c = 2 * PI / r
    num = np.exp((a - PI - c) * x) - np.exp((-a - PI - c) * x)
    den = x * (-np.expm1(-2 * PI * x)) * (-np.expm1(-2 * c * x))
    return num / den


def _tail_bound(x, decay, r):
    c = 2 * PI / r
    return math.exp(-decay * x) / (x * decay * (1 - math.exp(-2 * PI * x))
                                   * (1 - math.exp(-2 * c * x)))


def _truncation(z, r, spec):
    decay = PI + 2 * PI / r - abs(2 * z.real - PI)
    # phi carries a prefactor 4 pi / r
    target = spec.abs_tol / 10 * r / (4 * PI)
    if spec.truncation is not None:
        if _tail_bound(spec.truncation, decay, r) > target:
            raise ContourError(f"truncation {spec.truncation} leaves a tail above "
                               f"abs_tol at z={z}")
        return spec.truncation
    x = spec.epsilon + 1.0
    while _tail_bound(x, decay, r) > target:
        x *= 1.25
    return x


def phi_r(z, ctx, spec: ContourSpec = ContourSpec()) -> complex:
    """Quantum dilogarithm on its strip of holomorphy."""
    r = _level(ctx)
    z = complex(z)
    if not in_strip(z, r):
        raise ValueError(f"Re z = {z.real} outside ({-PI / r}, {PI + PI / r}); "
                         "use phi_r_extended")
    a = 2 * z - PI
    eps = spec.epsilon
    cutoff = _truncation(z, r, spec)
    # local tolerance for the unscaled integral
    tol = spec.abs_tol * r / (4 * PI) / 4
    rays, _ = integrate.quad(_ray_integrand, eps, cutoff, args=(a, r),
                             complex_func=True, epsabs=tol, epsrel=1e-13,
                             limit=2000)

    def arc(t):
        x = eps * cmath.exp(1j * t)
        return (cmath.exp(a * x) / (4 * x * cmath.sinh(PI * x) * cmath.sinh(2 * PI * x / r))
                * 1j * x)

    # the semicircle runs from angle pi down to 0
    semi, _ = integrate.quad(arc, 0.0, PI, complex_func=True, epsabs=tol,
                             epsrel=1e-13, limit=200)
    return 4j * PI / r * (rays - semi)


def pole_distance(z, r):
    """Distance from z to the nearest pole of the extended phi_r."""
    z = complex(z)
    best = math.inf
    for x0, sgn in ((PI, 1), (0.0, -1)):
        m = (z.real - x0) * r / PI * sgn
        for mm in {math.floor(m), math.ceil(m)}:
            if mm > 0 and (mm % 2 == 1 or mm > r):
                p = x0 + sgn * mm * PI / r
                best = min(best, abs(z - p))
    return best


def phi_r_extended(z, ctx, spec: ContourSpec = ContourSpec(), pole_tol: float = 1e-8) -> complex:
    """Meromorphic continuation of phi_r through its product recursion.

    Logarithms of the recursion factors use the principal branch; the
    resulting branch ambiguity is a multiple of 8*pi^2/r, which disappears
    under ``exp(r/(4*pi*i) * ...)``.
    """
    r = _level(ctx)
    z = complex(z)
    if pole_distance(z, r) < pole_tol:
        raise PoleError(f"z={z} is within {pole_tol} of a pole of phi_{r}")
    if in_strip(z, r):
        return phi_r(z, r, spec)
    h = 2 * PI / r
    if z.real >= PI + PI / r:
        n = math.floor((z.real - PI - PI / r) / h) + 1
        w = z - n * h
        logs = sum(cmath.log(1 - cmath.exp(2j * (z - (2 * k - 1) * PI / r)))
                   for k in range(1, n + 1))
        return phi_r(w, r, spec) - 4j * PI / r * logs
    n = math.floor((-PI / r - z.real) / h) + 1
    w = z + n * h
    logs = sum(cmath.log(1 - cmath.exp(2j * (w - (2 * k - 1) * PI / r)))
               for k in range(1, n + 1))
    return phi_r(w, r, spec) + 4j * PI / r * logs


@lru_cache(maxsize=200_000)
def phi_r_grid(r: int, m: int, spec: ContourSpec = ContourSpec()) -> complex:
    """Cached phi_r(m*pi/r); the 6j sums only ever need these points."""
    return phi_r_extended(m * PI / r, r, spec)


def phi_r_prime(z, ctx, spec: ContourSpec = ContourSpec(), h: float = 1e-5) -> complex:
    """Central-difference derivative of phi_r."""
    return (phi_r_extended(z + h, ctx, spec) - phi_r_extended(z - h, ctx, spec)) / (2 * h)


# Bernoulli numbers B_0..B_40 for the series of Li2 in u = -log(1 - z)
_BERN = special.bernoulli(40)
_LI2_COEF = np.array([_BERN[n] / math.factorial(n + 1) for n in range(41)])


def _li2_series(z):
    u = -np.log1p(-z)
    # Horner in u, then one extra factor u
    acc = np.zeros_like(u)
    for c in _LI2_COEF[::-1]:
        acc = acc * u + c
    return acc * u


def _li2_unit_disk(z):
    out = np.empty_like(z)
    near_one = z.real > 0.5
    zs = z[~near_one]
    out[~near_one] = _li2_series(zs)
    zr = z[near_one]
    w = 1 - zr
    safe = w != 0
    refl = np.full(zr.shape, ZETA2, dtype=complex)
    refl[safe] = (ZETA2 - np.log(zr[safe]) * np.log(w[safe]) - _li2_series(w[safe]))
    out[near_one] = refl
    return out


def li2(z):
    """Principal dilogarithm, cut along [1, inf).

    On the cut itself the value is the limit from below (Im z -> 0-).
    Accepts scalars or arrays.
    """
    scalar = np.ndim(z) == 0
    z = np.array(z, dtype=complex, ndmin=1)
    on_cut = (z.imag == 0) & (z.real > 1)
    z[on_cut] = [complex(x, -0.0) for x in z[on_cut].real]
    out = np.empty_like(z)
    inside = np.abs(z) <= 1
    out[inside] = _li2_unit_disk(z[inside])
    zo = z[~inside]
    if zo.size:
        lg = np.log(-zo)
        out[~inside] = -ZETA2 - 0.5 * lg * lg - _li2_unit_disk(1 / zo)
    return complex(out[0]) if scalar else out


# |B_2n| / (2n (2n+1)!) for the Clausen-function expansion
_CL2_COEF = np.array([abs(_BERN[2 * n]) / (2 * n * math.factorial(2 * n + 1))
                      for n in range(1, 21)])


def clausen2(x):
    """Clausen function Cl2(x) = sum sin(kx)/k^2, via its Bernoulli expansion."""
    x = math.remainder(float(x), 2 * PI)
    if x == 0.0:
        return 0.0
    series = sum(c * x ** (2 * n + 1) for n, c in enumerate(_CL2_COEF, start=1))
    return x - x * math.log(abs(x)) + series


def lobachevsky(theta: float) -> float:
    """Lobachevsky function, Lambda(theta) = Cl2(2*theta) / 2."""
    return 0.5 * clausen2(2 * theta)

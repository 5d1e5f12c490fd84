"""Root-of-unity quantum algebra.

Quantum integers and factorials at q = exp(2*pi*i/r), admissibility tests for
colour triples and 6-tuples, Delta-symbols and the quantum 6j-symbol.

Factorial products grow like exp(c*r), so everything past the quantum integer
is carried as a :class:`ScaledComplex` (log-magnitude plus phase) and the
alternating 6j sum is accumulated after subtracting its largest log-term.
"""

import cmath
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

#: Largest level for which double precision is considered trustworthy.
PRECISION_CEILING = 1001

TWO_PI = 2.0 * math.pi

#: Slot triples of a 6-tuple that form the four faces of the tetrahedron.
FACES = ((0, 1, 2), (0, 4, 5), (1, 3, 5), (2, 3, 4))
#: Slot quadruples whose half-sums give Q_1, Q_2, Q_3.
QUADS = ((0, 1, 3, 4), (0, 2, 3, 5), (1, 2, 4, 5))


class AdmissibilityError(ValueError):
    """Raised when colours violate an admissibility precondition."""


@dataclass(frozen=True)
class QContext:
    """Odd level r >= 3 together with the root of unity q = exp(2*pi*i/r)."""

    r: int

    def __post_init__(self):
        r = self.r
        if isinstance(r, bool) or not isinstance(r, (int, np.integer)):
            raise TypeError(f"r must be an integer, got {r!r}")
        if r < 3:
            raise ValueError(f"r must be at least 3, got {r}")
        if r % 2 == 0:
            raise ValueError(f"r must be odd, got {r}")
        object.__setattr__(self, "r", int(r))
        if r > PRECISION_CEILING:
            warnings.warn(f"r={r} exceeds the double-precision ceiling "
                          f"{PRECISION_CEILING}; results may lose accuracy",
                          RuntimeWarning, stacklevel=2)

    @property
    def q(self) -> complex:
        return cmath.exp(1j * TWO_PI / self.r)

    @property
    def step(self) -> float:
        """Angle 2*pi/r attached to one unit of colour."""
        return TWO_PI / self.r


@dataclass(frozen=True)
class ScaledComplex:
    """Complex number stored as ``exp(log_mag) * exp(i*phase)``.

    ``log_mag = -inf`` encodes an exact zero.  The phase is kept in
    (-pi, pi].
    """

    log_mag: float
    phase: float = 0.0

    def __post_init__(self):
        log_mag = float(self.log_mag)
        if math.isnan(log_mag) or log_mag == math.inf:
            raise ValueError(f"invalid log-magnitude {self.log_mag!r}")
        phase = 0.0 if log_mag == -math.inf else float(self.phase)
        phase = math.fmod(phase, TWO_PI)
        if phase <= -math.pi:
            phase += TWO_PI
        elif phase > math.pi:
            phase -= TWO_PI
        object.__setattr__(self, "log_mag", log_mag)
        object.__setattr__(self, "phase", phase)

    @classmethod
    def zero(cls):
        return cls(-math.inf, 0.0)

    @classmethod
    def from_complex(cls, z):
        z = complex(z)
        if z == 0:
            return cls.zero()
        return cls(math.log(math.hypot(z.real, z.imag)), math.atan2(z.imag, z.real))

    @property
    def is_zero(self):
        return self.log_mag == -math.inf

    def to_complex(self) -> complex:
        if self.is_zero:
            return 0j
        return cmath.rect(math.exp(self.log_mag), self.phase)

    __complex__ = to_complex

    def __abs__(self):
        return math.exp(self.log_mag)

    def __mul__(self, other):
        if not isinstance(other, ScaledComplex):
            other = ScaledComplex.from_complex(other)
        if self.is_zero or other.is_zero:
            return ScaledComplex.zero()
        return ScaledComplex(self.log_mag + other.log_mag, self.phase + other.phase)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, ScaledComplex):
            other = ScaledComplex.from_complex(other)
        if other.is_zero:
            raise ZeroDivisionError("division by a scaled zero")
        if self.is_zero:
            return ScaledComplex.zero()
        return ScaledComplex(self.log_mag - other.log_mag, self.phase - other.phase)

    def __pow__(self, n):
        if self.is_zero:
            return ScaledComplex.zero() if n > 0 else ScaledComplex(0.0)
        return ScaledComplex(n * self.log_mag, n * self.phase)

    def conjugate(self):
        return ScaledComplex(self.log_mag, -self.phase)

    def log(self) -> complex:
        """Principal logarithm."""
        if self.is_zero:
            raise ValueError("log of zero")
        return complex(self.log_mag, self.phase)


def scaled_sum(log_mags, weights):
    """Sum ``weights * exp(log_mags)`` without overflow.

    ``weights`` are complex (or real) numbers of moderate size, typically
    unit phases or signs.  Terms with ``log_mags = -inf`` contribute nothing.
    """
    log_mags = np.asarray(log_mags, dtype=float)
    weights = np.asarray(weights)
    if log_mags.size == 0:
        return ScaledComplex.zero()
    top = np.max(log_mags)
    if top == -np.inf:
        return ScaledComplex.zero()
    total = complex(np.sum(weights * np.exp(log_mags - top)))
    if total == 0:
        return ScaledComplex.zero()
    return ScaledComplex(top, 0.0) * ScaledComplex.from_complex(total)


def scaled_total(values):
    """Sum an iterable of :class:`ScaledComplex` in the given order."""
    values = list(values)
    return scaled_sum([v.log_mag for v in values],
                      [cmath.exp(1j * v.phase) for v in values])


@lru_cache(maxsize=64)
def factorial_table(r):
    """log|[n]!| and sign([n]!) for n = 0 .. r-1 as two read-only arrays."""
    k = np.arange(1, r)
    qint = np.sin(TWO_PI * k / r) / np.sin(TWO_PI / r)
    log_mag = np.concatenate(([0.0], np.cumsum(np.log(np.abs(qint)))))
    sign = np.concatenate(([1.0], np.cumprod(np.sign(qint))))
    log_mag.setflags(write=False)
    sign.setflags(write=False)
    return log_mag, sign


def quantum_integer(n: int, ctx: QContext) -> complex:
    """[n] = (q^n - q^-n) / (q - q^-1); real up to rounding."""
    q = ctx.q
    return (q ** n - q ** (-n)) / (q - 1 / q)


def quantum_factorial(n: int, ctx: QContext, braces: bool = False) -> ScaledComplex:
    """[n]! for 0 <= n <= r-2, or {n}! = prod(q^k - q^-k) when ``braces``."""
    if not 0 <= n <= ctx.r - 2:
        raise ValueError(f"factorial index {n} outside 0..{ctx.r - 2}")
    log_mag, sign = factorial_table(ctx.r)
    out = ScaledComplex(log_mag[n], 0.0 if sign[n] > 0 else math.pi)
    if braces:
        # {k} = (q - q^-1) [k] and q - q^-1 = 2i sin(2pi/r)
        unit = ScaledComplex(math.log(2 * math.sin(ctx.step)), math.pi / 2)
        out = out * unit ** n
    return out


def is_admissible_triple(a1: int, a2: int, a3: int, ctx: QContext) -> bool:
    top = ctx.r - 2
    if not all(0 <= a <= top for a in (a1, a2, a3)):
        return False
    s = a1 + a2 + a3
    return (s % 2 == 0 and s <= 2 * top
            and a1 + a2 >= a3 and a2 + a3 >= a1 and a3 + a1 >= a2)


def is_admissible_six(a, ctx: QContext) -> bool:
    if len(a) != 6:
        return False
    return all(is_admissible_triple(a[i], a[j], a[k], ctx) for i, j, k in FACES)


def is_hyperideal_colors(a, ctx: QContext) -> bool:
    top = ctx.r - 2
    if not is_admissible_six(a, ctx):
        return False
    for i, j, k in FACES:
        x, y, z = a[i], a[j], a[k]
        if not top < x + y + z <= 2 * top:
            return False
        if not all(0 <= d < top for d in (x + y - z, y + z - x, z + x - y)):
            return False
    return True


def delta_symbol(a1: int, a2: int, a3: int, ctx: QContext) -> ScaledComplex:
    """Delta(a1, a2, a3); a negative radicand x gives sqrt(|x|) * i."""
    if not is_admissible_triple(a1, a2, a3, ctx):
        raise AdmissibilityError(f"triple {(a1, a2, a3)} is not {ctx.r}-admissible")
    log_mag, sign = factorial_table(ctx.r)
    idx = ((a1 + a2 - a3) // 2, (a2 + a3 - a1) // 2, (a3 + a1 - a2) // 2)
    top = (a1 + a2 + a3) // 2 + 1
    rad_log = sum(log_mag[i] for i in idx) - log_mag[top]
    rad_sign = sign[idx[0]] * sign[idx[1]] * sign[idx[2]] * sign[top]
    return ScaledComplex(0.5 * rad_log, 0.0 if rad_sign > 0 else math.pi / 2)


def half_sums(a):
    """(T_1..T_4, Q_1..Q_3) of a colour 6-tuple as integers."""
    T = tuple((a[i] + a[j] + a[k]) // 2 for i, j, k in FACES)
    Q = tuple(sum(a[i] for i in quad) // 2 for quad in QUADS)
    return T, Q


def sixj_scaled(a, ctx: QContext) -> ScaledComplex:
    """Quantum 6j-symbol of an r-admissible 6-tuple in scaled form."""
    a = tuple(int(x) for x in a)
    if not is_admissible_six(a, ctx):
        raise AdmissibilityError(f"{a} is not {ctx.r}-admissible")
    T, Q = half_sums(a)
    # [k+1]! vanishes once k+1 reaches r
    ks = np.arange(max(T), min(min(Q), ctx.r - 2) + 1)
    if ks.size == 0:
        return ScaledComplex.zero()
    log_mag, sign = factorial_table(ctx.r)
    logs = log_mag[ks + 1].copy()
    signs = sign[ks + 1] * np.where(ks % 2 == 0, 1.0, -1.0)
    for t in T:
        logs -= log_mag[ks - t]
        signs = signs * sign[ks - t]
    for s in Q:
        logs -= log_mag[s - ks]
        signs = signs * sign[s - ks]
    total = scaled_sum(logs, signs)
    prefactor = ScaledComplex(0.0, -math.pi * sum(a) / 2)
    for i, j, k in FACES:
        prefactor = prefactor * delta_symbol(a[i], a[j], a[k], ctx)
    return prefactor * total


def sixj(a, ctx: QContext) -> complex:
    """Quantum 6j-symbol as an ordinary complex number."""
    return sixj_scaled(a, ctx).to_complex()


def sixj_via_qdilog_scaled(a, ctx: QContext, spec=None) -> ScaledComplex:
    """6j-symbol of hyperideal type from its quantum-dilogarithm sum.

    Each term is ``exp(r/(4*pi*i) * U_r)`` with U_r built from values of the
    quantum dilogarithm on the grid m*pi/r, so those values are cached.
    """
    from . import qdilog

    a = tuple(int(x) for x in a)
    if not is_hyperideal_colors(a, ctx):
        raise AdmissibilityError(f"{a} is not of hyperideal type at r={ctx.r}")
    spec = qdilog.ContourSpec() if spec is None else spec
    r = ctx.r
    T, Q = half_sums(a)

    def phi(m):
        # phi_r(m*pi/r)
        return qdilog.phi_r_grid(r, m, spec)

    h = TWO_PI / r
    tau = [h * t for t in T]
    eta = [h * s for s in Q]
    base = (math.pi ** 2 - h ** 2
            + 0.5 * sum((e - t) ** 2 for t in tau for e in eta)
            - 0.5 * sum((t + h - math.pi) ** 2 for t in tau)
            - 2 * phi(1)
            - 0.5 * sum(phi(2 * (s - t) + 1) for t in T for s in Q)
            + 0.5 * sum(phi(2 * t - r + 3) for t in T))
    exponents = []
    for k in range(max(T), min(min(Q), r - 2) + 1):
        xi = h * k
        u = (base + (xi + h - math.pi) ** 2
             - sum((xi - t) ** 2 for t in tau) - sum((e - xi) ** 2 for e in eta)
             - phi(2 * k - r + 3)
             + sum(phi(2 * (k - t) + 1) for t in T)
             + sum(phi(2 * (s - k) + 1) for s in Q))
        exponents.append(r / (4j * math.pi) * u)
    exponents = np.array(exponents)
    total = scaled_sum(exponents.real, np.exp(1j * exponents.imag))
    # {1}/2 = i sin(2pi/r)
    return total * ScaledComplex(math.log(math.sin(h)), math.pi / 2)


def sixj_via_qdilog(a, ctx: QContext, spec=None) -> complex:
    return sixj_via_qdilog_scaled(a, ctx, spec).to_complex()

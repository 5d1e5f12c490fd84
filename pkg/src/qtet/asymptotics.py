"""Predicted large-r behaviour of the Fourier-transformed 6j-symbol and the
sweep harness that compares it with brute-force sums.

Two forms of the leading coefficient are provided.  ``cdft_prefactor`` is the
closed form in terms of lengths, the angle-length Jacobian and the Gram
determinant; ``saddle_terms`` evaluates the per-sign saddle contributions
straight from the Hessian of the two-copy potential.  They are kept as
separate code paths so that each can check the other.
"""

import cmath
import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .dft import DEFAULT_BUDGET, ColoringSpec, n_parity, yhat_scaled
from .geometry import (XI, DomainError, GeometryError, Partition, TetGeometry,
                       alpha_point, kappa_func, solve_geometry, u_func, u_hess,
                       xi_of_alpha)
from .qkernel import QContext, ScaledComplex

PI = math.pi
SCHEMA = 1


# ----------------------------------------------------------------------------
# Colourings

def _nearest_with_parity(x: float, parity: int) -> int:
    return parity + 2 * math.floor((x - parity) / 2 + 0.5)


def coloring_for_angles(theta6, mu, partition: Partition, r: int, parity_J=None) -> ColoringSpec:
    """Integer colours whose realized angles approximate ``theta6`` at level r.

    Deep colours are rounded to the nearest integer; regular colours to the
    nearest integer of the frozen parity (all even by default).
    """
    theta6 = [float(t) for t in theta6]
    mu = tuple(int(m) for m in mu)
    if len(theta6) != 6 or len(mu) != 6:
        raise ValueError("need six target angles and six signs")
    if any(not 0 < t < PI for t in theta6):
        raise ValueError("target angles must lie in (0, pi)")
    regular = partition.regular
    if parity_J is None:
        parity_J = (0,) * len(regular)
    if len(parity_J) != len(regular):
        raise ValueError("one parity per regular edge is required")
    colors = [0] * 6
    for k in range(6):
        x = r * (PI + mu[k] * theta6[k]) / (2 * PI)
        colors[k] = math.floor(x + 0.5)
    for j, p in zip(regular, parity_J):
        x = r * (PI + mu[j] * theta6[j]) / (2 * PI)
        colors[j] = _nearest_with_parity(x, int(p) % 2)
    spec = ColoringSpec(tuple(colors), mu)
    spec.check(QContext(r))
    return spec


# ----------------------------------------------------------------------------
# Closed form

def _phase_c(nI: int, r: int) -> float:
    # (-1)^x read as exp(i pi x)
    return PI * (1.5 + r * (nI - 2) / 2)


def cdft_prefactor(spec: ColoringSpec, partition: Partition, geom: TetGeometry,
                   ctx: QContext) -> ScaledComplex:
    """Closed-form coefficient of exp(r Vol / pi), in scaled form."""
    nI = len(partition.I)
    n = n_parity(spec.a_J(partition), partition)
    if n == 0:
        return ScaledComplex.zero()
    if geom.gram_det >= 0:
        raise DomainError(f"Gram determinant {geom.gram_det!r} is not negative")
    jdet = float(np.linalg.det(geom.jac)) if nI else 1.0
    radicand = -jdet * geom.gram_det
    if radicand <= 0:
        raise DomainError("angle-length Jacobian has the wrong sign for a real square root")
    mu = np.asarray(spec.mu, dtype=float)
    exponent = -float(np.dot(mu, geom.l))
    log_mag = (math.log(n) - (1.5 * nI - 1) * math.log(2) - (nI - 2) * math.log(PI)
               + exponent - 0.5 * math.log(radicand) + (1.5 * nI - 3) * math.log(ctx.r))
    return ScaledComplex(log_mag, _phase_c(nI, ctx.r))


def cdft_rhs_scaled(spec: ColoringSpec, partition: Partition, geom: TetGeometry,
                    ctx: QContext) -> ScaledComplex:
    pre = cdft_prefactor(spec, partition, geom, ctx)
    return pre * ScaledComplex(ctx.r / PI * geom.vol)


def cdft_rhs(spec: ColoringSpec, partition: Partition, geom: TetGeometry,
             ctx: QContext) -> complex:
    """Predicted leading asymptotics of the transform at this level."""
    return cdft_rhs_scaled(spec, partition, geom, ctx).to_complex()


# ----------------------------------------------------------------------------
# Saddle-point form

def _critical_point(spec, partition, geom, eps):
    """alpha* with alpha_i = pi + eps_i mu_i i l_i, and xi(alpha*)."""
    I, J = partition.deep, partition.regular
    s = np.asarray(spec.mu, dtype=float).copy()
    s[I] *= np.asarray(eps, dtype=float)
    alpha = alpha_point(geom.l[I], geom.theta[J], partition, s)
    return alpha, xi_of_alpha(alpha)


def _potential(spec, partition, eps, ctx):
    """The two-copy potential as a function of (alpha_I, xi_1, xi_2)."""
    I = partition.deep
    beta = np.array([ctx.step * spec.colors[i] for i in I])
    base = np.array([ctx.step * c for c in spec.colors], dtype=complex)
    eps = np.asarray(eps, dtype=float)

    def f(z):
        z = np.asarray(z, dtype=complex)
        a = base.copy()
        a[I] = z[:len(I)]
        lin = -2 * np.sum(eps * (z[:len(I)] - PI) * (beta - PI))
        return lin + u_func(a, z[-2], check=False) + u_func(a, z[-1], check=False)

    return f


def two_copy_hessian(alpha, xi, partition: Partition) -> np.ndarray:
    """Analytic Hessian of the two-copy potential at (alpha_I, xi, xi)."""
    I = partition.deep
    H = u_hess(alpha, xi)
    m = len(I)
    out = np.zeros((m + 2, m + 2), dtype=complex)
    out[:m, :m] = 2 * H[np.ix_(I, I)]
    for s in (m, m + 1):
        out[:m, s] = out[s, :m] = H[I, XI]
        out[s, s] = H[XI, XI]
    return out


def saddle_terms(spec: ColoringSpec, partition: Partition, geom: TetGeometry,
                 ctx: QContext) -> list:
    """Per-sign saddle contributions C / sqrt(-det Hess / (4 pi i)), unscaled by
    exp(r Vol / pi).  Keys are the sign tuples eps_I."""
    I = partition.deep
    nI = len(I)
    n = n_parity(spec.a_J(partition), partition)
    r = ctx.r
    brace1 = 2j * math.sin(ctx.step)
    beta = np.array([ctx.step * spec.colors[i] for i in I])
    const = (n * cmath.exp(1j * PI * (nI + r * (nI - 2) / 2)) * r ** ((nI - 2) / 2)
             / (2 ** ((3 * nI + 2) / 2) * PI ** ((nI + 2) / 2) * brace1 ** (nI - 2)))
    out = []
    for eps in product((1, -1), repeat=nI):
        alpha, xi = _critical_point(spec, partition, geom, eps)
        expo = np.sum(np.asarray(eps) * 1j * (alpha[I] + beta)) + 2 * kappa_func(alpha, xi)
        c_eps = const * cmath.exp(expo)
        H = two_copy_hessian(alpha, xi, partition)
        det = np.linalg.det(H) / (4j * PI) ** (nI + 2)
        out.append((eps, c_eps / cmath.sqrt(-det)))
    return out


def saddle_magnitude(spec: ColoringSpec, partition: Partition, geom: TetGeometry,
                     ctx: QContext) -> float:
    """Sum of |term| over the sign choices.

    With principal square roots the terms for opposite signs can carry
    opposite phases, so the magnitudes are compared rather than the sum.
    """
    return float(sum(abs(t) for _, t in saddle_terms(spec, partition, geom, ctx)))


def critical_value(spec: ColoringSpec, partition: Partition, geom: TetGeometry,
                   ctx: QContext, eps=None) -> complex:
    """The two-copy potential at its critical point; 4 pi^2 + 4 i Vol in theory."""
    eps = (1,) * len(partition.I) if eps is None else tuple(eps)
    alpha, xi = _critical_point(spec, partition, geom, eps)
    z = list(alpha[partition.deep]) + [xi, xi]
    return _potential(spec, partition, eps, ctx)(z)


def _fd_hessian(f, z, h):
    z = np.asarray(z, dtype=complex)
    n = len(z)
    H = np.zeros((n, n), dtype=complex)
    f0 = f(z)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h
        H[i, i] = (f(z + ei) - 2 * f0 + f(z - ei)) / h ** 2
        for j in range(i):
            ej = np.zeros(n)
            ej[j] = h
            H[i, j] = H[j, i] = (f(z + ei + ej) - f(z + ei - ej) - f(z - ei + ej)
                                 + f(z - ei - ej)) / (4 * h * h)
    return H


def hess_check(spec: ColoringSpec, partition: Partition, geom: TetGeometry, ctx: QContext,
               eps=None, h: float = 1e-4) -> float:
    """Relative gap between a finite-difference det Hess of the two-copy
    potential and the factored form (-1)^(3|I|/2) det(dtheta/dl) U_xixi^2."""
    nI = len(partition.I)
    eps = (1,) * nI if eps is None else tuple(eps)
    alpha, xi = _critical_point(spec, partition, geom, eps)
    z = list(alpha[partition.deep]) + [xi, xi]
    H = _fd_hessian(_potential(spec, partition, eps, ctx), z, h)
    if not np.all(np.isfinite(H)) or np.linalg.cond(H) > 1e12:
        raise GeometryError("Hessian is ill-conditioned at the critical point")
    direct = np.linalg.det(H)
    uxx = u_hess(alpha, xi)[XI, XI]
    jdet = float(np.linalg.det(geom.jac)) if nI else 1.0
    factored = cmath.exp(1.5j * PI * nI) * jdet * uxx ** 2
    return float(abs(direct - factored) / abs(factored))


# ----------------------------------------------------------------------------
# Sweep

@dataclass
class SweepRow:
    r: int
    colors: tuple = ()
    skipped: bool = False
    reason: str = ""
    theta: tuple = ()
    vol: float = math.nan
    log_abs_yhat: float = math.nan
    yhat: complex = complex(math.nan, math.nan)
    rhs: complex = complex(math.nan, math.nan)
    ratio: complex = complex(math.nan, math.nan)
    abs_ratio: float = math.nan
    arg_ratio: float = math.nan
    growth_err: float = math.nan


@dataclass
class SweepReport:
    params: dict
    rows: list
    fit: dict = field(default_factory=dict)

    def solved(self):
        return [row for row in self.rows if not row.skipped]

    @property
    def skipped_count(self) -> int:
        return sum(row.skipped for row in self.rows)

    def to_json(self) -> str:
        from .report import dumps_json
        return dumps_json(self.as_dict())

    def as_dict(self) -> dict:
        rows = []
        for row in self.rows:
            d = {"r": row.r, "colors": list(row.colors), "skipped": row.skipped}
            if row.skipped:
                d["reason"] = row.reason
            else:
                d.update(theta=list(row.theta), vol=row.vol, log_abs_yhat=row.log_abs_yhat,
                         yhat=row.yhat, rhs=row.rhs, ratio=row.ratio,
                         abs_ratio=row.abs_ratio, arg_ratio=row.arg_ratio,
                         growth_err=row.growth_err)
            rows.append(d)
        return {"schema": SCHEMA, "params": self.params, "rows": rows, "fit": self.fit}

    def to_csv(self) -> str:
        from .report import csv_rows
        header = ["r", "yhat_re", "yhat_im", "rhs_re", "rhs_im", "abs_ratio", "arg_ratio",
                  "growth_err"]
        body = [[row.r, row.yhat.real, row.yhat.imag, row.rhs.real, row.rhs.imag,
                 row.abs_ratio, row.arg_ratio, row.growth_err] for row in self.solved()]
        return csv_rows(header, body)


def fit_inverse_r(rs, y) -> dict:
    """Least squares y = c1/r + c2/r^2 with the (centred) coefficient of
    determination."""
    rs = np.asarray(rs, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(rs) < 3:
        return {"c1": None, "c2": None, "r2": None, "ok": False}
    X = np.column_stack([1 / rs, 1 / rs ** 2])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0 else 1.0
    ok = bool(np.all(np.isfinite(coef)))
    return {"c1": float(coef[0]), "c2": float(coef[1]), "r2": r2, "ok": ok}


def run_sweep(theta6, mu, partition: Partition, r_list, parity_J=None,
              max_angle=0.5, budget: int = DEFAULT_BUDGET, ctx_factory=QContext) -> SweepReport:
    """Compare brute-force transforms with the closed-form prediction.

    The geometry is re-solved at the angles realized by the integer colours
    at every level.  Levels whose geometry cannot be solved are kept as
    skipped rows.
    """
    theta6 = [float(t) for t in theta6]
    mu = tuple(int(m) for m in mu)
    if max_angle is not None and max(theta6) > max_angle:
        raise ValueError(f"target angles exceed the small-angle guard {max_angle}")
    rs = sorted(int(r) for r in r_list)
    if any(r % 2 == 0 for r in rs):
        raise ValueError("levels must be odd")
    I, J = partition.deep, partition.regular
    if parity_J is None:
        parity_J = (0,) * len(J)
    rows = []
    for r in rs:
        ctx = ctx_factory(r)
        spec = coloring_for_angles(theta6, mu, partition, r, parity_J)
        row = SweepRow(r=r, colors=spec.colors)
        theta = np.abs(spec.angles(ctx))
        row.theta = tuple(float(t) for t in theta)
        try:
            geom = solve_geometry(theta[I], theta[J], partition, signs=mu)
            rhs = cdft_rhs_scaled(spec, partition, geom, ctx)
        except (GeometryError, DomainError) as exc:
            row.skipped, row.reason = True, str(exc)
            rows.append(row)
            continue
        y = yhat_scaled(spec, partition, ctx, budget=budget)
        ratio = y / rhs
        row.vol = geom.vol
        row.log_abs_yhat = y.log_mag
        row.yhat = y.to_complex()
        row.rhs = rhs.to_complex()
        row.ratio = ratio.to_complex()
        row.abs_ratio = math.exp(ratio.log_mag)
        row.arg_ratio = ratio.phase
        row.growth_err = abs(PI / r * y.log_mag - geom.vol)
        rows.append(row)
    params = {"theta": theta6, "mu": list(mu), "I": list(partition.I),
              "parity_J": [int(p) for p in parity_J], "rs": rs, "max_angle": max_angle}
    report = SweepReport(params=params, rows=rows)
    solved = report.solved()
    report.fit = fit_inverse_r([row.r for row in solved], [row.abs_ratio - 1 for row in solved])
    return report

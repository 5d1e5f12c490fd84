"""Critical-point machinery of the 6j potential and the geometry of deeply
truncated tetrahedra.

Coordinates are x = (alpha_1, ..., alpha_6, xi).  Every term of the
potential U and of kappa is a function of a linear form w = K.x + c, so
U, its gradient and its Hessian are assembled from one table of forms.
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .qdilog import li2
from .qkernel import FACES, QUADS

PI = math.pi
XI = 6  # index of xi in x


class DomainError(ValueError):
    """(alpha, xi) lies outside the region where U is analytic."""


class GeometryError(RuntimeError):
    """The geometry solver failed to converge."""


@dataclass(frozen=True)
class Partition:
    """Split of the edges 1..6 into deep-truncation (I) and regular (J) edges.

    ``I`` is given 1-based, as edges are numbered in the literature.
    """

    I: tuple = ()

    def __post_init__(self):
        I = tuple(sorted(set(int(i) for i in self.I)))
        if any(not 1 <= i <= 6 for i in I):
            raise ValueError(f"edge labels must lie in 1..6, got {self.I}")
        object.__setattr__(self, "I", I)

    @property
    def J(self):
        return tuple(j for j in range(1, 7) if j not in self.I)

    @property
    def deep(self):
        """0-based slots of the deep-truncation edges."""
        return [i - 1 for i in self.I]

    @property
    def regular(self):
        return [j - 1 for j in self.J]

    @property
    def mask(self):
        m = np.zeros(6, dtype=bool)
        m[self.deep] = True
        return m

    @classmethod
    def parse(cls, text: str) -> "Partition":
        text = text.strip()
        return cls(tuple(int(t) for t in text.split(",") if t.strip()) if text else ())


@dataclass(frozen=True)
class AngleTuple:
    """Six complex angles; the half-sums tau and eta are derived on demand."""

    alpha: tuple

    def __post_init__(self):
        a = tuple(complex(x) for x in self.alpha)
        if len(a) != 6:
            raise ValueError("AngleTuple needs six entries")
        object.__setattr__(self, "alpha", a)

    @property
    def tau(self):
        return tuple(sum(self.alpha[i] for i in f) / 2 for f in FACES)

    @property
    def eta(self):
        return tuple(sum(self.alpha[i] for i in q) / 2 for q in QUADS)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.alpha, dtype=dtype or complex)


@dataclass(frozen=True)
class TetGeometry:
    partition: Partition
    l: np.ndarray
    theta: np.ndarray
    vol: float
    gram_det: float
    jac: np.ndarray
    alpha: np.ndarray
    xi: complex
    cov: float
    iterations: int = 0
    extra: dict = field(default_factory=dict, compare=False)


def _alpha_vec(alpha):
    a = np.asarray(alpha.alpha if isinstance(alpha, AngleTuple) else alpha, dtype=complex)
    if a.shape != (6,):
        raise ValueError("alpha must have six entries")
    return a


# ----------------------------------------------------------------------------
# Linear forms

def _face_vec(f):
    v = np.zeros(7)
    v[list(f)] = 0.5
    return v


_TAU = [_face_vec(f) for f in FACES]
_ETA = [_face_vec(q) for q in QUADS]
_E_XI = np.eye(7)[XI]


def _forms():
    """Rows (square weight, li2 weight, log weight, K, c) for every term."""
    rows = []
    for t in _TAU:
        for e in _ETA:
            rows.append((0.5, -0.5, 0.25, e - t, 0.0))
    for t in _TAU:
        rows.append((-0.5, 0.5, -0.75, t, -PI))
    rows.append((1.0, -1.0, 1.5, _E_XI, -PI))
    for t in _TAU:
        rows.append((-1.0, 1.0, -0.5, _E_XI - t, 0.0))
    for e in _ETA:
        rows.append((-1.0, 1.0, -0.5, e - _E_XI, 0.0))
    sq, dl, lg, K, c = zip(*rows)
    return np.array(sq), np.array(dl), np.array(lg), np.array(K), np.array(c)


_SQ, _DL, _LG, _K, _C = _forms()
_U_CONST = PI ** 2 - PI ** 2 / 3  # pi^2 - 2 Li2(1)
# linear part of kappa: (i/2) sum tau - i xi - 3 i pi / 2
_KAPPA_LIN = 0.5j * sum(_TAU) - 1j * _E_XI


def _x(alpha, xi):
    return np.append(_alpha_vec(alpha), complex(xi))


def _w(x):
    return _K @ x + _C


# ----------------------------------------------------------------------------
# Domain

def is_hyperideal_angles(alpha, tol: float = 1e-12) -> bool:
    """Hyperideal-type test on the real parts of six angles."""
    a = np.real(_alpha_vec(alpha))
    if np.any(a < -tol) or np.any(a > 2 * PI + tol):
        return False
    for i, j, k in FACES:
        s = a[i] + a[j] + a[k]
        if not 2 * PI - tol <= s <= 4 * PI + tol:
            return False
        for p, q, o in ((i, j, k), (j, k, i), (k, i, j)):
            d = a[p] + a[q] - a[o]
            if not -tol <= d <= 2 * PI + tol:
                return False
    return True


def in_domain(alpha, xi, tol: float = 1e-9) -> bool:
    """Membership of (alpha, xi) in the analyticity region of U."""
    a = AngleTuple(_alpha_vec(alpha))
    if not is_hyperideal_angles(a.alpha, tol):
        return False
    lo = max(t.real for t in a.tau)
    hi = min(min(e.real for e in a.eta), 2 * PI)
    return lo - tol <= complex(xi).real <= hi + tol


def _check(alpha, xi):
    if not in_domain(alpha, xi):
        raise DomainError(f"(alpha, xi) = ({np.round(_alpha_vec(alpha), 6)}, {xi:.6g}) "
                          "is outside the analyticity region")


# ----------------------------------------------------------------------------
# Gram matrices

def gram(z) -> np.ndarray:
    """Gram matrix function: 1 on the diagonal, -cosh z_k off it."""
    c = np.cosh(np.asarray(z, dtype=complex))
    return np.array([[1, -c[0], -c[1], -c[5]],
                     [-c[0], 1, -c[2], -c[4]],
                     [-c[1], -c[2], 1, -c[3]],
                     [-c[5], -c[4], -c[3], 1]], dtype=complex)


def cos_gram(alpha) -> np.ndarray:
    """The cosine matrix whose determinant is (B^2 - 4AC)/16."""
    c = np.cos(_alpha_vec(alpha))
    return np.array([[1, c[0], c[1], c[5]],
                     [c[0], 1, c[2], c[4]],
                     [c[1], c[2], 1, c[3]],
                     [c[5], c[4], c[3], 1]], dtype=complex)


def gram_point(l_I, theta_J, partition: Partition):
    """Argument of the Gram function: lengths on I, i*theta on J."""
    z = np.zeros(6, dtype=complex)
    z[partition.deep] = np.asarray(l_I, dtype=float)
    z[partition.regular] = 1j * np.asarray(theta_J, dtype=float)
    return z


# ----------------------------------------------------------------------------
# Critical equation in xi

def quad_coeffs(alpha):
    """Coefficients (A, B, C) of the quadratic satisfied by z = exp(-2i xi)."""
    u1, u2, u3, u4, u5, u6 = np.exp(1j * _alpha_vec(alpha))
    A = (u1 * u4 + u2 * u5 + u3 * u6 - u1 * u2 * u6 - u1 * u3 * u5 - u2 * u3 * u4
         - u4 * u5 * u6 + u1 * u2 * u3 * u4 * u5 * u6)
    B = -((u1 - 1 / u1) * (u4 - 1 / u4) + (u2 - 1 / u2) * (u5 - 1 / u5)
          + (u3 - 1 / u3) * (u6 - 1 / u6))
    C = (1 / (u1 * u4) + 1 / (u2 * u5) + 1 / (u3 * u6) - 1 / (u1 * u2 * u6)
         - 1 / (u1 * u3 * u5) - 1 / (u2 * u3 * u4) - 1 / (u4 * u5 * u6)
         + 1 / (u1 * u2 * u3 * u4 * u5 * u6))
    return complex(A), complex(B), complex(C)


def _lifts(z, tol=1e-9):
    # Re(0.5i log z) = -arg(z)/2 lies in [-pi/2, pi/2]; a root on the edge
    # of [pi, 2pi] has two admissible lifts and both are kept
    base = 0.5j * cmath.log(z)
    return [base + k * PI for k in range(1, 4) if PI - tol <= (base + k * PI).real <= 2 * PI + tol]


def xi_candidates(alpha):
    """Both roots of the critical quadratic, lifted to Re xi in [pi, 2pi]."""
    A, B, C = quad_coeffs(alpha)
    if abs(A) < 1e-14:
        raise DomainError("leading coefficient A vanishes")
    d = cmath.sqrt(B * B - 4 * A * C)
    if abs(d) < 1e-12 * max(1.0, abs(B)):
        raise DomainError("double root of the critical quadratic")
    return _lifts((-B + d) / (2 * A)) + _lifts((-B - d) / (2 * A))


def xi_of_alpha(alpha) -> complex:
    """The critical point xi(alpha) of U(alpha, .).

    Among the candidate roots inside the analyticity region, the one with
    the largest Im U is returned; this is the branch that gives positive
    volume on the geometric region.
    """
    if not is_hyperideal_angles(alpha, 1e-9):
        raise DomainError("real parts of alpha are not of the hyperideal type")
    inside = [x for x in xi_candidates(alpha) if in_domain(alpha, x)]
    if not inside:
        raise DomainError("no critical point of U lies in the analyticity region")
    return max(inside, key=lambda x: u_func(alpha, x, check=False).imag)


# ----------------------------------------------------------------------------
# U and kappa

def u_func(alpha, xi, check: bool = True) -> complex:
    """The leading term U(alpha, xi) of the 6j potential."""
    x = _x(alpha, xi)
    if check:
        _check(x[:6], x[XI])
    w = _w(x)
    return complex(_U_CONST + np.sum(_SQ * w * w) + np.sum(_DL * li2(np.exp(2j * w))))


def _one_minus(w):
    return 1 - np.exp(2j * w)


def u_grad(alpha, xi) -> np.ndarray:
    """Gradient of U in (alpha_1..alpha_6, xi)."""
    w = _w(_x(alpha, xi))
    coeff = 2 * _SQ * w - 2j * _DL * np.log(_one_minus(w))
    return coeff @ _K


def u_hess(alpha, xi) -> np.ndarray:
    """7x7 Hessian of U."""
    w = _w(_x(alpha, xi))
    e = np.exp(2j * w)
    coeff = 2 * _SQ - 4 * _DL * e / (1 - e)
    return (_K.T * coeff) @ _K


def u_dxi(alpha, xi) -> complex:
    _check(alpha, xi)
    return complex(u_grad(alpha, xi)[XI])


def u_dxi2(alpha, xi) -> complex:
    _check(alpha, xi)
    return complex(u_hess(alpha, xi)[XI, XI])


def u_dalpha(alpha, xi, k: int) -> complex:
    """Partial derivative of U in alpha_k, k = 1..6."""
    if not 1 <= k <= 6:
        raise ValueError("k must lie in 1..6")
    _check(alpha, xi)
    return complex(u_grad(alpha, xi)[k - 1])


def kappa_func(alpha, xi) -> complex:
    """Order-1/r correction kappa(alpha, xi) of the 6j potential."""
    x = _x(alpha, xi)
    _check(x[:6], x[XI])
    w = _w(x)
    one = _one_minus(w)
    if np.any(one == 0):
        raise DomainError("kappa has a logarithmic singularity here")
    return complex(_KAPPA_LIN @ x - 1.5j * PI + np.sum(_LG * np.log(one)))


# ----------------------------------------------------------------------------
# W(alpha) = U(alpha, xi(alpha))

def w_func(alpha) -> complex:
    return u_func(alpha, xi_of_alpha(alpha))


def w_derivatives(alpha, xi=None):
    """W, its gradient and Hessian in alpha, through the implicit xi(alpha)."""
    if xi is None:
        xi = xi_of_alpha(alpha)
    g = u_grad(alpha, xi)
    H = u_hess(alpha, xi)
    h_xx = H[XI, XI]
    h_ax = H[:6, XI]
    grad = g[:6]  # U_xi vanishes at the critical point
    hess = H[:6, :6] - np.outer(h_ax, h_ax) / h_xx
    return u_func(alpha, xi, check=False), grad, hess, xi


def xi_gradient(alpha, xi=None):
    """Derivative of the implicit critical point xi(alpha)."""
    if xi is None:
        xi = xi_of_alpha(alpha)
    H = u_hess(alpha, xi)
    return -H[:6, XI] / H[XI, XI]


def _signs(signs):
    s = np.ones(6) if signs is None else np.broadcast_to(np.asarray(signs, dtype=float), (6,))
    if not np.all(np.abs(s) == 1):
        raise ValueError("signs must be +1 or -1")
    return s


def alpha_point(l_I, theta_J, partition: Partition, signs=None):
    """alpha = pi + s*i*l on deep edges and pi + s*theta on regular ones."""
    s = _signs(signs)
    a = np.full(6, PI, dtype=complex)
    I, J = partition.deep, partition.regular
    a[I] += s[I] * 1j * np.asarray(l_I, dtype=float)
    a[J] += s[J] * np.asarray(theta_J, dtype=float)
    return a


def covolume(l_I, theta_J, partition: Partition, tol: float = 1e-8, signs=None) -> float:
    """Co-volume Vol + (1/2) sum theta_i l_i, read off from W."""
    w = w_func(alpha_point(l_I, theta_J, partition, signs))
    if abs(w.real - 2 * PI ** 2) > tol:
        raise DomainError(f"Re W = {w.real!r} differs from 2 pi^2; outside the geometric region")
    return w.imag / 2


def kappa_ratio_lhs(alpha, xi=None) -> complex:
    """exp(-i sum alpha + 4 i xi - sum log(1 - e^{2i(xi - tau)})) / U_xixi."""
    a = _alpha_vec(alpha)
    if xi is None:
        xi = xi_of_alpha(a)
    tau = AngleTuple(a).tau
    expo = (-1j * a.sum() + 4j * xi
            - sum(cmath.log(1 - cmath.exp(2j * (xi - t))) for t in tau))
    return cmath.exp(expo) / u_dxi2(a, xi)


# ----------------------------------------------------------------------------
# Solver

_L_MAX = 60.0  # beyond this cosh overflows long before any useful geometry


def _angles_and_jac(l_I, theta_J, partition, s):
    if np.any(np.abs(l_I) > _L_MAX):
        raise DomainError("deep-edge lengths diverged")
    a = alpha_point(l_I, theta_J, partition, s)
    W, grad, hess, xi = w_derivatives(a)
    I = partition.deep
    theta_I = (s[I] * grad[I]).real
    # d/dl_k = i s_k d/dalpha_k
    jac = (1j * np.outer(s[I], s[I]) * hess[np.ix_(I, I)]).real
    if not (np.all(np.isfinite(theta_I)) and np.all(np.isfinite(jac))):
        raise DomainError("non-finite angles along the solver path")
    return theta_I, jac, (a, W, grad, hess, xi)


def _newton(l_I, target, theta_J, partition, s, tol, max_iter):
    th, jac, _ = _angles_and_jac(l_I, theta_J, partition, s)
    res = th - target
    it = 0
    while np.max(np.abs(res)) >= tol:
        if it >= max_iter:
            raise GeometryError(f"no convergence after {max_iter} iterations; "
                                f"residual {np.max(np.abs(res)):.3g}")
        try:
            step = np.linalg.solve(jac, res)
        except np.linalg.LinAlgError as exc:
            raise GeometryError("singular angle-length Jacobian") from exc
        # damped step: halve until the residual decreases
        t = 1.0
        while True:
            trial = l_I - t * step
            try:
                th_t, jac_t, _ = _angles_and_jac(trial, theta_J, partition, s)
                res_t = th_t - target
                if np.max(np.abs(res_t)) < np.max(np.abs(res)) or t < 1e-6:
                    break
            except (DomainError, ValueError, OverflowError):
                pass
            t /= 2
            if t < 1e-10:
                raise GeometryError("line search left the geometric region")
        l_I, jac, res = trial, jac_t, res_t
        it += 1
    return l_I, it


def solve_geometry(theta_I, theta_J, partition: Partition, tol: float = 1e-12,
                   max_iter: int = 100, l0: float = 0.5, signs=None) -> TetGeometry:
    """Deeply truncated tetrahedron with prescribed dihedral angles.

    Newton's method on the deep-edge lengths l_I, with the residual
    theta_I(l_I) - target and the exact angle-length Jacobian.  ``signs``
    picks alpha = pi + s*(...) per edge; the geometry does not depend on it.
    """
    s = _signs(signs)
    theta_I = np.asarray(theta_I, dtype=float).reshape(-1)
    theta_J = np.asarray(theta_J, dtype=float).reshape(-1)
    nI = len(partition.I)
    if theta_I.size != nI or theta_J.size != 6 - nI:
        raise ValueError("angle vectors do not match the partition")
    l_I = np.full(nI, float(l0))
    it = 0
    if nI:
        with np.errstate(all="ignore"):
            l_I, it = _newton(l_I, theta_I, theta_J, partition, s, tol, max_iter)
    with np.errstate(divide="ignore", invalid="ignore"):
        # ideal vertices put a log singularity on some regular lengths
        _, jac, (a, W, grad, hess, xi) = _angles_and_jac(l_I, theta_J, partition, s)
    if abs(W.real - 2 * PI ** 2) > 1e-7:
        raise DomainError(f"Re W = {W.real!r}; angles outside the geometric region")
    I, J = partition.deep, partition.regular
    l = np.zeros(6)
    theta = np.zeros(6)
    l[I] = l_I
    theta[I] = (s[I] * grad[I]).real
    theta[J] = theta_J
    l[J] = (1j * s[J] * grad[J]).real
    l[~np.isfinite(l)] = np.inf
    cov = W.imag / 2
    vol = cov - 0.5 * float(np.dot(theta[I], l_I))
    gdet = np.linalg.det(gram(gram_point(l_I, theta_J, partition))).real
    return TetGeometry(partition=partition, l=l, theta=theta, vol=vol, gram_det=gdet,
                       jac=jac, alpha=a, xi=xi, cov=cov, iterations=it)

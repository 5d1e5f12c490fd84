"""Closed-form twisted Reidemeister torsions built from Gram determinants.

Nothing here is topological: callers pass the number of building blocks,
their Gram determinants, the relevant Jacobian determinant and the sinh^2
factors.  Torsions are only defined up to sign, and every function returns
one representative using the principal complex square root of each Gram
determinant.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

VARIANTS = ("longitudes", "meridians", "filled")


@dataclass(frozen=True)
class TorsionInput:
    """Data for one torsion evaluation.

    ``c_or_T`` is the number of tetrahedra (c or |T|), ``edge_count`` the
    number of boundary curves or edges (n or |E|).  ``aux`` holds the sinh^2
    factors, one per curve or edge, when a formula needs them.
    """

    c_or_T: int
    gram_dets: tuple
    jac_det: complex = 1.0
    aux: tuple = ()
    edge_count: int = 0

    def __post_init__(self):
        dets = tuple(complex(d) for d in self.gram_dets)
        aux = tuple(complex(a) for a in self.aux)
        if self.c_or_T < 1 or len(dets) != self.c_or_T:
            raise ValueError(f"expected {self.c_or_T} Gram determinants, got {len(dets)}")
        if any(d == 0 for d in dets):
            raise ValueError("a Gram determinant vanishes")
        if aux and len(aux) != self.edge_count:
            raise ValueError(f"expected {self.edge_count} sinh^2 factors, got {len(aux)}")
        object.__setattr__(self, "gram_dets", dets)
        object.__setattr__(self, "aux", aux)
        object.__setattr__(self, "jac_det", complex(self.jac_det))

    @classmethod
    def from_geometry(cls, geom) -> "TorsionInput":
        """One block from a solved tetrahedron; the edges are its deep edges."""
        I = geom.partition.deep
        jac = complex(np.linalg.det(geom.jac)) if I else 1.0
        aux = tuple(math.sinh(geom.l[i]) ** 2 for i in I)
        return cls(1, (geom.gram_det,), jac, aux, len(I))


def _root_product(inp: TorsionInput) -> complex:
    return math.prod(cmath.sqrt(d) for d in inp.gram_dets)


def _inverse_aux(inp: TorsionInput) -> complex:
    if len(inp.aux) != inp.edge_count:
        raise ValueError("this formula needs one sinh^2 factor per curve")
    if any(a == 0 for a in inp.aux):
        raise ValueError("a sinh^2 factor vanishes")
    return math.prod(1 / a for a in inp.aux)


def fsl_torsion_meridians(inp: TorsionInput) -> complex:
    """2^(3c) prod sqrt(det G_s), up to sign."""
    return 2.0 ** (3 * inp.c_or_T) * _root_product(inp)


def fsl_torsion_curves(inp: TorsionInput) -> complex:
    """Meridian torsion times the holonomy Jacobian, up to sign."""
    return inp.jac_det * fsl_torsion_meridians(inp)


def fsl_torsion_surgery(inp: TorsionInput) -> complex:
    """Torsion of the filled manifold, 2^(-2n) prod 1/sinh^2 times the curve torsion."""
    n = inp.edge_count
    return 2.0 ** (-2 * n) * fsl_torsion_curves(inp) * _inverse_aux(inp)


def double_torsion(inp: TorsionInput, variant: str = "longitudes") -> complex:
    """Torsions of the double of a polyhedral manifold, up to sign.

    ``longitudes`` uses the preferred longitudes, ``meridians`` the meridians
    of the doubled edges (Jacobian d theta / d l), ``filled`` the closed
    double with the edges filled back.
    """
    T, E = inp.c_or_T, inp.edge_count
    root = _root_product(inp)
    if variant == "longitudes":
        return 2.0 ** (3 * T) * root
    sign = cmath.exp(1.5j * math.pi * E)
    if variant == "meridians":
        return sign * 2.0 ** (3 * T - E) * inp.jac_det * root
    if variant == "filled":
        return sign * 2.0 ** (3 * T - 3 * E) * inp.jac_det * root * _inverse_aux(inp)
    raise ValueError(f"unknown variant {variant!r}; choose from {VARIANTS}")


def same_up_to_sign(a: complex, b: complex, rel: float = 1e-12) -> bool:
    """Torsions live in C*/{+1,-1}."""
    scale = max(abs(a), abs(b))
    return min(abs(a - b), abs(a + b)) <= rel * scale

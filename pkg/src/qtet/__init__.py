"""Quantum 6j-symbols, truncated hyperbolic tetrahedra and the asymptotics
of discrete Fourier transforms of squared 6j-symbols."""

__version__ = "0.1.0"

from .qkernel import (QContext, ScaledComplex, AdmissibilityError, quantum_integer,
                      quantum_factorial, is_admissible_triple, is_admissible_six,
                      is_hyperideal_colors, delta_symbol, sixj, sixj_scaled,
                      sixj_via_qdilog)
from .qdilog import ContourSpec, phi_r, phi_r_extended, li2, lobachevsky
from .geometry import (Partition, AngleTuple, TetGeometry, DomainError, GeometryError,
                       solve_geometry, gram, quad_coeffs, xi_of_alpha, u_func, kappa_func,
                       w_func)
from .dft import (ColoringSpec, Triangulation, BudgetError, h_kernel, n_parity, yhat,
                  yhat_scaled, tv_r, tv_r_scaled)
from .asymptotics import (SweepReport, coloring_for_angles, cdft_rhs, cdft_prefactor,
                          saddle_terms, hess_check, run_sweep)
from .torsion import (TorsionInput, fsl_torsion_meridians, fsl_torsion_curves,
                      fsl_torsion_surgery, double_torsion)

"""Sweep the level r and compare the brute-force Fourier transform with the
closed-form prediction built from the solved tetrahedron at each r.

With no deep edges |ratio| tends to 1.  With one deep edge the ratio settles
near 1/sqrt(2); the saddle-point form of the prefactor explains the gap.
"""

import math

from qtet import Partition
from qtet.asymptotics import run_sweep

for I, top in (((), 501), ((1,), 301)):
    rep = run_sweep([0.3] * 6, [1] * 6, Partition(I), range(51, top + 1, 50))
    print(f"deep edges {I or 'none'}")
    print("    r   |ratio|    arg      growth_err")
    for row in rep.rows:
        print(f"{row.r:5d}  {row.abs_ratio:.5f}  {row.arg_ratio:+.4f}   {row.growth_err:.4f}")
    fit = rep.fit
    print(f"fit |ratio| - 1 = c1/r + c2/r^2: c1 = {fit['c1']:.3f}, R^2 = {fit['r2']:.4f}")
    print()

print(f"1/sqrt(2) = {1 / math.sqrt(2):.5f}")

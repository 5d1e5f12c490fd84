"""Growth of the 6j-symbol against the volume of the regular ideal tetrahedron.

Colours near r/3 (angles near pi/3) give 6j-symbols growing like
exp(r * Vol / (2 pi)), with Vol = 3 * Lambda(pi/3) = 1.01494...
The approach is slow at this corner, so colours on either side of r/3 are shown.
"""

import math
import warnings

from qtet import QContext, lobachevsky, sixj_scaled, solve_geometry, Partition

vol = solve_geometry([], [math.pi / 3] * 6, Partition()).vol
print(f"volume from the geometry solver  {vol:.10f}")
print(f"3 * Lambda(pi/3)                 {3 * lobachevsky(math.pi / 3):.10f}")
print()
print("    r    a    2 pi log|6j| / r")
for r in (101, 301, 1001, 2001):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # r = 2001 is past the accuracy ceiling
        ctx = QContext(r)
    for a in (r // 3 - 1, r // 3 + 1):
        a += a % 2  # keep every face sum even
        growth = 2 * math.pi * sixj_scaled((a,) * 6, ctx).log_mag / r
        print(f"{r:5d} {a:4d}    {growth:.6f}")

"""Feed a solved tetrahedron into the Gram-determinant torsion formulas."""

from qtet import Partition, solve_geometry
from qtet.torsion import TorsionInput, double_torsion

geom = solve_geometry([0.4, 0.5, 0.6], [0.3, 0.3, 0.3], Partition((1, 2, 3)))
print("lengths   ", geom.l.round(6))
print("volume    ", round(geom.vol, 8))
print("det Gram  ", round(geom.gram_det, 8))

inp = TorsionInput.from_geometry(geom)
for variant in ("longitudes", "meridians", "filled"):
    t = double_torsion(inp, variant)
    print(f"{variant:10s} +/- {t:.8g}")

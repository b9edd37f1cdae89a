"""Measures of a system read from YAML: unequal ratios and a rotated map.

The separation gap and the attractor's diameter are not known in closed form,
so they are bracketed numerically and the wider end of each bracket enters
the error bounds.
"""
from ssmeasure import estimate_centered, estimate_packing, parse_config
from ssmeasure.errors import WindowInfeasible

CONFIG = """
name: skewed gasket
maps:
  - ratio: 0.3
    translation: [0, 0]
  - ratio: 0.3
    rotation_deg: 90
    translation: [1, 0]
  - ratio: 0.25
    translation: [0.4, 0.6]
"""

system = parse_config(CONFIG)
C = system.constants
print(f"s = {C.s:.10f}")
print(f"c in [{C.c_lo:.12f}, {C.c_hi:.12f}]")
print(f"R in [{C.R_lo:.12f}, {C.R_hi:.12f}]")

for k in range(3, 9):
    cen = estimate_centered(system, k)
    line = f"k={k}  centered {cen.value:.8f} +- {cen.epsilon:.2e}"
    try:
        pk = estimate_packing(system, k)
        line += f"   packing {pk.value:.8f} +- {pk.epsilon:.2e}"
    except WindowInfeasible:
        line += "   packing: window not yet feasible"
    print(line)

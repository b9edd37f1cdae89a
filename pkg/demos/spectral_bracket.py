"""Bracket the range of spherical densities of the natural measure.

Every limiting density lies between 1/P^s and 1/C^s; both ends come with
certified enclosures.
"""
from ssmeasure import cantor, estimate_centered, estimate_packing, sierpinski
from ssmeasure.formulas import spectral_interval

for system, k in [(cantor(0.25), 10), (cantor(0.4), 12), (sierpinski(0.2), 7)]:
    br = spectral_interval(estimate_packing(system, k), estimate_centered(system, k))
    print(f"{system.name}: [{br.point[0]:.10f}, {br.point[1]:.10f}]  "
          f"contained in [{br.outer[0]:.10f}, {br.outer[1]:.10f}]")

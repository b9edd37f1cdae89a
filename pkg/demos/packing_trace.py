"""Packing measure of the Sierpinski gasket S_0.42, level by level.

Prints the optimal ball at each level together with the certified interval.
Levels up to 10 take well under a minute on one core.
"""
import sys

from ssmeasure import detect_stabilization, run_packing, sierpinski

k_max = int(sys.argv[1]) if len(sys.argv) > 1 else 9
system = sierpinski(0.42)
print(f"{system.name}: s = {system.s:.6f}")

ests = run_packing(system, 5, k_max)
print(f"{'k':>3} {'center':>20} {'radius':>11} {'estimate':>11}   interval")
for est in ests:
    x = ", ".join(f"{v:.4f}" for v in est.witness_center)
    lo, hi = est.interval
    print(f"{est.level:>3} {'(' + x + ')':>20} {est.witness_radius:11.8f} "
          f"{est.value:11.8f}   ({lo:.8f}, {hi:.8f})")

# the estimate creeps down towards about 3.629 while the interval shrinks by 0.42 a step
print("stabilized at", detect_stabilization(ests))

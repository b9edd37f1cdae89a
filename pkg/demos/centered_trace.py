"""Centered Hausdorff measure of the middle Cantor set C_0.45."""
from ssmeasure import cantor, run_centered
from ssmeasure.formulas import closed_form

system = cantor(0.45)
g3 = closed_form("g3", 0.45)

for est in run_centered(system, 5, 14):
    lo, hi = est.interval
    flag = "inside" if lo <= g3.value <= hi else "outside"
    print(f"k={est.level:2d}  x={est.witness_center[0]:.8f}  d={est.witness_radius:.8f}  "
          f"m={est.value:.8f}  I=({lo:.8f}, {hi:.8f})  g3 {flag}")

# g3 is only proven for r <= 1/3; here it lands outside the interval
print(f"g3(0.45) = {g3.value:.8f}, proven: {g3.proven}")

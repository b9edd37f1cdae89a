"""Plot data for the gasket packing measure against g1 over r in [0.33, 0.45].

Writes sweep.csv with columns r, lower, estimate, upper, closed_form, ready
for any plotting tool.  Level 7 keeps this to a few seconds; larger levels
tighten the band around the estimate.
"""
import io
import sys

from ssmeasure.cli import main

k = sys.argv[1] if len(sys.argv) > 1 else "7"
buf = io.StringIO()
main(["sierpinski", "sweep", "packing", "--k", k, "--r-from", "0.33", "--r-to", "0.45",
      "--points", "34"], out=buf)
with open("sweep.csv", "w") as fh:
    fh.write(buf.getvalue())

# g1 below the lower curve means g1 is ruled out at that r
ruled_out = 0
for line in buf.getvalue().splitlines()[1:]:
    r, lo, est, hi, g = line.split(",")
    if lo and float(g) < float(lo):
        print(f"r={float(r):.4f}: g1 = {float(g):.6f} < {float(lo):.6f}")
        ruled_out += 1
if not ruled_out:
    print(f"no r rules out g1 at k={k}; try a larger level")

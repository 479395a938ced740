"""Walk through the superspace splitting of the one-shell D10 cluster.

Five unit vectors at multiples of 72 degrees span the plane; the integer
relation e_1 + ... + e_5 = 0 cuts out a one-dimensional E'' and leaves a
two-dimensional dense internal space E'.  The shifted unit cube sliced by
the five coset planes gives the four pentagonal acceptance domains.

Run:  python3 demos/01_penrose_superspace.py [outdir]
"""

import os
import sys

import numpy as np

from qcpm.presets import preset
from qcpm.render import windows_svg
from qcpm.superspace import classify_projection, decompose
from qcpm.window import component_windows, make_window

out = sys.argv[1] if len(sys.argv) > 1 else "demo_out"
os.makedirs(out, exist_ok=True)

cluster = preset("d10-penrose")
print("cluster vectors (float):")
print(np.round(cluster.vectors_float(), 6))

dec = decompose(cluster)
print("\nkappa^2 =", dec.kappa2, " dims (E, E', E'') =", dec.dims, "->", classify_projection(dec).value)
print("first row of pi   :", [str(x) for x in dec.pi[0]])
print("first row of pi'  :", [str(x) for x in dec.pi_prime[0]])
print("first row of pi'' :", [str(x) for x in dec.pi_dprime[0]])
print("relations:", dec.relations)

# Slicing the shifted cube coset by coset.  Indices 0 and 5 touch the cube
# only at a vertex; 1..4 give pentagons of two sizes and orientations.
window = make_window(dec, 42)
for c in component_windows(window, dec, with_volume=True):
    print(f"coset {c.index}: {len(c.vertices)} vertices, interior={c.nonempty_interior}, slice volume={c.volume:.4f}")

path = os.path.join(out, "d10_windows.svg")
with open(path, "w") as fh:
    fh.write(windows_svg(component_windows(window, dec)))
print("\nwrote", path)

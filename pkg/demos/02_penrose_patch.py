"""Generate a patch of the Penrose vertex set and inspect its local structure.

The branch-and-bound enumerator is checked against the exhaustive box scan,
then every point's arithmetic neighbours m +- eps_i are examined: the ones
present sit exactly at +-e_i, but most translated clusters are only partly
occupied.

Run:  python3 demos/02_penrose_patch.py [outdir]
"""

import os
import sys
from collections import Counter

import numpy as np

from qcpm.patchgen import generate_patch, naive_patch, occupied_counts
from qcpm.presets import preset
from qcpm.render import patch_svg
from qcpm.superspace import decompose
from qcpm.window import make_window

out = sys.argv[1] if len(sys.argv) > 1 else "demo_out"
os.makedirs(out, exist_ok=True)

dec = decompose(preset("d10-penrose"))
window = make_window(dec, 42)

patch = generate_patch(dec, window, 20)
print(f"{len(patch)} points within R = 20; search visited {patch.stats['nodes']} nodes")
print("points per component:", dict(sorted(Counter(patch.component[:, 0].tolist()).items())))

small = naive_patch(dec, window, 8)
fast = generate_patch(dec, window, 8)
print("R = 8, branch-and-bound equals box scan:", np.array_equal(small.m, fast.m))

counts, complete = occupied_counts(patch)
hist = Counter(counts[complete].tolist())
print("occupied neighbours among interior points:")
for c in sorted(hist):
    print(f"  {c:2d} of 10: {hist[c]:4d} points")

path = os.path.join(out, "d10_patch.svg")
with open(path, "w") as fh:
    fh.write(patch_svg(patch, title="d10-penrose, R = 20"))
print("wrote", path)

"""Structure factor of a Penrose patch on a planar grid of wave vectors.

The direct sum is evaluated at q and at g q for each generator g, so the
symmetry score measures how far the finite-patch pattern is from exact
tenfold symmetry without any interpolation.

Run:  python3 demos/04_diffraction.py [outdir] [resolution]
"""

import os
import sys

import numpy as np

from qcpm.analysis import diffraction_intensity
from qcpm.patchgen import generate_patch
from qcpm.presets import preset
from qcpm.render import diffraction_svg
from qcpm.superspace import decompose
from qcpm.window import make_window

out = sys.argv[1] if len(sys.argv) > 1 else "demo_out"
res = int(sys.argv[2]) if len(sys.argv) > 2 else 101
os.makedirs(out, exist_ok=True)

dec = decompose(preset("d10-penrose"))
patch = generate_patch(dec, make_window(dec, 42), 30)
dif = diffraction_intensity(patch, resolution=res)

print(f"{len(patch)} points, I(0) = {dif.intensity[res // 2, res // 2]:.1f}")
print("symmetry scores (rotation, mirror):", {k: round(v, 5) for k, v in dif.scores.items()})
strong = np.argwhere(dif.intensity > 0.3 * dif.intensity.max())
print(f"{len(strong)} grid cells above 30% of the central peak")

path = os.path.join(out, "d10_diffraction.svg")
with open(path, "w") as fh:
    fh.write(diffraction_svg(dif.intensity, 2 * np.pi))
print("wrote", path)

"""Search for inflation symmetries x -> y + tau^p (x - y) of a Penrose patch.

Scaling by a power of tau maps the lattice into itself, but whether the
image of the patch stays inside the patch depends on how the scaled
windows nest.  The search reports the inclusion fraction for a handful
of centers; exact field arithmetic decides every coincidence.

Run:  python3 demos/05_tau_inflation.py [seed]
"""

import sys

from qcpm.analysis import self_similarity_search
from qcpm.patchgen import generate_patch
from qcpm.presets import preset
from qcpm.superspace import decompose
from qcpm.window import make_window

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
dec = decompose(preset("d10-penrose"))
patch = generate_patch(dec, make_window(dec, 42), 30)
best, results = self_similarity_search(patch, seed=seed)

for r in sorted(results, key=lambda r: (r.power, r.center_index)):
    print(f"tau^{r.power}  center {tuple(round(c, 3) for c in r.center)}  {r.fraction:.3f} of {r.sample}")
print(f"\nbest: tau^{best.power} = {best.alpha} about {best.center}, inclusion {best.fraction:.3f}")

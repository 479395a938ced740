"""Compare how densely the translated clusters are occupied.

Adding a second D10 shell at radius tau multiplies the number of possible
neighbour directions but not the number of points nearby, so the mean
occupation fraction drops.

Run:  python3 demos/03_occupation_across_clusters.py
"""

from qcpm.analysis import delone_radii, density_estimate, occupation_stats
from qcpm.patchgen import generate_patch
from qcpm.presets import PRESETS, preset
from qcpm.superspace import decompose
from qcpm.window import make_window

print(f"{'cluster':15s} {'k':>3s} {'points':>7s} {'r_pack':>8s} {'r_cover':>8s} {'density':>8s} {'occupation':>10s}")
for name in PRESETS:
    dec = decompose(preset(name))
    R = 6 if dec.n == 3 else 12
    patch = generate_patch(dec, make_window(dec, 42), R)
    occ = occupation_stats(patch)
    r_pack, r_cover = delone_radii(patch)
    dens = density_estimate(patch, [R])[0][1]
    print(f"{name:15s} {dec.k:3d} {len(patch):7d} {r_pack:8.4f} {r_cover:8.4f} {dens:8.4f} {occ.mean_fraction:10.3f}")

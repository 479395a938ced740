"""Hand-written SVG for patches, acceptance windows and diffraction grids."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .output import component_text

_COLOURS = ("#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e", "#117a65", "#5d6d7e", "#922b21")
_SHAPES = ("circle", "square", "triangle", "diamond", "nabla", "cross")


def _glyph(shape: str, x: float, y: float, r: float, cls: str) -> str:
    if shape == "circle":
        return f'<circle class="{cls}" cx="{x:.4f}" cy="{y:.4f}" r="{r:.4f}"/>'
    if shape == "square":
        return f'<rect class="{cls}" x="{x - r:.4f}" y="{y - r:.4f}" width="{2 * r:.4f}" height="{2 * r:.4f}"/>'
    if shape == "triangle":
        pts = [(x, y - r), (x + 0.87 * r, y + 0.5 * r), (x - 0.87 * r, y + 0.5 * r)]
    elif shape == "nabla":
        pts = [(x, y + r), (x + 0.87 * r, y - 0.5 * r), (x - 0.87 * r, y - 0.5 * r)]
    elif shape == "diamond":
        pts = [(x, y - r), (x + r, y), (x, y + r), (x - r, y)]
    else:
        t = r / 3
        pts = [(x - t, y - r), (x + t, y - r), (x + t, y - t), (x + r, y - t), (x + r, y + t), (x + t, y + t),
               (x + t, y + r), (x - t, y + r), (x - t, y + t), (x - r, y + t), (x - r, y - t), (x - t, y - t)]
    s = " ".join(f"{a:.4f},{b:.4f}" for a, b in pts)
    return f'<polygon class="{cls}" points="{s}"/>'


def _style(labels) -> str:
    rules = []
    for j, lab in enumerate(labels):
        c = _COLOURS[j % len(_COLOURS)]
        rules.append(f".comp-{_css(lab)} {{ fill: {c}; stroke: none; }}")
    return "<style>" + " ".join(rules) + "</style>"


def _css(label: str) -> str:
    return label.replace(";", "_").replace("-", "m")


def _open(width: float, height: float, view: tuple) -> str:
    x0, y0, w, h = view
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="{x0:.4f} {y0:.4f} {w:.4f} {h:.4f}">'
    )


def patch_svg(patch, size: int = 800, title: str = "") -> str:
    """Scatter of the physical points, one glyph class per component."""
    R = float(patch.radius) if len(patch) else 1.0
    pad = 0.05 * R
    view = (-R - pad, -R - pad, 2 * (R + pad), 2 * (R + pad))
    labels = sorted({component_text(c) for c in patch.component}, key=lambda s: [int(t) for t in s.split(";")])
    out = [_open(size, size, view)]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append(_style(labels))
    r = 0.12 * min(1.0, max(R / 10, 0.5))
    shape_of = {lab: _SHAPES[j % len(_SHAPES)] for j, lab in enumerate(labels)}
    out.append(f'<circle cx="0" cy="0" r="{R:.4f}" fill="none" stroke="#bbbbbb" stroke-width="{R / 400:.4f}"/>')
    for i in range(len(patch)):
        lab = component_text(patch.component[i])
        x, y = patch.physical[i][:2]
        out.append(_glyph(shape_of[lab], float(x), float(-y), r, f"comp-{_css(lab)}"))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def windows_svg(windows, size: int = 600, active_only: bool = True) -> str:
    """Acceptance polytopes drawn in the first two E' coordinates."""
    polys = []
    for w in windows:
        if active_only and not w.active:
            continue
        V = np.asarray(w.vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] < 2 or len(V) < 3:
            continue
        P = V[:, :2]
        try:
            hull = ConvexHull(P)
            P = P[hull.vertices]
        except QhullError:
            continue
        polys.append((component_text(w.index), P))
    if not polys:
        return _open(size, size, (-1, -1, 2, 2)) + "\n</svg>\n"
    allp = np.vstack([p for _, p in polys])
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    span = float(max(hi - lo)) * 1.1
    c = (lo + hi) / 2
    view = (c[0] - span / 2, -c[1] - span / 2, span, span)
    out = [_open(size, size, view), _style([lab for lab, _ in polys])]
    for lab, P in polys:
        pts = " ".join(f"{x:.5f},{-y:.5f}" for x, y in P)
        out.append(f'<polygon class="comp-{_css(lab)}" points="{pts}" fill-opacity="0.35" '
                   f'stroke="black" stroke-width="{span / 500:.5f}"><title>component {lab}</title></polygon>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def diffraction_svg(intensity: np.ndarray, extent: float, size: int = 600, floor: float = 1e-3) -> str:
    """Grayscale heat map (square-root scale); near-empty cells are skipped."""
    I = np.asarray(intensity, dtype=float)
    res = I.shape[0]
    top = float(I.max()) if I.size else 1.0
    scaled = np.sqrt(np.clip(I / top, 0, 1)) if top > 0 else np.zeros_like(I)
    out = [_open(size, size, (0, 0, res, res)), '<rect x="0" y="0" width="100%" height="100%" fill="black"/>']
    out.append(f"<title>structure factor, q in [-{extent:.4f}, {extent:.4f}]^2</title>")
    for i in range(res):
        for j in range(res):
            v = scaled[i, j]
            if v < np.sqrt(floor):
                continue
            g = int(round(255 * v))
            out.append(f'<rect x="{i}" y="{res - 1 - j}" width="1" height="1" fill="rgb({g},{g},{g})"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

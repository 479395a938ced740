"""Deterministic CSV/JSON serialisation of patches and reports.

Every file starts with a header carrying the config hash, kappa^2 and the
shift seed.  No timestamps or timings are written, so identical configs
give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json

from .patchgen import ModelSetPatch
from .superspace import classify_projection


def _fmt(x: float) -> str:
    return repr(float(x))


def component_text(label) -> str:
    """Coset label as text: '3', '1;2', or '0' when there are no relations."""
    label = tuple(int(x) for x in label)
    return ";".join(str(x) for x in label) if label else "0"


def header(patch: ModelSetPatch, config_hash: str, label: str) -> dict:
    dec = patch.dec
    return {
        "format": "qcpm-patch/1",
        "cluster": label,
        "config_hash": config_hash,
        "kappa2": str(dec.kappa2),
        "shift_seed": patch.window.seed,
        "epsilon": patch.window.epsilon,
        "radius": str(patch.radius),
        "k": dec.k,
        "dims": list(dec.dims),
        "classification": classify_projection(dec).value,
        "points": len(patch),
    }


def columns(patch: ModelSetPatch) -> list[str]:
    k = patch.dec.k
    n = patch.physical.shape[1]
    phys = ["phys_x", "phys_y", "phys_z"][:n] if n <= 3 else [f"phys_{j + 1}" for j in range(n)]
    return (
        [f"m_{i + 1}" for i in range(k)]
        + phys
        + [f"int_{j + 1}" for j in range(patch.internal.shape[1])]
        + ["component", "margin"]
    )


def patch_to_csv(patch: ModelSetPatch, config_hash: str, label: str = "") -> str:
    buf = io.StringIO()
    for key, val in header(patch, config_hash, label).items():
        buf.write(f"# {key}: {val}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns(patch))
    for i in range(len(patch)):
        w.writerow(
            [int(x) for x in patch.m[i]]
            + [_fmt(x) for x in patch.physical[i]]
            + [_fmt(x) for x in patch.internal[i]]
            + [component_text(patch.component[i]), _fmt(patch.margin[i])]
        )
    return buf.getvalue()


def patch_to_json(patch: ModelSetPatch, config_hash: str, label: str = "") -> str:
    doc = {
        "header": header(patch, config_hash, label),
        "columns": columns(patch),
        "points": [
            {
                "m": [int(x) for x in patch.m[i]],
                "physical": [float(x) for x in patch.physical[i]],
                "internal": [float(x) for x in patch.internal[i]],
                "component": [int(x) for x in patch.component[i]],
                "margin": float(patch.margin[i]),
            }
            for i in range(len(patch))
        ],
    }
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def read_header(path) -> dict:
    """Header of a patch file written by this module (CSV or JSON)."""
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return json.loads(text)["header"]
    out = {}
    for line in text.splitlines():
        if not line.startswith("# "):
            break
        key, _, val = line[2:].partition(": ")
        out[key] = val
    return out


def report_to_json(report_dict: dict, config_hash: str) -> str:
    return json.dumps({"config_hash": config_hash, **report_dict}, indent=1, sort_keys=True) + "\n"

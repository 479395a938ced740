"""qcpm command line: generate, analyze, diffract, render, presets, decompose.

Exit codes: 0 success, 2 configuration error, 3 boundary-ambiguous shift,
4 resource limit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from .config import ConfigError, RunConfig, build_cluster_from_config, from_dict, load_config
from .patchgen import ResourceLimitExceeded, generate_patch
from .presets import PRESETS, preset
from .superspace import decompose, decomposition_to_json, classify_projection
from .window import BoundaryAmbiguous, component_windows, make_window

EXIT_OK, EXIT_CONFIG, EXIT_BOUNDARY, EXIT_RESOURCE = 0, 2, 3, 4
ANALYSIS_CHOICES = ("all", "delone", "density", "occupation", "selfsim", "autocorrelation", "diffraction")


def _common(p: argparse.ArgumentParser, radius_required: bool = True):
    src = p.add_argument_group("cluster and window")
    src.add_argument("--preset", choices=PRESETS, help="registered cluster")
    src.add_argument("--config", metavar="FILE", help="JSON run configuration")
    src.add_argument("--radius", help="patch radius as a rational, e.g. 20 or 41/2")
    src.add_argument("--shift-seed", type=int, help="seed for the window shift in E' (default 0)")
    src.add_argument("--epsilon", type=float, help="boundary ambiguity band (default 1e-9)")
    src.add_argument("--jobs", type=int, help="worker processes for the enumeration")
    src.add_argument("--out", default=".", metavar="DIR", help="output directory")
    src.add_argument("--emit-config", metavar="FILE", help="write the resolved config as JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcpm", description="Multi-component model sets from G-clusters.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="enumerate a patch and write it out")
    _common(g)
    g.add_argument("--format", action="append", help="csv, json or svg; repeat or comma-separate")
    g.add_argument("--analyze", action="append", choices=ANALYSIS_CHOICES, help="also run analyses")

    a = sub.add_parser("analyze", help="run finite-patch analyses")
    _common(a)
    a.add_argument("--analyze", action="append", choices=ANALYSIS_CHOICES, help="analyses to run (default all)")
    a.add_argument("--patch", metavar="FILE", help="patch file to check against the config")
    a.add_argument("--resolution", type=int, default=101, help="diffraction grid size")

    d = sub.add_parser("diffract", help="structure factor on a planar q-grid")
    _common(d)
    d.add_argument("--resolution", type=int, default=201)
    d.add_argument("--extent", type=float, default=2 * 3.141592653589793, help="grid half-width in q")

    r = sub.add_parser("render", help="SVG of a patch or of the acceptance windows")
    _common(r)
    r.add_argument("--what", choices=("patch", "windows"), default="patch")

    sub.add_parser("presets", help="list the registered clusters")

    dc = sub.add_parser("decompose", help="print the exact projectors of a cluster")
    dc.add_argument("--preset", choices=PRESETS)
    dc.add_argument("--config", metavar="FILE")
    dc.add_argument("--json", action="store_true", help="machine-readable output")
    return parser


def resolve_config(args) -> RunConfig:
    """Merge --config with explicit flags (flags win)."""
    if args.config:
        base = load_config(args.config).to_dict()
    elif args.preset:
        if not getattr(args, "radius", None):
            raise ConfigError("--radius is required")
        base = {"cluster": {"preset": args.preset}, "radius": args.radius}
    else:
        raise ConfigError("give --preset or --config")
    if args.preset and args.config:
        base["cluster"] = {"preset": args.preset}
    for key, attr in (("radius", "radius"), ("shift_seed", "shift_seed"), ("epsilon", "epsilon"), ("jobs", "jobs")):
        val = getattr(args, attr, None)
        if val is not None:
            base[key] = val
    fmts = getattr(args, "format", None)
    if fmts:
        base["outputs"] = [f.strip() for item in fmts for f in item.split(",") if f.strip()]
    an = getattr(args, "analyze", None)
    if an:
        base["analyses"] = sorted(set(an))
    return from_dict(base)


def _expand_analyses(names) -> list[str]:
    from .analysis import ANALYSES

    names = list(names or [])
    if "all" in names:
        return list(ANALYSES)
    return [a for a in ANALYSES if a in names]


class _Pipeline:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.timings = {}
        t = time.perf_counter()
        self.cluster = build_cluster_from_config(cfg)
        self.dec = decompose(self.cluster)
        self.timings["decompose"] = time.perf_counter() - t
        self.window = make_window(self.dec, cfg.shift_seed, cfg.epsilon)
        self.windows = component_windows(self.window, self.dec)
        self._patch = None

    @property
    def patch(self):
        if self._patch is None:
            t = time.perf_counter()
            self._patch = generate_patch(self.dec, self.window, Fraction(self.cfg.radius), jobs=self.cfg.jobs)
            self.timings["generate"] = time.perf_counter() - t
        return self._patch

    def summary(self) -> list[str]:
        dec = self.dec
        active = [w for w in self.windows if w.active]
        lines = [
            f"cluster: {self.cfg.label()}  k={dec.k}  dims(E,E',E'')={dec.dims}  kappa^2={dec.kappa2}",
            f"classification: {classify_projection(dec).value}",
            f"components: {len(active)}",
            f"config hash: {self.cfg.hash()}",
        ]
        if self._patch is not None:
            st = self._patch.stats
            lines.append(f"points: {len(self._patch)}  (R={self.cfg.radius}, shift seed {self.cfg.shift_seed})")
            lines.append(f"search: {st.get('nodes', 0)} nodes, {st.get('pruned', 0)} pruned")
        lines.append("timings: " + ", ".join(f"{k} {v:.2f}s" for k, v in self.timings.items()))
        return lines


def _write(path: str, text: str):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _emit_config(cfg: RunConfig, path: str | None):
    if path:
        _write(path, json.dumps(cfg.to_dict(), indent=1, sort_keys=True) + "\n")


def _run_analyses(pipe: _Pipeline, names, out: str, resolution: int = 101) -> str:
    from .analysis import analyze
    from .output import report_to_json

    t = time.perf_counter()
    rep = analyze(pipe.patch, _expand_analyses(names), seed=pipe.cfg.shift_seed, diffraction_resolution=resolution)
    pipe.timings["analyze"] = time.perf_counter() - t
    path = os.path.join(out, "report.json")
    _write(path, report_to_json(rep.to_json(), pipe.cfg.hash()))
    return path


def cmd_generate(args) -> int:
    from .output import patch_to_csv, patch_to_json
    from .render import patch_svg

    cfg = resolve_config(args)
    _emit_config(cfg, args.emit_config)
    pipe = _Pipeline(cfg)
    patch = pipe.patch
    h = cfg.hash()
    written = []
    for fmt in cfg.outputs:
        path = os.path.join(args.out, f"patch.{fmt}")
        if fmt == "csv":
            _write(path, patch_to_csv(patch, h, cfg.label()))
        elif fmt == "json":
            _write(path, patch_to_json(patch, h, cfg.label()))
        else:
            _write(path, patch_svg(patch, title=f"{cfg.label()} R={cfg.radius}"))
        written.append(path)
    if cfg.analyses:
        written.append(_run_analyses(pipe, cfg.analyses, args.out))
    print("\n".join(pipe.summary()))
    for p in written:
        print(f"wrote {p}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    from .output import read_header

    cfg = resolve_config(args)
    _emit_config(cfg, args.emit_config)
    if args.patch:
        head = read_header(args.patch)
        if head.get("config_hash") != cfg.hash():
            raise ConfigError(
                f"patch {args.patch} was made with config {head.get('config_hash')}, not {cfg.hash()}"
            )
    pipe = _Pipeline(cfg)
    path = _run_analyses(pipe, cfg.analyses or ["all"], args.out, args.resolution)
    print("\n".join(pipe.summary()))
    with open(path) as fh:
        rep = json.load(fh)
    for key in ("r_pack", "r_cover"):
        if rep.get(key) is not None:
            print(f"{key}: {rep[key]:.12g}")
    if rep.get("occupation"):
        print(f"mean occupation fraction: {rep['occupation']['mean_fraction']:.6f}")
    if rep.get("diffraction"):
        print(f"diffraction symmetry score: {rep['diffraction']['score']:.4g}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_diffract(args) -> int:
    from .analysis import diffraction_intensity

    from .render import diffraction_svg

    cfg = resolve_config(args)
    _emit_config(cfg, args.emit_config)
    pipe = _Pipeline(cfg)
    t = time.perf_counter()
    dif = diffraction_intensity(pipe.patch, extent=args.extent, resolution=args.resolution)
    pipe.timings["diffract"] = time.perf_counter() - t
    doc = {
        "config_hash": cfg.hash(),
        "extent": args.extent,
        "resolution": args.resolution,
        "scores": {str(k): v for k, v in dif.scores.items()},
        "score": dif.score,
        "intensity": [[float(x) for x in row] for row in dif.intensity],
    }
    jpath = os.path.join(args.out, "diffraction.json")
    spath = os.path.join(args.out, "diffraction.svg")
    _write(jpath, json.dumps(doc) + "\n")
    _write(spath, diffraction_svg(dif.intensity, args.extent))
    print("\n".join(pipe.summary()))
    print(f"symmetry score: {dif.score:.4g}  I(0)={dif.intensity[args.resolution // 2, args.resolution // 2]:.6g}")
    print(f"wrote {jpath}\nwrote {spath}")
    return EXIT_OK


def cmd_render(args) -> int:
    from .render import patch_svg, windows_svg

    cfg = resolve_config(args)
    _emit_config(cfg, args.emit_config)
    pipe = _Pipeline(cfg)
    if args.what == "patch":
        text = patch_svg(pipe.patch, title=f"{cfg.label()} R={cfg.radius}")
    else:
        text = windows_svg(pipe.windows)
    path = os.path.join(args.out, f"{args.what}.svg")
    _write(path, text)
    print("\n".join(pipe.summary()))
    print(f"wrote {path}")
    return EXIT_OK


def cmd_presets(args) -> int:
    for name in PRESETS:
        c = preset(name)
        print(f"{name:15s} n={c.n} conductor={c.conductor} k={c.k} shells={len(c.shells)}")
    return EXIT_OK


def cmd_decompose(args) -> int:
    if args.config:
        cluster = build_cluster_from_config(load_config(args.config))
    elif args.preset:
        cluster = preset(args.preset)
    else:
        raise ConfigError("give --preset or --config")
    dec = decompose(cluster)
    if args.json:
        print(json.dumps(decomposition_to_json(dec), indent=1))
        return EXIT_OK
    print(f"k={dec.k}  dims(E,E',E'')={dec.dims}  kappa^2={dec.kappa2}  {classify_projection(dec).value}")
    for name, M in (("pi", dec.pi), ("pi'", dec.pi_prime), ("pi''", dec.pi_dprime)):
        print(f"{name}:")
        for row in M:
            print("  [" + ", ".join(str(x) for x in row) + "]")
    if dec.relations:
        print("relations (HNF rows):")
        for row in dec.relations:
            print("  " + " ".join(f"{x:3d}" for x in row))
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "analyze": cmd_analyze,
    "diffract": cmd_diffract,
    "render": cmd_render,
    "presets": cmd_presets,
    "decompose": cmd_decompose,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BoundaryAmbiguous as exc:
        print(f"boundary ambiguous: {exc}", file=sys.stderr)
        print("hint: rerun with a different --shift-seed", file=sys.stderr)
        return EXIT_BOUNDARY
    except ResourceLimitExceeded as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as exc:
        # e.g. a malformed QCPM_NODE_LIMIT
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

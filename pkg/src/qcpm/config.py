"""Run configuration: cluster choice, radius, shift seed and outputs.

A config is plain JSON.  The cluster block is either ``{"preset": name}``
or a custom block with exact entries written as field-element strings::

    {"n": 2, "conductor": 4,
     "generators": [[["0", "-1"], ["1", "0"]], [["1", "0"], ["0", "-1"]]],
     "seeds": [["1", "0"]]}
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .cluster import ClusterError, GCluster, build_cluster
from .exactnum import parse_fe
from .presets import PRESETS, preset
from .window import DEFAULT_EPSILON

OUTPUT_FORMATS = ("csv", "json", "svg")
HASHED_FIELDS = ("cluster", "radius", "shift_seed", "epsilon")


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass
class RunConfig:
    cluster: dict
    radius: str
    shift_seed: int = 0
    epsilon: float = DEFAULT_EPSILON
    jobs: int = 1
    outputs: list = field(default_factory=lambda: ["csv", "json"])
    analyses: list = field(default_factory=list)

    def validate(self) -> "RunConfig":
        try:
            R = Fraction(str(self.radius))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"radius must be a rational like '20' or '41/2', got {self.radius!r}") from None
        if R <= 0:
            raise ConfigError("radius must be positive")
        self.radius = str(R)
        if not (0 < float(self.epsilon) < 1e-3):
            raise ConfigError("epsilon must lie in (0, 1e-3)")
        if int(self.jobs) < 1:
            raise ConfigError("jobs must be at least 1")
        if "preset" in self.cluster:
            if self.cluster["preset"] not in PRESETS:
                raise ConfigError(f"unknown preset {self.cluster['preset']!r}; choose from {', '.join(PRESETS)}")
        else:
            for key in ("n", "conductor", "generators", "seeds"):
                if key not in self.cluster:
                    raise ConfigError(f"custom cluster block lacks {key!r}")
        bad = [f for f in self.outputs if f not in OUTPUT_FORMATS]
        if bad:
            raise ConfigError(f"unknown output format(s) {bad}; choose from {', '.join(OUTPUT_FORMATS)}")
        return self

    @property
    def radius_q(self) -> Fraction:
        return Fraction(self.radius)

    def to_dict(self) -> dict:
        return {
            "cluster": self.cluster,
            "radius": self.radius,
            "shift_seed": self.shift_seed,
            "epsilon": self.epsilon,
            "jobs": self.jobs,
            "outputs": list(self.outputs),
            "analyses": list(self.analyses),
        }

    def hash(self) -> str:
        """Digest of the fields that determine the patch (not jobs or outputs)."""
        d = self.to_dict()
        blob = json.dumps({k: d[k] for k in HASHED_FIELDS}, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def label(self) -> str:
        return self.cluster.get("preset", "custom")


def from_dict(d: dict) -> RunConfig:
    if "cluster" not in d or "radius" not in d:
        raise ConfigError("config needs at least 'cluster' and 'radius'")
    known = {"cluster", "radius", "shift_seed", "epsilon", "jobs", "outputs", "analyses"}
    extra = set(d) - known
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")
    cfg = RunConfig(
        cluster=dict(d["cluster"]),
        radius=str(d["radius"]),
        shift_seed=int(d.get("shift_seed", 0)),
        epsilon=float(d.get("epsilon", DEFAULT_EPSILON)),
        jobs=int(d.get("jobs", 1)),
        outputs=list(d.get("outputs", ["csv", "json"])),
        analyses=list(d.get("analyses", [])),
    )
    return cfg.validate()


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return from_dict(data)


def build_cluster_from_config(cfg: RunConfig) -> GCluster:
    block = cfg.cluster
    if "preset" in block:
        return preset(block["preset"])
    try:
        N = int(block["conductor"])
        n = int(block["n"])
        gens = [[[parse_fe(str(x), N) for x in row] for row in g] for g in block["generators"]]
        seeds = [[parse_fe(str(x), N) for x in s] for s in block["seeds"]]
        return build_cluster(n, N, gens, seeds)
    except ClusterError as exc:
        raise ConfigError(f"invalid cluster: {exc}") from None
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"cannot parse the cluster block: {exc}") from None

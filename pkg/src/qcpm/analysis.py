"""Finite-patch diagnostics: Delone radii, density, neighbour occupation,
self-similarity, autocorrelation and diffraction.

Estimators that are sensitive to the patch edge work on an inner ball
(radius ``R/2`` or ``R - margin``).  Exact physical coordinates are used
wherever a coincidence of points has to be decided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree

from .exactnum import FieldElement
from .patchgen import ModelSetPatch, _ExactNorm, occupied_counts
from .presets import golden_ratio


class AnalysisError(ValueError):
    """A precondition of an estimator is violated."""


def ball_volume(r: float, n: int) -> float:
    return math.pi ** (n / 2) * r**n / math.gamma(n / 2 + 1)


def _norms(patch: ModelSetPatch) -> np.ndarray:
    return np.linalg.norm(patch.physical, axis=1)


def _weights(patch: ModelSetPatch, weights) -> np.ndarray:
    """Per-point weights from a {component label: value} mapping (default 1)."""
    if weights is None:
        return np.ones(len(patch))
    labels = patch.component_labels()
    return np.array([float(weights.get(lab, weights.get(str(lab), 0.0))) for lab in labels])


# ---------------------------------------------------------------------------
# Delone character and density


def delone_radii(patch: ModelSetPatch, boundary_margin: float | None = None) -> tuple[float, float]:
    """Packing radius over the whole patch and covering radius over the interior.

    Covering probes lie on a square grid of spacing r_pack/2 anchored at
    the origin, restricted to the ball of radius R - boundary_margin.
    """
    R = float(patch.radius)
    if boundary_margin is None:
        boundary_margin = R / 4
    inner = R - boundary_margin
    norms = _norms(patch)
    if inner <= 0 or (norms <= inner).sum() < 2:
        raise AnalysisError("fewer than two interior points; enlarge R or shrink the margin")
    tree = cKDTree(patch.physical)
    d, _ = tree.query(patch.physical, k=2)
    r_pack = float(d[:, 1].min()) / 2
    h = r_pack / 2
    steps = int(math.floor(inner / h))
    axis = np.arange(-steps, steps + 1) * h
    n = patch.physical.shape[1]
    if n == 2:
        gx, gy = np.meshgrid(axis, axis, indexing="ij")
        probes = np.column_stack([gx.ravel(), gy.ravel()])
    else:
        grids = np.meshgrid(*([axis] * n), indexing="ij")
        probes = np.column_stack([g.ravel() for g in grids])
    probes = probes[np.linalg.norm(probes, axis=1) <= inner]
    dist, _ = tree.query(probes)
    return r_pack, float(dist.max())


def density_estimate(patch: ModelSetPatch, radii) -> list[tuple[float, float]]:
    """#(points in B_r) / vol(B_r) for each r, with the exact ball test."""
    R = patch.radius
    n = patch.physical.shape[1]
    out = []
    for r in radii:
        rq = Fraction(r) if not isinstance(r, float) else Fraction(r).limit_denominator(10**9)
        if rq <= 0:
            raise AnalysisError("density radius must be positive")
        if rq > R:
            raise AnalysisError(f"density radius {r} exceeds the patch radius {R}")
        inside = _ExactNorm(patch.dec, rq)(patch.m) if len(patch) else np.zeros(0, bool)
        out.append((float(rq), float(inside.sum()) / ball_volume(float(rq), n)))
    return out


# ---------------------------------------------------------------------------
# occupation of the translated clusters


@dataclass
class OccupationStats:
    histogram: dict  # occupied-neighbour count -> fraction of interior points
    mean_fraction: float
    interior_points: int
    counts: np.ndarray = field(repr=False)


def occupation_stats(patch: ModelSetPatch) -> OccupationStats:
    """Occupied arithmetic neighbours per interior point (all 2k sites inside the ball)."""
    counts, complete = occupied_counts(patch)
    c = counts[complete]
    two_k = 2 * patch.k
    if len(c) == 0:
        return OccupationStats({}, float("nan"), 0, c)
    values, freq = np.unique(c, return_counts=True)
    hist = {int(v): float(f) / len(c) for v, f in zip(values, freq)}
    return OccupationStats(hist, float(c.mean()) / two_k, int(len(c)), c)


# ---------------------------------------------------------------------------
# self-similarity


def _exact_keys(patch: ModelSetPatch) -> tuple[dict, int]:
    num, L = patch.exact_physical_numerators()
    flat = num.reshape(len(patch), -1)
    return {tuple(int(x) for x in row): i for i, row in enumerate(flat)}, L


def _fe_key(coords, L: int, N: int):
    out = []
    for x in coords:
        x = x.embed(N) if x.conductor != N else x
        if L % x.den:
            return None
        f = L // x.den
        out.extend(int(c) * f for c in x.num)
    return tuple(out)


def _as_exact_point(y, n: int, N: int):
    if y is None:
        return tuple(FieldElement.rational(0, N) for _ in range(n))
    if all(isinstance(c, FieldElement) for c in y):
        return tuple(y)
    if all(isinstance(c, (int, Fraction)) for c in y):
        return tuple(FieldElement.rational(c, N) for c in y)
    return None


def self_similarity_check(patch: ModelSetPatch, alpha, y=None, trusted_radius: float | None = None) -> tuple[float, int]:
    """Fraction of points x with |x| <= trusted_radius whose image
    y + alpha (x - y) is again a patch point.  Returns (fraction, sample size).

    The comparison is exact when alpha and y are field elements (or
    rationals); otherwise coordinates are matched within 1e-6.
    """
    R = float(patch.radius)
    n = patch.physical.shape[1]
    N = patch.dec.cluster.conductor
    a = float(alpha)
    if a == 0:
        raise AnalysisError("alpha must be nonzero")
    y_exact = _as_exact_point(y, n, N)
    y_f = np.zeros(n) if y is None else np.array([float(c) for c in y])
    ny = float(np.linalg.norm(y_f))
    # |y + a (x - y)| <= |a| |x| + |1 - a| |y| keeps the images in the ball
    if trusted_radius is None:
        trusted_radius = (R - ny * abs(1 - a)) / abs(a)
    if trusted_radius <= 0 or trusted_radius * abs(a) + ny * abs(1 - a) > R * (1 + 1e-12):
        raise AnalysisError("images of the trusted ball leave the patch")
    sample = np.flatnonzero(_norms(patch) <= trusted_radius)
    if len(sample) == 0:
        raise AnalysisError("no points inside the trusted radius")
    exact = isinstance(alpha, (int, Fraction, FieldElement)) and y_exact is not None
    hits = 0
    if exact:
        al = alpha if isinstance(alpha, FieldElement) else FieldElement.rational(alpha, N)
        keys, L = _exact_keys(patch)
        one_minus = 1 - al
        shift = tuple(one_minus * c for c in y_exact)
        for i in sample:
            x = patch.exact_physical(int(i))
            img = tuple(s + al * c for s, c in zip(shift, x))
            key = _fe_key(img, L, N)
            hits += key is not None and key in keys
    else:
        tree = cKDTree(patch.physical)
        img = y_f + a * (patch.physical[sample] - y_f)
        d, _ = tree.query(img)
        hits = int((d <= 1e-6).sum())
    return hits / len(sample), int(len(sample))


@dataclass
class SelfSimilarityResult:
    alpha: str  # exact field element, printed
    power: int
    center_index: int
    center: tuple  # float physical coordinates
    sample: int
    fraction: float


def self_similarity_search(patch: ModelSetPatch, powers=(1, 2, 3, 4), n_centers: int = 8, seed: int = 0) -> tuple[SelfSimilarityResult, list[SelfSimilarityResult]]:
    """Try alpha = tau^p about candidate centers; return the best and all results.

    Candidates are the patch point nearest the origin plus ``n_centers - 1``
    points drawn (with ``seed``) from the points within R/8 of the origin.
    The best triple maximises the inclusion fraction, then prefers smaller
    powers and centers nearer the origin.
    """
    N = patch.dec.cluster.conductor
    tau = golden_ratio(N) if N % 5 == 0 else None
    if tau is None:
        raise AnalysisError("the golden ratio is not in this cluster's field")
    norms = _norms(patch)
    order = np.lexsort((np.arange(len(patch)), norms))
    pool = [int(i) for i in order if norms[i] <= float(patch.radius) / 8]
    if not pool:
        raise AnalysisError("no candidate centers")
    rng = np.random.default_rng(seed)
    rest = pool[1:]
    extra = sorted(int(i) for i in rng.choice(rest, size=min(n_centers - 1, len(rest)), replace=False)) if rest else []
    centers = [pool[0]] + extra
    results = []
    R = float(patch.radius)
    for p in powers:
        al = tau**p
        a = float(al)
        for c in centers:
            y = patch.exact_physical(c)
            ny = float(norms[c])
            trusted = (R - ny * abs(1 - a)) / a
            if trusted <= 0:
                continue
            try:
                frac, size = self_similarity_check(patch, al, y, trusted)
            except AnalysisError:
                continue
            results.append(SelfSimilarityResult(str(al), p, c, tuple(float(t) for t in patch.physical[c]), size, frac))
    if not results:
        raise AnalysisError("no admissible (alpha, center) pair at this radius")
    best = max(results, key=lambda r: (r.fraction, -r.power, -float(np.linalg.norm(r.center)), -r.center_index))
    return best, results


# ---------------------------------------------------------------------------
# autocorrelation and diffraction


@dataclass
class Autocorrelation:
    z: np.ndarray  # M x n difference vectors, sorted by (|z|, z)
    keys: list  # exact keys (integer numerators over a common denominator)
    eta: np.ndarray
    volume: float

    def value_at(self, z, tol: float = 1e-9) -> float:
        d = np.linalg.norm(self.z - np.asarray(z, dtype=float), axis=1)
        i = int(d.argmin()) if len(d) else -1
        return float(self.eta[i]) if i >= 0 and d[i] <= tol else 0.0


def autocorrelation(patch: ModelSetPatch, z_cutoff: float, weights=None) -> Autocorrelation:
    """Autocorrelation coefficients over pairs in the inner ball of radius R/2."""
    R = float(patch.radius)
    if z_cutoff > R / 2:
        raise AnalysisError("z_cutoff must not exceed R/2")
    n = patch.physical.shape[1]
    inner = np.flatnonzero(_norms(patch) <= R / 2)
    w = _weights(patch, weights)[inner]
    X = patch.physical[inner]
    num, _ = patch.exact_physical_numerators()
    num = num[inner].reshape(len(inner), -1)
    tree = cKDTree(X)
    pairs = tree.query_pairs(z_cutoff + 1e-9, output_type="ndarray").reshape(-1, 2)
    src = np.concatenate([np.arange(len(inner)), pairs[:, 0], pairs[:, 1]])
    dst = np.concatenate([np.arange(len(inner)), pairs[:, 1], pairs[:, 0]])
    diff = num[src] - num[dst]  # exact keys of x - y
    keys, first, inv = np.unique(diff, axis=0, return_index=True, return_inverse=True)
    sums = np.bincount(inv.ravel(), weights=w[src] * w[dst], minlength=len(keys))
    Z = X[src[first]] - X[dst[first]]
    vol = ball_volume(R / 2, n)
    lengths = np.linalg.norm(Z, axis=1)
    order = np.lexsort(tuple(np.round(Z[:, ::-1], 9).T) + (np.round(lengths, 9),))
    order = order[lengths[order] <= z_cutoff + 1e-9]
    Z = Z[order].reshape(len(order), n)
    keys = [tuple(int(x) for x in keys[i]) for i in order]
    eta = sums[order] / vol
    return Autocorrelation(Z, keys, eta, vol)


def q_grid(extent: float, resolution: int) -> np.ndarray:
    """Square grid of wave vectors in [-extent, extent]^2, shape (res, res, 2)."""
    axis = np.linspace(-extent, extent, resolution)
    qx, qy = np.meshgrid(axis, axis, indexing="ij")
    return np.stack([qx, qy], axis=-1)


def structure_factor(points: np.ndarray, w: np.ndarray, Q: np.ndarray, chunk: int = 4096) -> np.ndarray:
    """|sum_x w(x) exp(-i <q, x>)|^2 / #points for the rows of Q (direct sum)."""
    out = np.empty(len(Q))
    npts = max(len(points), 1)
    for s in range(0, len(Q), chunk):
        phase = Q[s : s + chunk] @ points.T
        re = np.cos(phase) @ w
        im = np.sin(phase) @ w
        out[s : s + chunk] = (re * re + im * im) / npts
    return out


@dataclass
class Diffraction:
    grid: np.ndarray  # (res, res, 2)
    intensity: np.ndarray  # (res, res)
    scores: dict  # generator index -> relative L2 deviation
    score: float


def diffraction_intensity(patch: ModelSetPatch, grid: np.ndarray | None = None, weights=None, extent: float = 2 * np.pi, resolution: int = 201) -> Diffraction:
    """Structure factor on a planar q-grid plus a symmetry score.

    The score for a generator g is |I - I o g| / |I| (L2 over the grid),
    with I(g q) evaluated directly rather than interpolated.  For n > 2
    the grid is the plane spanned by the first two physical axes.
    """
    if len(patch) == 0:
        raise AnalysisError("empty patch")
    if grid is None:
        grid = q_grid(extent, resolution)
    n = patch.physical.shape[1]
    shape = grid.shape[:-1]
    Q = grid.reshape(-1, 2)
    Qn = np.zeros((len(Q), n))
    Qn[:, :2] = Q
    w = _weights(patch, weights)
    X = patch.physical
    I = structure_factor(X, w, Qn)
    norm = float(np.linalg.norm(I))
    scores = {}
    for gi, g in enumerate(patch.dec.cluster.generators_float()):
        Ig = structure_factor(X, w, Qn @ g.T)
        scores[gi] = float(np.linalg.norm(I - Ig) / norm)
    return Diffraction(grid, I.reshape(shape), scores, max(scores.values()) if scores else 0.0)


# ---------------------------------------------------------------------------
# report


@dataclass
class AnalysisReport:
    r_pack: float | None = None
    r_cover: float | None = None
    density: list = field(default_factory=list)
    occupation: dict | None = None
    self_similarity: dict | None = None
    autocorrelation: list = field(default_factory=list)
    diffraction: dict | None = None

    def to_json(self) -> dict:
        return {
            "r_pack": self.r_pack,
            "r_cover": self.r_cover,
            "density": [{"r": r, "ratio": v} for r, v in self.density],
            "occupation": self.occupation,
            "self_similarity": self.self_similarity,
            "autocorrelation": self.autocorrelation,
            "diffraction": self.diffraction,
        }


ANALYSES = ("delone", "density", "occupation", "selfsim", "autocorrelation", "diffraction")


def analyze(patch: ModelSetPatch, which=ANALYSES, seed: int = 0, diffraction_resolution: int = 101) -> AnalysisReport:
    """Run the requested analyses with default parameters."""
    rep = AnalysisReport()
    R = float(patch.radius)
    if "delone" in which:
        rep.r_pack, rep.r_cover = delone_radii(patch)
    if "density" in which:
        rep.density = density_estimate(patch, [Fraction(patch.radius) * j / 4 for j in (1, 2, 3, 4)])
    if "occupation" in which:
        occ = occupation_stats(patch)
        rep.occupation = {
            "histogram": {str(k_): v for k_, v in occ.histogram.items()},
            "mean_fraction": occ.mean_fraction,
            "interior_points": occ.interior_points,
        }
    if "selfsim" in which:
        try:
            best, allres = self_similarity_search(patch, seed=seed)
            rep.self_similarity = {
                "best": best.__dict__,
                "tested": [r.__dict__ for r in allres],
            }
        except AnalysisError as exc:
            rep.self_similarity = {"error": str(exc)}
    if "autocorrelation" in which:
        ac = autocorrelation(patch, min(3.0, R / 2))
        rep.autocorrelation = [{"z": z.tolist(), "eta": float(e)} for z, e in zip(ac.z, ac.eta)]
    if "diffraction" in which:
        dif = diffraction_intensity(patch, resolution=diffraction_resolution)
        rep.diffraction = {
            "resolution": diffraction_resolution,
            "I0": float(dif.intensity[diffraction_resolution // 2, diffraction_resolution // 2]),
            "scores": {str(k_): v for k_, v in dif.scores.items()},
            "score": dif.score,
        }
    return rep

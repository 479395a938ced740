"""Finite patches of the model set: every selected lattice point whose
physical image lies in the closed ball of radius R.

A lattice point ``m`` is selected when its fibre ``m + E`` meets the open
shifted cube.  Writing the fibre as ``m - v - B^T u`` with ``u`` in R^n
(``B`` the n x k matrix of cluster vectors) the strip test becomes 2k
half-space constraints on ``u``::

    m_i - v_i - 1 < <u, e_i> < m_i - v_i

and the physical point is ``B m = kappa^2 u + B x`` with ``x`` in the cube,
so ``|u|`` is bounded by ``(R + D) / kappa^2`` where ``D`` bounds ``|B x|``.
The branch-and-bound search fixes ``m_1, m_2, ...`` in turn and keeps the
feasible region of ``u`` explicitly: a convex polygon clipped by each slab
when n = 2; otherwise the intersection of the parallelepipeds cut out by
n-subsets of the fixed slabs, a cheap relaxation of the same region.  A
subtree dies as soon as the region is empty.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exactnum import FieldElement, fe_sign
from .superspace import SuperspaceDecomposition, _gram
from .window import BoundaryAmbiguous, WindowSpec, coset_indices, interior_cosets, strip_margins

DEFAULT_NODE_LIMIT = 20_000_000
NAIVE_BOX_LIMIT = 10_000_000
_POLYGON_SIDES = 64
_MAX_SUBSETS = 32


class ResourceLimitExceeded(RuntimeError):
    """The enumeration visited more nodes (or candidates) than allowed."""


def node_limit_from_env(default: int = DEFAULT_NODE_LIMIT) -> int:
    raw = os.environ.get("QCPM_NODE_LIMIT")
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"QCPM_NODE_LIMIT must be an integer, got {raw!r}") from None
    if value <= 0:
        raise ValueError("QCPM_NODE_LIMIT must be positive")
    return value


def as_radius(R) -> Fraction:
    """Radius as an exact rational (accepts '41/2', ints, Fractions)."""
    if isinstance(R, float):
        R = Fraction(R).limit_denominator(10**9)
    R = Fraction(R)
    if R <= 0:
        raise ValueError("radius must be positive")
    return R


@dataclass
class ModelSetPatch:
    dec: SuperspaceDecomposition = field(repr=False)
    window: WindowSpec = field(repr=False)
    radius: Fraction
    m: np.ndarray  # N x k int64, lexicographically sorted
    physical: np.ndarray  # N x n
    internal: np.ndarray  # N x d', kappa-scaled E' coordinates
    component: np.ndarray  # N x r coset labels
    margin: np.ndarray  # N strip margins
    stats: dict = field(default_factory=dict)
    _index: dict | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.m)

    @property
    def k(self) -> int:
        return self.dec.k

    def index_of(self, m) -> int | None:
        if self._index is None:
            self._index = {tuple(int(x) for x in row): i for i, row in enumerate(self.m)}
        return self._index.get(tuple(int(x) for x in m))

    def exact_physical(self, i: int) -> tuple:
        """Exact physical coordinates of point ``i`` as field elements."""
        C, L = self.dec.cluster.coefficient_tensor()
        row = (self.m[i] @ C.reshape(self.k, -1)).reshape(C.shape[1], C.shape[2])
        N = self.dec.cluster.conductor
        return tuple(FieldElement(N, [int(c) for c in coords], L) for coords in row)

    def exact_physical_numerators(self) -> tuple[np.ndarray, int]:
        """Integer numerators (N, n, d) over a common denominator for all points."""
        C, L = self.dec.cluster.coefficient_tensor()
        num = (self.m @ C.reshape(self.k, -1)).reshape(len(self.m), C.shape[1], C.shape[2])
        return num, L

    def component_labels(self) -> list[tuple[int, ...]]:
        return [tuple(int(x) for x in row) for row in self.component]


# ---------------------------------------------------------------------------
# shared geometry


def _zonotope_bound(V: np.ndarray) -> float:
    """Upper bound for |B x| over the unit cube (exact for n = 2)."""
    k, n = V.shape
    if n == 2:
        gens = V.copy()
        flip = (gens[:, 1] < 0) | ((gens[:, 1] == 0) & (gens[:, 0] < 0))
        gens[flip] *= -1
        order = np.argsort(np.arctan2(gens[:, 1], gens[:, 0]))
        gens = gens[order]
        base = V[flip].sum(axis=0)  # the cube corner mapped to the zonotope's lowest vertex
        verts = base + np.vstack([np.zeros(2), np.cumsum(gens, axis=0), gens.sum(axis=0) - np.cumsum(gens, axis=0)])
        return float(np.linalg.norm(verts, axis=1).max()) * (1 + 1e-12) + 1e-12
    lo = np.minimum(V, 0).sum(axis=0)
    hi = np.maximum(V, 0).sum(axis=0)
    return float(np.linalg.norm(np.maximum(-lo, hi))) * (1 + 1e-12) + 1e-12


@dataclass(frozen=True)
class _Problem:
    V: np.ndarray  # k x n
    v: np.ndarray  # k
    eps: float
    rho: float
    node_limit: int


def _make_problem(dec: SuperspaceDecomposition, window: WindowSpec, R: Fraction, node_limit: int) -> _Problem:
    V = dec.cluster.vectors_float()
    k2 = float(dec.kappa2)
    D = _zonotope_bound(V)
    rho = (float(R) + D) / k2 * (1 + 1e-9) + window.epsilon
    return _Problem(V, window.shift_f, window.epsilon, rho, node_limit)


def _start_polygon(rho: float) -> np.ndarray:
    t = (np.arange(_POLYGON_SIDES) + 0.5) * 2 * np.pi / _POLYGON_SIDES
    r = rho / math.cos(np.pi / _POLYGON_SIDES)
    return np.column_stack([r * np.cos(t), r * np.sin(t)])


def _clip(P: np.ndarray, a: np.ndarray, b: float) -> np.ndarray:
    """Intersect a convex polygon with {u : a.u <= b}."""
    s = P @ a - b
    inside = s <= 0
    if inside.all():
        return P
    if not inside.any():
        return P[:0]
    out = []
    n = len(P)
    for i in range(n):
        j = (i + 1) % n
        if inside[i]:
            out.append(P[i])
        if inside[i] != inside[j]:
            t = s[i] / (s[i] - s[j])
            out.append(P[i] + t * (P[j] - P[i]))
    return np.array(out) if out else P[:0]


def _value_order(lo: int, hi: int) -> list[int]:
    """Integers in [lo, hi] by increasing |m|, ties negative first."""
    return sorted(range(lo, hi + 1), key=lambda x: (abs(x), x))


# ---------------------------------------------------------------------------
# branch and bound


class _Search:
    """Depth-first enumeration of lattice points with a feasible u-region."""

    def __init__(self, prob: _Problem):
        self.prob = prob
        self.k, self.n = prob.V.shape
        self.nodes = 0
        self.pruned = 0
        self.leaves: list[tuple[int, ...]] = []

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.prob.node_limit:
            raise ResourceLimitExceeded(
                f"branch-and-bound exceeded the node limit of {self.prob.node_limit}; raise QCPM_NODE_LIMIT"
            )

    # planar case: explicit polygons
    def _range2(self, P, i):
        proj = P @ self.prob.V[i]
        lo = math.ceil(self.prob.v[i] + proj.min() - self.prob.eps)
        hi = math.floor(self.prob.v[i] + 1 + proj.max() + self.prob.eps)
        return lo, hi

    def _child2(self, P, i, mi):
        e = self.prob.V[i]
        c = mi - self.prob.v[i]
        Q = _clip(P, e, c + self.prob.eps)
        if len(Q) == 0:
            return Q
        return _clip(Q, -e, -(c - 1 - self.prob.eps))

    def run2(self, prefix=(), P=None):
        if P is None:
            P = _start_polygon(self.prob.rho)
            for i, mi in enumerate(prefix):
                P = self._child2(P, i, mi)
                if len(P) == 0:
                    return
        stack = [(tuple(prefix), P)]
        k = self.k
        while stack:
            pre, P = stack.pop()
            self._tick()
            i = len(pre)
            if i == k:
                self.leaves.append(pre)
                continue
            lo, hi = self._range2(P, i)
            kids = []
            for mi in _value_order(lo, hi):
                Q = self._child2(P, i, mi)
                if len(Q) < 1:
                    self.pruned += 1
                    continue
                kids.append((pre + (mi,), Q))
            stack.extend(reversed(kids))

    # general case: intersect the bounds implied by n-subsets of the fixed
    # coordinates (each subset pins u to a parallelepiped) with the ball
    def _subsets(self, depth):
        cache = self.__dict__.setdefault("_subset_cache", {})
        if depth not in cache:
            V = self.prob.V
            mats = []
            for S in itertools.combinations(range(depth - 1, -1, -1), self.n):
                W = V[list(S)]
                if abs(np.linalg.det(W)) < 1e-9:
                    continue
                mats.append((list(S), np.linalg.inv(W)))
                if len(mats) >= _MAX_SUBSETS:
                    break
            cache[depth] = mats
        return cache[depth]

    def _interval(self, pre, i):
        e = self.prob.V[i]
        r = self.prob.rho * float(np.linalg.norm(e))
        lo, hi = -r, r
        if len(pre) >= self.n:
            c = np.asarray(pre, dtype=float) - self.prob.v[: len(pre)]
            mid = c - 0.5
            half = 0.5 + self.prob.eps
            for S, Winv in self._subsets(len(pre)):
                w = e @ Winv
                a = float(w @ mid[S])
                b = float(np.abs(w).sum() * half)
                lo, hi = max(lo, a - b), min(hi, a + b)
        return lo, hi

    def runN(self, prefix=()):
        k = self.k
        stack = [tuple(prefix)]
        while stack:
            pre = stack.pop()
            self._tick()
            i = len(pre)
            if i == k:
                self.leaves.append(pre)
                continue
            blo, bhi = self._interval(pre, i)
            lo = math.ceil(self.prob.v[i] + blo - self.prob.eps)
            hi = math.floor(self.prob.v[i] + 1 + bhi + self.prob.eps)
            if lo > hi:
                self.pruned += 1
                continue
            stack.extend(pre + (mi,) for mi in reversed(_value_order(lo, hi)))

    def run(self, prefix=()):
        if self.n == 2:
            self.run2(prefix)
        else:
            self.runN(prefix)


def _search_task(args):
    prob, prefixes = args
    s = _Search(prob)
    for p in prefixes:
        s.run(p)
    return s.leaves, s.nodes, s.pruned


def _top_prefixes(prob: _Problem) -> list[tuple[int]]:
    s = _Search(prob)
    if s.n == 2:
        lo, hi = s._range2(_start_polygon(prob.rho), 0)
    else:
        blo, bhi = s._interval((), 0)
        lo = math.ceil(prob.v[0] + blo - prob.eps)
        hi = math.floor(prob.v[0] + 1 + bhi + prob.eps)
    return [(mi,) for mi in _value_order(lo, hi)]


# ---------------------------------------------------------------------------
# selection filter shared by both enumerators


class _ExactNorm:
    """Decide |sum m_i e_i|^2 <= R^2, exactly near the boundary."""

    def __init__(self, dec: SuperspaceDecomposition, R: Fraction):
        self.dec = dec
        self.R2 = R * R
        self.V = dec.cluster.vectors_float()
        self._G = None

    def _exact_le(self, m) -> bool:
        if self._G is None:
            self._G = _gram(self.dec.cluster)
        G = self._G
        k = len(m)
        acc = FieldElement.rational(-self.R2, self.dec.cluster.conductor)
        for i in range(k):
            if m[i]:
                for j in range(k):
                    if m[j]:
                        acc = acc + G[i][j] * (int(m[i]) * int(m[j]))
        return fe_sign(acc) <= 0

    def __call__(self, M: np.ndarray) -> np.ndarray:
        P = M @ self.V
        sq = (P * P).sum(axis=1)
        R2 = float(self.R2)
        tol = 1e-9 * max(1.0, R2)
        keep = sq <= R2 - tol
        near = np.flatnonzero(np.abs(sq - R2) <= tol)
        for idx in near:
            keep[idx] = self._exact_le(M[idx])
        return keep


def _select(dec, window, R, M, norm=None):
    """Apply the ball and strip tests to candidate rows; returns a patch."""
    k = dec.k
    M = np.asarray(M, dtype=np.int64).reshape(-1, k)
    if len(M):
        M = np.unique(M, axis=0)  # lexicographic order
    norm = norm or _ExactNorm(dec, R)
    if len(M):
        M = M[norm(M)]
    margin = strip_margins(M, window)
    labels = coset_indices(M, dec)
    open_cosets = interior_cosets(dec)
    if labels.shape[1]:
        off = np.array(window.coset_offset or (0,) * labels.shape[1], dtype=np.int64)
        live = np.array([tuple(int(x) for x in row) in open_cosets for row in labels - off], dtype=bool)
    else:
        live = np.ones(len(M), dtype=bool)
    # points in boundary cosets sit on the window boundary whatever v is;
    # they are rejected by rule, not by a floating-point margin
    amb = live & (np.abs(margin) < window.epsilon)
    if amb.any():
        i = int(np.flatnonzero(amb)[0])
        raise BoundaryAmbiguous(M[i], margin[i])
    sel = live & (margin > 0)
    M, margin, labels = M[sel], margin[sel], labels[sel]
    V = dec.cluster.vectors_float()
    internal = dec.kappa * (M.astype(float) @ dec.internal_basis.T)
    return ModelSetPatch(dec, window, R, M, M.astype(float) @ V, internal, labels, margin)


# ---------------------------------------------------------------------------
# public API


def generate_patch(
    dec: SuperspaceDecomposition,
    window: WindowSpec,
    R,
    jobs: int = 1,
    node_limit: int | None = None,
) -> ModelSetPatch:
    """All selected lattice points with |sum m_i e_i| <= R, by branch and bound."""
    R = as_radius(R)
    t0 = time.perf_counter()
    prob = _make_problem(dec, window, R, node_limit or node_limit_from_env())
    if jobs <= 1:
        s = _Search(prob)
        s.run()
        leaves, nodes, pruned = s.leaves, s.nodes, s.pruned
    else:
        tops = _top_prefixes(prob)
        chunks = [tops[j::jobs] for j in range(jobs)]
        chunks = [c for c in chunks if c]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_search_task, [(prob, c) for c in chunks]))
        leaves = [x for r in results for x in r[0]]
        nodes = sum(r[1] for r in results) + 1
        pruned = sum(r[2] for r in results)
    patch = _select(dec, window, R, np.array(leaves, dtype=np.int64).reshape(-1, dec.k))
    patch.stats = {
        "method": "branch-and-bound",
        "nodes": int(nodes),
        "pruned": int(pruned),
        "candidates": len(leaves),
        "jobs": int(jobs),
        "wall_time": time.perf_counter() - t0,
    }
    return patch


def naive_box(dec: SuperspaceDecomposition, window: WindowSpec, R) -> tuple[np.ndarray, np.ndarray]:
    """Per-coordinate bounds of the exhaustive search box."""
    R = as_radius(R)
    prob = _make_problem(dec, window, R, 1)
    T = prob.rho * np.linalg.norm(prob.V, axis=1)
    lo = np.ceil(prob.v - T - prob.eps).astype(np.int64)
    hi = np.floor(prob.v + 1 + T + prob.eps).astype(np.int64)
    return lo, hi


def naive_patch(dec: SuperspaceDecomposition, window: WindowSpec, R, chunk: int = 500_000) -> ModelSetPatch:
    """Exhaustive oracle: scan the whole coordinate box."""
    R = as_radius(R)
    t0 = time.perf_counter()
    lo, hi = naive_box(dec, window, R)
    sizes = hi - lo + 1
    total = int(np.prod(sizes.astype(object)))
    if total > NAIVE_BOX_LIMIT:
        raise ResourceLimitExceeded(f"naive box has {total} candidates (limit {NAIVE_BOX_LIMIT})")
    norm = _ExactNorm(dec, R)
    V = dec.cluster.vectors_float()
    R2 = float(R) ** 2 * (1 + 1e-6) + 1e-6
    keep = []
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        M = np.empty((len(idx), dec.k), dtype=np.int64)
        for j in range(dec.k - 1, -1, -1):
            M[:, j] = lo[j] + idx % sizes[j]
            idx = idx // sizes[j]
        P = M @ V
        ok = (P * P).sum(axis=1) <= R2
        M = M[ok]
        ok = strip_margins(M, window) > -window.epsilon
        keep.append(M[ok])
    cand = np.vstack(keep) if keep else np.zeros((0, dec.k), dtype=np.int64)
    patch = _select(dec, window, R, cand, norm)
    patch.stats = {"method": "naive", "box": total, "candidates": len(cand), "wall_time": time.perf_counter() - t0}
    return patch


def neighbours(patch: ModelSetPatch, i: int) -> list[tuple[int, int, object]]:
    """Arithmetic neighbours m +- eps_j of point ``i``.

    Each entry is ``(j, sign, status)`` with status the neighbour's index
    in the patch, ``None`` when it is not selected, or ``"unknown"`` when
    it lies outside the ball and the patch cannot tell.
    """
    norm = _ExactNorm(patch.dec, patch.radius)
    m = patch.m[i]
    out = []
    cand = []
    for j in range(patch.k):
        for s in (1, -1):
            mm = m.copy()
            mm[j] += s
            cand.append((j, s, mm))
    inside = norm(np.array([c[2] for c in cand]))
    for (j, s, mm), ok in zip(cand, inside):
        idx = patch.index_of(mm)
        if idx is not None:
            out.append((j, s, idx))
        elif ok:
            out.append((j, s, None))
        else:
            out.append((j, s, "unknown"))
    return out


def occupied_counts(patch: ModelSetPatch) -> tuple[np.ndarray, np.ndarray]:
    """Occupied-neighbour count per point and whether all 2k neighbours are inside the ball."""
    k = patch.k
    N = len(patch)
    counts = np.zeros(N, dtype=np.int64)
    complete = np.ones(N, dtype=bool)
    if N == 0:
        return counts, complete
    norm = _ExactNorm(patch.dec, patch.radius)
    for j in range(k):
        for s in (1, -1):
            M = patch.m.copy()
            M[:, j] += s
            present = np.array([patch.index_of(row) is not None for row in M], dtype=bool)
            counts += present
            complete &= norm(M)
    return counts, complete

"""Shifted unit-cube window, strip membership, coset labels and the
per-coset acceptance polytopes in E'.

Everything here works in normalised lattice units: a lattice point is an
integer vector ``m`` and the window is ``v + [0, 1]^k`` with ``v`` in E'.
The strip test asks whether the fibre ``m + E`` meets the shifted cube.
Its margin is the largest ``s`` such that ``m - v - t`` lies in
``[s, 1 - s]^k`` for some ``t`` in E, i.e. ``1/2`` minus the sup-norm
distance from ``m - v - 1/2`` to E.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from .exactnum import FieldElement
from .superspace import Classification, SuperspaceDecomposition, classify_projection

DEFAULT_EPSILON = 1e-9


class BoundaryAmbiguous(RuntimeError):
    """A lattice point sits within epsilon of the window boundary; reshift v."""

    def __init__(self, m, margin):
        self.m = tuple(int(x) for x in m)
        self.margin = float(margin)
        super().__init__(
            f"lattice point {self.m} has strip margin {self.margin:.3e} inside the "
            "ambiguity band; choose another shift seed"
        )


@dataclass(frozen=True)
class WindowSpec:
    shift: tuple  # exact k-vector in E' (field elements)
    shift_f: np.ndarray
    seed: int | None
    epsilon: float = DEFAULT_EPSILON
    circuits: np.ndarray = field(default=None, repr=False)  # F x k, rows l1-normalised
    coset_offset: tuple = ()  # R v, integral; zero for shifts in E'


def circuits(dec: SuperspaceDecomposition) -> np.ndarray:
    """Minimal-support vectors h with sum h_i e_i = 0, normalised to |h|_1 = 1.

    These are the vertices of the l1 unit ball of E-perp, so the sup-norm
    distance of y to E equals max |h . y| over them.
    """
    V = dec.cluster.vectors_float()  # k x n
    k, n = V.shape
    out = []
    seen = set()
    for size in range(2, n + 2):
        for S in itertools.combinations(range(k), size):
            A = V[list(S)].T  # n x size
            _, sv, vt = np.linalg.svd(A)
            rank = int((sv > 1e-10 * max(1.0, sv.max())).sum())
            if size - rank != 1:
                continue
            h = vt[-1]
            if np.any(np.abs(h) < 1e-10):
                continue  # not minimal; a smaller circuit covers it
            full = np.zeros(k)
            full[list(S)] = h / np.abs(h).sum()
            j = int(np.flatnonzero(full)[0])
            if full[j] < 0:
                full = -full
            key = tuple(np.round(full, 9))
            if key not in seen:
                seen.add(key)
                out.append(full)
    return np.array(out).reshape(len(out), k)


def make_window(dec: SuperspaceDecomposition, rng_seed: int | None = 0, epsilon: float = DEFAULT_EPSILON) -> WindowSpec:
    """Draw v = pi'(u) for a seeded rational u with entries in (-1/2, 1/2)."""
    k = dec.k
    N = dec.cluster.conductor
    if classify_projection(dec) is Classification.DISCRETE or rng_seed is None:
        shift = tuple(FieldElement.rational(0, N) for _ in range(k))
    else:
        rng = np.random.default_rng(rng_seed)
        scale = 1 << 21
        ints = rng.integers(-(scale // 2) + 1, scale // 2, size=k)
        u = [Fraction(int(a), scale) for a in ints]
        shift = tuple(
            sum((dec.pi_prime[i][j] * u[j] for j in range(k) if u[j]), FieldElement.rational(0, N)) for i in range(k)
        )
    shift_f = np.array([float(x) for x in shift], dtype=float)
    return WindowSpec(shift, shift_f, rng_seed, epsilon, circuits(dec))


def transformed_window(window: WindowSpec, dec: SuperspaceDecomposition, gen_index: int) -> WindowSpec:
    """The image g W of the window under generator ``gen_index``.

    The induced signed permutation maps the cube onto itself up to the
    unit translation of its sign-flipped coordinates, so g W is the unit
    cube shifted by ``M v - 1_neg``.  That shift has an integral E''
    part, recorded as ``coset_offset``.
    """
    sp = dec.cluster.perms[gen_index]
    M = dec.cluster.induced_matrices()[gen_index]
    neg = np.array([1 if s < 0 else 0 for s in sp.signs])
    N = dec.cluster.conductor
    shift = tuple(
        sum((window.shift[j] * int(M[i, j]) for j in range(dec.k) if M[i, j]), FieldElement.rational(0, N)) - int(neg[i])
        for i in range(dec.k)
    )
    shift_f = M @ window.shift_f - neg
    R = dec.relation_matrix()
    offset = tuple(int(x) for x in (-(R @ neg))) if R.shape[0] else ()
    return WindowSpec(shift, shift_f, window.seed, window.epsilon, window.circuits, offset)


def strip_margins(M: np.ndarray, window: WindowSpec, chunk: int = 200_000) -> np.ndarray:
    """Vectorised strip margin for the rows of ``M`` (closed-form dual)."""
    M = np.asarray(M, dtype=float).reshape(-1, len(window.shift_f))
    H = window.circuits
    out = np.empty(len(M))
    if len(H) == 0:
        out.fill(0.5)
        return out
    for s in range(0, len(M), chunk):
        Y = M[s : s + chunk] - window.shift_f - 0.5
        out[s : s + chunk] = 0.5 - np.abs(Y @ H.T).max(axis=1)
    return out


def strip_margin_lp(m, window: WindowSpec, dec: SuperspaceDecomposition) -> float:
    """Strip margin by linear programming over (u, s): maximise s subject to
    s <= m_i - v_i - <u, e_i> <= 1 - s."""
    V = dec.cluster.vectors_float()
    k, n = V.shape
    a = np.asarray(m, dtype=float) - window.shift_f
    c = np.zeros(n + 1)
    c[-1] = -1.0
    ones = np.ones((k, 1))
    A = np.vstack([np.hstack([V, ones]), np.hstack([-V, ones])])
    b = np.concatenate([a, 1.0 - a])
    res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * n + [(None, 1.0)], method="highs")
    if res.status != 0:
        raise RuntimeError(f"strip LP failed: {res.message}")
    return float(-res.fun)


def strip_contains(m, window: WindowSpec, dec: SuperspaceDecomposition) -> tuple[bool, float]:
    """Is the fibre m + E inside the shifted cube's strip?  Returns (selected, margin)."""
    margin = strip_margin_lp(m, window, dec)
    if abs(margin) < window.epsilon:
        raise BoundaryAmbiguous(m, margin)
    return margin > 0, margin


def _coset_slice_margin(R: np.ndarray, ell) -> float:
    """max s with R x = ell and x in [s, 1 - s]^k."""
    r, k = R.shape
    c = np.zeros(k + 1)
    c[-1] = -1.0
    A_eq = np.hstack([R, np.zeros((r, 1))])
    ones = np.ones((k, 1))
    I = np.eye(k)
    A_ub = np.vstack([np.hstack([-I, ones]), np.hstack([I, ones])])
    b_ub = np.concatenate([np.zeros(k), np.ones(k)])
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=np.asarray(ell, float), bounds=[(None, None)] * (k + 1), method="highs")
    return -float(res.fun) if res.status == 0 else -1.0


def interior_cosets(dec: SuperspaceDecomposition) -> frozenset:
    """Coset labels whose cube slice meets the open unit cube.

    Points of any other coset project onto the boundary of the window (or
    miss it) whatever the shift in E', so they are never selected.
    """
    cached = getattr(dec, "_interior_cosets", None)
    if cached is not None:
        return cached
    R = dec.relation_matrix().astype(float)
    if R.shape[0] == 0:
        out = frozenset({()})
    else:
        lo = np.minimum(R, 0).sum(axis=1).astype(int)
        hi = np.maximum(R, 0).sum(axis=1).astype(int)
        # the slice margin is rational with small denominator when positive
        out = frozenset(
            ell
            for ell in itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)])
            if _coset_slice_margin(R, ell) > 1e-9
        )
    object.__setattr__(dec, "_interior_cosets", out)
    return out


def coset_index(m, dec: SuperspaceDecomposition) -> tuple[int, ...]:
    """Coordinates of pi'' m in the lattice pi''(Z^k): the dot products with
    the relation basis."""
    return tuple(int(x) for x in dec.relation_matrix() @ np.asarray(m, dtype=np.int64))


def coset_indices(M: np.ndarray, dec: SuperspaceDecomposition) -> np.ndarray:
    return np.asarray(M, dtype=np.int64) @ dec.relation_matrix().T


@dataclass(frozen=True)
class ComponentWindow:
    index: tuple[int, ...]
    vertices: np.ndarray  # in the orthonormal E' basis, kappa-scaled
    nonempty_interior: bool
    on_boundary: bool = False  # slice lies in the cube boundary
    equations: np.ndarray | None = field(default=None, repr=False)  # halfspaces a.x + b <= 0, kappa-scaled
    volume: float = 0.0  # (k - r)-volume of the cube slice, normalised units

    @property
    def active(self) -> bool:
        """Carries selected points: full-dimensional image, slice meets the open cube."""
        return self.nonempty_interior and not self.on_boundary

    def contains(self, internal: np.ndarray, tol: float = 0.0) -> np.ndarray:
        """Membership of kappa-scaled internal coordinates (rows)."""
        if self.equations is None:
            return np.zeros(len(internal), dtype=bool)
        vals = internal @ self.equations[:, :-1].T + self.equations[:, -1]
        return (vals <= tol).all(axis=1)


def _slice_vertices(R: np.ndarray, ell: np.ndarray, k: int) -> np.ndarray:
    """Vertices of {x in [0,1]^k : R x = ell}."""
    r = R.shape[0]
    if r == 0:
        return np.array(list(itertools.product((0.0, 1.0), repeat=k)))
    pts = []
    fixed_sets = np.array(list(itertools.product((0.0, 1.0), repeat=k - r)))
    for F in itertools.combinations(range(k), r):
        RF = R[:, F]
        if abs(np.linalg.det(RF)) < 1e-12:
            continue
        rest = [i for i in range(k) if i not in F]
        rhs = ell[None, :] - fixed_sets @ R[:, rest].T
        xF = np.linalg.solve(RF, rhs.T).T
        ok = ((xF > -1e-12) & (xF < 1 + 1e-12)).all(axis=1)
        if not ok.any():
            continue
        X = np.zeros((ok.sum(), k))
        X[:, rest] = fixed_sets[ok]
        X[:, list(F)] = np.clip(xF[ok], 0.0, 1.0)
        pts.append(X)
    if not pts:
        return np.zeros((0, k))
    P = np.vstack(pts)
    return np.unique(np.round(P, 12), axis=0)


def _affine_volume(X: np.ndarray, dim_expected: int) -> float:
    """``dim_expected``-volume of conv(X); zero when X spans less."""
    if len(X) <= 1:
        return 0.0
    C = X - X.mean(axis=0)
    _, sv, vt = np.linalg.svd(C, full_matrices=False)
    dim = int((sv > 1e-10).sum())
    if dim < dim_expected or dim == 0:
        return 0.0
    Y = C @ vt[:dim].T
    if dim == 1:
        return float(Y.max() - Y.min())
    try:
        return float(ConvexHull(Y).volume)
    except QhullError:
        return 0.0


def component_windows(window: WindowSpec, dec: SuperspaceDecomposition, with_volume: bool = False) -> list[ComponentWindow]:
    """All cosets whose cube slice is nonempty, with their E' polytopes,
    ordered lexicographically by coset index."""
    k = dec.k
    R = dec.relation_matrix().astype(float)
    r = R.shape[0]
    Q = dec.internal_basis  # d' x k
    d1 = Q.shape[0]
    lo = np.minimum(R, 0).sum(axis=1).astype(int)
    hi = np.maximum(R, 0).sum(axis=1).astype(int)
    open_cosets = interior_cosets(dec)
    out = []
    for ell in itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
        ell_arr = np.array(ell, dtype=float)
        X = _slice_vertices(R, ell_arr, k)
        if len(X) == 0:
            continue
        vol = _affine_volume(X, k - r) if with_volume else 0.0
        internal = dec.kappa * ((X + window.shift_f) @ Q.T)
        equations = None
        interior = False
        if d1 == 0:
            verts = np.zeros((1, 0))
        else:
            C = internal - internal.mean(axis=0)
            rank = np.linalg.matrix_rank(C, tol=1e-9) if len(C) > 1 else 0
            interior = rank == d1
            if interior and d1 >= 2:
                hull = ConvexHull(internal)
                verts_n = internal[hull.vertices]
                equations = hull.equations
            elif interior:
                verts_n = np.array([[internal.min()], [internal.max()]])
                equations = np.array([[1.0, -internal.max()], [-1.0, internal.min()]])
            else:
                verts_n = np.unique(np.round(internal, 12), axis=0)
            if d1 > 2:
                verts_n = verts_n[np.lexsort(verts_n.T[::-1])]
            verts = verts_n
        ell_t = tuple(int(x) for x in ell)
        out.append(
            ComponentWindow(ell_t, verts, bool(interior), ell_t not in open_cosets, equations, vol)
        )
    return out


def hausdorff(A: np.ndarray, B: np.ndarray) -> float:
    """Hausdorff distance between two finite point sets."""
    D = np.linalg.norm(A[:, None, :] - B[None, :, :], axis=2)
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))

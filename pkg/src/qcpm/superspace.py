"""Superspace decomposition R^k = E + E' + E''.

``E`` is the physical space spanned by the coordinate columns of the
cluster, ``E''`` the span of the integer relations among the cluster
vectors and ``E'`` the remaining (dense) part of the internal space.  All
projectors are exact; float shadows are kept for geometry.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree

from .cluster import GCluster
from .exactnum import (
    FieldElement,
    fe_sign,
    fmat_equal,
    fmat_float,
    fmat_identity,
    fmat_mul,
    fmat_transpose,
    hnf,
    integer_kernel,
    rational_inverse,
    rational_kernel_over_Q,
)


class Classification(str, enum.Enum):
    DENSE = "Dense"
    DISCRETE = "Discrete"


class DecompositionError(RuntimeError):
    """An exact invariant of the decomposition failed."""


@dataclass(frozen=True)
class SuperspaceDecomposition:
    cluster: GCluster
    kappa2: FieldElement
    pi: list
    pi_prime: list
    pi_dprime: list  # rational entries (Fraction)
    relations: list  # HNF rows, integer
    dims: tuple[int, int, int]
    internal_lattice_basis: list  # columns of (R^T R)^-1, Fractions
    internal_basis: np.ndarray  # d' x k orthonormal rows spanning E'
    pi_f: np.ndarray
    pi_prime_f: np.ndarray
    pi_dprime_f: np.ndarray

    @property
    def k(self) -> int:
        return self.cluster.k

    @property
    def n(self) -> int:
        return self.cluster.n

    @property
    def dim_internal(self) -> int:
        return self.dims[1]

    @property
    def kappa(self) -> float:
        return float(self.kappa2) ** 0.5

    def relation_matrix(self) -> np.ndarray:
        """r x k integer matrix of relation vectors (rows)."""
        return np.array(self.relations, dtype=np.int64).reshape(len(self.relations), self.k)


def kappa_squared(cluster: GCluster) -> FieldElement:
    """Sum of the squared first coordinates of e_1..e_k."""
    acc = FieldElement.rational(0, cluster.conductor)
    for v in cluster.vectors:
        acc = acc + v[0] * v[0]
    if fe_sign(acc) <= 0:
        raise DecompositionError("kappa^2 must be positive")
    return acc


def _gram(cluster: GCluster):
    vs = cluster.vectors
    k = len(vs)
    G = [[None] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            acc = vs[i][0] * vs[j][0]
            for t in range(1, cluster.n):
                acc = acc + vs[i][t] * vs[j][t]
            G[i][j] = G[j][i] = acc
    return G


def physical_projector(cluster: GCluster):
    """pi = (<e_i, e_j> / kappa^2)_{ij}, exact."""
    kinv = kappa_squared(cluster).inverse()
    return [[x * kinv for x in row] for row in _gram(cluster)]


def _frac_mat_to_fe(M, conductor):
    return [[FieldElement.rational(x, conductor) for x in row] for row in M]


def _orthogonal_basis(P):
    """Exact Gram-Schmidt on the columns of projector P, then float normalisation."""
    k = len(P)
    cols = [[P[i][j] for i in range(k)] for j in range(k)]
    basis = []
    norms = []
    for c in cols:
        v = list(c)
        for b, nb in zip(basis, norms):
            coef = _fdot(v, b) / nb
            v = [x - coef * y for x, y in zip(v, b)]
        nv = _fdot(v, v)
        if nv.is_zero():
            continue
        basis.append(v)
        norms.append(nv)
    out = np.array([[float(x) for x in b] for b in basis], dtype=float).reshape(len(basis), k)
    if len(out):
        out /= np.sqrt(np.array([float(nb) for nb in norms]))[:, None]
    return out


def _fdot(a, b):
    acc = a[0] * b[0]
    for x, y in zip(a[1:], b[1:]):
        acc = acc + x * y
    return acc


def _trace(M):
    acc = M[0][0]
    for i in range(1, len(M)):
        acc = acc + M[i][i]
    return acc


def _is_zero_mat(M):
    return all(x == 0 for row in M for x in row)


def verify_decomposition(dec: SuperspaceDecomposition) -> list[str]:
    """Run the exact invariant suite; return a list of failures (empty if ok)."""
    N = dec.cluster.conductor
    k = dec.k
    P, P1 = dec.pi, dec.pi_prime
    P2 = _frac_mat_to_fe(dec.pi_dprime, N)
    I = fmat_identity(k, N)
    failures = []
    named = {"pi": P, "pi'": P1, "pi''": P2}
    for name, M in named.items():
        if not fmat_equal(M, fmat_transpose(M)):
            failures.append(f"{name} not symmetric")
        if not fmat_equal(fmat_mul(M, M), M):
            failures.append(f"{name} not idempotent")
    for (a, A), (b, B) in itertools.combinations(named.items(), 2):
        if not _is_zero_mat(fmat_mul(A, B)):
            failures.append(f"{a}{b} != 0")
    total = [[P[i][j] + P1[i][j] + P2[i][j] for j in range(k)] for i in range(k)]
    if not fmat_equal(total, I):
        failures.append("pi + pi' + pi'' != I")
    for gi, g in enumerate(dec.cluster.induced_matrices()):
        G = [[FieldElement.rational(int(x), N) for x in row] for row in g]
        for name, M in named.items():
            if not fmat_equal(fmat_mul(G, M), fmat_mul(M, G)):
                failures.append(f"{name} does not commute with generator {gi}")
    n, d1, d2 = dec.dims
    if _trace(P) != n:
        failures.append("trace pi != n")
    if _trace(P2) != len(dec.relations):
        failures.append("trace pi'' != rank(relations)")
    if _trace(P1) != k - n - len(dec.relations):
        failures.append("trace pi' != k - n - rank(relations)")
    for r in dec.relations:
        for t in range(dec.n):
            acc = sum((c * v[t] for c, v in zip(r, dec.cluster.vectors) if c), FieldElement.rational(0, N))
            if not acc.is_zero():
                failures.append(f"relation {r} does not annihilate the cluster")
                break
    return failures


def decompose(cluster: GCluster, verify: bool = True) -> SuperspaceDecomposition:
    """Exact projectors pi, pi', pi'' and the relation lattice of ``cluster``."""
    N = cluster.conductor
    k, n = cluster.k, cluster.n
    kappa2 = kappa_squared(cluster)
    P = physical_projector(cluster)
    coords = [[cluster.vectors[i][t] for i in range(k)] for t in range(n)]
    relations = rational_kernel_over_Q(coords)
    r = len(relations)
    if r:
        Rt = [[Fraction(x) for x in row] for row in relations]  # r x k
        RtR = [[sum(Rt[a][i] * Rt[b][i] for i in range(k)) for b in range(r)] for a in range(r)]
        RtR_inv = rational_inverse(RtR)
        # pi'' = R (R^T R)^-1 R^T
        tmp = [[sum(RtR_inv[a][b] * Rt[b][i] for b in range(r)) for i in range(k)] for a in range(r)]
        P2 = [[sum(Rt[a][i] * tmp[a][j] for a in range(r)) for j in range(k)] for i in range(k)]
        lattice_basis = [[RtR_inv[a][b] for a in range(r)] for b in range(r)]
    else:
        P2 = [[Fraction(0)] * k for _ in range(k)]
        lattice_basis = []
    P2fe = _frac_mat_to_fe(P2, N)
    I = fmat_identity(k, N)
    P1 = [[I[i][j] - P[i][j] - P2fe[i][j] for j in range(k)] for i in range(k)]
    d1 = k - n - r
    dec = SuperspaceDecomposition(
        cluster=cluster,
        kappa2=kappa2,
        pi=P,
        pi_prime=P1,
        pi_dprime=P2,
        relations=relations,
        dims=(n, d1, r),
        internal_lattice_basis=lattice_basis,
        internal_basis=_orthogonal_basis(P1) if d1 else np.zeros((0, k)),
        pi_f=fmat_float(P),
        pi_prime_f=fmat_float(P1),
        pi_dprime_f=np.array([[float(x) for x in row] for row in P2], dtype=float),
    )
    if verify:
        failures = verify_decomposition(dec)
        if failures:
            raise DecompositionError("; ".join(failures))
    if dec.internal_basis.shape[0] != d1:
        raise DecompositionError("E' basis has the wrong dimension")
    return dec


def classify_projection(dec: SuperspaceDecomposition) -> Classification:
    """Dense iff E' is nontrivial; Discrete means a periodic crystal."""
    return Classification.DENSE if dec.dims[1] > 0 else Classification.DISCRETE


@dataclass(frozen=True)
class SchemeReport:
    classification: Classification
    injectivity_ok: bool
    density_diagnostic: dict
    coset_count_bound: int


def _free_coordinates(dec):
    """Coordinates complementary to the HNF pivots of the relation basis."""
    pivots = set()
    for row in dec.relations:
        pivots.add(next(i for i, x in enumerate(row) if x))
    return [i for i in range(dec.k) if i not in pivots]


def max_gap(points: np.ndarray, dim: int, radius: float, seed: int = 0, n_probes: int = 4000) -> float:
    """Largest distance from a probe in the centred ball to the nearest point."""
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(n_probes, dim))
    g /= np.linalg.norm(g, axis=1)[:, None]
    probes = g * radius * rng.random(n_probes)[:, None] ** (1.0 / dim)
    if len(points) == 0:
        return float("inf")
    tree = cKDTree(points)
    d, _ = tree.query(probes)
    return float(d.max())


def scheme_check(dec: SuperspaceDecomposition, sample_radius: int, ball_radius: float = 0.5, max_points: int = 5_000_000) -> SchemeReport:
    """Check injectivity of p on the lattice exactly and probe the density of p'(L)."""
    if classify_projection(dec) is Classification.DISCRETE:
        raise ValueError("scheme_check requires a Dense decomposition")
    k = dec.k
    # ker(pi + pi') on Z^k must be exactly the relation lattice
    Ptilde = [[Fraction(int(i == j)) - dec.pi_dprime[i][j] for j in range(k)] for i in range(k)]
    kernel = integer_kernel(Ptilde)
    rel_hnf = [row for row in hnf(dec.relations)[0] if any(row)] if dec.relations else []
    injectivity_ok = kernel == rel_hnf
    free = _free_coordinates(dec)
    side = 2 * sample_radius + 1
    if side ** len(free) > max_points:
        raise ValueError(f"sample box of {side}^{len(free)} points exceeds {max_points}")
    rng = np.arange(-sample_radius, sample_radius + 1)
    grids = np.meshgrid(*([rng] * len(free)), indexing="ij")
    M = np.zeros((grids[0].size, k))
    for c, g in zip(free, grids):
        M[:, c] = g.ravel()
    internal = M @ dec.internal_basis.T
    inside = internal[np.linalg.norm(internal, axis=1) <= ball_radius]
    gap = max_gap(inside, dec.dims[1], ball_radius)
    R = dec.relation_matrix()
    bound = int(np.prod(np.abs(R).sum(axis=1) + 1)) if len(R) else 1
    return SchemeReport(
        classification=Classification.DENSE,
        injectivity_ok=injectivity_ok,
        density_diagnostic={
            "sample_radius": sample_radius,
            "ball_radius": ball_radius,
            "points_in_ball": int(len(inside)),
            "max_gap": gap,
        },
        coset_count_bound=bound,
    )


@dataclass(frozen=True)
class StarImage:
    coords: np.ndarray  # pi'(kappa m) in the orthonormal E' basis
    exact: tuple  # pi' m as field elements (kappa-free)


def star_map(dec: SuperspaceDecomposition, m) -> StarImage:
    """Internal-space image of the lattice point kappa*m."""
    m = [int(x) for x in m]
    exact = tuple(
        sum((dec.pi_prime[i][j] * m[j] for j in range(dec.k) if m[j]), FieldElement.rational(0, dec.cluster.conductor))
        for i in range(dec.k)
    )
    coords = dec.kappa * (dec.internal_basis @ np.array(m, dtype=float))
    return StarImage(coords, exact)


def decomposition_to_json(dec: SuperspaceDecomposition) -> dict:
    def mat(M):
        return [[str(x) for x in row] for row in M]

    return {
        "k": dec.k,
        "n": dec.n,
        "conductor": dec.cluster.conductor,
        "kappa2": str(dec.kappa2),
        "dims": list(dec.dims),
        "classification": classify_projection(dec).value,
        "pi": mat(dec.pi),
        "pi_prime": mat(dec.pi_prime),
        "pi_dprime": mat(dec.pi_dprime),
        "pi_float": dec.pi_f.tolist(),
        "pi_prime_float": dec.pi_prime_f.tolist(),
        "pi_dprime_float": dec.pi_dprime_f.tolist(),
        "relations": [list(r) for r in dec.relations],
    }

"""G-clusters: orbit closure, antipodal pairing, canonical indexing and the
signed-permutation action of the generators on the cluster vectors."""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
import numpy as np

from .exactnum import FieldElement, fe, fe_embed, fe_sign, fmat_identity, fmat_mul, fmat_transpose, fmat_equal

DEFAULT_ORBIT_CAP = 10_000


class ClusterError(ValueError):
    """Invalid cluster input (non-orthogonal generator, runaway orbit, ...)."""


@dataclass(frozen=True)
class SignedPermutation:
    """``g e_j = signs[perm[j]] * e_{perm[j]}`` with 0-based indices."""

    perm: tuple[int, ...]
    signs: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.perm)

    def inverse_perm(self) -> tuple[int, ...]:
        inv = [0] * len(self.perm)
        for j, i in enumerate(self.perm):
            inv[i] = j
        return tuple(inv)

    def apply(self, x):
        """(g x)_i = s_i x_{g^-1(i)}."""
        inv = self.inverse_perm()
        return [self.signs[i] * x[inv[i]] for i in range(self.k)]

    def compose(self, other: "SignedPermutation") -> "SignedPermutation":
        """self after other."""
        perm = tuple(self.perm[other.perm[j]] for j in range(self.k))
        signs = [0] * self.k
        for j in range(self.k):
            signs[perm[j]] = self.signs[perm[j]] * other.signs[other.perm[j]]
        return SignedPermutation(perm, tuple(signs))


def induced_superspace_action(sp: SignedPermutation) -> np.ndarray:
    """k x k signed permutation matrix of the induced action on R^k."""
    M = np.zeros((sp.k, sp.k), dtype=int)
    for j, i in enumerate(sp.perm):
        M[i, j] = sp.signs[i]
    return M


Vector = tuple  # tuple of FieldElement


@dataclass(frozen=True)
class GCluster:
    n: int
    conductor: int
    vectors: tuple[Vector, ...]
    generators: tuple[tuple[tuple[FieldElement, ...], ...], ...]
    perms: tuple[SignedPermutation, ...]
    seeds: tuple[Vector, ...]
    shells: tuple[tuple[int, int], ...] = field(default=())

    @property
    def k(self) -> int:
        return len(self.vectors)

    def vectors_float(self) -> np.ndarray:
        """k x n array of the embedded cluster vectors."""
        return np.array([[float(x) for x in v] for v in self.vectors], dtype=float)

    def generators_float(self) -> list[np.ndarray]:
        return [np.array([[float(x) for x in row] for row in g], dtype=float) for g in self.generators]

    def induced_matrices(self) -> list[np.ndarray]:
        return [induced_superspace_action(p) for p in self.perms]

    def coefficient_tensor(self):
        """Integer tensor ``C`` (k, n, d) and denominator ``L`` such that the
        exact coordinates of ``sum m_i e_i`` are ``(m @ C.reshape(k, -1)) / L``
        in the power basis of Q(zeta_N)."""
        N = self.conductor
        vecs = [[x.embed(N) if x.conductor != N else x for x in v] for v in self.vectors]
        den = 1
        for v in vecs:
            for x in v:
                den = den * x.den // np.gcd(den, x.den)
        d = vecs[0][0].degree
        C = np.zeros((self.k, self.n, d), dtype=object)
        for i, v in enumerate(vecs):
            for j, x in enumerate(v):
                f = den // x.den
                for t, c in enumerate(x.num):
                    C[i, j, t] = c * f
        return C.astype(np.int64), int(den)


def _apply(g, x):
    return tuple(_sum(g[i][j] * x[j] for j in range(len(x))) for i in range(len(g)))


def _sum(terms):
    acc = None
    for t in terms:
        acc = t if acc is None else acc + t
    return acc


def _neg(x):
    return tuple(-c for c in x)


def is_orthogonal(g) -> bool:
    n = len(g)
    N = max(x.conductor for row in g for x in row)
    return fmat_equal(fmat_mul(fmat_transpose(g), g), fmat_identity(n, N))


def _orbit(seed, gens, cap):
    start = [seed, _neg(seed)]
    seen = set(start)
    order = list(start)
    frontier = list(start)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = _apply(g, x)
                if y not in seen:
                    seen.add(y)
                    order.append(y)
                    nxt.append(y)
                    if len(seen) > cap:
                        raise ClusterError(f"orbit exceeds the cap of {cap} points")
        frontier = nxt
    return order


def _embedded(x, bits=128):
    out = []
    for c in x:
        lo, hi = fe_embed(c, bits)
        out.append((lo + hi) / 2)
    return tuple(out)


def _exact_lex_key(a, b):
    # exact lexicographic comparison, used only to break embedded ties
    for x, y in zip(a, b):
        s = fe_sign(x - y)
        if s:
            return s
    return 0


def _representatives(orbit, n):
    """Pick one vector from each antipodal pair and fix their order."""
    if n == 2:
        seed = orbit[0]
        with mpmath.workprec(128):
            sx, sy = _embedded(seed)
            base = mpmath.atan2(sy, sx)
            keyed = []
            for x in orbit:
                px, py = _embedded(x)
                ang = (mpmath.atan2(py, px) - base) % (2 * mpmath.pi)
                keyed.append((ang, x))
        keyed.sort(key=lambda t: t[0])
        pts = [x for _, x in keyed]
        half = len(pts) // 2
        for i in range(half):
            if pts[i + half] != _neg(pts[i]):
                raise ClusterError("orbit is not centrally symmetric with equal radii")
        if half % 2 == 1:
            # odd number of pairs: alternate vertices hold one of each pair
            return pts[0::2]
        return pts[:half]
    reps = []
    for x in orbit:
        ex, enx = _embedded(x), _embedded(_neg(x))
        if ex > enx or (ex == enx and _exact_lex_key(x, _neg(x)) > 0):
            reps.append((ex, x))
    # descending lexicographic order of embedded coordinates, exact tie-break
    from functools import cmp_to_key

    def cmp(a, b):
        if a[0] != b[0]:
            return -1 if a[0] > b[0] else 1
        return -_exact_lex_key(a[1], b[1])

    reps.sort(key=cmp_to_key(cmp))
    return [x for _, x in reps]


def signed_permutation_for(cluster_vectors, g) -> SignedPermutation:
    """The signed permutation realised by physical matrix ``g`` on the cluster."""
    lookup = {}
    for i, v in enumerate(cluster_vectors):
        lookup[v] = (i, 1)
        lookup[_neg(v)] = (i, -1)
    k = len(cluster_vectors)
    perm = [0] * k
    signs = [0] * k
    for j, v in enumerate(cluster_vectors):
        img = _apply(g, v)
        if img not in lookup:
            raise ClusterError("generator does not act as a signed permutation of the cluster")
        i, s = lookup[img]
        perm[j] = i
        signs[i] = s
    if sorted(perm) != list(range(k)):
        raise ClusterError("generator action on antipodal pairs is not a permutation")
    return SignedPermutation(tuple(perm), tuple(signs))


def build_cluster(n, conductor, generators, seeds, orbit_cap: int = DEFAULT_ORBIT_CAP) -> GCluster:
    """Close the seeds under the group and index the antipodal pairs.

    Planar clusters are indexed per shell by polar angle measured from the
    seed: with an odd number of pairs the alternate orbit points are taken
    (a regular star through the seed), otherwise the half turn starting at
    the seed.  Other dimensions use the lexicographically larger member of
    each pair, sorted in descending lexicographic order.
    """
    gens = tuple(tuple(tuple(fe(x, conductor) if not isinstance(x, FieldElement) else x for x in row) for row in g) for g in generators)
    for idx, g in enumerate(gens):
        if len(g) != n or any(len(row) != n for row in g):
            raise ClusterError(f"generator {idx} is not {n}x{n}")
        if not is_orthogonal(g):
            raise ClusterError(f"generator {idx} is not orthogonal")
    seed_vecs = tuple(tuple(fe(x, conductor) if not isinstance(x, FieldElement) else x for x in s) for s in seeds)
    if not seed_vecs:
        raise ClusterError("at least one seed is required")
    vectors = []
    shells = []
    for s in seed_vecs:
        if len(s) != n:
            raise ClusterError("seed dimension mismatch")
        if all(c.is_zero() for c in s):
            raise ClusterError("seeds must be nonzero")
        known = set(vectors) | {_neg(v) for v in vectors}
        if s in known:
            continue
        orbit = _orbit(s, gens, orbit_cap)
        if any(x in known for x in orbit):
            raise ClusterError("seed orbits overlap")
        reps = _representatives(orbit, n)
        start = len(vectors)
        vectors.extend(reps)
        shells.append((start, len(vectors)))
        if 2 * len(vectors) > orbit_cap:
            raise ClusterError(f"cluster exceeds the cap of {orbit_cap} points")
    vectors = tuple(vectors)
    perms = tuple(signed_permutation_for(vectors, g) for g in gens)
    return GCluster(n, conductor, vectors, gens, perms, seed_vecs, tuple(shells))


def signed_permutation_of(index: int, cluster: GCluster) -> SignedPermutation:
    """Signed permutation of generator ``index``; re-verified exactly."""
    g = cluster.generators[index]
    sp = cluster.perms[index]
    for j, v in enumerate(cluster.vectors):
        i = sp.perm[j]
        target = cluster.vectors[i] if sp.signs[i] > 0 else _neg(cluster.vectors[i])
        if _apply(g, v) != target:
            raise ClusterError("stored signed permutation is inconsistent with the generator")
    return sp


def word_matrix(cluster: GCluster, word) -> tuple:
    """Physical matrix of a generator word (sequence of generator indices)."""
    N = cluster.conductor
    M = fmat_identity(cluster.n, N)
    for w in word:
        M = fmat_mul(M, [list(r) for r in cluster.generators[w]])
    return tuple(tuple(r) for r in M)

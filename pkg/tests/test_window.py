
import numpy as np
import pytest

from qcpm.exactnum import FieldElement, fmat_mul
from qcpm.presets import PRESETS, golden_ratio
from qcpm.superspace import star_map
from qcpm.window import (
    BoundaryAmbiguous,
    circuits,
    coset_index,
    component_windows,
    hausdorff,
    interior_cosets,
    make_window,
    strip_contains,
    strip_margin_lp,
    strip_margins,
    transformed_window,
)

from conftest import dec_of


def random_points(dec, count, spread, seed=0):
    rng = np.random.default_rng(seed)
    return rng.integers(-spread, spread + 1, size=(count, dec.k))


@pytest.mark.parametrize("name", PRESETS)
def test_shift_lies_in_internal_dense_space(name):
    dec = dec_of(name)
    w = make_window(dec, 7)
    N = dec.cluster.conductor
    v = [[x] for x in w.shift]
    zero = FieldElement.rational(0, N)
    for P in (dec.pi, [[FieldElement.rational(x, N) for x in row] for row in dec.pi_dprime]):
        assert all(x[0] == zero for x in fmat_mul(P, v))
    assert np.allclose(w.shift_f, dec.pi_prime_f @ w.shift_f)


def test_shift_is_seeded():
    dec = dec_of("d10-penrose")
    assert np.array_equal(make_window(dec, 3).shift_f, make_window(dec, 3).shift_f)
    assert not np.array_equal(make_window(dec, 3).shift_f, make_window(dec, 4).shift_f)
    assert np.all(make_window(dec_of("square"), 3).shift_f == 0)


@pytest.mark.parametrize("name", PRESETS)
def test_dual_margin_matches_linear_program(name):
    dec = dec_of(name)
    w = make_window(dec, 1)
    M = random_points(dec, 60, 3)
    fast = strip_margins(M, w)
    slow = np.array([strip_margin_lp(m, w, dec) for m in M])
    assert np.allclose(fast, slow, atol=1e-9)


def test_circuits_span_the_relations_of_e():
    dec = dec_of("d10-penrose")
    H = circuits(dec)
    V = dec.cluster.vectors_float()
    assert np.allclose(H @ V, 0, atol=1e-12)
    assert np.allclose(np.abs(H).sum(axis=1), 1)
    # in the plane any three of the five vectors are minimally dependent
    assert set((np.abs(H) > 1e-12).sum(axis=1)) == {3}


@pytest.mark.parametrize("name", ["d10-penrose", "d12", "d10-two-shell", "d8"])
def test_selection_matches_point_in_polytope(name):
    # independent oracle: the E' image of m lies inside the ConvexHull of its coset's window
    dec = dec_of(name)
    w = make_window(dec, 2)
    wins = {c.index: c for c in component_windows(w, dec)}
    M = random_points(dec, 4000, 4, seed=5)
    margin = strip_margins(M, w)
    keep = np.abs(margin) > 1e-6
    M, margin = M[keep], margin[keep]
    internal = dec.kappa * (M @ dec.internal_basis.T)
    for m, s, x in zip(M, margin, internal):
        c = wins.get(coset_index(m, dec))
        inside = c is not None and c.active and bool(c.contains(x[None, :], tol=-1e-9)[0])
        assert inside == (s > 0)


def test_d10_component_structure():
    dec = dec_of("d10-penrose")
    w = make_window(dec, 42)
    wins = component_windows(w, dec)
    assert [c.index for c in wins] == [(0,), (1,), (2,), (3,), (4,), (5,)]
    assert [c.index for c in wins if c.nonempty_interior] == [(1,), (2,), (3,), (4,)]
    assert [c.index for c in wins if c.active] == [(1,), (2,), (3,), (4,)]
    # reference polytopes built from star images of the unit vectors
    tau = float(golden_ratio(20))
    P = np.array([star_map(dec, np.eye(5, dtype=int)[i]).coords for i in range(5)])
    v = dec.kappa * (dec.internal_basis @ w.shift_f)
    expected = {1: v + P, 2: v - tau * P, 3: v + tau * P, 4: v - P}
    for c in wins[1:5]:
        assert hausdorff(c.vertices, expected[c.index[0]]) < 1e-9


@pytest.mark.parametrize("name", PRESETS)
def test_slice_volumes_partition_unity(name):
    dec = dec_of(name)
    wins = component_windows(make_window(dec, 1), dec, with_volume=True)
    R = dec.relation_matrix().astype(float)
    det = np.sqrt(np.linalg.det(R @ R.T)) if len(R) else 1.0
    assert sum(c.volume for c in wins) / det == pytest.approx(1.0, abs=1e-9)


def test_d12_boundary_cosets():
    # the slices with l = (-1, .) force x_3 = 1: their points sit on the window boundary
    dec = dec_of("d12")
    wins = component_windows(make_window(dec, 1), dec)
    full = [c.index for c in wins if c.nonempty_interior]
    assert set(interior_cosets(dec)) == {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert (-1, 0) in full
    assert [c.index for c in wins if c.active] == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_strip_contains_and_ambiguity():
    dec = dec_of("d10-penrose")
    w = make_window(dec, 1)
    M = random_points(dec, 500, 2)
    margins = strip_margins(M, w)
    i = int(np.argmax(margins))
    assert strip_contains(M[i], w, dec)[0]
    j = int(np.argmin(np.abs(margins)))
    tight = make_window(dec, 1, epsilon=abs(margins[j]) * 2 + 1e-12)
    with pytest.raises(BoundaryAmbiguous) as err:
        strip_contains(M[j], tight, dec)
    assert err.value.m == tuple(int(x) for x in M[j])


def test_discrete_square_has_full_margin():
    dec = dec_of("square")
    w = make_window(dec, 0)
    assert np.all(strip_margins(random_points(dec, 20, 3), w) == 0.5)


@pytest.mark.parametrize("name", ["d10-penrose", "d12"])
def test_transformed_window_is_covariant(name):
    dec = dec_of(name)
    w = make_window(dec, 9)
    M = random_points(dec, 300, 3)
    base = strip_margins(M, w)
    for gi, G in enumerate(dec.cluster.induced_matrices()):
        w2 = transformed_window(w, dec, gi)
        assert np.allclose(strip_margins(M @ G.T, w2), base)


def test_hausdorff():
    A = np.array([[0.0, 0.0], [1.0, 0.0]])
    assert hausdorff(A, A) == 0
    assert hausdorff(A, A + [0, 0.5]) == pytest.approx(0.5)

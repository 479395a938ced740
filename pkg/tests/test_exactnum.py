import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcpm.exactnum import (
    BoundaryPrecisionError,
    FieldElement,
    cos2pi,
    cyclotomic_poly,
    fe_embed,
    fe_sign,
    hnf,
    integer_kernel,
    parse_fe,
    sin2pi,
)

CONDUCTORS = [4, 5, 8, 12, 20]


def elements(N):
    d = len(cyclotomic_poly(N)) - 1
    coeff = st.integers(-6, 6)
    return st.builds(
        lambda cs, den: FieldElement(N, cs, den),
        st.lists(coeff, min_size=d, max_size=d),
        st.integers(1, 5),
    )


def numeric(x: FieldElement) -> complex:
    z = cmath.exp(2j * math.pi / x.conductor)
    return sum(float(c) * z**i for i, c in enumerate(x.coeffs))


def test_cyclotomic_polynomials():
    assert cyclotomic_poly(5) == (1, 1, 1, 1, 1)
    assert cyclotomic_poly(8) == (1, 0, 0, 0, 1)
    assert cyclotomic_poly(12) == (1, 0, -1, 0, 1)


def test_golden_identities():
    z = FieldElement.zeta(5)
    tau = -(z**2 + z**3)
    tau_c = -(z + z**4)
    assert (z + z**4) * (z**2 + z**3) == FieldElement.rational(-1, 5)
    assert tau * tau_c == FieldElement.rational(-1, 5)
    assert tau * tau == tau + 1
    assert abs(float(tau) - (1 + math.sqrt(5)) / 2) < 1e-15
    assert fe_sign(tau_c) == -1


def test_zeta_power_reduces():
    z = FieldElement.zeta(5)
    assert z**5 == FieldElement.rational(1, 5)
    assert 1 + z + z**2 + z**3 + z**4 == FieldElement.rational(0, 5)


def test_mixed_conductors_embed():
    a = FieldElement.zeta(4)  # i
    b = FieldElement.zeta(5)
    c = a * b
    assert c.conductor == 20
    assert abs(complex(c) - 1j * cmath.exp(2j * math.pi / 5)) < 1e-14


@pytest.mark.parametrize("N", [4, 8, 12, 20])
def test_cos_sin_pythagoras(N):
    for j in range(N):
        c, s = cos2pi(j, N), sin2pi(j, N)
        assert c * c + s * s == FieldElement.rational(1, N)
        assert abs(float(c) - math.cos(2 * math.pi * j / N)) < 1e-14
        assert abs(float(s) - math.sin(2 * math.pi * j / N)) < 1e-14


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(CONDUCTORS).flatmap(lambda N: st.tuples(elements(N), elements(N), elements(N))))
def test_field_axioms(abc):
    a, b, c = abc
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == FieldElement.rational(0, a.conductor)
    if not a.is_zero():
        assert a * a.inverse() == FieldElement.rational(1, a.conductor)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(CONDUCTORS).flatmap(elements))
def test_embedding_matches_complex_evaluation(a):
    assert abs(complex(a) - numeric(a)) < 1e-12
    lo, hi = fe_embed(a.conjugate() * a, 80)
    assert lo <= abs(numeric(a)) ** 2 + 1e-9 and hi >= abs(numeric(a)) ** 2 - 1e-9


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(CONDUCTORS).flatmap(elements))
def test_str_parse_round_trip(a):
    assert parse_fe(str(a), a.conductor) == a


def test_parse_examples():
    z = FieldElement.zeta(5)
    assert parse_fe("1/2 + 1/2*z^2 - z^3", 5) == Fraction(1, 2) + z**2 * Fraction(1, 2) - z**3
    assert parse_fe("-(z^2 + z^3)", 5) == -(z**2 + z**3)
    assert parse_fe("z^-1", 5) == z**4
    with pytest.raises(ValueError):
        parse_fe("1 + + ", 5)
    with pytest.raises(ValueError):
        parse_fe("w", 5)


def test_sign_and_order():
    z = FieldElement.zeta(5)
    tau = -(z**2 + z**3)
    assert fe_sign(tau - Fraction(1618, 1000)) == 1
    assert fe_sign(tau - Fraction(1619, 1000)) == -1
    assert fe_sign(FieldElement.rational(0, 5)) == 0
    assert tau > 1 and tau < 2
    # sqrt 5 = 2 tau - 1, compared with a very close rational
    sqrt5 = 2 * tau - 1
    assert fe_sign(sqrt5 - Fraction(2236067977499789696, 10**18)) == 1


def test_sine_needs_quarter_turn():
    with pytest.raises(ValueError):
        sin2pi(1, 5)


def test_sign_rejects_nonreal():
    with pytest.raises(ValueError):
        fe_sign(FieldElement.zeta(5))


def test_sign_precision_cap(monkeypatch):
    import qcpm.exactnum as ex

    z = FieldElement.zeta(5)
    tiny = (-(z + z**4)) ** 120  # conjugate golden ratio, about 2^-83, large coefficients
    assert fe_sign(tiny) == 1
    monkeypatch.setattr(ex, "SIGN_MAX_BITS", 64)
    with pytest.raises(BoundaryPrecisionError):
        fe_sign(tiny)


def _unimodular(U):
    return abs(round(np.linalg.det(np.array(U, dtype=float)))) == 1


def _is_hnf(H):
    pivots = []
    for i, row in enumerate(H):
        nz = [j for j, x in enumerate(row) if x]
        if not nz:
            assert all(not any(r) for r in H[i:])
            break
        p = nz[0]
        assert row[p] > 0
        if pivots:
            assert p > pivots[-1]
        for r in H[:i]:
            assert 0 <= r[p] < row[p]
        pivots.append(p)
    return True


def test_hnf_example():
    H, U = hnf([[2, 4], [1, 3]])
    assert H == [[1, 1], [0, 2]]
    assert U == [[1, -1], [-1, 2]]


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 4).flatmap(lambda r: st.integers(1, 5).flatmap(
    lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r))))
def test_hnf_properties(A):
    H, U = hnf(A)
    assert (np.array(U) @ np.array(A) == np.array(H)).all()
    assert _unimodular(U)
    assert _is_hnf(H)
    H2, _ = hnf(H)
    assert H2 == H


def test_integer_kernel_example():
    assert integer_kernel([[1, 2, 3]]) == [[1, 1, -1], [0, 3, -2]]
    assert integer_kernel([[1, 0], [0, 1]]) == []


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3).flatmap(lambda r: st.lists(st.lists(st.integers(-5, 5), min_size=4, max_size=4), min_size=r, max_size=r)))
def test_integer_kernel_is_saturated(A):
    K = integer_kernel(A)
    A_ = np.array(A)
    rank = np.linalg.matrix_rank(A_)
    assert len(K) == 4 - rank
    if not K:
        return
    K_ = np.array(K)
    assert (A_ @ K_.T == 0).all()
    # saturated: the gcd of the maximal minors of K is 1
    import itertools

    g = 0
    for cols in itertools.combinations(range(4), len(K)):
        g = math.gcd(g, int(round(np.linalg.det(K_[:, cols].astype(float)))))
    assert g == 1

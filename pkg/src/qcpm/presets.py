"""Registered clusters: dihedral D8, D10 (one and two shells), D12 and the
icosahedral group.  Planar rotations need sines, so their conductors are
multiples of 4."""

from __future__ import annotations

from fractions import Fraction

from .cluster import GCluster, build_cluster
from .exactnum import FieldElement, cos2pi, sin2pi

PRESETS = ("d8", "d10-penrose", "d10-two-shell", "d12", "icosahedral")


def _rotation(order: int, conductor: int):
    """Rotation by 2 pi / order."""
    j = conductor // order
    c, s = cos2pi(j, conductor), sin2pi(j, conductor)
    return ((c, -s), (s, c))


def _reflection(conductor: int):
    one = FieldElement.rational(1, conductor)
    zero = FieldElement.rational(0, conductor)
    return ((one, zero), (zero, -one))


def _dihedral(order: int, conductor: int, seeds):
    return {
        "n": 2,
        "conductor": conductor,
        "generators": [_rotation(order, conductor), _reflection(conductor)],
        "seeds": seeds,
    }


def golden_ratio(conductor: int = 5) -> FieldElement:
    """tau = (1 + sqrt 5) / 2 = -(z^2 + z^3) in Q(zeta_5)."""
    z = FieldElement.zeta(5)
    tau = -(z**2 + z**3)
    return tau if conductor == 5 else tau.embed(conductor)


def _icosahedral():
    N = 5
    tau = golden_ratio(N)
    half = Fraction(1, 2)
    one = FieldElement.rational(1, N)
    zero = FieldElement.rational(0, N)
    # five-fold rotation about (0, 1, tau) -- axes through opposite vertices
    five = (
        ((tau - 1) * half, -tau * half, one * half),
        (tau * half, one * half, (tau - 1) * half),
        (-one * half, (tau - 1) * half, tau * half),
    )
    three = ((zero, zero, one), (one, zero, zero), (zero, one, zero))
    inversion = ((-one, zero, zero), (zero, -one, zero), (zero, zero, -one))
    return {
        "n": 3,
        "conductor": N,
        "generators": [five, three, inversion],
        "seeds": [(zero, one, tau)],
    }


def preset_spec(name: str) -> dict:
    """Exact generators and seeds of a registered cluster."""
    if name == "d8":
        N = 8
        return _dihedral(8, N, [(FieldElement.rational(1, N), FieldElement.rational(0, N))])
    if name == "d10-penrose":
        N = 20
        return _dihedral(10, N, [(FieldElement.rational(1, N), FieldElement.rational(0, N))])
    if name == "d10-two-shell":
        N = 20
        tau = golden_ratio(N)
        # second shell on the other class of mirror axes, radius tau
        outer = (tau * cos2pi(1, N), tau * sin2pi(1, N))
        return _dihedral(10, N, [(FieldElement.rational(1, N), FieldElement.rational(0, N)), outer])
    if name == "d12":
        N = 12
        return _dihedral(12, N, [(FieldElement.rational(1, N), FieldElement.rational(0, N))])
    if name == "icosahedral":
        return _icosahedral()
    raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


def square_spec() -> dict:
    """The crystallographic square cluster (periodic degenerate case)."""
    N = 4
    one = FieldElement.rational(1, N)
    zero = FieldElement.rational(0, N)
    return {
        "n": 2,
        "conductor": N,
        "generators": [((zero, -one), (one, zero)), ((one, zero), (zero, -one))],
        "seeds": [(one, zero)],
    }


def preset(name: str) -> GCluster:
    return build_cluster(**preset_spec(name))


def square_cluster() -> GCluster:
    return build_cluster(**square_spec())

"""Exact arithmetic in cyclotomic fields and exact integer/rational linear algebra.

A :class:`FieldElement` of conductor ``N`` is the residue of a rational
polynomial in ``z`` (a primitive N-th root of unity) modulo the N-th
cyclotomic polynomial.  Coefficients are kept as a tuple of integer
numerators over one positive common denominator, so arithmetic stays exact
and equality is coefficient-wise.

The embedding used for numerics is always ``z -> exp(2 pi i / N)``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import cache, reduce
from numbers import Rational

import mpmath

__all__ = [
    "FieldElement",
    "BoundaryPrecisionError",
    "cyclotomic_poly",
    "fe",
    "parse_fe",
    "fe_embed",
    "fe_sign",
    "cos2pi",
    "sin2pi",
    "hnf",
    "integer_kernel",
    "rational_kernel_over_Q",
    "rational_rank",
    "rational_inverse",
    "fmat_mul",
    "fmat_transpose",
    "fmat_identity",
    "fmat_equal",
    "fmat_float",
]

MAX_CONDUCTOR = 720
SIGN_START_BITS = 64
SIGN_MAX_BITS = 4096


class BoundaryPrecisionError(ArithmeticError):
    """Interval refinement hit the precision cap without deciding a sign."""


# ---------------------------------------------------------------------------
# cyclotomic polynomials


def _poly_divexact(num, den):
    # integer polynomials, ascending coefficients, den monic
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    assert not any(num[: len(den) - 1]), "inexact cyclotomic division"
    return out


@cache
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, ascending."""
    if n < 1:
        raise ValueError("conductor must be positive")
    p = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            p = _poly_divexact(p, cyclotomic_poly(d))
    return tuple(p)


@cache
def _reduction_table(n: int, upto: int) -> tuple[tuple[int, ...], ...]:
    """Row p holds the reduced power-basis coordinates of z**p, p < upto."""
    phi = cyclotomic_poly(n)
    d = len(phi) - 1
    rows = []
    cur = [0] * d
    cur[0] = 1
    for _ in range(upto):
        rows.append(tuple(cur))
        # multiply by z and reduce with z**d = -sum(phi[i] z**i)
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(d):
                cur[i] -= top * phi[i]
    return tuple(rows)


def _degree(n: int) -> int:
    return len(cyclotomic_poly(n)) - 1


# ---------------------------------------------------------------------------
# field elements


class FieldElement:
    """Immutable element of the cyclotomic field Q(zeta_N)."""

    __slots__ = ("conductor", "num", "den", "_hash")

    def __init__(self, conductor: int, coeffs, den: int = 1):
        conductor = int(conductor)
        d = _degree(conductor)
        coeffs = list(coeffs)
        if any(not isinstance(c, int) for c in coeffs) or den != 1:
            fr = [Fraction(c) / den for c in coeffs]
            den = reduce(_lcm, (f.denominator for f in fr), 1)
            coeffs = [int(f * den) for f in fr]
        if len(coeffs) > d:
            coeffs = _reduce_ints(conductor, coeffs)
        coeffs = coeffs + [0] * (d - len(coeffs))
        if den < 0:
            den, coeffs = -den, [-c for c in coeffs]
        g = reduce(math.gcd, coeffs, den)
        if g > 1:
            den //= g
            coeffs = [c // g for c in coeffs]
        self.conductor = conductor
        self.num = tuple(coeffs)
        self.den = den
        self._hash = None

    # -- construction helpers -------------------------------------------
    @classmethod
    def _raw(cls, conductor, num, den):
        obj = object.__new__(cls)
        g = reduce(math.gcd, num, den)
        if g > 1:
            den //= g
            num = tuple(c // g for c in num)
        obj.conductor = conductor
        obj.num = tuple(num)
        obj.den = den
        obj._hash = None
        return obj

    @classmethod
    def rational(cls, q, conductor: int = 1) -> "FieldElement":
        q = Fraction(q)
        d = _degree(conductor)
        return cls._raw(conductor, (q.numerator,) + (0,) * (d - 1), q.denominator)

    @classmethod
    def zeta(cls, conductor: int, power: int = 1) -> "FieldElement":
        """The element z**power."""
        power %= conductor
        row = _reduction_table(conductor, conductor)[power]
        return cls._raw(conductor, row, 1)

    @property
    def degree(self) -> int:
        return len(self.num)

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in self.num)

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self.num[0], self.den)

    # -- embedding into a common field --------------------------------------
    def embed(self, conductor: int) -> "FieldElement":
        """Re-express in Q(zeta_M) for a multiple M of this conductor."""
        if conductor == self.conductor:
            return self
        if conductor % self.conductor:
            raise ValueError(f"Q(zeta_{self.conductor}) does not embed in Q(zeta_{conductor})")
        step = conductor // self.conductor
        table = _reduction_table(conductor, conductor)
        d = _degree(conductor)
        out = [0] * d
        for t, c in enumerate(self.num):
            if c:
                row = table[(t * step) % conductor]
                for i in range(d):
                    out[i] += c * row[i]
        return FieldElement._raw(conductor, tuple(out), self.den)

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.conductor == self.conductor:
                return self, other
            if self.is_rational() and self.conductor == 1:
                return FieldElement.rational(self.to_fraction(), other.conductor), other
            if other.is_rational() and other.conductor == 1:
                return self, FieldElement.rational(other.to_fraction(), self.conductor)
            m = _lcm(self.conductor, other.conductor)
            if m > MAX_CONDUCTOR:
                raise ValueError(
                    f"conductors {self.conductor} and {other.conductor} have no common "
                    f"embedding below the cap {MAX_CONDUCTOR}"
                )
            return self.embed(m), other.embed(m)
        if isinstance(other, (int, Rational)):
            return self, FieldElement.rational(other, self.conductor)
        return NotImplemented, NotImplemented

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        den = _lcm(a.den, b.den)
        fa, fb = den // a.den, den // b.den
        return FieldElement._raw(a.conductor, tuple(x * fa + y * fb for x, y in zip(a.num, b.num)), den)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement._raw(self.conductor, tuple(-c for c in self.num), self.den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        n = a.conductor
        d = len(a.num)
        if b.is_rational():
            c = b.num[0]
            return FieldElement._raw(n, tuple(x * c for x in a.num), a.den * b.den)
        if a.is_rational():
            c = a.num[0]
            return FieldElement._raw(n, tuple(x * c for x in b.num), a.den * b.den)
        prod = [0] * (2 * d - 1)
        for i, x in enumerate(a.num):
            if x:
                for j, y in enumerate(b.num):
                    if y:
                        prod[i + j] += x * y
        return FieldElement._raw(n, tuple(_reduce_ints(n, prod)), a.den * b.den)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        n = self.conductor
        if self.is_rational():
            return FieldElement.rational(1 / self.to_fraction(), n)
        s = _poly_inverse_mod([Fraction(c, self.den) for c in self.num], list(cyclotomic_poly(n)))
        return FieldElement(n, s)

    def __truediv__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result = FieldElement.rational(1, self.conductor)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- conjugation / realness ------------------------------------------
    def conjugate(self) -> "FieldElement":
        """Image under complex conjugation z -> z**-1."""
        n = self.conductor
        table = _reduction_table(n, n)
        d = len(self.num)
        out = [0] * d
        for t, c in enumerate(self.num):
            if c:
                row = table[(-t) % n]
                for i in range(d):
                    out[i] += c * row[i]
        return FieldElement._raw(n, tuple(out), self.den)

    def is_real(self) -> bool:
        return self.is_rational() or self.conjugate() == self

    # -- comparison ----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, bool):
            return self.is_rational() and Fraction(self.num[0], self.den) == other
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.conductor != self.conductor:
            a, b = self._coerce(other)
            return a.num == b.num and a.den == b.den
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(Fraction(self.num[0], self.den))
            else:
                self._hash = hash((self.conductor, self.num, self.den))
        return self._hash

    def __lt__(self, other):
        return fe_sign(self - other) < 0

    def __le__(self, other):
        return fe_sign(self - other) <= 0

    def __gt__(self, other):
        return fe_sign(self - other) > 0

    def __ge__(self, other):
        return fe_sign(self - other) >= 0

    def __abs__(self):
        return -self if fe_sign(self) < 0 else self

    # -- numerics --------------------------------------------------------------
    def __complex__(self):
        n = self.conductor
        return sum(
            (c * complex(math.cos(2 * math.pi * t / n), math.sin(2 * math.pi * t / n)) for t, c in enumerate(self.num)),
            0j,
        ) / self.den

    def __float__(self):
        n = self.conductor
        return math.fsum(c * math.cos(2 * math.pi * t / n) for t, c in enumerate(self.num)) / self.den

    # -- text ----------------------------------------------------------------
    def __str__(self):
        terms = []
        for t, c in enumerate(self.coeffs):
            if not c:
                continue
            mag = abs(c)
            sign = "-" if c < 0 else "+"
            if t == 0:
                body = str(mag)
            else:
                zpart = "z" if t == 1 else f"z^{t}"
                body = zpart if mag == 1 else f"{mag}*{zpart}"
            terms.append((sign, body))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"FieldElement({self.conductor}, {str(self)!r})"


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _reduce_ints(n, prod):
    d = _degree(n)
    if len(prod) <= d:
        return list(prod) + [0] * (d - len(prod))
    table = _reduction_table(n, len(prod))
    out = list(prod[:d])
    for p in range(d, len(prod)):
        c = prod[p]
        if c:
            row = table[p]
            for i in range(d):
                out[i] += c * row[i]
    return out


def _poly_trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(_poly_trim(a)) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] / lead
        q[shift] = c
        for i, bc in enumerate(b):
            a[i + shift] -= c * bc
        a.pop()
    return q, a


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return _poly_trim([x - y for x, y in zip(a, b)])


def _poly_inverse_mod(a, m):
    # extended Euclid over Q[x]; returns s with a*s = 1 mod m
    r0, r1 = [Fraction(c) for c in m], _poly_trim([Fraction(c) for c in a])
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1 or (r1 and r1[0] == 0):
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, _poly_trim(r)
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        if not r1:
            raise ZeroDivisionError("element is not invertible (modulus not irreducible?)")
    c = r1[0]
    return [x / c for x in s1]


def fe(value, conductor: int = 1) -> FieldElement:
    """Coerce an int, Fraction, string or FieldElement into a FieldElement."""
    if isinstance(value, FieldElement):
        return value if value.conductor == conductor or conductor == 1 else value.embed(conductor)
    if isinstance(value, str):
        return parse_fe(value, conductor)
    return FieldElement.rational(value, conductor)


def cos2pi(j: int, n: int) -> FieldElement:
    """cos(2 pi j / n) as an element of Q(zeta_n)."""
    return (FieldElement.zeta(n, j) + FieldElement.zeta(n, -j)) * Fraction(1, 2)


def sin2pi(j: int, n: int) -> FieldElement:
    """sin(2 pi j / n); needs 4 | n so that i = z**(n/4) is available."""
    if n % 4:
        raise ValueError("sin(2 pi j/n) needs a conductor divisible by 4")
    minus_i = FieldElement.zeta(n, 3 * n // 4)
    return (FieldElement.zeta(n, j) - FieldElement.zeta(n, -j)) * minus_i * Fraction(1, 2)


# ---------------------------------------------------------------------------
# text format


_TOKEN = re.compile(r"\s*(?:(\d+)|(z)|([-+*/^()]))")


def parse_fe(text: str, conductor: int) -> FieldElement:
    """Parse e.g. ``"1/2 + 1/2*z^2 - z^3"`` in Q(zeta_conductor).

    ``z`` denotes exp(2 pi i / conductor).  Accepted tokens: integers,
    ``a/b``, ``*``, ``^``, ``+``, ``-`` and parentheses; whitespace is ignored.
    """
    src = text.replace("−", "-")
    tokens = []
    pos = 0
    src = src.strip()
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse field element {text!r} at position {pos}")
        pos = m.end()
        if m.group(1):
            tokens.append(("num", int(m.group(1))))
        elif m.group(2):
            tokens.append(("z", None))
        else:
            tokens.append((m.group(3), None))
    one = FieldElement.rational(1, conductor)
    z = FieldElement.zeta(conductor, 1)
    i = 0

    def peek():
        return tokens[i][0] if i < len(tokens) else None

    def take(kind=None):
        nonlocal i
        if i >= len(tokens) or (kind and tokens[i][0] != kind):
            raise ValueError(f"cannot parse field element {text!r}")
        i += 1
        return tokens[i - 1]

    def expr():
        sign = 1
        if peek() in ("+", "-"):
            sign = -1 if take()[0] == "-" else 1
        val = term() * sign
        while peek() in ("+", "-"):
            op = take()[0]
            t = term()
            val = val + t if op == "+" else val - t
        return val

    def term():
        val = power()
        while peek() in ("*", "/"):
            op = take()[0]
            f = power()
            val = val * f if op == "*" else val / f
        return val

    def power():
        base = atom()
        if peek() == "^":
            take()
            neg = False
            if peek() == "-":
                take()
                neg = True
            e = take("num")[1]
            return base ** (-e if neg else e)
        return base

    def atom():
        kind = peek()
        if kind == "num":
            return one * take()[1]
        if kind == "z":
            take()
            return z
        if kind == "(":
            take()
            v = expr()
            take(")")
            return v
        if kind == "-":
            take()
            return -atom()
        raise ValueError(f"cannot parse field element {text!r}")

    value = expr()
    if i != len(tokens):
        raise ValueError(f"trailing input in field element {text!r}")
    return value


# ---------------------------------------------------------------------------
# embeddings and signs


def fe_embed(a: FieldElement, precision_bits: int = 64) -> tuple[mpmath.mpf, mpmath.mpf]:
    """Return an interval (lo, hi) containing the real value of ``a``.

    The width is at most ``2**(1 - precision_bits)``.
    """
    if precision_bits < 32:
        raise ValueError("precision_bits must be at least 32")
    if not isinstance(a, FieldElement):
        a = fe(a)
    if not a.is_real():
        raise ValueError(f"{a} is not real")
    if a.is_rational():
        q = a.to_fraction()
        with mpmath.workprec(max(precision_bits, q.numerator.bit_length() + q.denominator.bit_length() + 8)):
            lo = mpmath.mpf(q.numerator) / q.denominator
        # rationals with exact binary expansion come back degenerate; others are bracketed
        if lo * q.denominator == q.numerator:
            return lo, lo
        with mpmath.workprec(precision_bits + 8):
            iv = mpmath.iv.mpf(q.numerator) / q.denominator
            return mpmath.mpf(iv.a), mpmath.mpf(iv.b)
    target = mpmath.mpf(2) ** (1 - precision_bits)
    scale = sum(abs(c) for c in a.num).bit_length() + 8
    work = precision_bits + scale
    n = a.conductor
    while True:
        iv = mpmath.iv
        old = iv.prec
        iv.prec = work
        try:
            total = iv.mpf(0)
            two_pi = 2 * iv.pi
            for t, c in enumerate(a.num):
                if c:
                    total += c * iv.cos(two_pi * t / n)
            total = total / a.den
            lo, hi = mpmath.mpf(total.a), mpmath.mpf(total.b)
        finally:
            iv.prec = old
        if hi - lo <= target:
            return lo, hi
        work *= 2


def fe_sign(a) -> int:
    """Exact sign (-1, 0, +1) of a real field element."""
    if not isinstance(a, FieldElement):
        a = fe(a)
    if a.is_zero():
        return 0
    if a.is_rational():
        return 1 if a.num[0] > 0 else -1
    if not a.is_real():
        raise ValueError(f"{a} is not real")
    bits = SIGN_START_BITS
    while bits <= SIGN_MAX_BITS:
        lo, hi = fe_embed(a, bits)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        bits *= 2
    raise BoundaryPrecisionError(f"sign of {a} undecided at {SIGN_MAX_BITS} bits")


# ---------------------------------------------------------------------------
# field-valued matrices (lists of rows)


def fmat_mul(a, b):
    k = len(b)
    return [[_dot([row[t] for t in range(k)], [b[t][j] for t in range(k)]) for j in range(len(b[0]))] for row in a]


def _dot(xs, ys):
    acc = None
    for x, y in zip(xs, ys):
        if isinstance(x, FieldElement) and x.is_zero():
            continue
        if isinstance(y, FieldElement) and y.is_zero():
            continue
        if x == 0 or y == 0:
            continue
        term = x * y
        acc = term if acc is None else acc + term
    if acc is None:
        c = next((v.conductor for v in list(xs) + list(ys) if isinstance(v, FieldElement)), 1)
        return FieldElement.rational(0, c)
    return acc if isinstance(acc, FieldElement) else FieldElement.rational(acc)


def fmat_transpose(a):
    return [list(col) for col in zip(*a)]


def fmat_identity(k: int, conductor: int = 1):
    return [[FieldElement.rational(int(i == j), conductor) for j in range(k)] for i in range(k)]


def fmat_equal(a, b) -> bool:
    return len(a) == len(b) and all(len(r) == len(s) and all(x == y for x, y in zip(r, s)) for r, s in zip(a, b))


def fmat_float(a):
    import numpy as np

    return np.array([[float(x) for x in row] for row in a], dtype=float)


# ---------------------------------------------------------------------------
# integer and rational linear algebra


def hnf(M):
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``H == U @ M``, ``U`` unimodular, pivots positive
    and entries above each pivot reduced into ``[0, pivot)``.  Zero rows are
    moved to the bottom.
    """
    H = [[int(x) for x in row] for row in M]
    m = len(H)
    cols = len(H[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]

    def combine(i, j, a, b, c, d):
        # rows (i, j) <- (a*ri + b*rj, c*ri + d*rj); ad - bc = +-1
        ri, rj = H[i], H[j]
        H[i] = [a * x + b * y for x, y in zip(ri, rj)]
        H[j] = [c * x + d * y for x, y in zip(ri, rj)]
        ui, uj = U[i], U[j]
        U[i] = [a * x + b * y for x, y in zip(ui, uj)]
        U[j] = [c * x + d * y for x, y in zip(ui, uj)]

    r = 0
    for c in range(cols):
        if r >= m:
            break
        for i in range(r + 1, m):
            if H[i][c] == 0:
                continue
            x, y = H[r][c], H[i][c]
            g, s, t = _xgcd(x, y)
            combine(r, i, s, t, -y // g, x // g)
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
        p = H[r][c]
        for i in range(r):
            q = H[i][c] // p
            if q:
                H[i] = [x - q * y for x, y in zip(H[i], H[r])]
                U[i] = [x - q * y for x, y in zip(U[i], U[r])]
        r += 1
    return H, U


def _xgcd(a, b):
    # returns g, s, t with s*a + t*b = g = gcd(a, b) >= 0
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def integer_kernel(A) -> list[list[int]]:
    """HNF basis of {m in Z^k : A m = 0} for a rational matrix ``A`` (rows x k)."""
    A = [[Fraction(x) for x in row] for row in A]
    if not A:
        raise ValueError("integer_kernel needs the column count; pass at least one row")
    k = len(A[0])
    rows = []
    for row in A:
        den = reduce(_lcm, (x.denominator for x in row), 1)
        rows.append([int(x * den) for x in row])
    # augmented k x (len(rows) + k): [A^T | I]
    aug = [[rows[r][j] for r in range(len(rows))] + [int(i == j) for i in range(k)] for j in range(k)]
    H, _ = hnf(aug)
    nr = len(rows)
    basis = [h[nr:] for h in H if not any(h[:nr]) and any(h[nr:])]
    if not basis:
        return []
    K, _ = hnf(basis)
    return [row for row in K if any(row)]


def rational_kernel_over_Q(M) -> list[list[int]]:
    """Integer relations among the columns of a matrix of field elements.

    Every entry is expanded into its power-basis coordinates, giving
    ``deg(Phi_N)`` rational rows per field row; the integer kernel of that
    rational matrix is returned as an HNF basis (possibly empty).
    """
    M = [[fe(x) if not isinstance(x, FieldElement) else x for x in row] for row in M]
    conductors = {x.conductor for row in M for x in row}
    n = reduce(_lcm, conductors, 1)
    k = len(M[0])
    expanded = []
    for row in M:
        row = [x.embed(n) if x.conductor != n else x for x in row]
        for t in range(_degree(n)):
            expanded.append([x.coeffs[t] for x in row])
    if not expanded:
        expanded = [[0] * k]
    return integer_kernel(expanded)


def rational_rank(A) -> int:
    return len(_rref([[Fraction(x) for x in row] for row in A])[1])


def _rref(A):
    A = [list(row) for row in A]
    m = len(A)
    cols = len(A[0]) if m else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, m) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return A, pivots


def rational_inverse(A):
    n = len(A)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    R, pivots = _rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular rational matrix")
    return [row[n:] for row in R]

"""Exact elements of Z[i, 1/sqrt2]: (a + b*sqrt2 + (c + d*sqrt2)*i) / sqrt2**e."""
from __future__ import annotations

import math
from fractions import Fraction

SQRT2 = math.sqrt(2.0)


def _canon(a: int, b: int, c: int, d: int, e: int):
    if a == b == c == d == 0:
        return 0, 0, 0, 0, 0
    while e > 0 and a % 2 == 0 and c % 2 == 0:
        a, b, c, d, e = b, a // 2, d, c // 2, e - 1
    return a, b, c, d, e


def _raise_scale(a, b, c, d, k):
    """Multiply numerator by sqrt2**k (denominator exponent grows by k)."""
    for _ in range(k):
        a, b, c, d = 2 * b, a, 2 * d, c
    return a, b, c, d


class RingElem:
    __slots__ = ("a", "b", "c", "d", "e")

    def __init__(self, a: int = 0, b: int = 0, c: int = 0, d: int = 0, e: int = 0):
        if e < 0:
            a, b, c, d = _raise_scale(a, b, c, d, -e)
            e = 0
        self.a, self.b, self.c, self.d, self.e = _canon(int(a), int(b), int(c), int(d), int(e))

    @classmethod
    def coerce(cls, v) -> "RingElem":
        if isinstance(v, RingElem):
            return v
        if isinstance(v, int):
            return cls(v)
        if isinstance(v, Fraction) and v.denominator & (v.denominator - 1) == 0:
            k = v.denominator.bit_length() - 1
            return cls(v.numerator, 0, 0, 0, 2 * k)
        raise TypeError(f"cannot represent {v!r} exactly in Z[i, 1/sqrt2]")

    @classmethod
    def omega(cls, k: int = 1) -> "RingElem":
        """exp(i*pi*k/4)."""
        table = [(1, 0, 0, 0, 0), (1, 0, 1, 0, 1), (0, 0, 1, 0, 0), (-1, 0, 1, 0, 1)]
        k %= 8
        r = cls(*table[k % 4])
        return -r if k >= 4 else r

    def _aligned(self, other: "RingElem"):
        e = max(self.e, other.e)
        return (_raise_scale(self.a, self.b, self.c, self.d, e - self.e),
                _raise_scale(other.a, other.b, other.c, other.d, e - other.e), e)

    def __add__(self, other):
        try:
            other = RingElem.coerce(other)
        except TypeError:
            return NotImplemented
        x, y, e = self._aligned(other)
        return RingElem(*(p + q for p, q in zip(x, y)), e)

    __radd__ = __add__

    def __neg__(self):
        return RingElem(-self.a, -self.b, -self.c, -self.d, self.e)

    def __sub__(self, other):
        return self + (-RingElem.coerce(other))

    def __rsub__(self, other):
        return RingElem.coerce(other) - self

    def __mul__(self, other):
        try:
            other = RingElem.coerce(other)
        except TypeError:
            return NotImplemented
        # (p + q i)(r + s i), with p, q, r, s in Z[sqrt2]
        def zmul(x0, x1, y0, y1):
            return x0 * y0 + 2 * x1 * y1, x0 * y1 + x1 * y0

        pr = zmul(self.a, self.b, other.a, other.b)
        qs = zmul(self.c, self.d, other.c, other.d)
        ps = zmul(self.a, self.b, other.c, other.d)
        qr = zmul(self.c, self.d, other.a, other.b)
        return RingElem(pr[0] - qs[0], pr[1] - qs[1], ps[0] + qr[0], ps[1] + qr[1],
                        self.e + other.e)

    __rmul__ = __mul__

    def conj(self) -> "RingElem":
        return RingElem(self.a, self.b, -self.c, -self.d, self.e)

    @property
    def real(self) -> "RingElem":
        return RingElem(self.a, self.b, 0, 0, self.e)

    @property
    def imag(self) -> "RingElem":
        return RingElem(self.c, self.d, 0, 0, self.e)

    def abs2(self) -> "RingElem":
        return self * self.conj()

    def is_real(self) -> bool:
        return self.c == 0 and self.d == 0

    def is_rational(self) -> bool:
        return self.b == self.c == self.d == 0 and self.e % 2 == 0

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self.a, 2 ** (self.e // 2))

    def to_qsqrt2(self) -> tuple[Fraction, Fraction]:
        """Real element as (r, s) with value r + s*sqrt2."""
        if not self.is_real():
            raise ValueError(f"{self} is not real")
        half, odd = divmod(self.e, 2)
        den = 2 ** half
        if odd:  # (a + b sqrt2) / (2^half sqrt2) = b/2^half + (a/2^(half+1)) sqrt2
            return Fraction(self.b, den), Fraction(self.a, 2 * den)
        return Fraction(self.a, den), Fraction(self.b, den)

    def __complex__(self):
        scale = SQRT2 ** -self.e
        return complex((self.a + self.b * SQRT2) * scale, (self.c + self.d * SQRT2) * scale)

    def __float__(self):
        if not self.is_real():
            raise ValueError("complex ring element")
        return complex(self).real

    def __eq__(self, other):
        try:
            other = RingElem.coerce(other)
        except TypeError:
            return NotImplemented
        return (self.a, self.b, self.c, self.d, self.e) == (other.a, other.b, other.c, other.d, other.e)

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.d, self.e))

    def __bool__(self):
        return bool(self.a or self.b or self.c or self.d)

    def __repr__(self):
        return f"RingElem({self.a}, {self.b}, {self.c}, {self.d}, e={self.e})"

    def __str__(self):
        re = f"{self.a}{self.b:+}√2"
        im = f"({self.c}{self.d:+}√2)i"
        return f"({re} + {im})/√2^{self.e}"


def qsqrt2_div(num: tuple[Fraction, Fraction], den: tuple[Fraction, Fraction]):
    """(r + s√2) / (u + v√2) in Q(√2)."""
    r, s = num
    u, v = den
    norm = u * u - 2 * v * v
    if norm == 0:
        raise ZeroDivisionError("division by zero in Q(sqrt2)")
    return (r * u - 2 * s * v) / norm, (s * u - r * v) / norm

"""Table-driven arithmetic in GF(2^m), 3 <= m <= 8.

Elements are plain integers in polynomial-basis bit representation; addition
is XOR and is not wrapped.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Default primitive polynomials, bit i = coefficient of x^i.
PRIMITIVE_POLYS = {
    3: 0b1011,  # x^3 + x + 1
    4: 0b10011,  # x^4 + x + 1
    5: 0b100101,  # x^5 + x^2 + 1
    6: 0b1000011,  # x^6 + x + 1
    7: 0b10001001,  # x^7 + x^3 + 1
    8: 0b100011101,  # x^8 + x^4 + x^3 + x^2 + 1
}


class FieldError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FieldTable:
    """Log/antilog tables for GF(2^m).

    ``antilog[i]`` is alpha^i for 0 <= i < 2^m - 1 and ``log[x]`` is the
    discrete log of a nonzero ``x``; ``log[0]`` holds -1 as a sentinel.
    """

    m: int
    primitive_poly: int
    log: np.ndarray = field(repr=False)
    antilog: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        """Number of nonzero elements, 2^m - 1."""
        return (1 << self.m) - 1

    @property
    def size(self) -> int:
        return 1 << self.m

    def _check(self, a: int) -> None:
        if not 0 <= a < self.size:
            raise FieldError(f"{a} is not an element of GF(2^{self.m})")

    def mul(self, a: int, b: int) -> int:
        self._check(a)
        self._check(b)
        if a == 0 or b == 0:
            return 0
        return int(self.antilog[(self.log[a] + self.log[b]) % self.order])

    def inv(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in GF(2^m)")
        return int(self.antilog[(-self.log[a]) % self.order])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        self._check(a)
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("0 has no inverse in GF(2^m)")
            return 0
        return int(self.antilog[(self.log[a] * e) % self.order])

    def alpha_pow(self, e: int) -> int:
        """alpha^e for any integer e."""
        return int(self.antilog[e % self.order])


def build_field(m: int, primitive_poly: int | None = None) -> FieldTable:
    """Build log/antilog tables for GF(2^m) from a primitive polynomial.

    Raises FieldError if the polynomial has the wrong degree or if the powers
    of x repeat before exponent 2^m - 1 (the polynomial is not primitive).
    """
    if not 3 <= m <= 8:
        raise FieldError(f"unsupported extension degree m={m}")
    if primitive_poly is None:
        primitive_poly = PRIMITIVE_POLYS[m]
    if primitive_poly.bit_length() - 1 != m:
        raise FieldError(f"polynomial {primitive_poly:#b} does not have degree {m}")

    order = (1 << m) - 1
    antilog = np.zeros(order, dtype=np.int64)
    log = np.full(1 << m, -1, dtype=np.int64)
    x = 1
    for i in range(order):
        if log[x] != -1:
            raise FieldError(
                f"polynomial {primitive_poly:#b} is not primitive: "
                f"alpha^{i} repeats alpha^{log[x]}"
            )
        antilog[i] = x
        log[x] = i
        x <<= 1
        if x >> m:
            x ^= primitive_poly
    if x != 1:
        raise FieldError(f"polynomial {primitive_poly:#b} is not primitive")
    antilog.setflags(write=False)
    log.setflags(write=False)
    return FieldTable(m, primitive_poly, log, antilog)


_cache: dict[int, FieldTable] = {}


def default_field(m: int) -> FieldTable:
    """Field built from the default primitive polynomial for ``m`` (cached)."""
    if m not in _cache:
        _cache[m] = build_field(m)
    return _cache[m]

"""
Exact dyadic rationals num / 2**den_pow2.

Every distance the product metric produces at a finite truncation depth is a
finite sum of powers of two, so the whole distance engine works on scaled integers
and never touches floating point. Values are kept in lowest terms, which makes
dataclass equality and hashing exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

POWER_PATTERN = re.compile(r"^\s*2\s*\^\s*\(?\s*(-?\d+)\s*\)?\s*$")


@total_ordering
@dataclass(frozen=True, slots=True)
class Dyadic:
    num: int
    den_pow2: int = 0

    def __post_init__(self):
        if self.den_pow2 < 0:
            object.__setattr__(self, "num", self.num << -self.den_pow2)
            object.__setattr__(self, "den_pow2", 0)
        num, den_pow2 = self.num, self.den_pow2
        if num == 0:
            den_pow2 = 0
        else:
            shift = min((num & -num).bit_length() - 1, den_pow2)
            num >>= shift
            den_pow2 -= shift
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den_pow2", den_pow2)

    @classmethod
    def pow2(cls, exponent: int) -> Dyadic:
        """Return 2**exponent (exponent may be negative)."""
        if exponent >= 0:
            return cls(1 << exponent, 0)
        return cls(1, -exponent)

    @classmethod
    def from_fraction(cls, value: Fraction | int) -> Dyadic:
        value = Fraction(value)
        den = value.denominator
        if den & (den - 1):
            raise ValueError(f"{value} is not a dyadic rational")
        return cls(value.numerator, den.bit_length() - 1)

    @classmethod
    def parse(cls, text: str) -> Dyadic:
        """Parse '1/8', '2^-3' or '0.125'."""
        match = POWER_PATTERN.match(text)
        if match:
            return cls.pow2(int(match.group(1)))
        try:
            return cls.from_fraction(Fraction(text.strip()))
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"Cannot read a dyadic rational from '{text}'") from e

    @property
    def is_zero(self) -> bool:
        return self.num == 0

    def scaled(self, den_pow2: int) -> int:
        """Numerator over the common denominator 2**den_pow2 (exact only if it fits)."""
        return self.num << (den_pow2 - self.den_pow2)

    def _common(self, other: Dyadic) -> tuple[int, int, int]:
        den = max(self.den_pow2, other.den_pow2)
        return self.scaled(den), other.scaled(den), den

    def __add__(self, other: Dyadic | int) -> Dyadic:
        other = _coerce(other)
        a, b, den = self._common(other)
        return Dyadic(a + b, den)

    __radd__ = __add__

    def __sub__(self, other: Dyadic | int) -> Dyadic:
        other = _coerce(other)
        a, b, den = self._common(other)
        return Dyadic(a - b, den)

    def __rsub__(self, other: Dyadic | int) -> Dyadic:
        return _coerce(other) - self

    def __neg__(self) -> Dyadic:
        return Dyadic(-self.num, self.den_pow2)

    def __abs__(self) -> Dyadic:
        return Dyadic(abs(self.num), self.den_pow2)

    def __mul__(self, other: Dyadic | int) -> Dyadic:
        other = _coerce(other)
        return Dyadic(self.num * other.num, self.den_pow2 + other.den_pow2)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = Dyadic(other)
        if not isinstance(other, Dyadic):
            return NotImplemented
        return self.num == other.num and self.den_pow2 == other.den_pow2

    def __hash__(self) -> int:
        return hash(self.as_fraction())

    def __lt__(self, other: Dyadic | int) -> bool:
        other = _coerce(other)
        a, b, _ = self._common(other)
        return a < b

    def __float__(self) -> float:
        return float(self.as_fraction())

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.den_pow2)

    def to_json(self) -> dict[str, int]:
        return {"num": self.num, "den_pow2": self.den_pow2}

    @classmethod
    def from_json(cls, data: dict) -> Dyadic:
        return cls(int(data["num"]), int(data["den_pow2"]))

    def __str__(self) -> str:
        if self.den_pow2 == 0:
            return str(self.num)
        return f"{self.num}/2^{self.den_pow2}"


def _coerce(value: Dyadic | int) -> Dyadic:
    if isinstance(value, Dyadic):
        return value
    if isinstance(value, int):
        return Dyadic(value)
    raise TypeError(f"Cannot combine a dyadic rational with {value!r}")


ZERO = Dyadic(0)
ONE = Dyadic(1)

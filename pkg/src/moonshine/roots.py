"""Exact roots of unity.

A root exp(2*pi*i*k/n) is stored as the reduced fraction k/n mod 1, so
products, powers and conjugates stay exact.  Conversion to a complex
number happens only at the numeric boundary, at whatever precision the
caller's mpmath context is set to.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath


class RootOfUnity:
    """exp(2*pi*i*exponent) with exponent an exact rational mod 1."""

    __slots__ = ("exponent",)

    def __init__(self, exponent: Fraction | int = 0):
        self.exponent = Fraction(exponent) % 1

    @classmethod
    def from_pair(cls, k: int, n: int) -> "RootOfUnity":
        return cls(Fraction(k, n))

    @property
    def order(self) -> int:
        return self.exponent.denominator

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        return RootOfUnity(self.exponent + other.exponent)

    def __pow__(self, k: int) -> "RootOfUnity":
        return RootOfUnity(self.exponent * k)

    def conjugate(self) -> "RootOfUnity":
        return RootOfUnity(-self.exponent)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, RootOfUnity):
            return self.exponent == other.exponent
        if other == 1:
            return self.exponent == 0
        if other == -1:
            return self.exponent == Fraction(1, 2)
        if other == 1j:
            return self.exponent == Fraction(1, 4)
        if other == -1j:
            return self.exponent == Fraction(3, 4)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("RootOfUnity", self.exponent))

    def is_one(self) -> bool:
        return self.exponent == 0

    def as_exact_complex(self):
        """Exact complex value when the order divides 4, else None."""
        table = {
            Fraction(0): 1,
            Fraction(1, 2): -1,
            Fraction(1, 4): 1j,
            Fraction(3, 4): -1j,
        }
        return table.get(self.exponent)

    def to_mpc(self) -> mpmath.mpc:
        c, s = mpmath.mp.cos_sin(2 * mpmath.mp.pi * mpmath.mpf(self.exponent.numerator)
                                 / self.exponent.denominator)
        return mpmath.mpc(c, s)

    def __repr__(self) -> str:
        exact = self.as_exact_complex()
        if exact is not None:
            return {1: "1", -1: "-1", 1j: "i", -1j: "-i"}[exact]
        return f"exp(2*pi*i*{self.exponent})"

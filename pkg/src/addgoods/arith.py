"""Exact integer helpers: gcd over lists, Bezout coefficients, ceiling division."""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import gcd
from typing import Sequence


@dataclass(frozen=True)
class BezoutCertificate:
    d: int
    coefficients: tuple[int, ...]

    def check(self, values: Sequence[int]) -> bool:
        return (
            self.d > 0
            and len(values) == len(self.coefficients)
            and sum(c * v for c, v in zip(self.coefficients, values)) == self.d
            and all(v % self.d == 0 for v in values)
        )


def _require_nonzero(values):
    if any(v < 0 for v in values):
        raise ValueError("values must be nonnegative")
    if not any(values):
        raise ValueError("gcd undefined for zero vector")


def gcd_list(values: Sequence[int]) -> int:
    values = list(values)
    _require_nonzero(values)
    return reduce(gcd, values)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``s*a + t*b == g == gcd(a, b)`` for a, b >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def bezout_list(values: Sequence[int]) -> BezoutCertificate:
    """Fold two-argument extended Euclid left to right over ``values``.

    The running certificate ``g = sum(c_i * v_i)`` is combined with each new
    value; coefficients are not minimised and can grow with the list length.
    """
    values = list(values)
    _require_nonzero(values)
    g, coeffs = values[0], [1]
    for v in values[1:]:
        g, s, t = xgcd(g, v)
        coeffs = [c * s for c in coeffs] + [t]
    if g == 0:  # unreachable after the nonzero check, kept for the invariant
        raise ValueError("gcd undefined for zero vector")
    cert = BezoutCertificate(g, tuple(coeffs))
    if not cert.check(values):
        raise AssertionError(f"bad Bezout certificate for {values}: {cert}")
    return cert


def ceil_div(numerator: int, denominator: int) -> int:
    if denominator <= 0:
        raise ValueError("denominator must be positive")
    return -((-numerator) // denominator)

"""Arithmetic in GF(2^p) with elements stored as bit-packed polynomials."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..errors import GenGraphError

# Bit masks of the fixed reducing polynomials; bit i is the coefficient of x^i.
POLYNOMIALS = {
    1: 0b10,  # x
    2: 0b111,  # x^2 + x + 1
    3: 0b1011,  # x^3 + x + 1
    4: 0b10011,  # x^4 + x + 1
    5: 0b100101,  # x^5 + x^2 + 1
}


def _polymod(a: int, m: int) -> int:
    dm = m.bit_length() - 1
    while a and a.bit_length() - 1 >= dm:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


def is_irreducible(poly: int) -> bool:
    """Trial division by every polynomial of degree 1..deg/2."""
    deg = poly.bit_length() - 1
    if deg < 1:
        return False
    for d in range(2, 1 << (deg // 2 + 1)):
        if d.bit_length() - 1 > deg // 2:
            break
        if _polymod(poly, d) == 0:
            return False
    return True


def _clmul(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


@lru_cache(maxsize=None)
def field_tables(p: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(mul, inv)`` lookup tables for GF(2^p).

    ``inv[0]`` is 0 by convention; it is never used as a true inverse.
    """
    if p not in POLYNOMIALS:
        raise GenGraphError(f"no reducing polynomial fixed for GF(2^{p})")
    poly = POLYNOMIALS[p]
    if not is_irreducible(poly):
        raise GenGraphError(f"polynomial {poly:b} for GF(2^{p}) is reducible")
    q = 1 << p
    mul = np.zeros((q, q), dtype=np.int64)
    for a in range(q):
        for b in range(q):
            mul[a, b] = _polymod(_clmul(a, b), poly) if p > 1 else a & b
    inv = np.zeros(q, dtype=np.int64)
    for a in range(1, q):
        inv[a] = int(np.flatnonzero(mul[a] == 1)[0])
    return mul, inv


def frobenius_table(p: int) -> np.ndarray:
    """The squaring map a -> a^2, an automorphism of GF(2^p)."""
    mul, _ = field_tables(p)
    return mul[np.arange(1 << p), np.arange(1 << p)].copy()

"""Bit-to-symbol labeling and noise calibration for M-ASK.

Levels are the bipolar set {-(M-1), ..., -1, +1, ..., +(M-1)} obtained from
the unipolar label value c via b = 2c - (M-1).  Natural labeling reads the
bit pattern as a plain binary number (MSB first); Gray labeling and the
4-point quadrature mapping are provided in closed form for M = 4 only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

LABELINGS = ("natural", "gray", "qam4")

# M=4 Gray label value per (MSB, LSB): c = (1-MSB)(2 MSB + LSB) + MSB(2 MSB + (1-LSB))
_GRAY4 = {(0, 0): 0, (0, 1): 1, (1, 0): 3, (1, 1): 2}
_GRAY4_INV = {c: bits for bits, c in _GRAY4.items()}


@dataclass(frozen=True)
class Constellation:
    m: int
    levels: tuple[float, ...]
    es: float


def constellation(m: int) -> Constellation:
    """The M-ASK level set and its mean symbol energy (M^2 - 1)/3."""
    _check_alphabet(m)
    levels = tuple(float(2 * c - (m - 1)) for c in range(m))
    return Constellation(m=m, levels=levels, es=(m * m - 1) / 3.0)


def _check_alphabet(m: int) -> int:
    n = int(m).bit_length() - 1
    if m < 2 or (1 << n) != m:
        raise ValueError(f"alphabet size must be a power of two, got {m}")
    return n


def label_value(bits: Sequence[int], labeling: str, m: int) -> int:
    """Unipolar label value c of a bit pattern (MSB first) under a labeling."""
    n = _check_alphabet(m)
    if len(bits) != n:
        raise ValueError(f"expected {n} bits for M={m}, got {len(bits)}")
    if labeling == "natural":
        c = 0
        for b in bits:
            c = (c << 1) | (int(b) & 1)
        return c
    if labeling == "gray":
        if m != 4:
            raise ValueError("gray labeling is defined for M=4 only")
        return _GRAY4[(int(bits[0]) & 1, int(bits[1]) & 1)]
    raise ValueError(f"unknown labeling {labeling!r}")


def bits_of_value(c: int, labeling: str, m: int) -> tuple[int, ...]:
    """Inverse of label_value: the bit pattern whose label value is c."""
    n = _check_alphabet(m)
    if labeling == "natural":
        return tuple((c >> (n - 1 - i)) & 1 for i in range(n))
    if labeling == "gray":
        if m != 4:
            raise ValueError("gray labeling is defined for M=4 only")
        return _GRAY4_INV[c]
    raise ValueError(f"unknown labeling {labeling!r}")


def map_symbol(bits: Sequence[int], labeling: str, m: int):
    """Map n = log2(M) bits (MSB first) to a symbol.

    Returns the bipolar ASK level for natural/gray labeling, or the pair of
    antipodal components (2 MSB - 1, 2 LSB - 1) for the qam4 labeling.  The
    qam4 form is a pure mapping function and is not accepted anywhere in the
    real-valued simulation chain.
    """
    if labeling == "qam4":
        if m != 4:
            raise ValueError("qam4 labeling is defined for M=4 only")
        if len(bits) != 2:
            raise ValueError(f"expected 2 bits, got {len(bits)}")
        return (float(2 * int(bits[0]) - 1), float(2 * int(bits[1]) - 1))
    c = label_value(bits, labeling, m)
    return float(2 * c - (m - 1))


def demap_level(level: float, labeling: str, m: int) -> tuple[int, ...]:
    """Bits of an exact constellation level under the inverse labeling."""
    c = round((level + (m - 1)) / 2)
    if not 0 <= c < m or 2 * c - (m - 1) != level:
        raise ValueError(f"{level} is not an M={m} constellation level")
    return bits_of_value(c, labeling, m)


def mod2_via_floor(x: int) -> int:
    """Parity through the floor identity x mod 2 = x - 2*floor(x/2)."""
    if x < 0:
        raise ValueError("x must be non-negative")
    return x - 2 * (x // 2)


def noise_sigma(ebn0_db: float, es: float, k: int) -> float:
    """Std-dev per real noise sample for a target Eb/N0.

    Eb = es/k with k information bits per symbol; sigma^2 = N0/2.
    """
    eb = es / k
    n0 = eb * 10.0 ** (-ebn0_db / 10.0)
    return math.sqrt(n0 / 2.0)

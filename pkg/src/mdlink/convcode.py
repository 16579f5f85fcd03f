"""Rate-1/n feedforward convolutional codes.

Generators are given as octal strings, e.g. ``["23", "04"]``.  Each generator
is expanded to its tap vector with the most significant bit multiplying the
current input bit (delay 0) and the least significant bit multiplying the
oldest bit (delay nu).  The encoder memory nu is the largest tap degree over
the whole set, so shorter generators are implicitly left-padded with zeros.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


class UnsupportedRateError(ValueError):
    """Raised for code rates other than 1/n."""


@dataclass(frozen=True)
class GeneratorSet:
    """Tap vectors of a feedforward rate-1/n code.

    ``polys[i][j]`` is the coefficient of delay ``D^j`` in generator ``i``
    (j = 0 is the current input).  Feedback taps cannot be represented, so
    every GeneratorSet is feedforward by construction.
    """

    polys: tuple[tuple[int, ...], ...]
    nu: int
    n: int
    k: int = 1

    @property
    def num_states(self) -> int:
        return 1 << self.nu

    def tap_masks(self) -> tuple[int, ...]:
        """Each generator as an integer mask with bit j set iff tap D^j is 1."""
        return tuple(sum(bit << j for j, bit in enumerate(p)) for p in self.polys)


def parse_generators(octal_strings: Sequence[str], k: int = 1) -> GeneratorSet:
    """Parse octal generator strings into a GeneratorSet.

    The highest set bit over all generators defines nu; the MSB of each value
    is the delay-0 tap.  ``["5", "7"]`` gives taps (1,0,1) and (1,1,1), nu=2.
    """
    if k != 1:
        raise UnsupportedRateError(f"only rate 1/n codes are supported (k={k})")
    if not octal_strings:
        raise ValueError("at least one generator polynomial is required")
    values = []
    for s in octal_strings:
        try:
            v = int(str(s).strip(), 8)
        except ValueError:
            raise ValueError(f"invalid octal generator {s!r}") from None
        if v == 0:
            raise ValueError(f"all-zero generator {s!r}")
        values.append(v)
    width = max(v.bit_length() for v in values)
    polys = tuple(
        tuple((v >> (width - 1 - j)) & 1 for j in range(width)) for v in values
    )
    return GeneratorSet(polys=polys, nu=width - 1, n=len(polys), k=k)


def encode_step(
    gen: GeneratorSet, state: Sequence[int], u: int
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """One encoder step: returns (next_state, output bits).

    ``state`` holds the nu most recent inputs, newest first.  Output bit i is
    the GF(2) inner product of generator i with (u, state); outputs are
    ordered with generator 1 first (the most significant labeled bit).
    """
    if len(state) != gen.nu:
        raise ValueError(f"state length {len(state)} != nu {gen.nu}")
    window = (u, *state)
    out = tuple(
        sum(t & b for t, b in zip(poly, window)) & 1 for poly in gen.polys
    )
    next_state = (u, *state[: gen.nu - 1]) if gen.nu else ()
    return next_state, out


def encode_block(
    gen: GeneratorSet, info_bits: Sequence[int], terminate: bool = True
) -> np.ndarray:
    """Encode a block, returning a (steps, n) uint8 matrix of coded bits.

    With ``terminate`` the block is flushed with nu zero inputs so the final
    encoder state is all-zero; the output then has len(info_bits) + nu steps.
    """
    u = np.asarray(info_bits, dtype=np.uint8)
    if u.ndim != 1:
        raise ValueError("info_bits must be one-dimensional")
    steps = u.size + (gen.nu if terminate else 0)
    out = np.zeros((steps, gen.n), dtype=np.uint8)
    if steps == 0 or u.size == 0:
        return out
    for i, poly in enumerate(gen.polys):
        full = np.convolve(u.astype(np.int64), np.asarray(poly, dtype=np.int64))
        out[:, i] = full[:steps] & 1
    return out

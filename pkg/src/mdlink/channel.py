"""Discrete-time ISI channel: example tap profile, FIR convolution, AWGN.

Taps are kept at unit energy so the energy per bit is the same at the
transmitter output and the receiver input.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

UNIT_ENERGY_TOL = 1e-12
RENORM_WARN_TOL = 1e-6
MIN_PHASE_TOL = 1e-9


@dataclass(frozen=True)
class ChannelTaps:
    """Unit-energy FIR impulse response h[0..L] with h[0] != 0."""

    h: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=np.float64)
        h.setflags(write=False)
        object.__setattr__(self, "h", h)
        if h.ndim != 1 or h.size == 0:
            raise ValueError("taps must be a non-empty 1-D sequence")
        if h[0] == 0.0:
            raise ValueError("leading tap h[0] must be nonzero")
        energy = float(np.dot(h, h))
        if abs(energy - 1.0) > UNIT_ENERGY_TOL:
            raise ValueError(f"taps must have unit energy (got {energy!r})")

    @property
    def memory(self) -> int:
        return self.h.size - 1


def make_taps(values: Sequence[float]) -> ChannelTaps:
    """ChannelTaps from explicit coefficients, renormalized to unit energy.

    Warns if the input energy is off by more than a parsing tolerance, then
    rescales so the unit-energy invariant holds exactly.
    """
    h = np.asarray(values, dtype=np.float64)
    if h.ndim != 1 or h.size == 0:
        raise ValueError("taps must be a non-empty 1-D sequence")
    energy = float(np.dot(h, h))
    if energy == 0.0:
        raise ValueError("taps must not be all zero")
    if abs(energy - 1.0) > RENORM_WARN_TOL:
        warnings.warn(
            f"tap energy {energy:.6g} != 1; renormalizing to unit energy",
            stacklevel=2,
        )
    return ChannelTaps(h / np.sqrt(energy))


def example_channel(memory: int) -> ChannelTaps:
    """Linearly decaying minimum-phase profile h[k] ~ (L-k+1)/(L+1), unit energy."""
    if memory < 0:
        raise ValueError("channel memory must be >= 0")
    L = int(memory)
    raw = np.array([(L - k + 1) / (L + 1) for k in range(L + 1)], dtype=np.float64)
    alpha = np.sqrt(np.sum(raw * raw))
    return ChannelTaps(raw / alpha)


def parse_channel(spec: str | Sequence[float]) -> ChannelTaps:
    """Channel from a config token: ``example:L`` or explicit comma-separated taps."""
    if not isinstance(spec, str):
        return make_taps(spec)
    text = spec.strip()
    if text.startswith("example:"):
        return example_channel(int(text.split(":", 1)[1]))
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ValueError(f"invalid channel spec {spec!r}") from None
    if not values:
        raise ValueError(f"invalid channel spec {spec!r}")
    return make_taps(values)


def convolve(
    symbols: Sequence[float], taps: ChannelTaps, history: float = -3.0
) -> np.ndarray:
    """r[k] = sum_j h[j] b[k-j], with b[m] = history for m < 0.

    The default history value is the all-zero-input 4-ASK symbol -(M-1) = -3,
    matching a terminated all-zero preamble; pass the appropriate level
    explicitly for other alphabets.  Output length equals the input length.
    """
    b = np.asarray(symbols, dtype=np.float64)
    L = taps.memory
    if b.size == 0:
        return np.zeros(0, dtype=np.float64)
    ext = np.concatenate([np.full(L, float(history)), b])
    return np.convolve(ext, taps.h)[L : L + b.size]


def add_awgn(
    r: Sequence[float], sigma: float, rng: int | np.random.Generator
) -> np.ndarray:
    """Add i.i.d. zero-mean Gaussian noise; deterministic for a given seed."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    r = np.asarray(r, dtype=np.float64)
    if sigma == 0.0:
        return r.copy()
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    return r + gen.normal(0.0, sigma, size=r.shape)


def is_minimum_phase(taps: ChannelTaps) -> bool:
    """True iff all zeros of h[0] z^L + ... + h[L] lie strictly inside the unit circle."""
    if taps.memory == 0:
        return True
    roots = np.roots(taps.h)
    return bool(np.all(np.abs(roots) < 1.0 - MIN_PHASE_TOL))

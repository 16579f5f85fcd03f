"""Independent reference implementations for verification.

Everything here goes through the plain encode -> map -> convolve chain and
exhaustive enumeration, never through the trellis tables or the search
kernels, so it can serve as an oracle for them.  Exponential in the block
length; keep blocks small.
"""

from __future__ import annotations

import itertools

import numpy as np

from .channel import ChannelTaps, convolve
from .convcode import GeneratorSet, encode_block
from .modem import bits_of_value, map_symbol


def reference_waveform(
    gen: GeneratorSet,
    taps: ChannelTaps,
    labeling: str,
    m: int,
    input_bits,
) -> np.ndarray:
    """Noiseless channel output for an input bit sequence (no termination)."""
    coded = encode_block(gen, np.asarray(input_bits, dtype=np.uint8), terminate=False)
    symbols = np.array(
        [map_symbol(step, labeling, m) for step in coded], dtype=np.float64
    )
    return convolve(symbols, taps, history=-(m - 1))


def reference_hypotheses(
    gen: GeneratorSet, taps: ChannelTaps, labeling: str, m: int
) -> np.ndarray:
    """Expected channel output per (register state, input) of the joint machine.

    State index bit j holds the input j+1 steps back; the hypothesis is the
    last sample of the reference waveform driven by that history.
    """
    depth = gen.nu + taps.memory
    out = np.empty((1 << depth, 2), dtype=np.float64)
    for state in range(1 << depth):
        history = [(state >> j) & 1 for j in range(depth - 1, -1, -1)]
        for u in (0, 1):
            wave = reference_waveform(gen, taps, labeling, m, history + [u])
            out[state, u] = wave[-1]
    return out


def exhaustive_mlse(
    gen: GeneratorSet,
    taps: ChannelTaps,
    labeling: str,
    m: int,
    observations,
    n_free: int,
    tail_bits,
) -> np.ndarray:
    """Best terminated input block by enumeration of all 2^n_free prefixes."""
    obs = np.asarray(observations, dtype=np.float64)
    tail = list(tail_bits)
    best, best_metric = None, np.inf
    for prefix in itertools.product((0, 1), repeat=n_free):
        candidate = list(prefix) + tail
        wave = reference_waveform(gen, taps, labeling, m, candidate)
        metric = float(np.sum((obs - wave) ** 2))
        if metric < best_metric:
            best_metric = metric
            best = candidate
    return np.array(best, dtype=np.uint8)


def exhaustive_symbol_posteriors(
    taps: ChannelTaps, m: int, observations, sigma: float
) -> np.ndarray:
    """Per-step symbol posteriors by summing over all M^T level sequences.

    The pre-block history is the all -(M-1) past, the end is free.  Returns
    (T, M) probabilities.
    """
    obs = np.asarray(observations, dtype=np.float64)
    T = obs.size
    inv2ss = 1.0 / (2.0 * sigma * sigma)
    log_joint = []
    seqs = list(itertools.product(range(m), repeat=T))
    for seq in seqs:
        levels = 2.0 * np.asarray(seq, dtype=np.float64) - (m - 1)
        wave = convolve(levels, taps, history=-(m - 1))
        log_joint.append(-float(np.sum((obs - wave) ** 2)) * inv2ss)
    log_joint = np.asarray(log_joint)
    log_joint -= log_joint.max()
    w = np.exp(log_joint)
    w /= w.sum()
    post = np.zeros((T, m))
    for weight, seq in zip(w, seqs):
        for t, c in enumerate(seq):
            post[t, c] += weight
    return post


def exhaustive_bit_llrs(
    taps: ChannelTaps, m: int, labeling: str, observations, sigma: float, clamp: float = 50.0
) -> np.ndarray:
    """Per-bit LLRs ln P(0)/P(1) from the exhaustive symbol posteriors."""
    post = exhaustive_symbol_posteriors(taps, m, observations, sigma)
    n = int(np.log2(m))
    bit_is_one = np.array(
        [bits_of_value(c, labeling, m) for c in range(m)], dtype=bool
    )
    p1 = post @ bit_is_one
    p0 = post @ ~bit_is_one
    with np.errstate(divide="ignore"):
        llr = np.log(p0) - np.log(p1)
    return np.clip(llr, -clamp, clamp)


def exhaustive_code_search(
    gen: GeneratorSet, step_costs, n_free: int
) -> tuple[np.ndarray, float, bool]:
    """Minimum-cost terminated codeword by enumeration.

    ``step_costs(coded_matrix) -> float`` scores a (steps, n) coded block;
    candidates are all 2^n_free info prefixes plus the nu-zero tail.
    Returns (best prefix, best metric, whether the optimum is unique);
    Hamming metrics tie routinely, so equality checks against a decoder with
    its own tie-breaking should compare metrics unless ``unique`` holds.
    """
    best, best_metric, unique = None, np.inf, True
    for prefix in itertools.product((0, 1), repeat=n_free):
        coded = encode_block(gen, np.array(prefix, dtype=np.uint8), terminate=True)
        metric = float(step_costs(coded))
        if metric < best_metric:
            best_metric = metric
            best = prefix
            unique = True
        elif metric == best_metric:
            unique = False
    return np.array(best, dtype=np.uint8), best_metric, unique


def code_cost(gen: GeneratorSet, info_bits, step_costs) -> float:
    """Cost of the terminated codeword generated by ``info_bits``."""
    coded = encode_block(gen, np.asarray(info_bits, dtype=np.uint8), terminate=True)
    return float(step_costs(coded))


def hamming_cost(rx_bits):
    rx = np.asarray(rx_bits)

    def cost(coded):
        return np.sum(coded != rx)

    return cost


def llr_cost(llrs):
    llr = np.asarray(llrs, dtype=np.float64)

    def cost(coded):
        return float(np.sum(llr[coded.astype(bool)]))

    return cost

"""Receivers: Viterbi MLSE, reduced-state search with decision feedback,
DFSE symbol equalization, forward-backward (BCJR) soft equalization, and
hard/soft decoding of the code trellis.

All sequence searches minimize accumulated squared Euclidean distance (or
Hamming/LLR costs for the code trellis), break survivor ties toward the
smaller predecessor state index, and run block-wise with full traceback:
``terminated=True`` roots the traceback in the all-zero state, otherwise the
best end metric wins.  Each decoding run owns its survivor storage, so any
number of runs may share the same immutable trellis concurrently.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _backend
from .channel import ChannelTaps, is_minimum_phase
from .modem import bits_of_value, _check_alphabet
from .trellis import Trellis, build_channel_trellis

LLR_CLAMP = 50.0


@dataclass(frozen=True)
class RssePartition:
    """Keep the r newest register bits as the reduced state."""

    r: int

    @property
    def hyperstates(self) -> int:
        return 1 << self.r


def _indices_to_bits(indices: np.ndarray, bits_per_input: int) -> np.ndarray:
    if bits_per_input == 1:
        return indices.astype(np.uint8)
    shifts = np.arange(bits_per_input - 1, -1, -1)
    return ((indices[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def _check_observations(observations) -> np.ndarray:
    obs = np.ascontiguousarray(observations, dtype=np.float64)
    if obs.ndim != 1 or obs.size == 0:
        raise ValueError("observations must be a non-empty 1-D sequence")
    return obs


def viterbi_mlse(
    trellis: Trellis, observations, terminated: bool = True
) -> np.ndarray:
    """MLSE over a real-hypothesis trellis; returns the decoded input bits.

    Minimizes sum_k (r[k] - hyp)^2 over all paths from the start state.
    Input indices along the winning path are unpacked MSB-first into a flat
    bit array (one bit per step for code-driven trellises, n bits per step
    for the channel trellis).
    """
    obs = _check_observations(observations)
    ps, pu, _ = trellis.predecessors
    end = trellis.start_state if terminated else -1
    idx = _backend.kernels().viterbi(
        obs, ps, pu, trellis.prev_hyp, trellis.start_state, end
    )
    return _indices_to_bits(idx, trellis.bits_per_input)


def _shift_predecessors(base: int, reduced_depth: int):
    """Incoming branches of the shift trellis q = (p*B + u) mod B^reduced_depth.

    Ordered by ascending (p, u); each state has exactly B incoming branches
    with the input digit forced by the state's newest position.
    """
    R = base**reduced_depth
    q = np.arange(R, dtype=np.int64)
    m = np.arange(base, dtype=np.int64)
    if reduced_depth == 0:
        prev_state = np.zeros((1, base), dtype=np.int32)
        prev_input = m[None, :].astype(np.int32)
        return prev_state, prev_input
    prev_state = ((q[:, None] // base) + m[None, :] * base ** (reduced_depth - 1)).astype(
        np.int32
    )
    prev_input = np.broadcast_to((q % base)[:, None], (R, base)).astype(np.int32)
    return np.ascontiguousarray(prev_state), np.ascontiguousarray(prev_input)


def md_rsse_decode(
    matched: Trellis,
    partition: RssePartition,
    observations,
    terminated: bool = True,
) -> np.ndarray:
    """Reduced-state decoding of the matched trellis (2^r hyperstates).

    One survivor per hyperstate; the register bits beyond the hyperstate are
    fed back from the survivor's own decision history when branch hypotheses
    are evaluated.  With r equal to the full register depth the decisions
    are bit-identical to :func:`viterbi_mlse` on the matched trellis.
    """
    if matched.kind != "matched":
        raise ValueError("md_rsse_decode requires a matched trellis")
    depth = int(matched.num_states - 1).bit_length()
    r = partition.r if isinstance(partition, RssePartition) else int(partition)
    if not 1 <= r <= depth:
        raise ValueError(f"partition size r={r} outside 1..{depth}")
    obs = _check_observations(observations)
    ps, pu = _shift_predecessors(2, r)
    end = matched.start_state % (1 << r) if terminated else -1
    idx = _backend.kernels().rsse(
        obs, matched.hyp, ps, pu, matched.num_states, matched.start_state, end
    )
    return idx.astype(np.uint8)


def dfse_equalize(
    taps: ChannelTaps, m: int, q_h: int, observations
) -> np.ndarray:
    """Hard symbol decisions from a decision-feedback sequence estimator.

    The search trellis covers the q_h newest symbols (M^q_h states); the
    remaining taps are cancelled per state from the survivor's own past
    symbol decisions.  q_h = L degenerates to full-state MLSE of the
    channel.  Returns the survivor's bipolar symbol sequence.
    """
    if not 0 <= q_h <= taps.memory:
        raise ValueError(f"q_h={q_h} outside 0..{taps.memory}")
    if not is_minimum_phase(taps):
        warnings.warn("channel is not minimum phase; decision feedback is unreliable")
    channel = build_channel_trellis(taps, m)
    idx = _dfse_indices(channel, m, q_h, observations)
    return 2.0 * idx - (m - 1)


def _dfse_indices(channel: Trellis, m: int, q_h: int, observations) -> np.ndarray:
    obs = _check_observations(observations)
    ps, pu = _shift_predecessors(m, q_h)
    idx = _backend.kernels().rsse(
        obs, channel.hyp, ps, pu, channel.num_states, channel.start_state, -1
    )
    return idx


def _labeling_bit_table(labeling: str, m: int) -> np.ndarray:
    n = _check_alphabet(m)
    table = np.empty((m, n), dtype=np.uint8)
    for c in range(m):
        table[c] = bits_of_value(c, labeling, m)
    return table


def bcjr_equalize(
    channel_trellis: Trellis,
    observations,
    sigma: float,
    labeling: str = "natural",
) -> np.ndarray:
    """Per-bit LLRs from log-domain forward-backward equalization.

    Branch likelihoods are exp(-(r - hyp)^2 / (2 sigma^2)); the chain starts
    in the known all-history state and ends free.  Symbol posteriors are
    marginalized to bit LLRs under the active labeling, with the convention
    LLR = ln P(bit=0)/P(bit=1), clamped to +-50.
    """
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    if channel_trellis.kind != "channel":
        raise ValueError("bcjr_equalize requires a channel trellis")
    obs = _check_observations(observations)
    m = channel_trellis.inputs_per_state
    bit_table = _labeling_bit_table(labeling, m)
    ps, pu, _ = channel_trellis.predecessors
    llr = _backend.kernels().bcjr_llrs(
        obs,
        ps,
        pu,
        channel_trellis.prev_hyp,
        channel_trellis.next_state,
        channel_trellis.hyp,
        1.0 / (2.0 * sigma * sigma),
        channel_trellis.start_state,
        bit_table,
    )
    return np.clip(llr, -LLR_CLAMP, LLR_CLAMP)


def _decode_code(code_trellis: Trellis, costs: np.ndarray) -> np.ndarray:
    ps, pu, counts = code_trellis.predecessors
    if not np.all(counts == code_trellis.inputs_per_state):
        raise ValueError("code trellis must be input-balanced")
    if costs.shape[1] != 1 << code_trellis.label_bits:
        raise ValueError(
            f"metrics cover {costs.shape[1]} output patterns, "
            f"code emits {code_trellis.label_bits} bits per step"
        )
    prev_cost_idx = np.ascontiguousarray(code_trellis.labels[ps, pu]).astype(np.int32)
    idx = _backend.kernels().viterbi_cost(
        np.ascontiguousarray(costs, dtype=np.float64),
        ps,
        prev_cost_idx,
        pu,
        code_trellis.start_state,
        code_trellis.start_state,
    )
    return idx.astype(np.uint8)


def decode_code_hard(code_trellis: Trellis, hard_bits) -> np.ndarray:
    """Hamming-metric Viterbi decoding of a terminated coded block.

    ``hard_bits`` is (steps, n); returns the input bit per step (termination
    tail included).
    """
    bits = np.asarray(hard_bits, dtype=np.int64)
    if bits.ndim != 2:
        raise ValueError("hard_bits must be (steps, n)")
    shifts = np.arange(bits.shape[1] - 1, -1, -1)
    rx = (bits << shifts).sum(axis=1)
    combos = np.arange(1 << bits.shape[1], dtype=np.int64)
    costs = np.bitwise_count(rx[:, None] ^ combos[None, :]).astype(np.float64)
    return _decode_code(code_trellis, costs)


def decode_code_soft(code_trellis: Trellis, llrs) -> np.ndarray:
    """Max-likelihood Viterbi decoding from per-bit LLRs.

    With LLR = ln P(bit=0)/P(bit=1) the path cost accumulates llr_i for every
    coded bit c_i = 1, so minimizing it maximizes the codeword likelihood.
    """
    llr = np.asarray(llrs, dtype=np.float64)
    if llr.ndim != 2:
        raise ValueError("llrs must be (steps, n)")
    n = llr.shape[1]
    combos = np.arange(1 << n)
    combo_bits = ((combos[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.float64)
    costs = llr @ combo_bits.T
    return _decode_code(code_trellis, costs)


def demap_hard(symbols, labeling: str, m: int) -> np.ndarray:
    """Nearest-level hard demapping to bits; boundary ties take the smaller level."""
    x = np.asarray(symbols, dtype=np.float64)
    c = np.ceil((x + m - 2) / 2.0).astype(np.int64)
    np.clip(c, 0, m - 1, out=c)
    table = _labeling_bit_table(labeling, m)
    return table[c]

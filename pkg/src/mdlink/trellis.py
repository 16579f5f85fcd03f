"""Immutable trellis constructions and the receiver state-count calculator.

Four finite-state machines share one table format:

* code     — encoder states 2^nu, branch labels are the n coded bits;
* channel  — symbol-history states M^L, real-valued branch hypotheses;
* super    — product of encoder and channel states (2^nu * M^L);
* matched  — the joint code+channel machine folded onto one binary shift
             register of nu+L input bits, 2^(nu+L) states.  Branch hypotheses
             equal the noiseless channel output of the reference chain
             encode -> map -> convolve, so MLSE on this trellis is exact
             joint equalization and decoding at a fraction of the states.

State indexing puts the newest register element in the least significant
bit/digit, so dropping history (reduced-state search) is a plain modulo.
State 0 is always the all-zero-input / deepest-negative-symbol history and
serves as start state.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .convcode import GeneratorSet
from .channel import ChannelTaps
from .modem import bits_of_value, label_value, _check_alphabet

DEFAULT_STATE_BUDGET = 1 << 20


class CapacityError(ValueError):
    """Raised when a construction would exceed the configured state budget."""


@dataclass(frozen=True)
class Trellis:
    """Immutable state-transition table.

    ``next_state[s, i]`` and, depending on kind, either ``hyp[s, i]`` (real
    channel-output expectation) or ``labels[s, i]`` (coded output bits packed
    MSB-first into an int) describe the branch taken from state s on input
    index i.  Each branch consumes ``bits_per_input`` input bits; input
    indices unpack to bits MSB-first.
    """

    kind: str
    num_states: int
    inputs_per_state: int
    bits_per_input: int
    next_state: np.ndarray
    start_state: int
    hyp: np.ndarray | None = None
    labels: np.ndarray | None = None
    label_bits: int = 0

    def __post_init__(self):
        self.next_state.setflags(write=False)
        if self.hyp is not None:
            self.hyp.setflags(write=False)
        if self.labels is not None:
            self.labels.setflags(write=False)

    @cached_property
    def predecessors(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Incoming branches per state as (prev_state, prev_input, counts).

        Rows are ordered by ascending (prev_state, prev_input); decoder
        tie-breaks rely on this order.  States receive different numbers of
        incoming branches in the unreduced super trellis, so rows are padded
        to the maximum count (padding entries are (0, 0); ``counts`` gives
        the number of real entries per row, and ``prev_hyp`` carries +inf at
        padded positions).
        """
        S, B = self.num_states, self.inputs_per_state
        flat_next = self.next_state.ravel()
        order = np.argsort(flat_next, kind="stable")
        counts = np.bincount(flat_next, minlength=S).astype(np.int32)
        width = int(counts.max())
        prev_state = np.zeros((S, width), dtype=np.int32)
        prev_input = np.zeros((S, width), dtype=np.int32)
        cols = np.concatenate([np.arange(c) for c in counts]) if S else np.array([])
        rows = np.repeat(np.arange(S), counts)
        prev_state[rows, cols] = (order // B).astype(np.int32)
        prev_input[rows, cols] = (order % B).astype(np.int32)
        for a in (prev_state, prev_input, counts):
            a.setflags(write=False)
        return prev_state, prev_input, counts

    @cached_property
    def prev_hyp(self) -> np.ndarray:
        """Branch hypotheses gathered in predecessor order (+inf at padding)."""
        if self.hyp is None:
            raise ValueError(f"{self.kind} trellis carries no real hypotheses")
        ps, pu, counts = self.predecessors
        g = self.hyp[ps, pu]
        pad = np.arange(ps.shape[1])[None, :] >= counts[:, None]
        g[pad] = np.inf
        g.setflags(write=False)
        return g


def _parity_of_masked(values: np.ndarray, mask: int) -> np.ndarray:
    return (np.bitwise_count(values & mask) & 1).astype(np.int64)


def _label_lut(labeling: str, m: int) -> np.ndarray:
    """Label value c for each packed bit pattern (natural: identity)."""
    n = _check_alphabet(m)
    lut = np.empty(m, dtype=np.int64)
    for packed in range(m):
        bits = [(packed >> (n - 1 - i)) & 1 for i in range(n)]
        lut[packed] = label_value(bits, labeling, m)
    return lut


def build_code_trellis(gen: GeneratorSet) -> Trellis:
    """Encoder FSM: 2^nu states, branch labels are the packed coded bits."""
    nu, n = gen.nu, gen.n
    S = 1 << nu
    masks = gen.tap_masks()
    regs = (np.arange(S, dtype=np.int64)[:, None] << 1) | np.array([0, 1])
    labels = np.zeros((S, 2), dtype=np.int32)
    for i, mask in enumerate(masks):
        labels |= (_parity_of_masked(regs, mask) << (n - 1 - i)).astype(np.int32)
    next_state = (regs & (S - 1)).astype(np.int32)
    return Trellis(
        kind="code",
        num_states=S,
        inputs_per_state=2,
        bits_per_input=1,
        next_state=next_state,
        start_state=0,
        labels=labels,
        label_bits=n,
    )


def build_channel_trellis(
    taps: ChannelTaps, m: int, state_budget: int = DEFAULT_STATE_BUDGET
) -> Trellis:
    """Symbol-history FSM over the last L symbols: M^L states, M branches.

    The branch input index is the unipolar level index c of the new symbol
    (level 2c - (M-1)); input bits unpack as the natural label of c.
    State index digits (base M, newest in the least significant digit) hold
    the level indices of the history, so state 0 is an all -(M-1) past.
    """
    n = _check_alphabet(m)
    L = taps.memory
    S = m**L
    if S > state_budget:
        raise CapacityError(f"channel trellis needs {S} states > budget {state_budget}")
    states = np.arange(S, dtype=np.int64)
    hyp = np.zeros((S, m), dtype=np.float64)
    c_new = np.arange(m, dtype=np.int64)
    hyp += taps.h[0] * (2.0 * c_new - (m - 1))[None, :]
    for j in range(1, L + 1):
        digit = (states // m ** (j - 1)) % m
        hyp += (taps.h[j] * (2.0 * digit - (m - 1)))[:, None]
    next_state = ((states[:, None] * m + c_new[None, :]) % S).astype(np.int32)
    return Trellis(
        kind="channel",
        num_states=S,
        inputs_per_state=m,
        bits_per_input=n,
        next_state=next_state,
        start_state=0,
        hyp=hyp,
    )


def build_super_trellis(
    gen: GeneratorSet,
    taps: ChannelTaps,
    labeling: str = "natural",
    state_budget: int = DEFAULT_STATE_BUDGET,
) -> Trellis:
    """Joint (encoder state, last L symbols) FSM with 2^nu * M^L states.

    This is exact MLSE territory but deliberately unreduced: the symbol
    history is treated as free M-ary values, so only the 2^(nu+L) states
    consistent with some input sequence are ever reachable from the start.
    """
    m = 1 << gen.n
    n = _check_alphabet(m)
    if labeling not in ("natural", "gray"):
        raise ValueError("super trellis requires a real-valued labeling")
    nu, L = gen.nu, taps.memory
    S_enc, S_cha = 1 << nu, m**L
    S = S_enc * S_cha
    if S > state_budget:
        raise CapacityError(f"super trellis needs {S} states > budget {state_budget}")

    states = np.arange(S, dtype=np.int64)
    enc = states // S_cha
    hist = states % S_cha
    lut = _label_lut(labeling, m)
    masks = gen.tap_masks()

    isi = np.zeros(S, dtype=np.float64)
    for j in range(1, L + 1):
        digit = (hist // m ** (j - 1)) % m
        isi += taps.h[j] * (2.0 * digit - (m - 1))

    next_state = np.empty((S, 2), dtype=np.int32)
    hyp = np.empty((S, 2), dtype=np.float64)
    for u in (0, 1):
        regs = (enc << 1) | u
        packed = np.zeros(S, dtype=np.int64)
        for i, mask in enumerate(masks):
            packed |= _parity_of_masked(regs, mask) << (n - 1 - i)
        c = lut[packed]
        hyp[:, u] = taps.h[0] * (2.0 * c - (m - 1)) + isi
        enc_next = regs & (S_enc - 1)
        hist_next = (hist * m + c) % S_cha
        next_state[:, u] = enc_next * S_cha + hist_next
    return Trellis(
        kind="super",
        num_states=S,
        inputs_per_state=2,
        bits_per_input=1,
        next_state=next_state,
        start_state=0,
        hyp=hyp,
    )


def build_matched_trellis(
    gen: GeneratorSet,
    taps: ChannelTaps,
    labeling: str = "natural",
    state_budget: int = DEFAULT_STATE_BUDGET,
) -> Trellis:
    """Joint code+channel FSM on a single binary register: 2^(nu+L) states.

    One register keeps the nu+L most recent input bits (newest in the LSB).
    For a branch (state s, input u) the coded bits at channel lag j are the
    generator parities of the register window starting at that lag; weighting
    their label value c_j with the taps gives the branch hypothesis

        hyp = 2 * sum_j h[j] * c_j + C,   C = -(M-1) * sum_j h[j],

    which equals the noiseless output of encode -> map -> convolve for the
    input history the state encodes.
    """
    m = 1 << gen.n
    n = _check_alphabet(m)
    if labeling not in ("natural", "gray"):
        raise ValueError("matched trellis requires a real-valued labeling")
    nu, L = gen.nu, taps.memory
    depth = nu + L
    S = 1 << depth
    if S > state_budget:
        raise CapacityError(f"matched trellis needs {S} states > budget {state_budget}")

    lut = _label_lut(labeling, m)
    masks = gen.tap_masks()
    const = -float((m - 1) * np.sum(taps.h))

    regs = (np.arange(S, dtype=np.int64)[:, None] << 1) | np.array([0, 1])
    acc = np.zeros((S, 2), dtype=np.float64)
    for j in range(L + 1):
        window = regs >> j
        packed = np.zeros((S, 2), dtype=np.int64)
        for i, mask in enumerate(masks):
            packed |= _parity_of_masked(window, mask) << (n - 1 - i)
        acc += taps.h[j] * lut[packed]
    hyp = 2.0 * acc + const
    next_state = (regs & (S - 1)).astype(np.int32)
    return Trellis(
        kind="matched",
        num_states=S,
        inputs_per_state=2,
        bits_per_input=1,
        next_state=next_state,
        start_state=0,
        hyp=hyp,
    )


def reachable_states(trellis: Trellis) -> np.ndarray:
    """Indices of states reachable from the start within num_states steps."""
    seen = np.zeros(trellis.num_states, dtype=bool)
    frontier = np.array([trellis.start_state])
    seen[frontier] = True
    for _ in range(trellis.num_states):
        nxt = np.unique(trellis.next_state[frontier].ravel())
        nxt = nxt[~seen[nxt]]
        if nxt.size == 0:
            break
        seen[nxt] = True
        frontier = nxt
    return np.flatnonzero(seen)


@dataclass(frozen=True)
class ComplexityReport:
    """Receiver state counts for one (code, channel, alphabet) configuration."""

    nu: int
    memory: int
    m: int
    z_enc: int
    z_equ: int
    z_separate: int
    z_std: int
    z_md: int
    gain_md: int


def complexity_from_orders(nu: int, memory: int, m: int) -> ComplexityReport:
    """State counts from the raw orders (encoder memory, channel memory, M)."""
    n = _check_alphabet(m)
    z_enc = 1 << nu
    z_equ = m**memory
    z_md = 1 << (nu + memory)
    return ComplexityReport(
        nu=nu,
        memory=memory,
        m=m,
        z_enc=z_enc,
        z_equ=z_equ,
        z_separate=z_enc + z_equ,
        z_std=z_enc * z_equ,
        z_md=z_md,
        gain_md=1 << (memory * (n - 1)),
    )


def complexity_report(gen: GeneratorSet, taps: ChannelTaps, m: int) -> ComplexityReport:
    """State counts for separated, full joint, and matched-register receivers."""
    return complexity_from_orders(gen.nu, taps.memory, m)

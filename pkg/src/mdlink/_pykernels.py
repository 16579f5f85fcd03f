"""Pure-numpy trellis-search and forward-backward kernels.

Reference implementations of the hot loops; the compiled twin in
``_ckernels`` follows the same branch enumeration order and tie-breaking so
hard decisions are bit-identical across backends.

Conventions shared by all kernels:

* predecessor tables list incoming branches per state ordered by ascending
  (previous state, input); padded entries carry +inf hypotheses;
* survivor ties keep the first (smallest predecessor) branch;
* ``end_state`` >= 0 forces the traceback root, -1 picks the best end metric
  (first state on ties).
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def _traceback(bp, prev_state, prev_input, end):
    T = bp.shape[0]
    dec = np.empty(T, dtype=np.int32)
    q = int(end)
    for t in range(T - 1, -1, -1):
        j = bp[t, q]
        dec[t] = prev_input[q, j]
        q = int(prev_state[q, j])
    return dec


def viterbi(obs, prev_state, prev_input, prev_hyp, start_state, end_state):
    """Min squared-distance path search; returns per-step input indices."""
    T = obs.shape[0]
    S = prev_state.shape[0]
    pm = np.full(S, np.inf)
    pm[start_state] = 0.0
    bp = np.empty((T, S), dtype=np.uint8)
    for t in range(T):
        d = obs[t] - prev_hyp
        cand = pm[prev_state] + d * d
        j = np.argmin(cand, axis=1)
        bp[t] = j
        pm = cand[np.arange(S), j]
    end = end_state if end_state >= 0 else int(np.argmin(pm))
    return _traceback(bp, prev_state, prev_input, end)


def viterbi_cost(costs, prev_state, prev_cost_idx, prev_input, start_state, end_state):
    """Viterbi with per-step branch costs looked up by output label index."""
    T = costs.shape[0]
    S = prev_state.shape[0]
    pm = np.full(S, np.inf)
    pm[start_state] = 0.0
    bp = np.empty((T, S), dtype=np.uint8)
    for t in range(T):
        cand = pm[prev_state] + costs[t, prev_cost_idx]
        j = np.argmin(cand, axis=1)
        bp[t] = j
        pm = cand[np.arange(S), j]
    end = end_state if end_state >= 0 else int(np.argmin(pm))
    return _traceback(bp, prev_state, prev_input, end)


def rsse(obs, hyp_full, prev_state, prev_input, full_size, start_full, end_state):
    """Reduced-state search with per-survivor feedback from the path register.

    The search runs on the reduced trellis described by the predecessor
    tables while each reduced state carries the full-register index of its
    survivor; branch hypotheses are read from the full table at that index,
    so history beyond the reduced state is taken from the survivor's own
    past decisions.  ``full`` evolves as (full * B + u) mod full_size.
    """
    T = obs.shape[0]
    R, B = prev_state.shape
    pm = np.full(R, np.inf)
    start_red = int(start_full) % R
    pm[start_red] = 0.0
    full_reg = np.arange(R, dtype=np.int64)
    full_reg[start_red] = start_full
    bp = np.empty((T, R), dtype=np.uint8)
    rows = np.arange(R)
    for t in range(T):
        f = full_reg[prev_state]
        d = obs[t] - hyp_full[f, prev_input]
        cand = pm[prev_state] + d * d
        j = np.argmin(cand, axis=1)
        bp[t] = j
        pm = cand[rows, j]
        full_reg = (f[rows, j] * B + prev_input[rows, j]) % full_size
    end = end_state if end_state >= 0 else int(np.argmin(pm))
    return _traceback(bp, prev_state, prev_input, end)


def bcjr_llrs(
    obs,
    prev_state,
    prev_input,
    prev_hyp,
    next_state,
    hyp,
    inv_two_sigma_sq,
    start_state,
    bit_table,
):
    """Log-domain forward-backward bit LLRs, ln P(bit=0)/P(bit=1).

    The chain starts in ``start_state``; the final state is unconstrained.
    ``bit_table[c, i]`` gives bit i transmitted for branch input c.
    """
    T = obs.shape[0]
    S, B = next_state.shape
    n = bit_table.shape[1]

    alpha = np.full((T + 1, S), -np.inf)
    alpha[0, start_state] = 0.0
    for t in range(T):
        d = obs[t] - prev_hyp
        cand = alpha[t, prev_state] - d * d * inv_two_sigma_sq
        row = np.logaddexp.reduce(cand, axis=1)
        alpha[t + 1] = row - row.max()

    beta = np.empty((T + 1, S))
    beta[T] = 0.0
    for t in range(T - 1, -1, -1):
        d = obs[t] - hyp
        cand = beta[t + 1, next_state] - d * d * inv_two_sigma_sq
        row = np.logaddexp.reduce(cand, axis=1)
        beta[t] = row - row.max()

    llr = np.empty((T, n))
    chunk = max(1, (1 << 18) // (S * B))
    zero_sel = [np.flatnonzero(bit_table[:, i] == 0) for i in range(n)]
    one_sel = [np.flatnonzero(bit_table[:, i] == 1) for i in range(n)]
    for t0 in range(0, T, chunk):
        t1 = min(T, t0 + chunk)
        d = obs[t0:t1, None, None] - hyp[None, :, :]
        lp = (
            alpha[t0:t1, :, None]
            - d * d * inv_two_sigma_sq
            + beta[t0 + 1 : t1 + 1, next_state]
        )
        for i in range(n):
            s0 = np.logaddexp.reduce(
                lp[:, :, zero_sel[i]].reshape(t1 - t0, -1), axis=1
            )
            s1 = np.logaddexp.reduce(
                lp[:, :, one_sel[i]].reshape(t1 - t0, -1), axis=1
            )
            llr[t0:t1, i] = s0 - s1
    return llr

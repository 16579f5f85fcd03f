# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled trellis-search and forward-backward kernels.

Twin of ``_pykernels``: same branch enumeration order and tie-breaking, so
hard decisions are bit-identical and soft outputs agree to rounding.
"""

from libc.math cimport INFINITY, exp, log1p

import numpy as np

BACKEND_NAME = "cython"


cdef inline double _logaddexp(double a, double b) noexcept nogil:
    cdef double t
    if a == -INFINITY:
        return b
    if b == -INFINITY:
        return a
    if a < b:
        t = a
        a = b
        b = t
    return a + log1p(exp(b - a))


cdef _traceback(const unsigned char[:, ::1] bp, const int[:, ::1] prev_state,
                const int[:, ::1] prev_input, Py_ssize_t end):
    cdef Py_ssize_t T = bp.shape[0]
    cdef Py_ssize_t t, j
    cdef Py_ssize_t q = end
    dec_arr = np.empty(T, dtype=np.int32)
    cdef int[::1] dec = dec_arr
    for t in range(T - 1, -1, -1):
        j = bp[t, q]
        dec[t] = prev_input[q, j]
        q = prev_state[q, j]
    return dec_arr


cdef Py_ssize_t _best_state(double[::1] pm) noexcept nogil:
    cdef Py_ssize_t q, best = 0
    cdef double m = pm[0]
    for q in range(1, pm.shape[0]):
        if pm[q] < m:
            m = pm[q]
            best = q
    return best


def viterbi(const double[::1] obs, const int[:, ::1] prev_state, const int[:, ::1] prev_input,
            const double[:, ::1] prev_hyp, int start_state, int end_state):
    """Min squared-distance path search; returns per-step input indices."""
    cdef Py_ssize_t T = obs.shape[0]
    cdef Py_ssize_t S = prev_state.shape[0]
    cdef Py_ssize_t K = prev_state.shape[1]
    cdef Py_ssize_t t, q, j, bj
    cdef double o, d, m, best

    pm_arr = np.full(S, np.inf)
    npm_arr = np.empty(S)
    bp_arr = np.empty((T, S), dtype=np.uint8)
    cdef double[::1] pm = pm_arr
    cdef double[::1] npm = npm_arr
    cdef unsigned char[:, ::1] bp = bp_arr
    pm[start_state] = 0.0

    with nogil:
        for t in range(T):
            o = obs[t]
            for q in range(S):
                best = INFINITY
                bj = 0
                for j in range(K):
                    m = pm[prev_state[q, j]]
                    if m == INFINITY:
                        continue
                    d = o - prev_hyp[q, j]
                    m = m + d * d
                    if m < best:
                        best = m
                        bj = j
                npm[q] = best
                bp[t, q] = <unsigned char> bj
            pm[:] = npm

    cdef Py_ssize_t end = end_state if end_state >= 0 else _best_state(pm)
    return _traceback(bp, prev_state, prev_input, end)


def viterbi_cost(const double[:, ::1] costs, const int[:, ::1] prev_state,
                 const int[:, ::1] prev_cost_idx, const int[:, ::1] prev_input,
                 int start_state, int end_state):
    """Viterbi with per-step branch costs looked up by output label index."""
    cdef Py_ssize_t T = costs.shape[0]
    cdef Py_ssize_t S = prev_state.shape[0]
    cdef Py_ssize_t K = prev_state.shape[1]
    cdef Py_ssize_t t, q, j, bj
    cdef double m, best

    pm_arr = np.full(S, np.inf)
    npm_arr = np.empty(S)
    bp_arr = np.empty((T, S), dtype=np.uint8)
    cdef double[::1] pm = pm_arr
    cdef double[::1] npm = npm_arr
    cdef unsigned char[:, ::1] bp = bp_arr
    pm[start_state] = 0.0

    with nogil:
        for t in range(T):
            for q in range(S):
                best = INFINITY
                bj = 0
                for j in range(K):
                    m = pm[prev_state[q, j]]
                    if m == INFINITY:
                        continue
                    m = m + costs[t, prev_cost_idx[q, j]]
                    if m < best:
                        best = m
                        bj = j
                npm[q] = best
                bp[t, q] = <unsigned char> bj
            pm[:] = npm

    cdef Py_ssize_t end = end_state if end_state >= 0 else _best_state(pm)
    return _traceback(bp, prev_state, prev_input, end)


def rsse(const double[::1] obs, const double[:, ::1] hyp_full, const int[:, ::1] prev_state,
         const int[:, ::1] prev_input, long full_size, long start_full,
         int end_state):
    """Reduced-state search with per-survivor feedback from the path register."""
    cdef Py_ssize_t T = obs.shape[0]
    cdef Py_ssize_t R = prev_state.shape[0]
    cdef Py_ssize_t B = prev_state.shape[1]
    cdef Py_ssize_t t, q, j, p, bj
    cdef long f, bf
    cdef double o, d, m, best

    pm_arr = np.full(R, np.inf)
    npm_arr = np.empty(R)
    full_arr = np.arange(R, dtype=np.int64)
    nfull_arr = np.empty(R, dtype=np.int64)
    bp_arr = np.empty((T, R), dtype=np.uint8)
    cdef double[::1] pm = pm_arr
    cdef double[::1] npm = npm_arr
    cdef long[::1] full_reg = full_arr
    cdef long[::1] nfull = nfull_arr
    cdef unsigned char[:, ::1] bp = bp_arr

    cdef Py_ssize_t start_red = start_full % R
    pm[start_red] = 0.0
    full_reg[start_red] = start_full

    with nogil:
        for t in range(T):
            o = obs[t]
            for q in range(R):
                best = INFINITY
                bj = 0
                bf = q
                for j in range(B):
                    p = prev_state[q, j]
                    m = pm[p]
                    f = full_reg[p]
                    d = o - hyp_full[f, prev_input[q, j]]
                    m = m + d * d
                    if m < best:
                        best = m
                        bj = j
                        bf = (f * B + prev_input[q, j]) % full_size
                npm[q] = best
                nfull[q] = bf
                bp[t, q] = <unsigned char> bj
            pm[:] = npm
            full_reg[:] = nfull

    cdef Py_ssize_t end = end_state if end_state >= 0 else _best_state(pm)
    return _traceback(bp, prev_state, prev_input, end)


def bcjr_llrs(const double[::1] obs, const int[:, ::1] prev_state, const int[:, ::1] prev_input,
              const double[:, ::1] prev_hyp, const int[:, ::1] next_state,
              const double[:, ::1] hyp, double inv_two_sigma_sq, int start_state,
              const unsigned char[:, ::1] bit_table):
    """Log-domain forward-backward bit LLRs, ln P(bit=0)/P(bit=1)."""
    cdef Py_ssize_t T = obs.shape[0]
    cdef Py_ssize_t S = next_state.shape[0]
    cdef Py_ssize_t B = next_state.shape[1]
    cdef Py_ssize_t n = bit_table.shape[1]
    cdef Py_ssize_t t, q, s, j, u, i
    cdef double o, d, a, g, acc, rowmax, lp

    alpha_arr = np.full((T + 1, S), -np.inf)
    beta_arr = np.empty((T + 1, S))
    llr_arr = np.empty((T, n))
    acc0_arr = np.empty(n)
    acc1_arr = np.empty(n)
    cdef double[:, ::1] alpha = alpha_arr
    cdef double[:, ::1] beta = beta_arr
    cdef double[:, ::1] llr = llr_arr
    cdef double[::1] acc0 = acc0_arr
    cdef double[::1] acc1 = acc1_arr
    alpha[0, start_state] = 0.0

    with nogil:
        for t in range(T):
            o = obs[t]
            rowmax = -INFINITY
            for q in range(S):
                acc = -INFINITY
                for j in range(prev_state.shape[1]):
                    a = alpha[t, prev_state[q, j]]
                    if a == -INFINITY:
                        continue
                    d = o - prev_hyp[q, j]
                    acc = _logaddexp(acc, a - d * d * inv_two_sigma_sq)
                alpha[t + 1, q] = acc
                if acc > rowmax:
                    rowmax = acc
            for q in range(S):
                alpha[t + 1, q] -= rowmax

        for q in range(S):
            beta[T, q] = 0.0
        for t in range(T - 1, -1, -1):
            o = obs[t]
            rowmax = -INFINITY
            for s in range(S):
                acc = -INFINITY
                for u in range(B):
                    d = o - hyp[s, u]
                    acc = _logaddexp(
                        acc, beta[t + 1, next_state[s, u]] - d * d * inv_two_sigma_sq
                    )
                beta[t, s] = acc
                if acc > rowmax:
                    rowmax = acc
            for s in range(S):
                beta[t, s] -= rowmax

        for t in range(T):
            o = obs[t]
            for i in range(n):
                acc0[i] = -INFINITY
                acc1[i] = -INFINITY
            for s in range(S):
                a = alpha[t, s]
                if a == -INFINITY:
                    continue
                for u in range(B):
                    d = o - hyp[s, u]
                    lp = a - d * d * inv_two_sigma_sq + beta[t + 1, next_state[s, u]]
                    for i in range(n):
                        if bit_table[u, i]:
                            acc1[i] = _logaddexp(acc1[i], lp)
                        else:
                            acc0[i] = _logaddexp(acc0[i], lp)
            for i in range(n):
                llr[t, i] = acc0[i] - acc1[i]

    return llr_arr

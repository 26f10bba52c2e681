# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Same contract and identical outputs as rnp._kernels_py: the Monte-Carlo
trial loop and the absorbing-chain evolution, fed by Philox4x32-10
counter-based uniforms keyed by (seed, trial, draw).
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint32_t, uint64_t

cnp.import_array()

NAME = "compiled"

HARD_CAP = 10_000_000

cdef uint64_t _M0 = 0xD2511F53u
cdef uint64_t _M1 = 0xCD9E8D57u
cdef uint32_t _BUMP0 = 0x9E3779B9u
cdef uint32_t _BUMP1 = 0xBB67AE85u
cdef double _INV53 = 1.0 / 9007199254740992.0


cdef inline double _philox_uniform(uint64_t seed, uint32_t trial, uint32_t draw) nogil:
    cdef uint32_t c0 = draw
    cdef uint32_t c1 = trial
    cdef uint32_t c2 = 0u
    cdef uint32_t c3 = 0u
    cdef uint32_t k0 = <uint32_t> (seed & 0xFFFFFFFFu)
    cdef uint32_t k1 = <uint32_t> (seed >> 32)
    cdef uint64_t p0, p1
    cdef uint32_t hi0, lo0, hi1, lo1
    cdef int i
    for i in range(10):
        p0 = _M0 * <uint64_t> c0
        p1 = _M1 * <uint64_t> c2
        hi0 = <uint32_t> (p0 >> 32)
        lo0 = <uint32_t> (p0 & 0xFFFFFFFFu)
        hi1 = <uint32_t> (p1 >> 32)
        lo1 = <uint32_t> (p1 & 0xFFFFFFFFu)
        c0 = hi1 ^ c1 ^ k0
        c1 = lo1
        c2 = hi0 ^ c3 ^ k1
        c3 = lo0
        k0 = k0 + _BUMP0
        k1 = k1 + _BUMP1
    cdef uint64_t word = ((<uint64_t> c1) << 32) | (<uint64_t> c0)
    return <double> (word >> 11) * _INV53


def philox_uniforms(seed, trial_ids, draw_ids):
    """Philox4x32-10 uniforms in [0, 1), one per (trial, draw) pair."""
    cdef cnp.ndarray[cnp.uint32_t, ndim=1] trials = np.ascontiguousarray(trial_ids, dtype=np.uint32)
    cdef cnp.ndarray[cnp.uint32_t, ndim=1] draws = np.ascontiguousarray(draw_ids, dtype=np.uint32)
    if trials.shape[0] != draws.shape[0]:
        raise ValueError("trial_ids and draw_ids must have equal length")
    cdef Py_ssize_t n = trials.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef uint64_t s = <uint64_t> (seed & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = _philox_uniform(s, trials[i], draws[i])
    return out


def mc_consumed_pairs(bit_succ, phase_succ, full_restart, trials, seed):
    """Raw pairs consumed by each trial of the pumping process."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] bsucc = np.ascontiguousarray(bit_succ, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] psucc = np.ascontiguousarray(phase_succ, dtype=np.float64)
    cdef int n_b = bsucc.shape[0]
    cdef int n_p = psucc.shape[0]
    cdef int full = 1 if full_restart else 0
    cdef Py_ssize_t n_trials = int(trials)
    cdef uint64_t s = <uint64_t> (seed & 0xFFFFFFFFFFFFFFFF)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(n_trials, dtype=np.int64)
    cdef int64_t cap = HARD_CAP
    cdef Py_ssize_t t
    cdef uint32_t j
    cdef int64_t consumed
    cdef int b, r, overflow
    cdef double u

    overflow = 0
    with nogil:
        for t in range(n_trials):
            j = 0u
            b = 0
            r = 0
            consumed = 0
            while True:
                consumed += 1
                if consumed > cap:
                    overflow = 1
                    break
                if n_b > 0:
                    if r == 0:
                        r = 1
                        continue
                    u = _philox_uniform(s, <uint32_t> t, j)
                    j += 1u
                    if u < bsucc[r - 1]:
                        if r < n_b:
                            r += 1
                            continue
                        # build complete, fall through to the comparison
                    else:
                        r = 0
                        if full:
                            b = 0
                        continue
                # current raw completed a build
                if b == 0:
                    b = 1
                    r = 0
                    if b > n_p:
                        break
                else:
                    u = _philox_uniform(s, <uint32_t> t, j)
                    j += 1u
                    if u < psucc[b - 1]:
                        b += 1
                        r = 0
                        if b > n_p:
                            break
                    else:
                        r = 0
                        if full:
                            b = 0
            out[t] = consumed
            if overflow:
                break
    if overflow:
        raise RuntimeError("Monte-Carlo per-trial raw-pair cap exceeded")
    return out


def chain_evolve(trans_src, trans_dst, trans_p, n_states, start, steps):
    """Distribution after ``steps`` chain transitions from ``start``."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] src = np.ascontiguousarray(trans_src, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] dst = np.ascontiguousarray(trans_dst, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p = np.ascontiguousarray(trans_p, dtype=np.float64)
    cdef Py_ssize_t n_t = src.shape[0]
    cdef int n = int(n_states)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] nxt = np.zeros(n, dtype=np.float64)
    cdef int64_t n_steps = int(steps)
    dist[int(start)] = 1.0
    cdef Py_ssize_t i
    cdef int64_t step
    with nogil:
        for step in range(n_steps):
            for i in range(n):
                nxt[i] = 0.0
            for i in range(n_t):
                nxt[dst[i]] += p[i] * dist[src[i]]
            for i in range(n):
                dist[i] = nxt[i]
    return np.asarray(dist)


def chain_scan(trans_src, trans_dst, trans_p, n_states, start, done, target, cap):
    """Smallest step count with failure mass 1 - dist[done] <= target."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] src = np.ascontiguousarray(trans_src, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] dst = np.ascontiguousarray(trans_dst, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p = np.ascontiguousarray(trans_p, dtype=np.float64)
    cdef Py_ssize_t n_t = src.shape[0]
    cdef int n = int(n_states)
    cdef int idone = int(done)
    cdef double tgt = float(target)
    cdef int64_t ncap = int(cap)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] nxt = np.zeros(n, dtype=np.float64)
    dist[int(start)] = 1.0
    cdef double eps = 1.0 - dist[idone]
    if eps <= tgt:
        return 0, eps
    cdef Py_ssize_t i
    cdef int64_t step
    cdef int64_t found = -1
    with nogil:
        for step in range(1, ncap + 1):
            for i in range(n):
                nxt[i] = 0.0
            for i in range(n_t):
                nxt[dst[i]] += p[i] * dist[src[i]]
            for i in range(n):
                dist[i] = nxt[i]
            eps = 1.0 - dist[idone]
            if eps <= tgt:
                found = step
                break
    return (int(found), eps)

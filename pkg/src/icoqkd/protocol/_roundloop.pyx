# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled round-collection loop (hot-path engine).

Must stay semantically identical to _pyloop.consume: both consume the same
chunk arrays and produce byte-identical results.
"""

import numpy as np

cimport numpy as cnp

NAME = "ext"

# state vector layout (int64[10]); mirrors _pyloop
cdef enum:
    JA, CA0, CA1, DONE_A, JB, CB0, CB1, DONE_B, ROUNDS, CAP


def consume(cnp.int64_t[::1] state,
            cnp.int32_t[:, ::1] targets_a,
            cnp.int32_t[:, ::1] targets_b,
            cnp.uint8_t[::1] dirs,
            cnp.uint8_t[::1] a_bits,
            cnp.uint8_t[::1] b_bits):
    """Advance the collection state through one chunk; return rounds consumed."""
    cdef Py_ssize_t i, n = dirs.shape[0]
    cdef long long ja = state[JA], ca0 = state[CA0], ca1 = state[CA1]
    cdef long long done_a = state[DONE_A]
    cdef long long jb = state[JB], cb0 = state[CB0], cb1 = state[CB1]
    cdef long long done_b = state[DONE_B]
    cdef long long rounds = state[ROUNDS], cap = state[CAP]
    cdef long long na = targets_a.shape[0], nb = targets_b.shape[0]
    cdef long long consumed = 0

    for i in range(n):
        if (done_a and done_b) or rounds >= cap:
            break
        consumed += 1
        rounds += 1
        if dirs[i]:
            if not done_a:
                if a_bits[i]:
                    ca1 += 1
                else:
                    ca0 += 1
                if ca0 >= targets_a[ja, 0] and ca1 >= targets_a[ja, 1]:
                    ja += 1
                    ca0 = 0
                    ca1 = 0
                    if ja >= na:
                        done_a = 1
        else:
            if not done_b:
                if b_bits[i]:
                    cb1 += 1
                else:
                    cb0 += 1
                if cb0 >= targets_b[jb, 0] and cb1 >= targets_b[jb, 1]:
                    jb += 1
                    cb0 = 0
                    cb1 = 0
                    if jb >= nb:
                        done_b = 1

    state[JA] = ja
    state[CA0] = ca0
    state[CA1] = ca1
    state[DONE_A] = done_a
    state[JB] = jb
    state[CB0] = cb0
    state[CB1] = cb1
    state[DONE_B] = done_b
    state[ROUNDS] = rounds
    return consumed

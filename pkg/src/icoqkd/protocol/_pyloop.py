"""Pure-Python round-collection loop (fallback engine).

Semantically identical to the compiled kernel: both consume the same chunk
arrays and must produce byte-identical results.
"""

from __future__ import annotations

NAME = "py"

# state vector layout (int64[10])
JA, CA0, CA1, DONE_A, JB, CB0, CB1, DONE_B, ROUNDS, CAP = range(10)


def consume(state, targets_a, targets_b, dirs, a_bits, b_bits) -> int:
    """Advance the collection state through one chunk; return rounds consumed."""
    ja, ca0, ca1, done_a = int(state[JA]), int(state[CA0]), int(state[CA1]), int(state[DONE_A])
    jb, cb0, cb1, done_b = int(state[JB]), int(state[CB0]), int(state[CB1]), int(state[DONE_B])
    rounds, cap = int(state[ROUNDS]), int(state[CAP])
    na, nb = len(targets_a), len(targets_b)
    ta = targets_a.tolist()
    tb = targets_b.tolist()
    dirs_l = dirs.tolist()
    a_l = a_bits.tolist()
    b_l = b_bits.tolist()
    consumed = 0
    for i in range(len(dirs_l)):
        if (done_a and done_b) or rounds >= cap:
            break
        consumed += 1
        rounds += 1
        if dirs_l[i]:
            if not done_a:
                if a_l[i]:
                    ca1 += 1
                else:
                    ca0 += 1
                need = ta[ja]
                if ca0 >= need[0] and ca1 >= need[1]:
                    ja += 1
                    ca0 = ca1 = 0
                    if ja >= na:
                        done_a = 1
        else:
            if not done_b:
                if b_l[i]:
                    cb1 += 1
                else:
                    cb0 += 1
                need = tb[jb]
                if cb0 >= need[0] and cb1 >= need[1]:
                    jb += 1
                    cb0 = cb1 = 0
                    if jb >= nb:
                        done_b = 1
    state[JA], state[CA0], state[CA1], state[DONE_A] = ja, ca0, ca1, done_a
    state[JB], state[CB0], state[CB1], state[DONE_B] = jb, cb0, cb1, done_b
    state[ROUNDS] = rounds
    return consumed

"""Pure-Python enumeration kernel.

Reference implementation of the hot loop; the compiled twin in
``_kernels_cy`` performs the identical walk in the identical order, so both
backends produce bit-for-bit equal sums. Keep the two in lockstep.
"""

from __future__ import annotations


def enumerate_accumulate(cards, parents_off, parents_flat, strides_flat,
                         cpt_off, cpt_flat, sums_off, evidence, sums) -> float:
    """Sum joint probabilities over all configurations matching ``evidence``.

    ``evidence[i] >= 0`` pins variable i to that state; -1 leaves it free.
    ``sums`` (length ``sums_off[-1]``, zeroed by the caller) accumulates the
    joint mass per (variable, state). Returns the total evidence probability.
    """
    n = len(cards)
    cards_l = [int(c) for c in cards]
    po = [int(x) for x in parents_off]
    pf = [int(x) for x in parents_flat]
    sf = [int(x) for x in strides_flat]
    co = [int(x) for x in cpt_off]
    so = [int(x) for x in sums_off]
    cpt = cpt_flat

    state = [0] * n
    free = []
    for i in range(n):
        ev = int(evidence[i])
        if ev >= 0:
            state[i] = ev
        else:
            free.append(i)

    total = 0.0
    while True:
        p = 1.0
        for i in range(n):
            row = 0
            for k in range(po[i], po[i + 1]):
                row += state[pf[k]] * sf[k]
            p *= cpt[co[i] + row * cards_l[i] + state[i]]
        total += p
        for i in range(n):
            sums[so[i] + state[i]] += p
        j = len(free) - 1
        while j >= 0:
            f = free[j]
            state[f] += 1
            if state[f] < cards_l[f]:
                break
            state[f] = 0
            j -= 1
        if j < 0:
            break
    return total

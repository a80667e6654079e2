"""Flat array layout consumed by the enumeration kernels.

Both the compiled kernel and the pure-Python fallback walk the same arrays:
per-variable cardinalities, flattened parent lists with mixed-radix strides,
and one concatenated CPT buffer. Row index of variable ``i`` for a full
configuration ``state`` is ``sum(state[parent] * stride for parent, stride in
zip(parents[i], strides[i]))``; the CPT entry then sits at
``cpt_off[i] + row * cards[i] + state[i]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FlatNet:
    names: tuple[str, ...]
    cards: np.ndarray  # int32[n]
    parents_off: np.ndarray  # int32[n+1]
    parents_flat: np.ndarray  # int32[sum arity]
    strides_flat: np.ndarray  # int64[sum arity]
    cpt_off: np.ndarray  # int64[n+1]
    cpt_flat: np.ndarray  # float64[sum rows*card]
    sums_off: np.ndarray  # int64[n+1]

    @property
    def n_vars(self) -> int:
        return len(self.names)

    @property
    def state_space(self) -> int:
        return int(np.prod(self.cards.astype(np.int64), initial=1))

    def index_of(self, name: str) -> int:
        return self.names.index(name)


def build_flat(names, cards, parent_lists, cpt_arrays) -> FlatNet:
    """Assemble a FlatNet.

    ``parent_lists[i]`` holds indices of variable i's parents in declared
    order; ``cpt_arrays[i]`` is the (rows, card_i) table with rows in C-order
    over the parent state tuples.
    """
    n = len(names)
    cards = np.asarray(cards, dtype=np.int32)
    parents_off = np.zeros(n + 1, dtype=np.int32)
    parents_flat: list[int] = []
    strides_flat: list[int] = []
    cpt_off = np.zeros(n + 1, dtype=np.int64)
    pieces: list[np.ndarray] = []
    sums_off = np.zeros(n + 1, dtype=np.int64)

    for i in range(n):
        plist = list(parent_lists[i])
        parents_off[i + 1] = parents_off[i] + len(plist)
        stride = 1
        strides = [0] * len(plist)
        for j in range(len(plist) - 1, -1, -1):
            strides[j] = stride
            stride *= int(cards[plist[j]])
        parents_flat.extend(plist)
        strides_flat.extend(strides)

        table = np.ascontiguousarray(cpt_arrays[i], dtype=np.float64)
        expected_rows = stride  # product of parent cards
        if table.shape != (expected_rows, int(cards[i])):
            raise ValueError(
                f"variable {names[i]!r}: CPT shape {table.shape} != "
                f"({expected_rows}, {int(cards[i])})"
            )
        pieces.append(table.reshape(-1))
        cpt_off[i + 1] = cpt_off[i] + table.size
        sums_off[i + 1] = sums_off[i] + int(cards[i])

    return FlatNet(
        names=tuple(names),
        cards=cards,
        parents_off=parents_off,
        parents_flat=np.asarray(parents_flat, dtype=np.int32),
        strides_flat=np.asarray(strides_flat, dtype=np.int64),
        cpt_off=cpt_off,
        cpt_flat=np.concatenate(pieces) if pieces else np.zeros(0, dtype=np.float64),
        sums_off=sums_off,
    )

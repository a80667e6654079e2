# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled enumeration kernel; mirror of ``_kernels_py`` step for step."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def enumerate_accumulate(int[:] cards, int[:] parents_off, int[:] parents_flat,
                         long long[:] strides_flat, long long[:] cpt_off,
                         double[:] cpt_flat, long long[:] sums_off,
                         int[:] evidence, double[:] sums):
    """See ``wigmore._kernels_py.enumerate_accumulate``."""
    cdef Py_ssize_t n = cards.shape[0]
    cdef cnp.ndarray[cnp.int32_t, ndim=1] state_arr = np.zeros(n, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] free_arr = np.zeros(n, dtype=np.int32)
    cdef int[:] state = state_arr
    cdef int[:] free = free_arr
    cdef Py_ssize_t n_free = 0
    cdef Py_ssize_t i, k, j
    cdef int f
    cdef long long row
    cdef double p, total

    for i in range(n):
        if evidence[i] >= 0:
            state[i] = evidence[i]
        else:
            free[n_free] = <int> i
            n_free += 1

    total = 0.0
    with nogil:
        while True:
            p = 1.0
            for i in range(n):
                row = 0
                for k in range(parents_off[i], parents_off[i + 1]):
                    row += state[parents_flat[k]] * strides_flat[k]
                p *= cpt_flat[cpt_off[i] + row * cards[i] + state[i]]
            total += p
            for i in range(n):
                sums[sums_off[i] + state[i]] += p
            j = n_free - 1
            while j >= 0:
                f = free[j]
                state[f] += 1
                if state[f] < cards[f]:
                    break
                state[f] = 0
                j -= 1
            if j < 0:
                break
    return total

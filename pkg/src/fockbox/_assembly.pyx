# cython: language_level=3
"""Compiled matrix-assembly kernel.

Contract-identical to :mod:`fockbox._assembly_py` (same inputs, same output
triplet order, same drop counting); the Python fallback doubles as the
executable specification for this file.
"""

import numpy as np

cimport cython
cimport numpy as cnp

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long x)


@cython.boundscheck(False)
@cython.wraparound(False)
cdef inline Py_ssize_t _bisect(const cnp.uint64_t* arr, Py_ssize_t n, cnp.uint64_t key) nogil:
    """Index of key in ascending arr, or -1 when absent."""
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if arr[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    if lo < n and arr[lo] == key:
        return lo
    return -1


@cython.boundscheck(False)
@cython.wraparound(False)
def assemble(cnp.ndarray[cnp.complex128_t, ndim=1] coeffs,
             cnp.ndarray[cnp.int32_t, ndim=2] opcodes,
             cnp.ndarray[cnp.int32_t, ndim=1] nops,
             cnp.ndarray[cnp.uint64_t, ndim=1] basis):
    """Apply packed ladder strings to every basis state; see the Python
    fallback for parameter documentation."""
    cdef Py_ssize_t nt = coeffs.shape[0]
    cdef Py_ssize_t nb = basis.shape[0]
    cdef Py_ssize_t cap = 1024
    if nt * 4 > cap:
        cap = nt * 4

    cdef cnp.ndarray[cnp.int64_t, ndim=1] rows = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cols = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] vals = np.empty(cap, dtype=np.complex128)

    cdef Py_ssize_t nnz = 0
    cdef long long dropped = 0

    cdef const cnp.uint64_t* bptr = <const cnp.uint64_t*> basis.data
    cdef Py_ssize_t t, j, col, row
    cdef int code, k, create, sign
    cdef cnp.uint64_t state, bit, below
    cdef int dead
    cdef double complex coeff

    for t in range(nt):
        coeff = coeffs[t]
        for col in range(nb):
            state = bptr[col]
            sign = 1
            dead = 0
            for j in range(nops[t] - 1, -1, -1):
                code = opcodes[t, j]
                k = code >> 1
                create = code & 1
                bit = (<cnp.uint64_t> 1) << k
                if create:
                    if state & bit:
                        dead = 1
                        break
                else:
                    if not (state & bit):
                        dead = 1
                        break
                below = bit - 1
                if __builtin_popcountll(state & below) & 1:
                    sign = -sign
                state = state ^ bit
            if dead:
                continue
            row = _bisect(bptr, nb, state)
            if row < 0:
                dropped += 1
                continue
            if nnz == cap:
                cap *= 2
                rows = np.resize(rows, cap)
                cols = np.resize(cols, cap)
                vals = np.resize(vals, cap)
            rows[nnz] = row
            cols[nnz] = col
            vals[nnz] = coeff * sign
            nnz += 1

    return rows[:nnz].copy(), cols[:nnz].copy(), vals[:nnz].copy(), int(dropped)

# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Same contract as `pykernels`: identical signatures, bit-identical output
arrays. The hot loops here are basis enumeration (next-permutation walk)
and per-configuration Hamiltonian assembly with binary-search index
lookups.
"""

import math

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"


cdef inline int _trailing_zeros(long long v) nogil:
    cdef int c = 0
    while not (v & 1):
        v >>= 1
        c += 1
    return c


cdef inline long long _next_same_popcount(long long v) nogil:
    # Gosper's hack: next larger integer with the same number of set bits.
    cdef long long t = v | (v - 1)
    return (t + 1) | ((((~t) & (-(~t))) - 1) >> (_trailing_zeros(v) + 1))


def sector_states(site_count, down_count):
    """All `site_count`-bit integers with `down_count` set bits, ascending."""
    cdef int L = site_count
    cdef int n = down_count
    if n < 0 or n > L:
        raise ValueError(f"down_count {n} outside [0, {L}]")
    cdef Py_ssize_t dim = math.comb(L, n)
    out = np.empty(dim, dtype=np.int64)
    cdef long long[::1] o = out
    cdef long long v
    cdef Py_ssize_t i
    if n == 0:
        o[0] = 0
        return out
    v = (<long long>1 << n) - 1
    for i in range(dim):
        o[i] = v
        if i + 1 < dim:
            v = _next_same_popcount(v)
    return out


cdef inline Py_ssize_t _bsearch(const long long[::1] arr, long long key) nogil:
    cdef Py_ssize_t lo = 0
    cdef Py_ssize_t hi = arr.shape[0]
    cdef Py_ssize_t mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if arr[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    return lo


def chain_triplets(states, site_count, offdiag, field_left, field_right):
    """COO triplets of the open-chain sector Hamiltonian (see pykernels)."""
    cdef long long[::1] s = np.ascontiguousarray(states, dtype=np.int64)
    cdef int L = site_count
    cdef double od = offdiag
    cdef double fl = field_left
    cdef double fr = field_right
    cdef Py_ssize_t dim = s.shape[0]
    cdef Py_ssize_t cap = dim * L  # diag + one entry per anti-aligned bond
    rows = np.empty(cap, dtype=np.int64)
    cols = np.empty(cap, dtype=np.int64)
    vals = np.empty(cap, dtype=np.float64)
    cdef long long[::1] r = rows
    cdef long long[::1] c = cols
    cdef double[::1] v = vals
    cdef Py_ssize_t i, m = 0
    cdef int x, anti
    cdef long long st, flip
    cdef double d

    # diagonal entries first (matches the fallback's emission order)
    for i in range(dim):
        st = s[i]
        anti = 0
        for x in range(L - 1):
            anti += <int>(((st >> x) ^ (st >> (x + 1))) & 1)
        d = 0.5 * anti
        d = d + fl * (-0.5 if (st & 1) else 0.5)
        d = d + fr * (-0.5 if ((st >> (L - 1)) & 1) else 0.5)
        if d != 0.0:
            r[m] = i
            c[m] = i
            v[m] = d
            m += 1
    # off-diagonal entries, grouped by bond as in the fallback
    for x in range(L - 1):
        flip = (<long long>1 << x) | (<long long>1 << (x + 1))
        for i in range(dim):
            st = s[i]
            if ((st >> x) ^ (st >> (x + 1))) & 1:
                r[m] = i
                c[m] = _bsearch(s, st ^ flip)
                v[m] = od
                m += 1
    return rows[:m].copy(), cols[:m].copy(), vals[:m].copy()


def lattice_triplets(states, site_count, edges_u, edges_v, offdiag,
                     diag_aligned, diag_anti, site_fields):
    """COO triplets of a general nearest-neighbor sector Hamiltonian."""
    cdef long long[::1] s = np.ascontiguousarray(states, dtype=np.int64)
    cdef int L = site_count
    cdef long long[::1] eu = np.ascontiguousarray(edges_u, dtype=np.int64)
    cdef long long[::1] ev = np.ascontiguousarray(edges_v, dtype=np.int64)
    cdef double od = offdiag
    cdef double da = diag_aligned
    cdef double dn = diag_anti
    cdef double[::1] fields = np.ascontiguousarray(site_fields, dtype=np.float64)
    cdef Py_ssize_t dim = s.shape[0]
    cdef Py_ssize_t n_edges = eu.shape[0]
    cdef Py_ssize_t cap = dim * (n_edges + 1)
    rows = np.empty(cap, dtype=np.int64)
    cols = np.empty(cap, dtype=np.int64)
    vals = np.empty(cap, dtype=np.float64)
    cdef long long[::1] r = rows
    cdef long long[::1] c = cols
    cdef double[::1] v = vals
    cdef Py_ssize_t i, e, m = 0
    cdef int x, anti
    cdef long long st, flip
    cdef double d, f

    for i in range(dim):
        st = s[i]
        anti = 0
        for e in range(n_edges):
            anti += <int>(((st >> eu[e]) ^ (st >> ev[e])) & 1)
        d = dn * anti + da * (n_edges - anti)
        for x in range(L):
            f = fields[x]
            if f != 0.0:
                d = d + f * (-0.5 if ((st >> x) & 1) else 0.5)
        if d != 0.0:
            r[m] = i
            c[m] = i
            v[m] = d
            m += 1
    for e in range(n_edges):
        flip = (<long long>1 << eu[e]) | (<long long>1 << ev[e])
        for i in range(dim):
            st = s[i]
            if ((st >> eu[e]) ^ (st >> ev[e])) & 1:
                r[m] = i
                c[m] = _bsearch(s, st ^ flip)
                v[m] = od
                m += 1
    return rows[:m].copy(), cols[:m].copy(), vals[:m].copy()


def csr_matvec(indptr, indices, data, x):
    """y = A @ x for a CSR matrix, rows accumulated in stored index order."""
    ind_ptr = np.asarray(indptr)
    d = np.ascontiguousarray(data, dtype=np.float64)
    xv = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty(ind_ptr.shape[0] - 1, dtype=np.float64)
    if ind_ptr.dtype == np.int32:
        _matvec32(ind_ptr, np.ascontiguousarray(indices, dtype=np.int32),
                  d, xv, out)
    else:
        _matvec64(np.ascontiguousarray(ind_ptr, dtype=np.int64),
                  np.ascontiguousarray(indices, dtype=np.int64), d, xv, out)
    return out


cdef void _matvec32(const int[::1] indptr, const int[::1] indices,
                    const double[::1] data, const double[::1] x,
                    double[::1] y) nogil:
    cdef Py_ssize_t i, jj
    cdef double acc
    for i in range(indptr.shape[0] - 1):
        acc = 0.0
        for jj in range(indptr[i], indptr[i + 1]):
            acc += data[jj] * x[indices[jj]]
        y[i] = acc


cdef void _matvec64(const long long[::1] indptr, const long long[::1] indices,
                    const double[::1] data, const double[::1] x,
                    double[::1] y) nogil:
    cdef Py_ssize_t i, jj
    cdef double acc
    for i in range(indptr.shape[0] - 1):
        acc = 0.0
        for jj in range(indptr[i], indptr[i + 1]):
            acc += data[jj] * x[indices[jj]]
        y[i] = acc

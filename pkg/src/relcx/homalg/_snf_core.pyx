# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled dense integer elimination over int64 with overflow detection.

Same algorithm as ``_snf_py.dense_diagonal``.  Raises ``OverflowError`` when an
intermediate value leaves the int64 range; callers then retry with the
arbitrary-precision Python version.
"""
from libc.stdlib cimport malloc, free
from libc.stdint cimport int64_t

cdef extern from *:
    """
    static int relcx_mul_ovf(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static int relcx_sub_ovf(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    """
    int relcx_mul_ovf(long long a, long long b, long long *r) nogil
    int relcx_sub_ovf(long long a, long long b, long long *r) nogil


cdef inline long long floordiv(long long a, long long b) nogil:
    cdef long long q = a // b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef int _reduce(long long *m, Py_ssize_t nr, Py_ssize_t nc, long long *diag, Py_ssize_t *ndiag) nogil:
    cdef Py_ssize_t t = 0, i, j, bi, bj
    cdef long long best, v, av, q, piv, prod, tmp
    cdef bint moved
    ndiag[0] = 0
    while t < nr and t < nc:
        best = 0
        bi = -1
        bj = -1
        for i in range(t, nr):
            for j in range(t, nc):
                v = m[i * nc + j]
                if v != 0:
                    av = v if v > 0 else -v
                    if best == 0 or av < best:
                        best = av
                        bi = i
                        bj = j
                        if av == 1:
                            break
            if best == 1:
                break
        if best == 0:
            break
        if bi != t:
            for j in range(nc):
                tmp = m[t * nc + j]
                m[t * nc + j] = m[bi * nc + j]
                m[bi * nc + j] = tmp
        if bj != t:
            for i in range(nr):
                tmp = m[i * nc + t]
                m[i * nc + t] = m[i * nc + bj]
                m[i * nc + bj] = tmp
        while True:
            piv = m[t * nc + t]
            moved = False
            for i in range(t + 1, nr):
                v = m[i * nc + t]
                if v != 0:
                    q = floordiv(v, piv)
                    if q != 0:
                        for j in range(t, nc):
                            if m[t * nc + j] != 0:
                                if relcx_mul_ovf(q, m[t * nc + j], &prod):
                                    return 1
                                if relcx_sub_ovf(m[i * nc + j], prod, &m[i * nc + j]):
                                    return 1
                    if m[i * nc + t] != 0:
                        for j in range(nc):
                            tmp = m[t * nc + j]
                            m[t * nc + j] = m[i * nc + j]
                            m[i * nc + j] = tmp
                        moved = True
                        break
            if moved:
                continue
            piv = m[t * nc + t]
            for j in range(t + 1, nc):
                v = m[t * nc + j]
                if v != 0:
                    q = floordiv(v, piv)
                    if q != 0:
                        for i in range(t, nr):
                            if m[i * nc + t] != 0:
                                if relcx_mul_ovf(q, m[i * nc + t], &prod):
                                    return 1
                                if relcx_sub_ovf(m[i * nc + j], prod, &m[i * nc + j]):
                                    return 1
                    if m[t * nc + j] != 0:
                        for i in range(nr):
                            tmp = m[i * nc + t]
                            m[i * nc + t] = m[i * nc + j]
                            m[i * nc + j] = tmp
                        moved = True
                        break
            if not moved:
                break
        v = m[t * nc + t]
        diag[ndiag[0]] = v if v > 0 else -v
        ndiag[0] += 1
        t += 1
    return 0


def dense_diagonal(mat):
    """Absolute nonzero diagonal after reduction of a list-of-lists int matrix."""
    cdef Py_ssize_t nr = len(mat)
    cdef Py_ssize_t nc = len(mat[0]) if nr else 0
    if nr == 0 or nc == 0:
        return []
    cdef long long *m = <long long *> malloc(nr * nc * sizeof(long long))
    cdef Py_ssize_t k = nr if nr < nc else nc
    cdef long long *diag = <long long *> malloc(k * sizeof(long long))
    cdef Py_ssize_t ndiag = 0, i, j
    cdef int status
    if m == NULL or diag == NULL:
        free(m)
        free(diag)
        raise MemoryError()
    try:
        for i in range(nr):
            row = mat[i]
            for j in range(nc):
                m[i * nc + j] = row[j]
        with nogil:
            status = _reduce(m, nr, nc, diag, &ndiag)
        if status:
            raise OverflowError("int64 overflow during elimination")
        return [diag[i] for i in range(ndiag)]
    finally:
        free(m)
        free(diag)

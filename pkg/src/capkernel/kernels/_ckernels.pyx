# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integer kernels on int64 with overflow detection.

Same algorithms and pivot rules as ``_pure``; any int64 overflow raises
OverflowError so the caller can retry on Python integers.
"""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport llabs

ctypedef long long i64

cdef extern from *:
    """
    static inline int ck_mul(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static inline int ck_sub(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    """
    int ck_mul(long long a, long long b, long long *r) nogil
    int ck_sub(long long a, long long b, long long *r) nogil

cdef i64 LIMIT = (1LL << 62)
cdef i64 I64MIN = -9223372036854775807LL - 1


cdef inline i64 floordiv(i64 a, i64 b) nogil:
    cdef i64 q = a / b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef inline i64 floormod(i64 a, i64 b) nogil:
    cdef i64 r = a % b
    if r != 0 and ((r < 0) != (b < 0)):
        r += b
    return r


cdef int row_sub(i64[:, :] A, Py_ssize_t i, Py_ssize_t k, i64 q) nogil:
    # A[i] -= q * A[k]; returns 1 on overflow
    cdef Py_ssize_t j
    cdef i64 t
    for j in range(A.shape[1]):
        if A[k, j] != 0:
            if ck_mul(q, A[k, j], &t):
                return 1
            if ck_sub(A[i, j], t, &A[i, j]):
                return 1
    return 0


cdef int col_sub(i64[:, :] A, Py_ssize_t j, Py_ssize_t k, i64 q) nogil:
    cdef Py_ssize_t i
    cdef i64 t
    for i in range(A.shape[0]):
        if A[i, k] != 0:
            if ck_mul(q, A[i, k], &t):
                return 1
            if ck_sub(A[i, j], t, &A[i, j]):
                return 1
    return 0


cdef void swap_rows(i64[:, :] A, Py_ssize_t i, Py_ssize_t k) nogil:
    cdef Py_ssize_t j
    cdef i64 t
    for j in range(A.shape[1]):
        t = A[i, j]
        A[i, j] = A[k, j]
        A[k, j] = t


cdef void swap_cols(i64[:, :] A, Py_ssize_t i, Py_ssize_t k) nogil:
    cdef Py_ssize_t j
    cdef i64 t
    for j in range(A.shape[0]):
        t = A[j, i]
        A[j, i] = A[j, k]
        A[j, k] = t


cdef int negate_row(i64[:, :] A, Py_ssize_t i) nogil:
    cdef Py_ssize_t j
    for j in range(A.shape[1]):
        if A[i, j] == I64MIN:
            return 1
        A[i, j] = -A[i, j]
    return 0


def _to_array(M, Py_ssize_t nrows, Py_ssize_t ncols):
    arr = np.zeros((nrows, ncols), dtype=np.int64)
    for i in range(nrows):
        row = M[i]
        for j in range(ncols):
            v = row[j]
            if v >= LIMIT or v <= -LIMIT:
                raise OverflowError("entry outside int64 working range")
            arr[i, j] = v
    return arr


def _to_lists(arr):
    return [[int(v) for v in row] for row in arr.tolist()]


def hnf(M, Py_ssize_t ncols):
    cdef Py_ssize_t m = len(M)
    cdef cnp.ndarray[i64, ndim=2] An = _to_array(M, m, ncols)
    cdef cnp.ndarray[i64, ndim=2] Un = np.eye(m, dtype=np.int64)
    cdef i64[:, :] A = An
    cdef i64[:, :] U = Un
    cdef Py_ssize_t r = 0, c, i, best
    cdef i64 bestval, v, p, q
    cdef bint clean
    cdef int err = 0
    pivots = []
    for c in range(ncols):
        if r == m:
            break
        best = -1
        while True:
            best = -1
            bestval = 0
            for i in range(r, m):
                v = A[i, c]
                if v != 0 and (best < 0 or llabs(v) < bestval):
                    best = i
                    bestval = llabs(v)
            if best < 0:
                break
            if best != r:
                swap_rows(A, r, best)
                swap_rows(U, r, best)
            p = A[r, c]
            clean = True
            for i in range(r + 1, m):
                v = A[i, c]
                if v != 0:
                    q = floordiv(v, p)
                    err |= row_sub(A, i, r, q)
                    err |= row_sub(U, i, r, q)
                    if A[i, c] != 0:
                        clean = False
            if err:
                raise OverflowError("int64 overflow in hnf")
            if clean:
                break
        if best < 0 and A[r, c] == 0:
            continue
        if A[r, c] < 0:
            err |= negate_row(A, r)
            err |= negate_row(U, r)
        p = A[r, c]
        for i in range(r):
            q = floordiv(A[i, c], p)
            if q != 0:
                err |= row_sub(A, i, r, q)
                err |= row_sub(U, i, r, q)
        if err:
            raise OverflowError("int64 overflow in hnf")
        pivots.append(c)
        r += 1
    return _to_lists(An), _to_lists(Un), pivots


def snf(M, Py_ssize_t ncols):
    cdef Py_ssize_t m = len(M)
    cdef Py_ssize_t n = ncols
    cdef cnp.ndarray[i64, ndim=2] An = _to_array(M, m, n)
    cdef cnp.ndarray[i64, ndim=2] Un = np.eye(m, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=2] Vn = np.eye(n, dtype=np.int64)
    cdef i64[:, :] A = An
    cdef i64[:, :] U = Un
    cdef i64[:, :] V = Vn
    cdef Py_ssize_t t = 0, i, j, bi, bj, bad
    cdef Py_ssize_t lim = m if m < n else n
    cdef i64 bv, v, p, q
    cdef bint dirty
    cdef int err = 0
    while t < lim:
        bi = -1
        bj = -1
        bv = 0
        for i in range(t, m):
            for j in range(t, n):
                v = A[i, j]
                if v != 0 and (bi < 0 or llabs(v) < bv):
                    bi = i
                    bj = j
                    bv = llabs(v)
        if bi < 0:
            break
        if bi != t:
            swap_rows(A, t, bi)
            swap_rows(U, t, bi)
        if bj != t:
            swap_cols(A, t, bj)
            swap_cols(V, t, bj)
        while True:
            p = A[t, t]
            dirty = False
            for i in range(t + 1, m):
                v = A[i, t]
                if v != 0:
                    q = floordiv(v, p)
                    err |= row_sub(A, i, t, q)
                    err |= row_sub(U, i, t, q)
                    if A[i, t] != 0:
                        dirty = True
            for j in range(t + 1, n):
                v = A[t, j]
                if v != 0:
                    q = floordiv(v, p)
                    err |= col_sub(A, j, t, q)
                    err |= col_sub(V, j, t, q)
                    if A[t, j] != 0:
                        dirty = True
            if err:
                raise OverflowError("int64 overflow in snf")
            if dirty:
                bi = t
                bj = t
                bv = llabs(A[t, t])
                for j in range(t + 1, n):
                    v = A[t, j]
                    if v != 0 and llabs(v) < bv:
                        bi = t
                        bj = j
                        bv = llabs(v)
                for i in range(t + 1, m):
                    v = A[i, t]
                    if v != 0 and llabs(v) < bv:
                        bi = i
                        bj = t
                        bv = llabs(v)
                if bi != t:
                    swap_rows(A, t, bi)
                    swap_rows(U, t, bi)
                if bj != t:
                    swap_cols(A, t, bj)
                    swap_cols(V, t, bj)
                continue
            bad = -1
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if floormod(A[i, j], p) != 0:
                        bad = i
                        break
                if bad >= 0:
                    break
            if bad < 0:
                break
            err |= row_sub(A, t, bad, -1)
            err |= row_sub(U, t, bad, -1)
            if err:
                raise OverflowError("int64 overflow in snf")
        if A[t, t] < 0:
            err |= negate_row(A, t)
            err |= negate_row(U, t)
            if err:
                raise OverflowError("int64 overflow in snf")
        t += 1
    return _to_lists(Un), _to_lists(An), _to_lists(Vn)


cdef int bareiss(i64[:, :] A, Py_ssize_t n, i64 *out) nogil:
    # determinant of the leading n x n block of A (destroyed); 1 on overflow
    cdef Py_ssize_t k, i, j
    cdef i64 prev = 1, akk, t1, t2, sign = 1
    cdef bint found
    if n == 0:
        out[0] = 1
        return 0
    for k in range(n - 1):
        if A[k, k] == 0:
            found = False
            for i in range(k + 1, n):
                if A[i, k] != 0:
                    for j in range(n):
                        t1 = A[k, j]
                        A[k, j] = A[i, j]
                        A[i, j] = t1
                    sign = -sign
                    found = True
                    break
            if not found:
                out[0] = 0
                return 0
        akk = A[k, k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                if ck_mul(A[i, j], akk, &t1):
                    return 1
                if ck_mul(A[i, k], A[k, j], &t2):
                    return 1
                if ck_sub(t1, t2, &t1):
                    return 1
                A[i, j] = t1 / prev
        prev = akk
    out[0] = sign * A[n - 1, n - 1]
    return 0


def smooth_norms_in_box(regrep, i64 height, primes):
    cdef Py_ssize_t d = len(regrep)
    cdef cnp.ndarray[i64, ndim=3] Rn = np.zeros((d, d, d), dtype=np.int64)
    cdef Py_ssize_t k, i, j, idx
    for k in range(d):
        for i in range(d):
            for j in range(d):
                v = regrep[k][i][j]
                if v >= (1 << 31) or v <= -(1 << 31):
                    raise OverflowError("multiplication table entry too large")
                Rn[k, i, j] = v
    cdef i64[:, :, :] R = Rn
    cdef cnp.ndarray[i64, ndim=1] xn = np.full(d, -height, dtype=np.int64)
    cdef i64[:] x = xn
    cdef cnp.ndarray[i64, ndim=2] Mn = np.zeros((d, d), dtype=np.int64)
    cdef i64[:, :] M = Mn
    cdef cnp.ndarray[i64, ndim=1] Pn = np.array(list(primes) or [1], dtype=np.int64)
    cdef i64[:] P = Pn
    cdef Py_ssize_t np_ = len(primes)
    cdef i64 lead, nm, r, acc, t
    cdef i64 total = 1
    cdef i64 step
    cdef int ovf
    for k in range(d):
        total *= 2 * height + 1
    out = []
    for step in range(total):
        lead = 0
        for k in range(d):
            if x[k] != 0:
                lead = x[k]
                break
        if lead > 0:
            ovf = 0
            for i in range(d):
                for j in range(d):
                    acc = 0
                    for k in range(d):
                        acc += x[k] * R[k, i, j]
                    M[i, j] = acc
            ovf = bareiss(M, d, &nm)
            if ovf:
                # exact recomputation on Python ints for this point only
                xs = [int(x[k]) for k in range(d)]
                from ._pure import _bareiss_det
                Mp = [[sum(xs[k] * regrep[k][i][j] for k in range(d)) for j in range(d)]
                      for i in range(d)]
                pnm = _bareiss_det(Mp)
                pr = abs(pnm)
                if pr:
                    for p in primes:
                        while pr % p == 0:
                            pr //= p
                    if pr == 1:
                        out.append((tuple(xs), pnm))
            else:
                r = llabs(nm)
                if r != 0:
                    for idx in range(np_):
                        while r % P[idx] == 0:
                            r = r / P[idx]
                    if r == 1:
                        out.append((tuple([int(x[k]) for k in range(d)]), int(nm)))
        for k in range(d - 1, -1, -1):
            if x[k] < height:
                x[k] += 1
                break
            x[k] = -height
    return out

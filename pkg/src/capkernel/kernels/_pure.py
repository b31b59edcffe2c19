"""Reference implementations of the integer kernels, on plain Python ints.

Every function here has a compiled twin in ``_ckernels.pyx`` with the same
signature and the same pivoting rules, so both paths return identical
matrices.  The compiled one works on int64 and raises OverflowError when an
entry leaves that range; the dispatcher then retries here.
"""

from ..errors import InternalOverflow

# Bit-length ceiling for entries during elimination; 0 disables the check.
MAX_BITS = 1 << 14


def _check_bits(rows):
    if not MAX_BITS:
        return
    for row in rows:
        for x in row:
            if x.bit_length() > MAX_BITS:
                raise InternalOverflow(
                    f"integer entry exceeded {MAX_BITS} bits during elimination")


def _identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _row_sub(A, i, k, q):
    # A[i] -= q * A[k]
    ri, rk = A[i], A[k]
    for j in range(len(ri)):
        if rk[j]:
            ri[j] -= q * rk[j]


def hnf(M, ncols):
    """Row Hermite normal form with transform.

    Returns ``(H, U, pivots)`` with ``U * M == H``, U unimodular, H in row
    echelon form with positive pivots, entries above each pivot reduced into
    ``[0, pivot)``, and zero rows at the bottom.
    """
    m = len(M)
    A = [[int(x) for x in row] for row in M]
    U = _identity(m)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        while True:
            best = -1
            bestval = 0
            for i in range(r, m):
                v = A[i][c]
                if v and (best < 0 or abs(v) < bestval):
                    best, bestval = i, abs(v)
            if best < 0:
                break
            if best != r:
                A[r], A[best] = A[best], A[r]
                U[r], U[best] = U[best], U[r]
            p = A[r][c]
            clean = True
            for i in range(r + 1, m):
                v = A[i][c]
                if v:
                    q = v // p
                    _row_sub(A, i, r, q)
                    _row_sub(U, i, r, q)
                    if A[i][c]:
                        clean = False
            if clean:
                break
        if best < 0 and A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
            U[r] = [-x for x in U[r]]
        p = A[r][c]
        for i in range(r):
            q = A[i][c] // p
            if q:
                _row_sub(A, i, r, q)
                _row_sub(U, i, r, q)
        pivots.append(c)
        r += 1
        _check_bits(A)
    return A, U, pivots


def snf(M, ncols):
    """Smith normal form with transforms: ``U * M * V == D``.

    Pivot is the entry of least nonzero absolute value in the active block,
    ties broken by row-major position.
    """
    m = len(M)
    n = ncols
    A = [[int(x) for x in row] for row in M]
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, k):
        A[i], A[k] = A[k], A[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for row in A:
            row[j], row[k] = row[k], row[j]
        for row in V:
            row[j], row[k] = row[k], row[j]

    def col_sub(j, k, q):
        # column j -= q * column k
        for row in A:
            if row[k]:
                row[j] -= q * row[k]
        for row in V:
            if row[k]:
                row[j] -= q * row[k]

    t = 0
    while t < min(m, n):
        bi = bj = -1
        bv = 0
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                v = row[j]
                if v and (bi < 0 or abs(v) < bv):
                    bi, bj, bv = i, j, abs(v)
        if bi < 0:
            break
        if bi != t:
            swap_rows(t, bi)
        if bj != t:
            swap_cols(t, bj)
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                v = A[i][t]
                if v:
                    q = v // p
                    _row_sub(A, i, t, q)
                    _row_sub(U, i, t, q)
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                v = A[t][j]
                if v:
                    q = v // p
                    col_sub(j, t, q)
                    if A[t][j]:
                        dirty = True
            if dirty:
                # new pivot: least remainder in row t / column t, row-major ties
                bi, bj, bv = t, t, abs(A[t][t])
                for j in range(t + 1, n):
                    v = A[t][j]
                    if v and abs(v) < bv:
                        bi, bj, bv = t, j, abs(v)
                for i in range(t + 1, m):
                    v = A[i][t]
                    if v and abs(v) < bv:
                        bi, bj, bv = i, t, abs(v)
                if bi != t:
                    swap_rows(t, bi)
                if bj != t:
                    swap_cols(t, bj)
                continue
            bad = -1
            for i in range(t + 1, m):
                row = A[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad >= 0:
                    break
            if bad < 0:
                break
            _row_sub(A, t, bad, -1)
            _row_sub(U, t, bad, -1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
        _check_bits(A)
    return U, A, V


def _bareiss_det(M):
    n = len(M)
    if n == 0:
        return 1
    A = [row[:] for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = A[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * akk - A[i][k] * A[k][j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1]


def smooth_norms_in_box(regrep, height, primes):
    """Enumerate x in [-H, H]^d up to sign and keep those with smooth norm.

    ``regrep[k]`` is the d x d matrix of multiplication by the k-th basis
    element, so the norm of x is det(sum_k x_k regrep[k]).  Returns a list of
    ``(x, norm)`` for nonzero x whose |norm| factors over ``primes``; x is
    normalised so its first nonzero coordinate is positive.
    """
    d = len(regrep)
    out = []
    x = [-height] * d
    total = (2 * height + 1) ** d
    for _ in range(total):
        lead = 0
        for v in x:
            if v:
                lead = v
                break
        if lead > 0:
            M = [[sum(x[k] * regrep[k][i][j] for k in range(d)) for j in range(d)]
                 for i in range(d)]
            nm = _bareiss_det(M)
            r = abs(nm)
            if r:
                for p in primes:
                    while r % p == 0:
                        r //= p
                if r == 1:
                    out.append((tuple(x), nm))
        for k in range(d - 1, -1, -1):
            if x[k] < height:
                x[k] += 1
                break
            x[k] = -height
    return out

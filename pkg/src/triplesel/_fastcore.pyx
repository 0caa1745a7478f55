# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: point counting over F_l / F_{l^2} and lattice enumeration.

API mirrors triplesel._purecore exactly; see there for semantics.  All float
pruning decisions are re-verified with exact 64-bit integer arithmetic at the
leaves, so results are identical to the pure implementation.
"""

from libc.stdlib cimport malloc, free
from libc.math cimport sqrt, ceil, floor

DEF MAXN = 16


def ap_odd(long long b2, long long b4, long long b6, long long ell):
    cdef unsigned char *tab = <unsigned char *> malloc(ell)
    cdef long long x, v, s = 0
    cdef long long bb2, bb4, bb6
    if tab == NULL:
        raise MemoryError
    for x in range(ell):
        tab[x] = 0
    for x in range(1, ell):
        tab[(x * x) % ell] = 1
    for x in range(1, ell):
        if tab[x] == 0:
            tab[x] = 2
    tab[0] = 0
    bb2 = b2 % ell
    bb4 = (2 * b4) % ell
    bb6 = b6 % ell
    if bb2 < 0: bb2 += ell
    if bb4 < 0: bb4 += ell
    if bb6 < 0: bb6 += ell
    for x in range(ell):
        v = (((4 * x + bb2) * x + bb4) % ell * x + bb6) % ell
        if tab[v] == 1:
            s += 1
        elif tab[v] == 2:
            s -= 1
    free(tab)
    return -s


def apsq_inert(a_pairs, long long ell, long long s, long long c):
    cdef long long a1u, a1v, a2u, a2v, a3u, a3v, a4u, a4v, a6u, a6v
    (a1u, a1v), (a2u, a2v), (a3u, a3v), (a4u, a4v), (a6u, a6v) = [
        (p[0] % ell, p[1] % ell) for p in a_pairs
    ]
    cdef unsigned char *tab = <unsigned char *> malloc(ell)
    cdef long long x, t
    if tab == NULL:
        raise MemoryError
    for x in range(ell):
        tab[x] = 0
    for x in range(1, ell):
        tab[(x * x) % ell] = 1
    for x in range(1, ell):
        if tab[x] == 0:
            tab[x] = 2
    tab[0] = 0

    cdef long long b2u, b2v, b4u, b4v, b6u, b6v, t1u, t1v
    # mul(x,y) in F_l[t]/(t^2 - s t - c)
    b2u = (a1u * a1u + a1v * a1v % ell * c + 4 * a2u) % ell
    b2v = (a1u * a1v * 2 + a1v * a1v % ell * s + 4 * a2v) % ell
    t1u = (a1u * a3u + a1v * a3v % ell * c) % ell
    t1v = (a1u * a3v + a1v * a3u + a1v * a3v % ell * s) % ell
    b4u = (2 * a4u + t1u) % ell
    b4v = (2 * a4v + t1v) % ell
    b6u = (a3u * a3u + a3v * a3v % ell * c + 4 * a6u) % ell
    b6v = (a3u * a3v * 2 + a3v * a3v % ell * s + 4 * a6v) % ell

    cdef long long tb4u = (2 * b4u) % ell, tb4v = (2 * b4v) % ell
    cdef long long xu, xv, fu, fv, gu, gv, nrm, count = 0
    for xu in range(ell):
        for xv in range(ell):
            fu = (4 * xu + b2u) % ell
            fv = (4 * xv + b2v) % ell
            gu = (fu * xu + fv * xv % ell * c) % ell
            gv = (fu * xv + fv * xu + fv * xv % ell * s) % ell
            gu = (gu + tb4u) % ell
            gv = (gv + tb4v) % ell
            fu = (gu * xu + gv * xv % ell * c) % ell
            fv = (gu * xv + gv * xu + gv * xv % ell * s) % ell
            fu = (fu + b6u) % ell
            fv = (fv + b6v) % ell
            nrm = (fu * fu + s * fu % ell * fv - c * fv % ell * fv) % ell
            if nrm < 0:
                nrm += ell
            t = tab[nrm]
            if t == 1:
                count += 1
            elif t == 2:
                count -= 1
    free(tab)
    return -count


def apsq_inert_alt(a_pairs, long long ell, long long s, long long c):
    """Recount of apsq_inert with the quadratic character evaluated through a
    table of squares of F_{l^2} (independent of the norm-homomorphism route)."""
    cdef long long a1u, a1v, a2u, a2v, a3u, a3v, a4u, a4v, a6u, a6v
    (a1u, a1v), (a2u, a2v), (a3u, a3v), (a4u, a4v), (a6u, a6v) = [
        (p[0] % ell, p[1] % ell) for p in a_pairs
    ]
    cdef unsigned char *sq = <unsigned char *> malloc(ell * ell)
    cdef long long u, v, wu, wv
    if sq == NULL:
        raise MemoryError
    for u in range(ell * ell):
        sq[u] = 0
    for u in range(ell):
        for v in range(ell):
            wu = (u * u + v * v % ell * c) % ell
            wv = (2 * u * v + v * v % ell * s) % ell
            sq[wu * ell + wv] = 1

    cdef long long b2u, b2v, b4u, b4v, b6u, b6v, t1u, t1v
    b2u = (a1u * a1u + a1v * a1v % ell * c + 4 * a2u) % ell
    b2v = (a1u * a1v * 2 + a1v * a1v % ell * s + 4 * a2v) % ell
    t1u = (a1u * a3u + a1v * a3v % ell * c) % ell
    t1v = (a1u * a3v + a1v * a3u + a1v * a3v % ell * s) % ell
    b4u = (2 * a4u + t1u) % ell
    b4v = (2 * a4v + t1v) % ell
    b6u = (a3u * a3u + a3v * a3v % ell * c + 4 * a6u) % ell
    b6v = (a3u * a3v * 2 + a3v * a3v % ell * s + 4 * a6v) % ell
    cdef long long tb4u = (2 * b4u) % ell, tb4v = (2 * b4v) % ell
    cdef long long xu, xv, fu, fv, gu, gv, total = 0
    for xu in range(ell):
        for xv in range(ell):
            fu = (4 * xu + b2u) % ell
            fv = (4 * xv + b2v) % ell
            gu = (fu * xu + fv * xv % ell * c) % ell
            gv = (fu * xv + fv * xu + fv * xv % ell * s) % ell
            gu = (gu + tb4u) % ell
            gv = (gv + tb4v) % ell
            fu = (gu * xu + gv * xv % ell * c) % ell
            fv = (gu * xv + gv * xu + gv * xv % ell * s) % ell
            fu = (fu + b6u) % ell
            fv = (fv + b6v) % ell
            if fu == 0 and fv == 0:
                continue
            if sq[fu * ell + fv]:
                total += 1
            else:
                total -= 1
    free(sq)
    return -total


# ---------------------------------------------------------------------------
# enumeration


cdef struct EnumState:
    int n
    long long gram[MAXN][MAXN]
    double q[MAXN][MAXN]
    double t[MAXN]
    double u[MAXN + 1][MAXN]
    long long x[MAXN]
    long long lo[MAXN]
    long long hi[MAXN]


cdef int _prep(EnumState *st, gram) except -1:
    cdef int n = len(gram)
    cdef int i, j, k, l
    if n > MAXN:
        raise ValueError("rank too large for compiled kernel")
    st.n = n
    for i in range(n):
        for j in range(n):
            st.gram[i][j] = gram[i][j]
            st.q[i][j] = gram[i][j] / 2.0
    for i in range(n):
        if st.q[i][i] <= 0:
            raise ValueError("Gram matrix not positive definite")
        for j in range(i + 1, n):
            st.q[j][i] = st.q[i][j]
            st.q[i][j] = st.q[i][j] / st.q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                st.q[k][l] -= st.q[k][i] * st.q[i][l]
    return 0


cdef inline long long _exact_q2(EnumState *st):
    cdef int i, j, n = st.n
    cdef long long tot = 0, xi
    for i in range(n):
        xi = st.x[i]
        if xi != 0:
            tot += st.gram[i][i] * xi * xi
            for j in range(i + 1, n):
                if st.x[j] != 0:
                    tot += 2 * st.gram[i][j] * xi * st.x[j]
    return tot


cdef inline void _bounds(EnumState *st, int i):
    cdef double z, ui
    if st.t[i] < 0:
        st.lo[i] = 1
        st.hi[i] = 0
        st.x[i] = 0
        return
    z = sqrt(st.t[i] / st.q[i][i])
    ui = st.u[i + 1][i]
    st.lo[i] = <long long> ceil(-z - ui - 1e-9)
    st.hi[i] = <long long> floor(z - ui + 1e-9)
    st.x[i] = st.lo[i] - 1


def qf_count(gram, long long target2):
    cdef EnumState st
    _prep(&st, gram)
    cdef int n = st.n, i, k
    cdef long long cnt = 0, q2
    cdef double dx
    cdef bint nz
    i = n - 1
    st.t[i] = target2 / 2.0 + 1e-6 * target2 + 1e-6
    for k in range(n):
        st.u[n][k] = 0
    _bounds(&st, i)
    while True:
        st.x[i] += 1
        if st.x[i] > st.hi[i]:
            i += 1
            if i >= n:
                return cnt
            continue
        if i == 0:
            nz = False
            for k in range(n):
                if st.x[k] != 0:
                    nz = True
                    break
            if nz and _exact_q2(&st) == target2:
                cnt += 1
            continue
        dx = st.x[i] + st.u[i + 1][i]
        st.t[i - 1] = st.t[i] - st.q[i][i] * dx * dx
        for k in range(i):
            st.u[i][k] = st.u[i + 1][k] + st.x[i] * st.q[k][i]
        i -= 1
        _bounds(&st, i)


def qf_theta(gram, long long scale2, long long kmax):
    cdef EnumState st
    _prep(&st, gram)
    cdef int n = st.n, i, k
    cdef long long q2, idx, bound2 = scale2 * kmax
    cdef double dx
    cdef bint nz
    counts = [0] * (kmax + 1)
    i = n - 1
    st.t[i] = bound2 / 2.0 + 1e-6 * bound2 + 1e-6
    for k in range(n):
        st.u[n][k] = 0
    _bounds(&st, i)
    while True:
        st.x[i] += 1
        if st.x[i] > st.hi[i]:
            i += 1
            if i >= n:
                return counts
            continue
        if i == 0:
            nz = False
            for k in range(n):
                if st.x[k] != 0:
                    nz = True
                    break
            if nz:
                q2 = _exact_q2(&st)
                if 0 < q2 <= bound2:
                    if q2 % scale2:
                        raise ValueError("theta scale does not divide an enumerated value")
                    counts[q2 // scale2] += 1
            continue
        dx = st.x[i] + st.u[i + 1][i]
        st.t[i - 1] = st.t[i] - st.q[i][i] * dx * dx
        for k in range(i):
            st.u[i][k] = st.u[i + 1][k] + st.x[i] * st.q[k][i]
        i -= 1
        _bounds(&st, i)


def qf_vectors(gram, long long target2, long long limit=0):
    cdef EnumState st
    _prep(&st, gram)
    cdef int n = st.n, i, k
    cdef double dx
    cdef bint nz
    out = []
    i = n - 1
    st.t[i] = target2 / 2.0 + 1e-6 * target2 + 1e-6
    for k in range(n):
        st.u[n][k] = 0
    _bounds(&st, i)
    while True:
        st.x[i] += 1
        if st.x[i] > st.hi[i]:
            i += 1
            if i >= n:
                return out
            continue
        if i == 0:
            nz = False
            for k in range(n):
                if st.x[k] != 0:
                    nz = True
                    break
            if nz and _exact_q2(&st) == target2:
                out.append(tuple(st.x[k] for k in range(n)))
                if limit and len(out) >= limit:
                    return out
            continue
        dx = st.x[i] + st.u[i + 1][i]
        st.t[i - 1] = st.t[i] - st.q[i][i] * dx * dx
        for k in range(i):
            st.u[i][k] = st.u[i + 1][k] + st.x[i] * st.q[k][i]
        i -= 1
        _bounds(&st, i)


def qf_count_two(gram, long long target2, gram2, long long target2b):
    cdef EnumState st
    _prep(&st, gram)
    cdef int n = st.n, i, k, j
    cdef long long cnt = 0, tot
    cdef long long g2[MAXN][MAXN]
    cdef double dx
    cdef bint nz
    for i in range(n):
        for k in range(n):
            g2[i][k] = gram2[i][k]
    i = n - 1
    st.t[i] = target2 / 2.0 + 1e-6 * target2 + 1e-6
    for k in range(n):
        st.u[n][k] = 0
    _bounds(&st, i)
    while True:
        st.x[i] += 1
        if st.x[i] > st.hi[i]:
            i += 1
            if i >= n:
                return cnt
            continue
        if i == 0:
            nz = False
            for k in range(n):
                if st.x[k] != 0:
                    nz = True
                    break
            if nz and _exact_q2(&st) == target2:
                tot = 0
                for k in range(n):
                    if st.x[k] != 0:
                        for j in range(n):
                            if st.x[j] != 0:
                                tot += g2[k][j] * st.x[k] * st.x[j]
                if tot == target2b:
                    cnt += 1
            continue
        dx = st.x[i] + st.u[i + 1][i]
        st.t[i - 1] = st.t[i] - st.q[i][i] * dx * dx
        for k in range(i):
            st.u[i][k] = st.u[i + 1][k] + st.x[i] * st.q[k][i]
        i -= 1
        _bounds(&st, i)


def qf_vectors_two(gram, long long target2, gram2, long long target2b, long long limit=0):
    cdef EnumState st
    _prep(&st, gram)
    cdef int n = st.n, i, k, j
    cdef long long tot
    cdef long long g2[MAXN][MAXN]
    cdef double dx
    cdef bint nz
    out = []
    for i in range(n):
        for k in range(n):
            g2[i][k] = gram2[i][k]
    i = n - 1
    st.t[i] = target2 / 2.0 + 1e-6 * target2 + 1e-6
    for k in range(n):
        st.u[n][k] = 0
    _bounds(&st, i)
    while True:
        st.x[i] += 1
        if st.x[i] > st.hi[i]:
            i += 1
            if i >= n:
                return out
            continue
        if i == 0:
            nz = False
            for k in range(n):
                if st.x[k] != 0:
                    nz = True
                    break
            if nz and _exact_q2(&st) == target2:
                tot = 0
                for k in range(n):
                    if st.x[k] != 0:
                        for j in range(n):
                            if st.x[j] != 0:
                                tot += g2[k][j] * st.x[k] * st.x[j]
                if tot == target2b:
                    out.append(tuple(st.x[k] for k in range(n)))
                    if limit and len(out) >= limit:
                        return out
            continue
        dx = st.x[i] + st.u[i + 1][i]
        st.t[i - 1] = st.t[i] - st.q[i][i] * dx * dx
        for k in range(i):
            st.u[i][k] = st.u[i + 1][k] + st.x[i] * st.q[k][i]
        i -= 1
        _bounds(&st, i)


def qf_min_norm(gram):
    cdef EnumState st
    _prep(&st, gram)
    cdef int n = st.n, i, k
    cdef long long best, q2
    cdef double dx
    cdef bint nz
    best = st.gram[0][0]
    for k in range(n):
        if st.gram[k][k] < best:
            best = st.gram[k][k]
    i = n - 1
    st.t[i] = best / 2.0 + 1e-6 * best + 1e-6
    for k in range(n):
        st.u[n][k] = 0
    _bounds(&st, i)
    while True:
        st.x[i] += 1
        if st.x[i] > st.hi[i]:
            i += 1
            if i >= n:
                return best
            continue
        if i == 0:
            nz = False
            for k in range(n):
                if st.x[k] != 0:
                    nz = True
                    break
            if nz:
                q2 = _exact_q2(&st)
                if 0 < q2 < best:
                    best = q2
            continue
        dx = st.x[i] + st.u[i + 1][i]
        st.t[i - 1] = st.t[i] - st.q[i][i] * dx * dx
        for k in range(i):
            st.u[i][k] = st.u[i + 1][k] + st.x[i] * st.q[k][i]
        i -= 1
        _bounds(&st, i)

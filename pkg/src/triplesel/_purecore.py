"""Pure-Python reference implementation of the hot kernels.

Mirrors the API of the compiled module `_fastcore`; `kernels` picks whichever
is importable.  Semantics are identical — every boundary decision made with
floats here is re-checked with exact integer arithmetic at the leaves.

Kernels:
  * ap_odd        -- Frobenius trace of a curve over F_l (odd l) by a full
                     character sum with a Legendre table.
  * apsq_inert    -- Frobenius trace over F_{l^2} (odd l, inert residue model
                     t^2 = s t + c) by a full character sum; the quadratic
                     character is Legendre(norm) with a mod-l table.
  * qf_count / qf_vectors / qf_theta / qf_count_two / qf_vectors_two /
    qf_min_norm -- Fincke-Pohst style enumeration on positive definite
                     integral Gram matrices with Q(x) = x G x^T / 2.
"""

from __future__ import annotations


def _legendre_table(ell: int) -> bytearray:
    """table[a] = 1 if a is a nonzero square mod ell, 2 if nonsquare, 0 if 0."""
    t = bytearray([2]) * 0
    t = bytearray(ell)
    for x in range(1, ell):
        t[x * x % ell] = 1
    for x in range(1, ell):
        if t[x] == 0:
            t[x] = 2
    t[0] = 0
    return t


def ap_odd(b2: int, b4: int, b6: int, ell: int) -> int:
    """a_ell = -sum_x chi(4x^3 + b2 x^2 + 2 b4 x + b6) over F_ell, ell odd."""
    tab = _legendre_table(ell)
    b2 %= ell
    b4t = 2 * b4 % ell
    b6 %= ell
    s = 0
    for x in range(ell):
        v = (((4 * x + b2) * x + b4t) * x + b6) % ell
        c = tab[v]
        if c == 1:
            s += 1
        elif c == 2:
            s -= 1
    return -s


def apsq_inert(a_pairs, ell: int, s: int, c: int) -> int:
    """a_{ell^2} for a long Weierstrass curve over F_{ell^2} (odd ell).

    a_pairs: ((u1,v1),...,(u6',v6')) images of a1,a2,a3,a4,a6 (five pairs) in
    the model F_ell[t]/(t^2 - s t - c).  Uses chi(z) = legendre(Norm(z)).
    """
    (a1u, a1v), (a2u, a2v), (a3u, a3v), (a4u, a4v), (a6u, a6v) = a_pairs
    tab = _legendre_table(ell)

    def mul(xu, xv, yu, yv):
        return (xu * yu + xv * yv * c) % ell, (xu * yv + xv * yu + xv * yv * s) % ell

    # b-invariants over F_{l^2}
    b2u, b2v = mul(a1u, a1v, a1u, a1v)
    b2u, b2v = (b2u + 4 * a2u) % ell, (b2v + 4 * a2v) % ell
    t1u, t1v = mul(a1u, a1v, a3u, a3v)
    b4u, b4v = (2 * a4u + t1u) % ell, (2 * a4v + t1v) % ell
    t2u, t2v = mul(a3u, a3v, a3u, a3v)
    b6u, b6v = (t2u + 4 * a6u) % ell, (t2v + 4 * a6v) % ell

    count = 0  # sum of chi over all x in F_{l^2}
    tb4u, tb4v = 2 * b4u % ell, 2 * b4v % ell
    for xu in range(ell):
        for xv in range(ell):
            # f = ((4x + b2) x + 2 b4) x + b6
            fu, fv = (4 * xu + b2u) % ell, (4 * xv + b2v) % ell
            fu, fv = mul(fu, fv, xu, xv)
            fu, fv = (fu + tb4u) % ell, (fv + tb4v) % ell
            fu, fv = mul(fu, fv, xu, xv)
            fu, fv = (fu + b6u) % ell, (fv + b6v) % ell
            # Norm(fu + fv t) = fu^2 + s fu fv - c fv^2
            nrm = (fu * fu + s * fu * fv - c * fv * fv) % ell
            t = tab[nrm]
            if t == 1:
                count += 1
            elif t == 2:
                count -= 1
    return -count


def apsq_inert_alt(a_pairs, ell: int, s: int, c: int) -> int:
    """Independently coded recount of apsq_inert: the quadratic character of
    F_{l^2} is evaluated with a table of squares of the quadratic extension
    (built by direct squaring) instead of the norm homomorphism."""
    (a1u, a1v), (a2u, a2v), (a3u, a3v), (a4u, a4v), (a6u, a6v) = [(p[0] % ell, p[1] % ell) for p in a_pairs]
    sq = bytearray(ell * ell)
    for u in range(ell):
        for v in range(ell):
            # (u + v t)^2 = u^2 + v^2 c + (2uv + v^2 s) t
            wu = (u * u + v * v * c) % ell
            wv = (2 * u * v + v * v * s) % ell
            sq[wu * ell + wv] = 1

    def mul(xu, xv, yu, yv):
        return (xu * yu + xv * yv * c) % ell, (xu * yv + xv * yu + xv * yv * s) % ell

    b2u, b2v = mul(a1u, a1v, a1u, a1v)
    b2u, b2v = (b2u + 4 * a2u) % ell, (b2v + 4 * a2v) % ell
    t1u, t1v = mul(a1u, a1v, a3u, a3v)
    b4u, b4v = (2 * a4u + t1u) % ell, (2 * a4v + t1v) % ell
    t2u, t2v = mul(a3u, a3v, a3u, a3v)
    b6u, b6v = (t2u + 4 * a6u) % ell, (t2v + 4 * a6v) % ell
    tb4u, tb4v = 2 * b4u % ell, 2 * b4v % ell
    total = 0
    for xu in range(ell):
        for xv in range(ell):
            fu, fv = (4 * xu + b2u) % ell, (4 * xv + b2v) % ell
            fu, fv = mul(fu, fv, xu, xv)
            fu, fv = (fu + tb4u) % ell, (fv + tb4v) % ell
            fu, fv = mul(fu, fv, xu, xv)
            fu, fv = (fu + b6u) % ell, (fv + b6v) % ell
            if fu == 0 and fv == 0:
                continue
            total += 1 if sq[fu * ell + fv] else -1
    return -total


# ---------------------------------------------------------------------------
# quadratic form enumeration


def _cholesky(gram):
    """q with Q(x) = sum_i q[i][i] (x_i + sum_{j>i} q[i][j] x_j)^2, Q = xGx/2."""
    n = len(gram)
    a = [[gram[i][j] / 2.0 for j in range(n)] for i in range(n)]
    for i in range(n):
        if a[i][i] <= 0:
            raise ValueError("Gram matrix not positive definite")
        for j in range(i + 1, n):
            a[j][i] = a[i][j]
            a[i][j] = a[i][j] / a[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                a[k][l] -= a[k][i] * a[i][l]
    return a


def _exact_q2(gram, x):
    n = len(gram)
    tot = 0
    for i in range(n):
        xi = x[i]
        if xi:
            gi = gram[i]
            tot += gi[i] * xi * xi
            for j in range(i + 1, n):
                if x[j]:
                    tot += 2 * gi[j] * xi * x[j]
    return tot  # = 2 Q(x)


def _enumerate(gram, bound2, visit):
    """Visit every x != 0 (both of +-x) with 2*Q(x) <= bound2.

    Calls visit(x_tuple, q2) with exact integer q2 = 2Q(x).
    """
    import math

    n = len(gram)
    q = _cholesky(gram)
    pad = 1e-6 * bound2 + 1e-6
    x = [0] * n
    t = [0.0] * n  # budget at each level
    # ubuf[i][k] = sum_{j >= i} q[k][j] x_j for k < i (offsets below level i)
    ubuf = [[0.0] * n for _ in range(n + 1)]
    lo = [0] * n
    hi = [0] * n

    def bounds(i):
        z = math.sqrt(max(t[i], 0.0) / q[i][i])
        ui = ubuf[i + 1][i]
        lo[i] = int(math.ceil(-z - ui - 1e-9))
        hi[i] = int(math.floor(z - ui + 1e-9))
        x[i] = lo[i] - 1

    i = n - 1
    t[i] = bound2 / 2.0 + pad
    bounds(i)
    while True:
        x[i] += 1
        if x[i] > hi[i]:
            i += 1
            if i >= n:
                return
            continue
        if i == 0:
            if any(x):
                q2 = _exact_q2(gram, x)
                if 0 < q2 <= bound2:
                    visit(tuple(x), q2)
            continue
        dx = x[i] + ubuf[i + 1][i]
        t[i - 1] = t[i] - q[i][i] * dx * dx
        row = ubuf[i]
        prev = ubuf[i + 1]
        for k in range(i):
            row[k] = prev[k] + x[i] * q[k][i]
        i -= 1
        bounds(i)


def qf_count(gram, target2: int) -> int:
    """#{x != 0 : 2*Q(x) = target2}."""
    out = [0]

    def visit(x, q2):
        if q2 == target2:
            out[0] += 1

    _enumerate(gram, target2, visit)
    return out[0]


def qf_vectors(gram, target2: int, limit: int = 0):
    out = []

    def visit(x, q2):
        if q2 == target2:
            out.append(x)

    _enumerate(gram, target2, visit)
    if limit and len(out) > limit:
        return out[:limit]
    return out


def qf_theta(gram, scale2: int, kmax: int):
    """counts[k] = #{x != 0 : 2*Q(x) = k*scale2} for k = 0..kmax.

    Raises if some enumerated vector has 2Q not divisible by scale2 (callers
    pass the norm of the underlying ideal pair, which divides all values).
    """
    counts = [0] * (kmax + 1)
    bad = [0]

    def visit(x, q2):
        k, r = divmod(q2, scale2)
        if r:
            bad[0] += 1
        elif k <= kmax:
            counts[k] += 1

    _enumerate(gram, scale2 * kmax, visit)
    if bad[0]:
        raise ValueError("theta scale does not divide an enumerated value")
    return counts


def qf_count_two(gram, target2: int, gram2, target2b: int) -> int:
    """#{x != 0 : 2Q(x) = target2 and x gram2 x^T = target2b} (gram2 full form)."""
    out = [0]

    def visit(x, q2):
        if q2 == target2 and _exact_full(gram2, x) == target2b:
            out[0] += 1

    _enumerate(gram, target2, visit)
    return out[0]


def qf_vectors_two(gram, target2: int, gram2, target2b: int, limit: int = 0):
    out = []

    def visit(x, q2):
        if q2 == target2 and _exact_full(gram2, x) == target2b:
            out.append(x)

    _enumerate(gram, target2, visit)
    if limit and len(out) > limit:
        return out[:limit]
    return out


def _exact_full(gram2, x):
    n = len(x)
    tot = 0
    for i in range(n):
        if x[i]:
            row = gram2[i]
            for j in range(n):
                if x[j]:
                    tot += row[j] * x[i] * x[j]
    return tot


def qf_min_norm(gram) -> int:
    """min 2Q(x) over x != 0."""
    bound = min(gram[i][i] for i in range(len(gram)))
    best = [bound]

    def visit(x, q2):
        if 0 < q2 < best[0]:
            best[0] = q2

    _enumerate(gram, bound, visit)
    return best[0]

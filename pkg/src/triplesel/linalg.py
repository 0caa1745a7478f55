"""Exact linear algebra over Z, Q and Z/p^n used by the lattice and Brandt layers.

Matrices are lists of lists of ints (or Fractions where stated).  Sizes stay
small (rank <= 8 lattices, Brandt matrices up to a few hundred rows), so the
routines favour exactness and clarity over asymptotics; the one numerically
hot operation (lattice point enumeration) lives in the kernels module instead.
"""

from __future__ import annotations

from fractions import Fraction


def mat_copy(a):
    return [row[:] for row in a]


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            x = ai[t]
            if x:
                bt = b[t]
                for j in range(m):
                    oi[j] += x * bt[j]
    return out


def mat_vec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def vec_mat(v, a):
    m = len(a[0])
    out = [0] * m
    for x, row in zip(v, a):
        if x:
            for j in range(m):
                out[j] += x * row[j]
    return out


def mat_transpose(a):
    return [list(col) for col in zip(*a)]


def mat_eq(a, b):
    return a == b


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def det_int(a):
    """Determinant of a square integer matrix (Bareiss, exact)."""
    n = len(a)
    m = mat_copy(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def hnf(rows):
    """Row-style Hermite normal form of the lattice spanned by integer rows.

    Returns a list of nonzero rows: upper-triangular-by-pivot, positive pivots,
    entries above a pivot reduced into [0, pivot).  Canonical for a lattice.
    """
    work = [row[:] for row in rows if any(row)]
    if not work:
        return []
    ncols = len(work[0])
    result = []
    col = 0
    while col < ncols and work:
        rows_with = [r for r in work if r[col] != 0]
        if not rows_with:
            col += 1
            continue
        # Euclidean reduction in this column
        while True:
            rows_with.sort(key=lambda r: abs(r[col]))
            piv = rows_with[0]
            done = True
            for r in rows_with[1:]:
                q = r[col] // piv[col]
                if q:
                    for j in range(col, ncols):
                        r[j] -= q * piv[j]
                if r[col] != 0:
                    done = False
            rows_with = [piv] + [r for r in rows_with[1:] if r[col] != 0]
            if done or len(rows_with) == 1:
                break
        piv = rows_with[0]
        if piv[col] < 0:
            for j in range(col, ncols):
                piv[j] = -piv[j]
        result.append(piv)
        work = [r for r in work if r is not piv and any(r)]
        col += 1
    # reduce entries above pivots
    for i in range(len(result) - 1, -1, -1):
        pcol = next(j for j, x in enumerate(result[i]) if x)
        p = result[i][pcol]
        for k in range(i):
            q = result[k][pcol] // p
            if q:
                for j in range(pcol, len(result[i])):
                    result[k][j] -= q * result[i][j]
    return result


def kernel_rational(a):
    """Basis (list of integer vectors, primitive) of {x : a x = 0} over Q.

    a is an integer matrix acting on column vectors x.
    """
    from math import gcd

    n = len(a)
    m = len(a[0]) if n else 0
    # fraction-free row echelon
    mat = [[Fraction(x) for x in row] for row in a]
    pivots = []
    r = 0
    for c in range(m):
        pr = None
        for i in range(r, n):
            if mat[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(n):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == n:
            break
    free = [c for c in range(m) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * m
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -mat[i][fc]
        den = 1
        for x in v:
            den = den * x.denominator // gcd(den, x.denominator)
        iv = [int(x * den) for x in v]
        g = 0
        for x in iv:
            g = gcd(g, abs(x))
        if g > 1:
            iv = [x // g for x in iv]
        basis.append(iv)
    return basis


def solve_rational(a, b):
    """Solve a x = b exactly over Q (a square nonsingular, ints or Fractions).

    Returns a list of Fractions.
    """
    n = len(a)
    mat = [[Fraction(a[i][j]) for j in range(n)] + [Fraction(b[i])] for i in range(n)]
    for c in range(n):
        pr = next((i for i in range(c, n) if mat[i][c] != 0), None)
        if pr is None:
            raise ValueError("singular system")
        mat[c], mat[pr] = mat[pr], mat[c]
        pv = mat[c][c]
        mat[c] = [x / pv for x in mat[c]]
        for i in range(n):
            if i != c and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[c])]
    return [mat[i][n] for i in range(n)]


def mat_inverse_fractions(a):
    n = len(a)
    cols = []
    for j in range(n):
        e = [1 if i == j else 0 for i in range(n)]
        cols.append(solve_rational(a, e))
    return [[cols[j][i] for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# linear algebra mod p and mod p^n


def kernel_mod_p(a, p):
    """Basis of the right kernel of a over F_p (a: integer or residue matrix)."""
    n = len(a)
    m = len(a[0]) if n else 0
    mat = [[x % p for x in row] for row in a]
    pivots = []
    r = 0
    for c in range(m):
        pr = next((i for i in range(r, n) if mat[i][c]), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = pow(mat[r][c], p - 2, p)
        mat[r] = [x * inv % p for x in mat[r]]
        for i in range(n):
            if i != r and mat[i][c]:
                f = mat[i][c]
                row_i = mat[i]
                row_r = mat[r]
                mat[i] = [(x - f * y) % p for x, y in zip(row_i, row_r)]
        pivots.append(c)
        r += 1
        if r == n:
            break
    free = [c for c in range(m) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * m
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-mat[i][fc]) % p
        basis.append(v)
    return basis


def howell_form(a, p, n):
    """Howell normal form of the row span of a over Z/p^n.

    Returns a list of nonzero rows in echelon form whose span (as a module)
    equals the span of a, with the Howell property: every element of the span
    supported on columns >= j lies in the span of the rows with pivot >= j.
    """
    q = p**n
    rows = [[x % q for x in row] for row in a if any(x % q for x in row)]
    m = len(rows[0]) if rows else 0
    result = []
    work = rows
    for c in range(m):
        work = [r for r in work if any(r)]
        cand = [r for r in work if r[c] % q]
        rest = [r for r in work if not (r[c] % q)]
        if not cand:
            work = rest
            continue
        # pick row with minimal p-valuation in column c
        def val(x):
            v = 0
            while x % p == 0:
                x //= p
                v += 1
            return v

        cand.sort(key=lambda r: val(r[c]))
        piv = cand[0]
        vp = val(piv[c])
        u = piv[c] // p**vp
        uinv = pow(u, -1, q)
        piv = [x * uinv % q for x in piv]  # pivot = p^vp
        new_rest = rest
        for r in cand[1:]:
            f = r[c] // p**vp
            r2 = [(x - f * y) % q for x, y in zip(r, piv)]
            if any(r2):
                new_rest.append(r2)
        result.append((c, vp, piv))
        # Howell: add p^(n-vp) * piv to capture non-saturated tail
        if vp > 0:
            tail = [x * p ** (n - vp) % q for x in piv]
            if any(tail):
                new_rest.append(tail)
        work = new_rest
    # normalize above-pivot entries
    out = [piv for _, _, piv in result]
    info = [(c, vp) for c, vp, _ in result]
    for i in range(len(out) - 1, -1, -1):
        c, vp = info[i]
        mod = q // p**vp  # entries above reduced mod p^(n-vp) * pivot scale
        for k in range(i):
            f = out[k][c] // p**vp
            f %= mod
            if f:
                out[k] = [(x - f * y) % q for x, y in zip(out[k], out[i])]
    return out


def kernel_mod_pn(a, p, n):
    """Generators of {x : a x = 0 over Z/p^n} (column vectors).

    Returns a list of generating vectors of the kernel module.
    """
    q = p**n
    m = len(a[0]) if a else 0
    # kernel of a = (row space of a)^perp: compute via Howell form of a^T trick.
    # Simple robust approach: solve by lifting kernels mod p.
    # x in ker mod p^n  <=>  x = x0 + p*y with a x0 = 0 mod p and a x0/p... use
    # iterative construction over levels.
    gens = [[0] * m for _ in range(0)]
    # level-by-level lifting: V_k = {x mod p^k kernel}; start with identity mod p^0
    basis = identity(m)  # generators of solutions mod p^0 (everything)
    scale = 1
    for level in range(n):
        # Want x = sum c_i b_i with a(sum c_i b_i) = 0 mod p^(level+1).
        # Currently a*b_i = 0 mod p^level. Solve mod p for c.
        imgs = []
        for b in basis:
            v = mat_vec(a, b)
            imgs.append([(x // scale) % p for x in v])
        ker = kernel_mod_p(mat_transpose(imgs), p)  # combos c with sum c_i img_i = 0
        new_basis = []
        for c in ker:
            vec = [0] * m
            for ci, b in zip(c, basis):
                if ci:
                    for j in range(m):
                        vec[j] += ci * b[j]
            vec = [x % q for x in vec]
            new_basis.append(vec)
        for b in basis:
            new_basis.append([x * p % q for x in b])
        # prune via Howell form to keep generator count small
        if new_basis:
            new_basis = howell_form(new_basis, p, n)
        basis = new_basis if new_basis else []
        scale *= p
        if not basis:
            break
    return basis


def module_rank_free(gens, p, n):
    """(is_free_rank_one, generator) for a Z/p^n module given by generators.

    A module is free of rank one iff its Howell form is a single row with a
    unit pivot.
    """
    if not gens:
        return False, None
    h = howell_form(gens, p, n)
    if len(h) != 1:
        return False, None
    row = h[0]
    piv = next((x for x in row if x), None)
    if piv is None or piv % p == 0:
        return False, None
    return True, row


# ---------------------------------------------------------------------------
# LLL reduction on Gram matrices (exact integer arithmetic, small ranks)


def _round_div(a: int, b: int) -> int:
    """Nearest integer to a/b for b > 0."""
    return (2 * a + b) // (2 * b)


def lll_gram(gram):
    """LLL-reduce a positive definite integral Gram matrix.

    Returns (gram', U) with gram' = U gram U^T, U unimodular.  Integer-only
    Gram-Schmidt data (d_i, lambda_ij), recomputed after each basis change;
    ranks are <= 8 here so the recomputation is cheap.
    """
    n = len(gram)
    g = [list(row) for row in gram]
    u = identity(n)

    def row_op(k, l, q):
        for t in range(n):
            u[k][t] -= q * u[l][t]
        for t in range(n):
            g[k][t] -= q * g[l][t]
        for t in range(n):
            g[t][k] -= q * g[t][l]

    def swap(k):
        u[k], u[k - 1] = u[k - 1], u[k]
        g[k], g[k - 1] = g[k - 1], g[k]
        for t in range(n):
            g[t][k], g[t][k - 1] = g[t][k - 1], g[t][k]

    def gso():
        d = [1] * (n + 1)
        lam = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1):
                val = g[i][j]
                for t in range(j):
                    val = (d[t + 1] * val - lam[i][t] * lam[j][t]) // d[t]
                if j < i:
                    lam[i][j] = val
                else:
                    d[i + 1] = val
        return d, lam

    k = 1
    guard = 0
    while k < n:
        guard += 1
        if guard > 20000:
            break  # reduction is only an accelerator; never required for correctness
        d, lam = gso()
        if 2 * abs(lam[k][k - 1]) > d[k]:
            row_op(k, k - 1, _round_div(lam[k][k - 1], d[k]))
            d, lam = gso()
        if 4 * (d[k + 1] * d[k - 1] + lam[k][k - 1] ** 2) < 3 * d[k] * d[k]:
            swap(k)
            k = max(k - 1, 1)
        else:
            for l in range(k - 2, -1, -1):
                if 2 * abs(lam[k][l]) > d[l + 1]:
                    row_op(k, l, _round_div(lam[k][l], d[l + 1]))
                    d, lam = gso()
            k += 1
    return g, u

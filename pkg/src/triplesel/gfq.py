"""Small finite fields GF(p^k) with a fixed polynomial basis, plus linear algebra.

Elements are tuples of ints mod p of length k (coefficients of 1, t, ..,
t^(k-1)).  Fields stay tiny (k <= 2, p at desk scale), so representation
simplicity beats speed.  The modulus polynomial is pinned by the caller,
which is what makes residue-field conventions (orientation models, tau-bullet
versus tau-circle) deterministic across runs.
"""

from __future__ import annotations

from .arith import is_prime


class GF:
    """GF(p^k) = F_p[t]/(modulus), modulus monic of degree k given by its
    lower coefficients: t^k = sum_{i<k} modulus[i] t^i."""

    def __init__(self, p: int, modulus_tail: tuple[int, ...] = ()):
        if not is_prime(p):
            raise ValueError("characteristic must be prime")
        self.p = p
        self.k = max(1, len(modulus_tail))
        self.tail = tuple(x % p for x in modulus_tail) if modulus_tail else ()
        self.q = p**self.k
        if self.k > 1 and not self.tail:
            raise ValueError("degree > 1 needs a modulus")

    # -- element helpers ----------------------------------------------------
    def el(self, *coeffs) -> tuple:
        c = list(coeffs) + [0] * (self.k - len(coeffs))
        return tuple(x % self.p for x in c[: self.k])

    @property
    def zero(self):
        return self.el()

    @property
    def one(self):
        return self.el(1)

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def scal(self, c, a):
        return tuple(c * x % self.p for x in a)

    def mul(self, a, b):
        if self.k == 1:
            return (a[0] * b[0] % self.p,)
        # polynomial product then reduce t^k via tail
        prod = [0] * (2 * self.k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        for d in range(2 * self.k - 2, self.k - 1, -1):
            c = prod[d]
            if c:
                prod[d] = 0
                for i, m in enumerate(self.tail):
                    prod[d - self.k + i] = (prod[d - self.k + i] + c * m) % self.p
        return tuple(prod[: self.k])

    def pow(self, a, e: int):
        r = self.one
        b = a
        while e:
            if e & 1:
                r = self.mul(r, b)
            b = self.mul(b, b)
            e >>= 1
        return r

    def inv(self, a):
        if a == self.zero:
            raise ZeroDivisionError
        return self.pow(a, self.q - 2)

    def frob(self, a):
        return self.pow(a, self.p)

    def is_square(self, a) -> bool:
        if a == self.zero:
            return True
        if self.p == 2:
            return True
        return self.pow(a, (self.q - 1) // 2) == self.one

    def elements(self):
        from itertools import product

        for tup in product(range(self.p), repeat=self.k):
            yield tuple(tup)

    def minpoly_quadratic(self, a):
        """(b, c) with a^2 = b*a + c if a generates a quadratic subextension,
        for k = 2: always satisfied."""
        if self.k != 2:
            raise ValueError("only for degree-2 fields")
        a2 = self.mul(a, a)
        # solve a2 = b*a + c*1 over F_p
        det = a[1]  # matrix [[a0,1],[a1,0]] columns (a, 1)
        if det % self.p == 0:
            raise ValueError("element lies in the prime field")
        binv = pow(a[1], -1, self.p)
        b = a2[1] * binv % self.p
        c = (a2[0] - b * a[0]) % self.p
        return b, c

    # -- linear algebra over this field -------------------------------------
    def rref(self, mat):
        """Row-reduce; returns (reduced matrix, pivot columns)."""
        m = [row[:] for row in mat]
        rows = len(m)
        cols = len(m[0]) if rows else 0
        pivots = []
        r = 0
        for c in range(cols):
            pr = next((i for i in range(r, rows) if m[i][c] != self.zero), None)
            if pr is None:
                continue
            m[r], m[pr] = m[pr], m[r]
            inv = self.inv(m[r][c])
            m[r] = [self.mul(inv, x) for x in m[r]]
            for i in range(rows):
                if i != r and m[i][c] != self.zero:
                    f = m[i][c]
                    m[i] = [self.sub(x, self.mul(f, y)) for x, y in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == rows:
                break
        return m, pivots

    def kernel(self, mat):
        """Right kernel basis of mat (rows x cols) over this field."""
        rows = len(mat)
        cols = len(mat[0]) if rows else 0
        m, pivots = self.rref(mat)
        free = [c for c in range(cols) if c not in pivots]
        basis = []
        for fc in free:
            v = [self.zero] * cols
            v[fc] = self.one
            for i, pc in enumerate(pivots):
                v[pc] = self.neg(m[i][fc])
            basis.append(v)
        return basis

    def solve(self, mat, rhs):
        """One solution x of mat x = rhs, or None."""
        rows = len(mat)
        aug = [mat[i][:] + [rhs[i]] for i in range(rows)]
        m, pivots = self.rref(aug)
        cols = len(mat[0])
        if cols in pivots:
            return None
        x = [self.zero] * cols
        for i, pc in enumerate(pivots):
            x[pc] = m[i][cols]
        return x

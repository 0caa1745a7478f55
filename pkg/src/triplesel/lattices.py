"""Full lattices in quaternion algebras, over Z (rank 4) and over O_F (Z-rank 8).

A lattice is span_Z(rows)/den with `rows` a canonical Hermite-form integer
matrix and `den` a minimal positive denominator, so lattice equality is
equality of the stored data.  O_F-lattices are ordinary Z-lattices that happen
to be closed under multiplication by omega; closure is the caller's burden at
generation time (include omega*gens) and is preserved by every operation here.

Everything is exact; Gram matrices fed to the enumeration kernels are the
integral matrices trd(r_i conj r_j) (with Tr_{F/Q} applied over F), LLL-reduced
once and cached.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .arith import isqrt_exact
from .kernels import qf_count, qf_count_two, qf_min_norm, qf_theta, qf_vectors, qf_vectors_two
from .linalg import det_int, hnf, lll_gram, mat_inverse_fractions


def _gcd_list(xs):
    g = 0
    for x in xs:
        g = math.gcd(g, abs(x))
    return g


def _lcm(a, b):
    return a * b // math.gcd(a, b)


class Lattice:
    __slots__ = ("alg", "rows", "den", "_gram", "_gram2", "_lll", "_nrd", "_key", "_inv")

    def __init__(self, alg, rows, den=1, already_canonical=False):
        self.alg = alg
        n = alg.dim
        if not already_canonical:
            rows = hnf([list(r) for r in rows])
            if len(rows) != n:
                raise ValueError("lattice is not of full rank")
            g = math.gcd(_gcd_list([x for r in rows for x in r]), den)
            if g > 1:
                rows = [[x // g for x in r] for r in rows]
                den //= g
        self.rows = tuple(tuple(r) for r in rows)
        self.den = den
        self._gram = None
        self._gram2 = None
        self._lll = None
        self._nrd = None
        self._inv = None
        self._key = (self.rows, self.den)

    # -- construction --------------------------------------------------------
    @classmethod
    def from_elements(cls, alg, elements):
        den = 1
        coords = [tuple(Fraction(x) for x in alg.coords(e)) for e in elements]
        for c in coords:
            for x in c:
                den = _lcm(den, x.denominator)
        rows = [[int(x * den) for x in c] for c in coords]
        return cls(alg, rows, den)

    @classmethod
    def from_rational_rows(cls, alg, rows):
        den = 1
        rws = [[Fraction(x) for x in r] for r in rows]
        for r in rws:
            for x in r:
                den = _lcm(den, x.denominator)
        return cls(alg, [[int(x * den) for x in r] for r in rws], den)

    def basis_elements(self):
        d = self.den
        return [self.alg.element(tuple(Fraction(x, d) for x in row)) for row in self.rows]

    def key(self):
        return self._key

    def __eq__(self, other):
        return isinstance(other, Lattice) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Lattice(dim={self.alg.dim}, den={self.den})"

    # -- module arithmetic -----------------------------------------------------
    def scale(self, c):
        c = Fraction(c)
        rows = [[x * c.numerator for x in r] for r in self.rows]
        return Lattice(self.alg, rows, self.den * c.denominator)

    def add(self, other):
        d = _lcm(self.den, other.den)
        rows = [[x * (d // self.den) for x in r] for r in self.rows]
        rows += [[x * (d // other.den) for x in r] for r in other.rows]
        return Lattice(self.alg, rows, d)

    def mul(self, other):
        alg = self.alg
        e1 = self.basis_elements()
        e2 = other.basis_elements()
        return Lattice.from_elements(alg, [alg.mul(x, y) for x in e1 for y in e2])

    def mul_element(self, el, side="right"):
        alg = self.alg
        if side == "right":
            return Lattice.from_elements(alg, [alg.mul(b, el) for b in self.basis_elements()])
        return Lattice.from_elements(alg, [alg.mul(el, b) for b in self.basis_elements()])

    def conjugate(self):
        alg = self.alg
        return Lattice.from_elements(alg, [alg.conj(e) for e in self.basis_elements()])

    def _inv_rows(self):
        if self._inv is None:
            self._inv = mat_inverse_fractions([list(r) for r in self.rows])
        return self._inv

    def dual_rows(self):
        """Rational rows spanning the coordinate-dual lattice {c : c.L <= Z}."""
        inv = self._inv_rows()
        n = self.alg.dim
        return [[inv[j][i] * self.den for j in range(n)] for i in range(n)]

    def intersect(self, other):
        da = self.dual_rows()
        db = other.dual_rows()
        dsum = Lattice.from_rational_rows(self.alg, da + db)
        return _dual_lattice(dsum)

    def index_in(self, other) -> Fraction:
        """[other : self] as a positive rational."""
        n = self.alg.dim
        det_self = Fraction(abs(det_int([list(r) for r in self.rows])), self.den**n)
        det_other = Fraction(abs(det_int([list(r) for r in other.rows])), other.den**n)
        return det_self / det_other

    def contains(self, other) -> bool:
        inv = self._inv_rows()
        n = self.alg.dim
        q = Fraction(self.den, other.den)
        for row in other.rows:
            for j in range(n):
                c = sum(row[t] * inv[t][j] for t in range(n)) * q
                if c.denominator != 1:
                    return False
        return True

    def coords_of(self, el):
        """Coordinates of a quaternion element in this lattice's basis (Fractions)."""
        inv = self._inv_rows()
        n = self.alg.dim
        co = [Fraction(x) for x in self.alg.coords(el)]
        return [sum(co[t] * inv[t][j] for t in range(n)) * self.den for j in range(n)]

    def contains_element(self, el) -> bool:
        return all(c.denominator == 1 for c in self.coords_of(el))

    # -- invariants ---------------------------------------------------------------
    def gram_int(self):
        """G[i][j] = trd(r_i conj r_j) (Tr_{F/Q} over F): ints; values/den^2 rational."""
        if self._gram is None:
            alg = self.alg
            els = [alg.element(tuple(Fraction(x) for x in row)) for row in self.rows]
            n = alg.dim
            g = [[0] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    v = Fraction(alg.trd_conj_pair(els[i], els[j]))
                    if v.denominator != 1:
                        raise ValueError("non-integral Gram entry")
                    g[i][j] = g[j][i] = int(v)
            self._gram = g
        return self._gram

    def gram2_int(self):
        """Secondary pairing over F (omega-component of trd(x conj y)); zero over Q."""
        if self._gram2 is None:
            alg = self.alg
            els = [alg.element(tuple(Fraction(x) for x in row)) for row in self.rows]
            n = alg.dim
            g = [[0] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    v = Fraction(alg.trd_conj_pair_omega(els[i], els[j]))
                    if v.denominator != 1:
                        raise ValueError("non-integral Gram entry")
                    g[i][j] = g[j][i] = int(v)
            self._gram2 = g
        return self._gram2

    def lll(self):
        if self._lll is None:
            self._lll = lll_gram(self.gram_int())
        return self._lll

    def nrd_rational(self) -> Fraction:
        """Over Q: the reduced norm of the lattice (gcd of element norms)."""
        if self._nrd is None:
            g = self.gram_int()
            n = self.alg.dim
            vals = [g[i][i] // 2 for i in range(n)]
            vals += [g[i][j] for i in range(n) for j in range(i + 1, n)]
            self._nrd = Fraction(_gcd_list(vals), self.den**2)
        return self._nrd

    def discrd_rational(self) -> Fraction:
        """Over Q: reduced discriminant sqrt|det trd(e_i conj e_j)| / den^4."""
        d = abs(det_int(self.gram_int()))
        r = isqrt_exact(d)
        if r is None:
            raise ValueError("discriminant determinant is not a perfect square")
        return Fraction(r, self.den ** self.alg.dim)

    # -- enumeration -----------------------------------------------------------------
    def _transform_vec(self, v, u):
        n = self.alg.dim
        coords = [0] * n
        for ci, urow in zip(v, u):
            if ci:
                for t in range(n):
                    if urow[t]:
                        row = self.rows[t]
                        for j in range(n):
                            coords[j] += ci * urow[t] * row[j]
        return self.alg.element(tuple(Fraction(c, self.den) for c in coords))

    def count_norm(self, target) -> int:
        t2 = 2 * Fraction(target) * self.den**2
        if t2.denominator != 1:
            return 0
        g, _ = self.lll()
        return qf_count(g, int(t2))

    def theta(self, scale, kmax: int):
        s2 = 2 * Fraction(scale) * self.den**2
        if s2.denominator != 1:
            raise ValueError("scale incompatible with denominator")
        g, _ = self.lll()
        return qf_theta(g, int(s2), kmax)

    def vectors_norm(self, target, limit: int = 0):
        t2 = 2 * Fraction(target) * self.den**2
        if t2.denominator != 1:
            return []
        g, u = self.lll()
        return [self._transform_vec(v, u) for v in qf_vectors(g, int(t2), limit)]

    def count_norm_f(self, target_pair) -> int:
        """Over F: #{x : nrd(x) = g0 + g1 omega} via the two-form kernel."""
        alg = self.alg
        tr = 2 * target_pair[0] + alg.field.min_s * target_pair[1]
        t2 = 2 * Fraction(tr) * self.den**2
        t2b = 2 * Fraction(target_pair[1]) * self.den**2
        if t2.denominator != 1 or t2b.denominator != 1:
            return 0
        g, u = self.lll()
        g2 = _apply_u(self.gram2_int(), u)
        return qf_count_two(g, int(t2), g2, int(t2b))

    def vectors_norm_f(self, target_pair, limit: int = 0):
        alg = self.alg
        tr = 2 * target_pair[0] + alg.field.min_s * target_pair[1]
        t2 = 2 * Fraction(tr) * self.den**2
        t2b = 2 * Fraction(target_pair[1]) * self.den**2
        if t2.denominator != 1 or t2b.denominator != 1:
            return []
        g, u = self.lll()
        g2 = _apply_u(self.gram2_int(), u)
        return [self._transform_vec(v, u) for v in qf_vectors_two(g, int(t2), g2, int(t2b), limit)]

    def min_norm(self) -> Fraction:
        g, _ = self.lll()
        return Fraction(qf_min_norm(g), 2 * self.den**2)

    # -- orders ------------------------------------------------------------------------
    def left_order(self):
        return self._order("left")

    def right_order(self):
        return self._order("right")

    def _order(self, side):
        """{x in B : x L <= L} (resp. L x <= L), as a lattice."""
        alg = self.alg
        n = alg.dim
        inv = self._inv_rows()
        std = []
        for t in range(n):
            c = [Fraction(0)] * n
            c[t] = Fraction(1)
            std.append(alg.element(tuple(c)))
        # constraint columns: coords (in L-basis) of e_t * b (or b * e_t)
        cols = []
        for b in self.basis_elements():
            prods = []
            for e in std:
                p = alg.mul(e, b) if side == "left" else alg.mul(b, e)
                prods.append([Fraction(x) for x in alg.coords(p)])
            for j in range(n):
                col = []
                for t in range(n):
                    col.append(sum(prods[t][s] * inv[s][j] for s in range(n)) * self.den)
                cols.append(col)
        colspan = Lattice.from_rational_rows(alg, cols)
        return _dual_lattice(colspan)


def _apply_u(gram, u):
    """U G U^T for integer U, G."""
    n = len(gram)
    m1 = [[sum(u[i][t] * gram[t][s] for t in range(n)) for s in range(n)] for i in range(n)]
    return [[sum(m1[i][s] * u[j][s] for s in range(n)) for j in range(n)] for i in range(n)]


def _dual_lattice(lat: Lattice) -> Lattice:
    """The lattice whose coordinate-dual is `lat`."""
    inv = lat._inv_rows()
    n = lat.alg.dim
    rows = [[inv[j][i] * lat.den for j in range(n)] for i in range(n)]
    return Lattice.from_rational_rows(lat.alg, rows)

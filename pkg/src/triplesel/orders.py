"""Oriented Eichler order class sets over Q and over F, and their maps.

Representation.  A class set is the set of right ideal classes of a fixed
*rooted* Eichler order R, which is the same finite set as the isomorphism
classes of oriented Eichler orders (narrow class number 1 on the F side):
the left order of an ideal carries the transported orientation, so
orientation bookkeeping rides along ideal arithmetic.  Concretely:

  * the root is R = cap_q (V0 cap g_q^{s_q} V0 g_q^{-s_q}) for a maximal V0
    and per-prime translation elements g_q (nrd g_q = q, geodesic on the
    local tree), so every window order and every level-changing map has an
    explicit ideal realization;
  * orientation switches are right multiplications by two-sided ideals: the
    Atkin-Lehner ideal (R cap l^s R'') + (l^s R' cap R) at level primes, the
    radical ideal at ramified primes;
  * degeneracy maps are [I] -> [I * g-word * R_target] into one canonical
    enumeration per target level, which makes the composition identities
    honestly testable.

Completeness of every enumeration is certified by the Eichler mass formula
(phi(D) psi(M) / 12 over Q, |zeta_F(-1)| Psi(M) / 2 over F), never by the
search heuristics.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .arith import factor, is_prime, is_squarefree, omega as omega_fn
from .gfq import GF
from .lattices import Lattice
from .linalg import hnf, det_int, lll_gram
from .quadfield import (
    IdealF,
    PrimeIdeal,
    RealQuadraticField,
    totally_positive_generator,
    primes_above,
)
from .quatalg import QuaternionAlgebraF, QuaternionAlgebraQQ, make_definite_algebra


class EnumerationError(RuntimeError):
    """Mass not certified within the search budget (never a silent short list)."""


# ---------------------------------------------------------------------------
# quotient algebras O/pO


class QuotientAlgebra:
    """O/pO as a 4-dimensional algebra over the residue field k.

    `modulus` is a prime p over Q or a PrimeIdeal over F.  Elements are
    4-tuples over k; `red_element` maps p-integral quaternions in, `lift`
    picks representatives inside O.
    """

    def __init__(self, order: Lattice, modulus):
        self.order = order
        self.modulus = modulus
        alg = order.alg
        self.n = n = alg.dim
        if n == 8:
            pid: PrimeIdeal = modulus
            self.pid = pid
            self.ell = pid.ell
        else:
            self.pid = None
            self.ell = modulus
        basis = order.basis_elements()
        self.basis = basis
        self.sc = []
        for bi in basis:
            row = []
            for bj in basis:
                co = order.coords_of(alg.mul(bi, bj))
                if any(c.denominator != 1 for c in co):
                    raise ValueError("not an order: non-integral structure constants")
                row.append([int(c) for c in co])
            self.sc.append(row)
        if n == 4:
            self.k = GF(self.ell)
            self._mode = "q"
        else:
            fld = alg.field
            self.field = fld
            ell = self.ell
            om = alg.scalar((Fraction(0), Fraction(1)))
            wcols = []
            for b in basis:
                co = order.coords_of(alg.mul(om, b))
                wcols.append([int(c) % ell for c in co])
            self.W = [[wcols[j][i] for j in range(8)] for i in range(8)]
            if self.pid.degree == 2:
                self.k = fld.residue_field_inert(ell)
                self._mode = "inert"
                self._build_inert()
            else:
                self.k = GF(ell)
                self._mode = "deg1"
                self.root = self.pid.root
                self._build_deg1()
        self._one = None
        self._sqrt_table = None

    # -- reduction setup ------------------------------------------------------
    def _build_inert(self):
        ell = self.ell
        kq = GF(ell)
        cols = []
        chosen = []
        for t in range(8):
            e = [0] * 8
            e[t] = 1
            we = [self.W[i][t] % ell for i in range(8)]
            trial = cols + [e, we]
            mat = [[(v % ell,) for v in vec] for vec in trial]
            _, piv = kq.rref(mat)
            if len(piv) == len(trial):
                cols += [e, we]
                chosen.append(t)
            if len(chosen) == 4:
                break
        if len(chosen) != 4:
            raise RuntimeError("failed to find a residue basis")
        self._lift_idx = chosen
        self._red_mat = [[cols[j][i] % ell for j in range(8)] for i in range(8)]
        self._red_matinv = _inv_mod_p(self._red_mat, ell)

    def _build_deg1(self):
        ell = self.ell
        c = self.root
        kq = GF(ell)
        wc_cols = []
        for t in range(8):
            col = [(self.W[i][t] - (c if i == t else 0)) % ell for i in range(8)]
            wc_cols.append(col)
        mat = [[(v,) for v in col] for col in wc_cols]
        red, piv = kq.rref(mat)
        ubasis = [[int(red[r][i][0]) for i in range(8)] for r in range(len(piv))]
        full = [list(u) for u in ubasis]
        chosen = []
        for t in range(8):
            e = [0] * 8
            e[t] = 1
            trial = full + [e]
            mm = [[(v,) for v in vec] for vec in trial]
            _, piv2 = kq.rref(mm)
            if len(piv2) == len(trial):
                full.append(e)
                chosen.append(t)
            if len(full) == 8:
                break
        if len(full) != 8:
            raise RuntimeError("failed to split off residue complement")
        self._lift_idx = chosen
        self._u_dim = len(ubasis)
        self._red_mat = [[full[j][i] % ell for j in range(8)] for i in range(8)]
        self._red_matinv = _inv_mod_p(self._red_mat, ell)

    # -- basic maps -------------------------------------------------------------
    def red_coords(self, order_coords):
        ell = self.ell
        if self._mode == "q":
            return tuple(self.k.el(c) for c in order_coords)
        x = [c % ell for c in order_coords]
        sol = [sum(self._red_matinv[i][j] * x[j] for j in range(8)) % ell for i in range(8)]
        if self._mode == "inert":
            return tuple(self.k.el(sol[2 * t], sol[2 * t + 1]) for t in range(4))
        u = self._u_dim
        return tuple(self.k.el(sol[u + t]) for t in range(4))

    def red_element(self, el):
        co = self.order.coords_of(el)
        den = 1
        for c in co:
            den = den * c.denominator // math.gcd(den, c.denominator)
        if math.gcd(den, self.ell) != 1:
            raise ValueError("element not integral at the modulus")
        inv = pow(den, -1, self.ell)
        return self.red_coords([int(c * den) * inv % self.ell for c in co])

    def _kvec_order_coords(self, kvec):
        ell = self.ell
        n = self.n
        out = [0] * n
        if self._mode == "q":
            for t in range(4):
                out[t] = int(kvec[t][0]) % ell
            return out
        for cpair, t in zip(kvec, self._lift_idx):
            if self._mode == "inert":
                c0, c1 = int(cpair[0]), int(cpair[1])
                out[t] = (out[t] + c0) % ell
                if c1:
                    for i in range(n):
                        out[i] = (out[i] + c1 * self.W[i][t]) % ell
            else:
                out[t] = (out[t] + int(cpair[0])) % ell
        return out

    def lift(self, kvec):
        alg = self.order.alg
        oc = self._kvec_order_coords(kvec)
        out = None
        for c, b in zip(oc, self.basis):
            if c:
                term = alg.scal(Fraction(c), b)
                out = term if out is None else _el_add(alg, out, term)
        if out is None:
            out = alg.scal(Fraction(0), self.basis[0])
        return out

    def one_kvec(self):
        if self._one is None:
            self._one = self.red_element(self.order.alg.one())
        return self._one

    def mul(self, x, y):
        xl = self._kvec_order_coords(x)
        yl = self._kvec_order_coords(y)
        n = self.n
        acc = [0] * n
        for i in range(n):
            if xl[i]:
                sci = self.sc[i]
                xi = xl[i]
                for j in range(n):
                    if yl[j]:
                        cij = sci[j]
                        f = xi * yl[j]
                        for t in range(n):
                            acc[t] += f * cij[t]
        return self.red_coords([a % self.ell for a in acc])

    def _red_scalar(self, t):
        ell = self.ell
        if self._mode == "q":
            f = Fraction(t)
            return self.k.el(f.numerator * pow(f.denominator, -1, ell))
        a, b = Fraction(t[0]), Fraction(t[1])
        ai = a.numerator * pow(a.denominator, -1, ell)
        bi = b.numerator * pow(b.denominator, -1, ell)
        if self._mode == "inert":
            return self.k.el(ai, bi)
        return self.k.el(ai + bi * self.root)

    def trd_k(self, x):
        return self._red_scalar(self.order.alg.trd(self.lift(x)))

    def nrd_k(self, x):
        return self._red_scalar(self.order.alg.nrd(self.lift(x)))

    def trd_pair(self, x, y):
        return self._red_scalar(self.order.alg.trd(self.order.alg.mul(self.lift(x), self.lift(y))))

    # -- structure -----------------------------------------------------------------
    def radical_kvecs(self):
        """Basis of the radical.

        Odd characteristic: kernel of the reduced-trace pairing trd(xy),
        which is nondegenerate on every semisimple quotient arising here.
        Characteristic 2 kills trd on scalar factors, so there the radical
        is found by brute force over the (at most 256) elements.
        """
        if self.k.p == 2:
            return self._radical_brute()
        els = [_unit_kvec(self.k, t) for t in range(4)]
        T = [[self.trd_pair(els[i], els[j]) for j in range(4)] for i in range(4)]
        return self.k.kernel(T)

    def _radical_brute(self):
        from itertools import product

        k = self.k
        elems = [tuple(v) for v in product(list(k.elements()), repeat=4)]

        def nilpotent(z):
            z2 = self.mul(z, z)
            z4 = self.mul(z2, z2)
            return all(c == k.zero for c in z4)

        rad = []
        for x in elems:
            if all(c == k.zero for c in x):
                continue
            if all(nilpotent(self.mul(x, y)) for y in elems):
                rad.append(list(x))
        if not rad:
            return []
        red, piv = k.rref(rad)
        return [red[i] for i in range(len(piv))]

    def radical_lattice(self):
        lifts = [self.lift(v) for v in self.radical_kvecs()]
        return _span_with(self.order, lifts, self.modulus, side="both")

    def sqrt_k(self, a):
        """A square root in k, or None.  Table built on first use (k is small)."""
        if self._sqrt_table is None:
            self._sqrt_table = {}
            for x in self.k.elements():
                self._sqrt_table.setdefault(self.k.mul(x, x), x)
        return self._sqrt_table.get(a)


def _unit_kvec(k, t):
    return tuple(k.one if i == t else k.zero for i in range(4))


def _el_add(alg, x, y):
    if alg.dim == 4:
        return tuple(a + b for a, b in zip(x, y))
    return tuple(alg.field.add(a, b) for a, b in zip(x, y))


def _span_with(order: Lattice, extra_elements, modulus, side="right"):
    """modulus*order + the right (or two-sided) O-module spanned by the extras."""
    alg = order.alg
    gens = []
    basis = order.basis_elements()
    for e in extra_elements:
        if side in ("right", "both"):
            gens += [alg.mul(e, b) for b in basis]
        if side in ("left", "both"):
            gens += [alg.mul(b, e) for b in basis]
        if side == "both":
            gens += [alg.mul(alg.mul(b, e), b2) for b in basis for b2 in basis]
        if side is None:
            gens.append(e)
    if alg.dim == 8:
        om = alg.scalar((Fraction(0), Fraction(1)))
        gens += [alg.mul(om, e) for e in list(gens)]
        base = _ideal_times_lattice(modulus, order)
    else:
        base = order.scale(modulus)
    if not gens:
        return base
    rows = [[Fraction(x, base.den) for x in r] for r in base.rows]
    rows += [[Fraction(c) for c in alg.coords(e)] for e in gens]
    return Lattice.from_rational_rows(alg, rows)


def _ideal_times_lattice(pid: PrimeIdeal, lat: Lattice) -> Lattice:
    if pid.root is None:
        return lat.scale(pid.ell)
    alg = lat.alg
    om_c = alg.scalar((Fraction(-pid.root), Fraction(1)))
    om = alg.scalar((Fraction(0), Fraction(1)))
    gens = []
    for b in lat.basis_elements():
        gens.append(alg.scal(Fraction(pid.ell), b))
        gens.append(alg.mul(om_c, b))
    gens += [alg.mul(om, g) for g in gens]
    return Lattice.from_elements(alg, gens)


def _inv_mod_p(mat, p):
    n = len(mat)
    aug = [[mat[i][j] % p for j in range(n)] + [1 if i == j else 0 for j in range(n)] for i in range(n)]
    for c in range(n):
        pr = next((i for i in range(c, n) if aug[i][c] % p), None)
        if pr is None:
            raise ValueError("matrix not invertible mod p")
        aug[c], aug[pr] = aug[pr], aug[c]
        inv = pow(aug[c][c], -1, p)
        aug[c] = [x * inv % p for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [(x - f * y) % p for x, y in zip(aug[i], aug[c])]
    return [[aug[i][n + j] for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# idempotents, split structure, Eichler steps, neighbors


def _find_split_element(qa: QuotientAlgebra):
    """A rank-one idempotent of O/pO = M_2(k), deterministically."""
    k = qa.k
    one = qa.one_kvec()
    basis = [_unit_kvec(k, t) for t in range(4)]
    lam_list = list(k.elements())

    def try_element(x):
        tr = qa.trd_k(x)
        nr = qa.nrd_k(x)
        if k.p == 2:
            # roots of t^2 + tr*t + nr by scanning (k is tiny in char 2)
            roots = [r for r in k.elements() if k.add(k.mul(r, r), k.add(k.mul(tr, r), nr)) == k.zero]
            roots = sorted(set(roots))
            if len(roots) != 2:
                return None
            r1, r2 = roots
        else:
            disc = k.sub(k.mul(tr, tr), k.scal(4, nr))
            if disc == k.zero:
                return None
            s = qa.sqrt_k(disc)
            if s is None:
                return None
            half = k.inv(k.el(2))
            r1 = k.mul(half, k.add(tr, s))
            r2 = k.mul(half, k.sub(tr, s))
            r1, r2 = sorted((r1, r2))
        dinv = k.inv(k.sub(r1, r2))
        e = tuple(k.mul(dinv, k.sub(c, k.mul(r2, o))) for c, o in zip(x, one))
        if qa.mul(e, e) == e and e != one and any(c != k.zero for c in e):
            return e
        return None

    for t in range(4):
        e = try_element(basis[t])
        if e is not None:
            return e
    for t1 in range(4):
        for t2 in range(t1 + 1, 4):
            for lam in lam_list[: min(len(lam_list), 12)]:
                x = tuple(k.add(a, k.mul(lam, b)) for a, b in zip(basis[t1], basis[t2]))
                e = try_element(x)
                if e is not None:
                    return e
    for t1 in range(4):
        for t2 in range(4):
            if t1 == t2:
                continue
            for lam in lam_list:
                x = tuple(k.add(a, k.mul(lam, b)) for a, b in zip(basis[t1], basis[t2]))
                e = try_element(x)
                if e is not None:
                    return e
    raise RuntimeError("no split element found (algebra not M_2 at this prime?)")


def split_matrix_units(qa: QuotientAlgebra):
    """Matrix units (E11, E12, E21, E22) of O/pO = M_2(k), deterministic."""
    k = qa.k
    one = qa.one_kvec()
    e = _find_split_element(qa)
    f = tuple(k.sub(o, c) for o, c in zip(one, e))
    basis = [_unit_kvec(k, t) for t in range(4)]
    e12 = None
    for t in range(4):
        cand = qa.mul(qa.mul(e, basis[t]), f)
        if any(c != k.zero for c in cand):
            e12 = cand
            break
    if e12 is None:
        raise RuntimeError("matrix unit e12 not found")
    e21 = None
    for t in range(4):
        cand = qa.mul(qa.mul(f, basis[t]), e)
        if not any(c != k.zero for c in cand):
            continue
        prod = qa.mul(e12, cand)
        lam = None
        ok = True
        for i in range(4):
            if e[i] != k.zero:
                if prod[i] == k.zero:
                    ok = False
                    break
                cand_lam = k.mul(e[i], k.inv(prod[i]))
                if lam is None:
                    lam = cand_lam
                elif lam != cand_lam:
                    ok = False
                    break
            elif prod[i] != k.zero:
                ok = False
                break
        if ok and lam is not None:
            e21 = tuple(k.mul(lam, c) for c in cand)
            if qa.mul(e12, e21) == e:
                break
            e21 = None
    if e21 is None:
        raise RuntimeError("matrix unit e21 not found")
    e11 = e
    e22 = qa.mul(e21, e12)
    if qa.mul(e22, e22) != e22 or _el_eq(e22, e11):
        raise RuntimeError("matrix units inconsistent")
    return e11, e12, e21, e22


def _el_eq(a, b):
    return a == b


def _semisimple_quotient_idempotents(qa: QuotientAlgebra, rad):
    """Orthogonal idempotent lifts (e1, e2) for A/J = k x k (Borel reduction).

    Deterministic: eigenvalue roots ordered; raises ValueError if A/J is a
    field (ramified maximal case).
    """
    k = qa.k
    one = qa.one_kvec()
    span = [list(one)] + [list(v) for v in rad]
    x = None
    for t in range(4):
        cand = _unit_kvec(k, t)
        rows = span + [list(cand)]
        _, piv = k.rref(rows)
        if len(piv) == len(rows):
            x = cand
            break
    if x is None:
        raise RuntimeError("quotient generator not found")
    x2 = qa.mul(x, x)
    cols = [list(x), list(one)] + [list(v) for v in rad]
    mat = [[cols[j][i] for j in range(len(cols))] for i in range(4)]
    sol = k.solve(mat, list(x2))
    if sol is None:
        raise RuntimeError("quotient not quadratic")
    b, c = sol[0], sol[1]
    roots = sorted({r for r in k.elements() if k.sub(k.mul(r, r), k.add(k.mul(b, r), c)) == k.zero})
    if len(roots) != 2:
        raise ValueError("semisimple quotient is a field at this prime")
    r1, r2 = roots
    dinv = k.inv(k.sub(r1, r2))
    e = tuple(k.mul(dinv, k.sub(xx, k.mul(r2, oo))) for xx, oo in zip(x, one))
    e1 = _lift_idempotent(qa, e)
    e2 = tuple(k.sub(o, a) for o, a in zip(one, e1))
    return e1, e2


def _lift_idempotent(qa: QuotientAlgebra, e):
    k = qa.k
    for _ in range(8):
        if qa.mul(e, e) == e:
            return e
        if k.p == 2:
            e = qa.mul(e, e)
        else:
            e2 = qa.mul(e, e)
            e3 = qa.mul(e2, e)
            e = tuple(k.sub(k.scal(3, a), k.scal(2, b)) for a, b in zip(e2, e3))
    raise RuntimeError("idempotent lifting failed")


def _inverse_modulus_scaler(alg, modulus):
    if alg.dim == 4:
        return lambda lat: lat.scale(Fraction(1, modulus))
    fld = alg.field
    gen = totally_positive_generator(fld, IdealF(fld, ((modulus, 1),)))
    inv = fld.inv(gen)
    return lambda lat: lat.mul_element(alg.scalar(inv), side="left")


def eichler_up_pair(order: Lattice, modulus):
    """The two index-N(p) overorders lowering the level at the modulus.

    Returns (A, B) in a deterministic order pinned by the idempotent roots.
    """
    qa = QuotientAlgebra(order, modulus)
    rad = qa.radical_kvecs()
    if len(rad) != 2:
        raise ValueError("reduction is not Borel-type at this modulus")
    e1, e2 = _semisimple_quotient_idempotents(qa, rad)
    jl = qa.radical_lattice()
    alg = order.alg
    e1l, e2l = qa.lift(e1), qa.lift(e2)
    down = _inverse_modulus_scaler(alg, modulus)
    nrm = modulus if isinstance(modulus, int) else modulus.norm
    out = []
    for a, b in ((e2l, e1l), (e1l, e2l)):
        prods = [alg.mul(alg.mul(a, j), b) for j in jl.basis_elements()]
        if alg.dim == 8:
            om = alg.scalar((Fraction(0), Fraction(1)))
            prods += [alg.mul(om, p) for p in prods]
        cand = order.add(down(Lattice.from_elements(alg, prods)))
        if order.index_in(cand) != nrm:
            raise RuntimeError("Eichler overorder has wrong index")
        out.append(cand)
    return out[0], out[1]


def neighbor_ideals(order: Lattice, modulus):
    """The N(p)+1 right ideals of reduced norm p (O/pO = M_2 required)."""
    qa = QuotientAlgebra(order, modulus)
    e11, e12, e21, e22 = split_matrix_units(qa)
    k = qa.k
    out = []
    lines = [(k.one, u) for u in sorted(k.elements())] + [(k.zero, k.one)]
    for w0, w1 in lines:
        m1 = tuple(k.add(k.mul(w0, a), k.mul(w1, b)) for a, b in zip(e11, e21))
        m2 = tuple(k.add(k.mul(w0, a), k.mul(w1, b)) for a, b in zip(e12, e22))
        out.append(_span_with(order, [qa.lift(m1), qa.lift(m2)], modulus))
    if len({lat.key() for lat in out}) != len(out):
        raise RuntimeError("neighbor ideals collided")
    return out


# ---------------------------------------------------------------------------
# maximal orders


def maximal_order_q(alg: QuaternionAlgebraQQ) -> Lattice:
    one = (Fraction(1), Fraction(0), Fraction(0), Fraction(0))
    i = (Fraction(0), Fraction(1), Fraction(0), Fraction(0))
    j = (Fraction(0), Fraction(0), Fraction(1), Fraction(0))
    kk = (Fraction(0), Fraction(0), Fraction(0), Fraction(1))
    order = Lattice.from_elements(alg, [one, i, j, kk])
    while True:
        disc = order.discrd_rational()
        assert disc.denominator == 1
        disc = int(disc)
        if disc == alg.D:
            return order
        if disc % alg.D:
            raise RuntimeError("lost a ramified prime while saturating")
        p = factor(disc // alg.D).factors[0][0]
        order = _saturate_at(order, p)


def _saturate_at(order: Lattice, modulus) -> Lattice:
    qa = QuotientAlgebra(order, modulus)
    jl = qa.radical_lattice()
    for side in ("right", "left"):
        bigger = jl.right_order() if side == "right" else jl.left_order()
        if order.index_in(bigger) > 1:
            return bigger
    a, _ = eichler_up_pair(order, modulus)
    return a


def maximal_order_f(algF: QuaternionAlgebraF) -> Lattice:
    fld = algF.field
    base = maximal_order_q(QuaternionAlgebraQQ(algF.a, algF.b))
    om = algF.scalar((Fraction(0), Fraction(1)))
    gens = []
    for b in base.basis_elements():
        e = algF.embed_rational(b)
        gens.append(e)
        gens.append(algF.mul(om, e))
    order = Lattice.from_elements(algF, gens)
    while True:
        dn = discrd_norm_f(order)
        if dn == 1:
            return order
        p = factor(dn).factors[0][0]
        moved = False
        for pid in primes_above(fld, p):
            try:
                qa = QuotientAlgebra(order, pid)
                rad = qa.radical_kvecs()
                if not rad:
                    continue
                jl = qa.radical_lattice()
                for side in ("right", "left"):
                    bigger = jl.right_order() if side == "right" else jl.left_order()
                    if order.index_in(bigger) > 1:
                        order = bigger
                        moved = True
                        break
                if moved:
                    break
                a, _ = eichler_up_pair(order, pid)
                order = a
                moved = True
                break
            except ValueError:
                continue
        if not moved:
            raise RuntimeError(f"saturation stalled at discriminant norm {dn}")


def discrd_norm_f(order: Lattice) -> int:
    """Absolute norm of the reduced discriminant of an O_F-order."""
    from .arith import isqrt_exact

    d = abs(det_int(order.gram_int()))
    dq = Fraction(d, order.den**16)
    rel = dq / Fraction(order.alg.field.disc) ** 4
    if rel.denominator != 1:
        raise ValueError("unexpected discriminant shape")
    r = isqrt_exact(int(rel))
    if r is None:
        raise ValueError("discriminant norm not a square")
    return r


def level_at_prime_f(order: Lattice, pid: PrimeIdeal, maxsteps: int = 12) -> int:
    """v_pid of the level of an Eichler O_F-order (by counting up-steps)."""
    cur = order
    steps = 0
    while steps < maxsteps:
        try:
            a, _ = eichler_up_pair(cur, pid)
        except ValueError:
            return steps
        cur = a
        steps += 1
    raise RuntimeError("level detection did not terminate")


# ---------------------------------------------------------------------------
# translations and gluing


def inverse_element(alg, g):
    n = alg.nrd(g)
    gbar = alg.conj(g)
    if alg.dim == 4:
        return alg.scal(Fraction(1) / Fraction(n), gbar)
    return alg.scal_f(alg.field.inv(n), gbar)


def conjugate_lattice(lat: Lattice, g, ginv) -> Lattice:
    return lat.mul_element(g, side="left").mul_element(ginv, side="right")


class Chain:
    """Geodesic chain V_0, .., V_s of maximal orders at one prime of the level,
    with connector ideals P_j (left order V_j, right order V_0, local at the
    prime, reduced norm = prime^j)."""

    __slots__ = ("modulus", "orders", "connectors")

    def __init__(self, modulus, orders, connectors):
        self.modulus = modulus
        self.orders = orders
        self.connectors = connectors

    @property
    def length(self):
        return len(self.orders) - 1


def build_chain(v0: Lattice, modulus, steps: int) -> Chain:
    """Walk `steps` neighbor steps away from v0 (geodesic certified by index)."""
    nrm = modulus if isinstance(modulus, int) else modulus.norm
    orders = [v0]
    connectors = [None]
    cur_conn = None
    for j in range(steps):
        cur = orders[-1]
        found = False
        for N in neighbor_ideals(cur, modulus):
            vp = N.left_order()
            if v0.intersect(vp).index_in(v0) == nrm ** (j + 1):
                conn = N if cur_conn is None else N.mul(cur_conn)
                orders.append(vp)
                connectors.append(conn)
                cur_conn = conn
                found = True
                break
        if not found:
            raise EnumerationError("chain step found no forward neighbor")
    return Chain(modulus, orders, connectors)


def glue_lattices(x: Lattice, z: Lattice, primes_x) -> Lattice:
    """The lattice equal to x locally at primes_x and to z at all other primes.

    primes_x: rational primes over Q; PrimeIdeals over F (split primes above
    the same rational prime are separated by central element scalings).
    """
    alg = x.alg
    meet = x.intersect(z)
    ix = int(meet.index_in(x) * meet.index_in(z))
    kexp = max(ix.bit_length(), 4)
    if alg.dim == 4:
        m1 = 1
        t = ix
        for p in primes_x:
            e = 0
            while t % p == 0:
                t //= p
                e += 1
            m1 *= p ** (e + 1)
        m2 = max(t, 1)
        a = x.add(z.scale(m1))
        b = z.add(x.scale(m2))
        return a.intersect(b)
    fld = alg.field
    pids_x = list(primes_x)
    m1 = (1, 0)
    for pid in pids_x:
        g = totally_positive_generator(fld, IdealF(fld, ((pid, 1),)))
        for _ in range(kexp):
            m1 = fld.mul(m1, g)
    # other difference places: all primes above rational divisors of ix, minus pids_x
    others = []
    for p, _ in factor(max(ix, 1)).factors:
        for pid in primes_above(fld, p):
            if not any(pid == px for px in pids_x):
                others.append(pid)
    m2 = (1, 0)
    for pid in others:
        g = totally_positive_generator(fld, IdealF(fld, ((pid, 1),)))
        for _ in range(kexp):
            m2 = fld.mul(m2, g)
    e1 = alg.scalar((Fraction(m1[0]), Fraction(m1[1])))
    e2 = alg.scalar((Fraction(m2[0]), Fraction(m2[1])))
    a = x.add(z.mul_element(e1, side="left"))
    b = z.add(x.mul_element(e2, side="left"))
    return a.intersect(b)


# ---------------------------------------------------------------------------
# class set containers


_SIG_DEPTH = 6


class ClassRecord:
    __slots__ = ("ideal", "order", "weight", "sig", "nrd")

    def __init__(self, ideal, order, weight, sig, nrd):
        self.ideal = ideal
        self.order = order
        self.weight = weight
        self.sig = sig
        self.nrd = nrd


class _ClassSetBase:
    def __init__(self, classes, mass):
        self.classes = classes
        self.mass = mass
        self._sig_index = {}
        for idx, c in enumerate(classes):
            self._sig_index.setdefault(c.sig, []).append(idx)

    def __len__(self):
        return len(self.classes)

    def weights(self):
        return [c.weight for c in self.classes]

    def identify(self, ideal: Lattice) -> int:
        ideal = self._reduce(ideal)
        sig = self._signature(ideal)
        cands = self._sig_index.get(sig)
        if not cands:
            raise EnumerationError("no class matches the ideal signature")
        if len(cands) == 1:
            return cands[0]
        for idx in cands:
            if self._isomorphic(ideal, self.classes[idx]):
                return idx
        raise EnumerationError("signature bucket exhausted without a match")


def _primitive(lat: Lattice) -> Lattice:
    g = 0
    for r in lat.rows:
        for x in r:
            g = math.gcd(g, abs(x))
    if g > 1:
        return Lattice(lat.alg, [[x // g for x in r] for r in lat.rows], lat.den)
    return lat


def _shortest_element(lat: Lattice):
    from .kernels import qf_min_norm, qf_vectors

    g, u = lat.lll()
    t2 = qf_min_norm(g)
    vec = qf_vectors(g, t2, 1)[0]
    return lat._transform_vec(vec, u)


def reduce_ideal(lat: Lattice) -> Lattice:
    x = _shortest_element(lat)
    xbar = lat.alg.conj(x)
    return _primitive(lat.mul_element(xbar, side="left"))


# ---------------------------------------------------------------------------
# class sets over Q


def mass_T(D: int, M: int) -> Fraction:
    phi = 1
    for p, _ in factor(D).factors:
        phi *= p - 1
    psi = 1
    for p, e in factor(M).factors:
        psi *= p ** (e - 1) * (p + 1)
    return Fraction(phi * psi, 12)


class ClassSetT(_ClassSetBase):
    """T_{M,D}: right ideal classes of the rooted oriented Eichler order."""

    def __init__(self, D, M, alg, v0, chains, root, classes, mass):
        super().__init__(classes, mass)
        self.D = D
        self.M = M
        self.alg = alg
        self.v0 = v0
        self.chains = chains  # {q: Chain}
        self.root = root
        self.root_prime = v0
        self._op_cache = {}
        self._far = None

    def _reduce(self, ideal):
        return reduce_ideal(ideal)

    def _signature(self, ideal):
        nr = ideal.nrd_rational()
        return tuple(ideal.theta(nr, _SIG_DEPTH))

    def _isomorphic(self, ideal, rec: ClassRecord) -> bool:
        nr = ideal.nrd_rational()
        pair = ideal.mul(rec.ideal.conjugate())
        return pair.count_norm(nr * rec.nrd) > 0

    # orientation switches -------------------------------------------------------
    def far_maximal(self) -> Lattice:
        if self._far is None:
            out = self.v0
            for q, chain in sorted(self.chains.items()):
                out = glue_lattices(chain.orders[-1], out, [q])
            self._far = out
        return self._far

    def op_ideal(self, ell: int) -> Lattice:
        if ell in self._op_cache:
            return self._op_cache[ell]
        if self.M % ell == 0:
            lsp = ell ** _val(self.M, ell)
            w = self.root.intersect(self.far_maximal().scale(lsp)).add(self.root_prime.scale(lsp).intersect(self.root))
        elif self.D % ell == 0:
            w = QuotientAlgebra(self.root, ell).radical_lattice()
        else:
            raise ValueError(f"{ell} does not divide D*M = {self.D * self.M}")
        self._op_cache[ell] = w
        return w

    def op_map(self, ell: int):
        w = self.op_ideal(ell)
        perm = [self.identify(rec.ideal.mul(w)) for rec in self.classes]
        if sorted(perm) != list(range(len(self.classes))):
            raise EnumerationError("op did not permute the classes")
        return perm

    # degeneracy ------------------------------------------------------------------
    def window_order(self, d: int, dp: int) -> tuple[Lattice, Lattice]:
        """(R1, R1') of the degeneracy recipe applied to the root representative."""
        r1 = None
        r1p = None
        for q, chain in sorted(self.chains.items()):
            s = chain.length
            e = _val(d, q)
            ep = _val(dp, q)
            if e > s or ep > e:
                raise ValueError("degeneracy parameters out of range")
            va = chain.orders[ep]
            vb = chain.orders[ep + s - e]
            piece = va.intersect(vb)
            r1 = piece if r1 is None else r1.intersect(piece)
            r1p = va if r1p is None else glue_lattices(va, r1p, [q])
        if r1 is None:
            r1, r1p = self.v0, self.v0
        return r1, r1p

    def degeneracy_target(self, d: int, budget: int = 400000) -> "ClassSetT":
        """Canonical enumeration of T_{M/d, D}, rooted at the toward windows.

        Only full or trivial strips per prime are supported as maps (that is
        v_q(d) in {0, v_q(M)}), which covers every use in the pipeline since
        the level factors as N+ * M with coprime parts.
        """
        m2 = self.M
        chains2 = {}
        for q, chain in self.chains.items():
            e = _val(d, q)
            if e not in (0, chain.length):
                raise ValueError("only full-or-trivial strips are supported as class maps")
            m2 //= q**e
            if e == 0:
                chains2[q] = chain
        root = self.v0
        for q, chain in sorted(chains2.items()):
            root = root.intersect(self.v0.intersect(chain.orders[-1]))
        if int(root.discrd_rational()) != self.D * m2:
            raise RuntimeError("degeneracy target root has wrong level")
        mass = mass_T(self.D, m2)
        classes = _enumerate_classes(
            root,
            self.D * m2,
            mass,
            budget,
            signature=lambda ideal: tuple(ideal.theta(ideal.nrd_rational(), _SIG_DEPTH)),
            unit_count=lambda order: order.count_norm(1),
        )
        return ClassSetT(self.D, m2, self.alg, self.v0, chains2, root, classes, mass)

    def shift_connector(self, d: int, dp: int, target: "ClassSetT") -> Lattice:
        """Right ideal X of the target root with [I] -> [I * X] = delta^{(d,dp)}."""
        x = target.root
        for q, chain in sorted(self.chains.items()):
            e = _val(d, q)
            ep = _val(dp, q)
            if e == 0:
                if ep:
                    raise ValueError("dp must divide d")
                continue
            if e != chain.length:
                raise ValueError("only full-or-trivial strips are supported as class maps")
            if ep == 0:
                continue
            piece = chain.connectors[ep].mul(target.root)
            x = glue_lattices(piece, x, [q])
        return x

    def degeneracy_map(self, d: int, dp: int, target: "ClassSetT"):
        """delta^{(d,dp)}: class indices of self -> class indices of target."""
        x = self.shift_connector(d, dp, target)
        return [target.identify(rec.ideal.mul(x)) for rec in self.classes]


def _val(n: int, q: int) -> int:
    e = 0
    while n % q == 0:
        n //= q
        e += 1
    return e


def build_class_set_T(D: int, M: int, neighbor_budget: int = 400000) -> ClassSetT:
    if D < 1 or not is_squarefree(D) or omega_fn(D) % 2 == 0:
        raise ValueError("D must be squarefree with an odd number of prime factors")
    if M < 1 or math.gcd(D, M) != 1:
        raise ValueError("M must be positive and coprime to D")
    alg = make_definite_algebra(D)
    v0 = maximal_order_q(alg)
    chains = {q: build_chain(v0, q, s) for q, s in factor(M).factors}
    root = v0
    for q, chain in sorted(chains.items()):
        root = root.intersect(v0.intersect(chain.orders[-1]))
    if int(root.discrd_rational()) != D * M:
        raise RuntimeError("level construction failed")
    mass = mass_T(D, M)
    classes = _enumerate_classes(
        root,
        D * M,
        mass,
        neighbor_budget,
        signature=lambda ideal: tuple(ideal.theta(ideal.nrd_rational(), _SIG_DEPTH)),
        unit_count=lambda order: order.count_norm(1),
    )
    return ClassSetT(D, M, alg, v0, chains, root, classes, mass)


def _aux_prime(n: int, skip: int = 0) -> int:
    q = 2
    while True:
        if n % q and skip == 0:
            return q
        if n % q:
            skip -= 1
        q = _next_prime(q)


def _next_prime(q: int) -> int:
    q += 1
    while not is_prime(q):
        q += 1
    return q


def _enumerate_classes(root, level_key, mass, budget, signature, unit_count, neighbor_moduli=None):
    """BFS over right ideal classes; the Eichler mass identity certifies
    completeness, any shortfall raises EnumerationError."""
    alg = root.alg
    if neighbor_moduli is None:
        if alg.dim == 4:
            q = 2
            while level_key % q == 0:
                q = _next_prime(q)
            moduli = [q]
        else:
            raise ValueError("F-side enumeration needs explicit neighbor moduli")
    else:
        moduli = list(neighbor_moduli)

    def weight_of(order):
        cnt = unit_count(order)
        if cnt % 2:
            raise RuntimeError("odd unit count")
        return cnt // 2

    def make_record(ideal):
        ideal = reduce_ideal(ideal)
        order = ideal.left_order()
        return ClassRecord(ideal, order, weight_of(order), signature(ideal), ideal.nrd_rational())

    first = make_record(_primitive(root))
    classes = [first]
    sig_index = {first.sig: [0]}
    total = Fraction(1, first.weight)
    queue = [0]
    spent = 0
    nbr_cache = {}
    while total != mass:
        if not queue:
            raise EnumerationError(f"neighbor graph exhausted at mass {total} of {mass}")
        idx = queue.pop(0)
        for modulus in moduli:
            order = classes[idx].order
            ck = (order.key(), str(modulus))
            nbrs = nbr_cache.get(ck)
            if nbrs is None:
                nbrs = neighbor_ideals(order, modulus)
                nbr_cache[ck] = nbrs
            for K in nbrs:
                spent += 1
                if spent > budget:
                    raise EnumerationError("neighbor budget exhausted before mass was certified")
                J = reduce_ideal(K.mul(classes[idx].ideal))
                sig = signature(J)
                hit = False
                for cidx in sig_index.get(sig, []):
                    other = classes[cidx]
                    if alg.dim == 4:
                        pair = J.mul(other.ideal.conjugate())
                        if pair.count_norm(J.nrd_rational() * other.nrd) > 0:
                            hit = True
                            break
                    else:
                        if _isomorphic_f(J, other):
                            hit = True
                            break
                if hit:
                    continue
                order_j = J.left_order()
                rec = ClassRecord(J, order_j, weight_of(order_j), sig, J.nrd_rational())
                classes.append(rec)
                sig_index.setdefault(sig, []).append(len(classes) - 1)
                total += Fraction(1, rec.weight)
                queue.append(len(classes) - 1)
                if total == mass:
                    break
            if total == mass:
                break
    return classes


# ---------------------------------------------------------------------------
# O_F ideals of the base field attached to quaternionic lattices


def nrd_ideal_f(lat: Lattice):
    """The reduced norm ideal of an O_F-lattice: (2x2 HNF rows over Z in the
    (1, omega) basis, rational scale).  Values nrd(x), x in lat, generate
    scale * (ideal lattice)."""
    alg = lat.alg
    fld = alg.field
    els = [alg.element(tuple(Fraction(x) for x in row)) for row in lat.rows]
    gens = []
    n = len(els)
    for i in range(n):
        v = alg.nrd(els[i])
        gens.append((v[0], v[1]))
        for j in range(i + 1, n):
            t = alg._trd_conj_f(els[i], els[j])
            gens.append((t[0], t[1]))
    rows = []
    s, c = fld.min_s, fld.min_c
    for a, b in gens:
        fa, fb = Fraction(a), Fraction(b)
        if fa == 0 and fb == 0:
            continue
        rows.append((fa, fb))
        # omega * (a + b w) = b*c + (a + b*s) w
        rows.append((fb * c, fa + fb * s))
    den = 1
    for r in rows:
        for x in r:
            den = den * x.denominator // math.gcd(den, x.denominator)
    irows = hnf([[int(x * den) for x in r] for r in rows])
    if len(irows) != 2:
        raise ValueError("norm ideal is not full rank")
    content = 0
    for r in irows:
        for x in r:
            content = math.gcd(content, abs(x))
    if content > 1:
        irows = [[x // content for x in r] for r in irows]
    return irows, Fraction(content, den * lat.den**2)


def ideal_lat_generator(fld: RealQuadraticField, rows):
    """Totally positive generator of the ideal spanned by 2x2 integer rows."""
    nrm = abs(det_int([list(r) for r in rows]))
    s, c = fld.min_s, fld.min_c
    emb = [[2, s], [s, s * s + 2 * c]]
    gram0 = [[sum(rows[i][a] * emb[a][b] * rows[j][b] for a in range(2) for b in range(2)) for j in range(2)] for i in range(2)]
    gram, u = lll_gram(gram0)
    rr = [
        [u[i][0] * rows[0][t] + u[i][1] * rows[1][t] for t in range(2)]
        for i in range(2)
    ]
    from .kernels import qf_vectors
    from .quadfield import _make_totally_positive

    # a generator g has sigma1(g)^2 + sigma2(g)^2 >= 2 nrm, and a unit-reduced
    # one satisfies Q_emb <= ~sqrt(disc) * nrm; scan shells up to a safe bound
    top = 2 * nrm * (math.isqrt(4 * fld.disc) + 3)
    t2 = 2 * nrm
    while t2 <= top:
        for vec in qf_vectors(gram, t2):
            x = rr[0][0] * vec[0] + rr[1][0] * vec[1]
            y = rr[0][1] * vec[0] + rr[1][1] * vec[1]
            if abs(fld.norm((x, y))) == nrm:
                return _make_totally_positive(fld, (x, y))
        t2 += 1
    raise RuntimeError("no generator found (narrow class number 1 required)")


def tp_generator_product(fld, *ideal_data):
    """Totally positive generator (as an F-pair) of prod_i scale_i * ideal_i."""
    gen = (Fraction(1), Fraction(0))
    for rows, scale in ideal_data:
        g = ideal_lat_generator(fld, rows)
        gen = fld.mul(gen, (Fraction(g[0]), Fraction(g[1])))
        gen = (gen[0] * scale, gen[1] * scale)
    return gen


def _isomorphic_f(ideal: Lattice, rec: ClassRecord) -> bool:
    fld = ideal.alg.field
    pair = ideal.mul(rec.ideal.conjugate())
    target = tp_generator_product(fld, nrd_ideal_f(ideal), nrd_ideal_f(rec.ideal))
    return pair.count_norm_f(target) > 0


# ---------------------------------------------------------------------------
# class sets over F


def mass_S(fld: RealQuadraticField, level: IdealF) -> Fraction:
    psi = 1
    for pid, e in level.factors:
        psi *= pid.norm ** (e - 1) * (pid.norm + 1)
    z = fld.zeta_minus_one()
    return Fraction(abs(z.numerator), z.denominator) * Fraction(psi, 2)


def _signature_f(ideal: Lattice):
    fld = ideal.alg.field
    rows, scale = nrd_ideal_f(ideal)
    base = ideal_lat_generator(fld, rows)
    sig = []
    for mu in _small_tp_elements(fld):
        g = fld.mul(mu, base)
        sig.append(ideal.count_norm_f((Fraction(g[0]) * scale, Fraction(g[1]) * scale)))
    return tuple(sig)


_SMALL_TP_CACHE = {}


def _small_tp_elements(fld: RealQuadraticField, bound: int = 6):
    key = (fld.d, bound)
    if key not in _SMALL_TP_CACHE:
        out = []
        for tr in range(1, bound + 1):
            for y in range(-2 * bound, 2 * bound + 1):
                if (tr - fld.min_s * y) % 2:
                    continue
                x = (tr - fld.min_s * y) // 2
                el = (x, y)
                if fld.is_totally_positive(el):
                    out.append(el)
        _SMALL_TP_CACHE[key] = out
    return _SMALL_TP_CACHE[key]


class ClassSetS(_ClassSetBase):
    """S_M over F: right ideal classes of a rooted O_F-Eichler order in the
    totally definite, finitely-unramified quaternion algebra over F."""

    def __init__(self, fld, level: IdealF, algF, v0, chains, root, classes, mass):
        super().__init__(classes, mass)
        self.field = fld
        self.level = level
        self.alg = algF
        self.v0 = v0
        self.chains = chains  # {PrimeIdeal: Chain}
        self.root = root
        self.root_prime = v0
        self._op_cache = {}
        self._far = None

    def _reduce(self, ideal):
        return reduce_ideal(ideal)

    def _signature(self, ideal):
        return _signature_f(ideal)

    def _isomorphic(self, ideal, rec):
        return _isomorphic_f(ideal, rec)

    def far_maximal(self):
        if self._far is None:
            out = self.v0
            for pid, chain in _sorted_pid_items(self.chains):
                out = glue_lattices(chain.orders[-1], out, [pid])
            self._far = out
        return self._far

    def op_ideal(self, pid: PrimeIdeal) -> Lattice:
        key = repr(pid)
        if key in self._op_cache:
            return self._op_cache[key]
        s = dict(self.level.factors).get(pid, 0)
        if s == 0:
            raise ValueError(f"{pid} does not divide the level")
        gen = totally_positive_generator(self.field, IdealF(self.field, ((pid, s),)))
        ge = self.alg.scalar((Fraction(gen[0]), Fraction(gen[1])))
        far = self.far_maximal()
        w = self.root.intersect(far.mul_element(ge, side="left")).add(
            self.root_prime.mul_element(ge, side="left").intersect(self.root)
        )
        self._op_cache[key] = w
        return w

    def op_map(self, pid: PrimeIdeal):
        w = self.op_ideal(pid)
        perm = [self.identify(rec.ideal.mul(w)) for rec in self.classes]
        if sorted(perm) != list(range(len(self.classes))):
            raise EnumerationError("op did not permute the classes")
        return perm

    def degeneracy_target(self, d: IdealF, budget: int = 400000) -> "ClassSetS":
        level2 = self.level.quotient_by(d)
        dd = dict(d.factors)
        chains2 = {}
        for pid, chain in self.chains.items():
            e = dd.get(pid, 0)
            if e not in (0, chain.length):
                raise ValueError("only full-or-trivial strips are supported as class maps")
            if e == 0:
                chains2[pid] = chain
        root = self.v0
        for pid, chain in _sorted_pid_items(chains2):
            root = root.intersect(self.v0.intersect(chain.orders[-1]))
        if discrd_norm_f(root) != level2.norm:
            raise RuntimeError("degeneracy target root has wrong level")
        mass = mass_S(self.field, level2)
        nb = _neighbor_pid(self.field, self.level, self.alg)
        classes = _enumerate_classes(
            root, None, mass, budget,
            signature=_signature_f,
            unit_count=lambda order: order.count_norm_f((1, 0)),
            neighbor_moduli=[nb],
        )
        return ClassSetS(self.field, level2, self.alg, self.v0, chains2, root, classes, mass)

    def shift_connector(self, d: IdealF, dp: IdealF, target: "ClassSetS") -> Lattice:
        x = target.root
        dd = dict(d.factors)
        dpd = dict(dp.factors)
        for pid, chain in _sorted_pid_items(self.chains):
            e = dd.get(pid, 0)
            ep = dpd.get(pid, 0)
            if e == 0:
                if ep:
                    raise ValueError("dp must divide d")
                continue
            if e != chain.length:
                raise ValueError("only full-or-trivial strips are supported as class maps")
            if ep == 0:
                continue
            piece = chain.connectors[ep].mul(target.root)
            x = glue_lattices(piece, x, [pid])
        return x

    def degeneracy_map(self, d: IdealF, dp: IdealF, target: "ClassSetS"):
        x = self.shift_connector(d, dp, target)
        return [target.identify(rec.ideal.mul(x)) for rec in self.classes]


def _sorted_pid_items(d):
    return sorted(d.items(), key=lambda t: (t[0].norm, t[0].ell, -1 if t[0].root is None else t[0].root))


def _neighbor_pid(fld, level: IdealF, algF) -> PrimeIdeal:
    used = {pid.ell for pid, _ in level.factors}
    used |= {p for p, _ in factor(abs(2 * algF.a * algF.b * fld.disc)).factors}
    q = 2
    while True:
        if is_prime(q) and q not in used:
            return primes_above(fld, q)[0]
        q += 1


def smallest_nonsplit_prime(fld: RealQuadraticField) -> int:
    from .quadfield import eta

    q = 2
    while True:
        if is_prime(q) and eta(fld, q) != 1:
            return q
        q += 1


def build_class_set_S(fld: RealQuadraticField, level: IdealF, algF=None, v0=None, chains=None, root=None, neighbor_budget: int = 400000) -> ClassSetS:
    """Enumerate S_level over F.  algF/v0/chains/root may be supplied by the
    special-map pipeline to root the enumeration compatibly."""
    if fld.narrow_class_number() != 1:
        raise ValueError("only narrow class number 1 fields are supported")
    if any(pid.ramified for pid, _ in level.factors):
        raise ValueError("level must be coprime to the different")
    if algF is None:
        q0 = smallest_nonsplit_prime(fld)
        b0 = make_definite_algebra(q0)
        algF = QuaternionAlgebraF(fld, b0.a, b0.b)
    if v0 is None:
        v0 = maximal_order_f(algF)
    if discrd_norm_f(v0) != 1:
        raise ValueError("algebra is ramified at a finite place; no such S exists")
    if chains is None:
        chains = {pid: build_chain(v0, pid, s) for pid, s in level.factors}
    if root is None:
        root = v0
        for pid, chain in _sorted_pid_items(chains):
            root = root.intersect(v0.intersect(chain.orders[-1]))
    if discrd_norm_f(root) != level.norm:
        raise RuntimeError("level construction failed over F")
    for pid, e in level.factors:
        if level_at_prime_f(root, pid) != e:
            raise RuntimeError(f"level at {pid} is wrong")
    mass = mass_S(fld, level)
    nb = _neighbor_pid(fld, level, algF)
    classes = _enumerate_classes(
        root, None, mass, neighbor_budget,
        signature=_signature_f,
        unit_count=lambda order: order.count_norm_f((1, 0)),
        neighbor_moduli=[nb],
    )
    return ClassSetS(fld, level, algF, v0, chains, root, classes, mass)

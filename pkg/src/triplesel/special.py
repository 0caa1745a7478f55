"""The special map zeta: T_{M,D} -> S_M and its composition with degeneracy.

Realization: Q = B_D (x) F with the same structure constants, so the required
isomorphism B_D (x) F = Q is the identity.  For a class [I] the image is
[embed(I) * X] where X is a right ideal of the target root built from the
saturated embeddings; the saturation at each ramified v | D picks, among the
two Eichler overorders of R (x) O_F, the one whose quotient bimodule matches
the pinned base orientation against tau-bullet (the defining condition of the
map).  Exactly one candidate matches; anything else is an internal error.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .arith import factor, kronecker
from .gfq import GF
from .lattices import Lattice
from .orders import (
    Chain,
    ClassSetS,
    ClassSetT,
    EnumerationError,
    QuotientAlgebra,
    build_class_set_S,
    discrd_norm_f,
    eichler_up_pair,
    glue_lattices,
    _sorted_pid_items,
)
from .quadfield import IdealF, PrimeIdeal, RealQuadraticField, eta, primes_above, splitting
from .quatalg import QuaternionAlgebraF


def embed_element(algF: QuaternionAlgebraF, el):
    return algF.embed_rational(el)


def embed_lattice(algF: QuaternionAlgebraF, lat: Lattice) -> Lattice:
    om = algF.scalar((Fraction(0), Fraction(1)))
    gens = []
    for b in lat.basis_elements():
        e = algF.embed_rational(b)
        gens.append(e)
        gens.append(algF.mul(om, e))
    return Lattice.from_elements(algF, gens)


class OrientationRef:
    """Pinned orientation of the base order at a ramified prime v | D:
    a generator element r of the residue field R/P_v together with its pinned
    image in the model GF(v^2)."""

    def __init__(self, v: int, element, value, model: GF):
        self.v = v
        self.element = element
        self.value = value
        self.model = model


def orientation_refs(cs: ClassSetT, fld: RealQuadraticField):
    refs = {}
    for v, _ in factor(cs.D).factors:
        if splitting(fld, v).kind != "inert":
            raise ValueError(f"prime {v} | D is not inert in {fld}")
        model = fld.residue_field_inert(v)
        r = _residue_generator(cs.root, v)
        t = int(Fraction(cs.alg.trd(r)))
        n = int(Fraction(cs.alg.nrd(r)))
        roots = sorted(
            x for x in model.elements() if model.sub(model.mul(x, x), model.add(model.scal(t, x), model.el(-n))) == model.zero
        )
        roots = [x for x in roots if x[1] != 0]  # outside the prime field
        if not roots:
            raise RuntimeError("residue generator has no conjugate roots in the model")
        refs[v] = OrientationRef(v, r, roots[0], model)
    return refs


def _residue_generator(order: Lattice, v: int):
    """Element of the order generating the residue field at v | D
    (its characteristic polynomial is irreducible mod v)."""
    basis = order.basis_elements()
    alg = order.alg
    cands = list(basis)
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            cands.append(_add4(basis[i], basis[j]))
    for x in cands:
        t = Fraction(alg.trd(x))
        n = Fraction(alg.nrd(x))
        if t.denominator != 1 or n.denominator != 1:
            continue
        disc = int(t) ** 2 - 4 * int(n)
        if kronecker(disc, v) == -1:
            return x
    raise RuntimeError(f"no residue generator found at {v}")


def _add4(x, y):
    return tuple(a + b for a, b in zip(x, y))


def saturate_at_ramified(s_cur: Lattice, pid: PrimeIdeal, ref: OrientationRef, algF) -> Lattice:
    """One step of the special-map saturation: pick the Eichler overorder at
    pid whose quotient bimodule realizes (o_v, tau-bullet)."""
    a, b = eichler_up_pair(s_cur, pid)
    matches = []
    r_emb = algF.embed_rational(ref.element)
    for cand in (a, b):
        mu = _bimodule_character(s_cur, cand, pid, r_emb, algF)
        if mu == ref.value:
            matches.append(cand)
    if len(matches) != 1:
        raise RuntimeError("bimodule test was not decisive (internal error)")
    return matches[0]


def _bimodule_character(s_cur: Lattice, cand: Lattice, pid: PrimeIdeal, r_emb, algF):
    """The element mu of O_F/v = GF(v^2) with r * w = mu * w on cand/s_cur."""
    v = pid.ell
    kq = GF(v)
    # subspace: images of s_cur basis inside cand coordinates, mod v
    sub = []
    for belt in s_cur.basis_elements():
        co = cand.coords_of(belt)
        if any(c.denominator % v == 0 for c in co):
            raise RuntimeError("unexpected denominators in saturation step")
        sub.append([_fr_mod(c, v) for c in co])
    mat = [[(x,) for x in row] for row in sub]
    red, piv = kq.rref(mat)
    span_rows = [[int(red[r][i][0]) for i in range(8)] for r in range(len(piv))]
    # projection onto a 2-dim complement
    full = [row[:] for row in span_rows]
    comp_idx = []
    for t in range(8):
        e = [0] * 8
        e[t] = 1
        trial = full + [e]
        mm = [[(x,) for x in row] for row in trial]
        _, piv2 = kq.rref(mm)
        if len(piv2) == len(trial):
            full.append(e)
            comp_idx.append(t)
        if len(full) == 8:
            break
    if len(comp_idx) != 2:
        raise RuntimeError("saturation quotient is not 2-dimensional")
    fullmat = [[full[j][i] % v for j in range(8)] for i in range(8)]
    from .orders import _inv_mod_p

    inv = _inv_mod_p(fullmat, v)
    base_dim = len(span_rows)

    def proj(el):
        co = cand.coords_of(el)
        x = [_fr_mod(c, v) for c in co]
        sol = [sum(inv[i][j] * x[j] for j in range(8)) % v for i in range(8)]
        return [sol[base_dim], sol[base_dim + 1]]

    w = None
    for belt in cand.basis_elements():
        pw = proj(belt)
        if any(pw):
            w = belt
            break
    if w is None:
        raise RuntimeError("no generator of the saturation quotient")
    om = algF.scalar((Fraction(0), Fraction(1)))
    pw = proj(w)
    pow_ = proj(algF.mul(om, w))
    prw = proj(algF.mul(r_emb, w))
    # solve (m0, m1): m0*pw + m1*pow = prw over F_v
    det = (pw[0] * pow_[1] - pw[1] * pow_[0]) % v
    if det == 0:
        raise RuntimeError("quotient basis degenerate")
    dinv = pow(det, -1, v)
    m0 = ((prw[0] * pow_[1] - prw[1] * pow_[0]) * dinv) % v
    m1 = ((pw[0] * prw[1] - pw[1] * prw[0]) * dinv) % v
    return algF.field.residue_field_inert(v).el(m0, m1)


def _fr_mod(c: Fraction, v: int) -> int:
    return c.numerator * pow(c.denominator, -1, v) % v


class ZetaData:
    """All data for zeta_{M,D} and its degeneracy compositions on one T-side
    class set: the F-model, the saturated root and distinguished maximal, and
    the embedded level chains."""

    def __init__(self, csT: ClassSetT, fld: RealQuadraticField):
        if math.gcd(csT.M, fld.disc) != 1:
            raise ValueError("level must be coprime to disc(F)")
        self.csT = csT
        self.field = fld
        self.refs = orientation_refs(csT, fld)
        self.algF = QuaternionAlgebraF(fld, csT.alg.a, csT.alg.b)
        self.d_pids = {v: primes_above(fld, v)[0] for v, _ in factor(csT.D).factors}
        # saturated distinguished maximal order
        v0f = embed_lattice(self.algF, csT.v0)
        for v, pid in sorted(self.d_pids.items()):
            v0f = saturate_at_ramified(v0f, pid, self.refs[v], self.algF)
        if discrd_norm_f(v0f) != 1:
            raise RuntimeError("saturated maximal order is not maximal")
        self.v0F = v0f
        # saturated root (level M * O_F)
        rootf = embed_lattice(self.algF, csT.root)
        for v, pid in sorted(self.d_pids.items()):
            rootf = saturate_at_ramified(rootf, pid, self.refs[v], self.algF)
        self.rootF = rootf
        self.level = _ideal_power_product(fld, csT.M)
        if discrd_norm_f(rootf) != self.level.norm:
            raise RuntimeError("saturated root has wrong level")
        # embedded chains, one per prime ideal above each level prime
        self.chainsF = {}
        for q, chain in csT.chains.items():
            emb_orders = []
            emb_conns = [None]
            for j, vq in enumerate(chain.orders):
                of = embed_lattice(self.algF, vq)
                for v, pid in sorted(self.d_pids.items()):
                    of = saturate_at_ramified(of, pid, self.refs[v], self.algF)
                emb_orders.append(of)
                if j > 0:
                    emb_conns.append(embed_lattice(self.algF, chain.connectors[j]))
            for pid in primes_above(fld, q):
                orders_pid = [self.v0F]
                for j in range(1, len(emb_orders)):
                    orders_pid.append(glue_lattices(emb_orders[j], self.v0F, [pid]))
                self.chainsF[pid] = Chain(pid, orders_pid, emb_conns)
        self._cs_cache = {}

    # -- class sets ---------------------------------------------------------------
    def class_set_S(self, df: IdealF | None = None) -> ClassSetS:
        """S at level M*O_F / df, rooted compatibly with the zeta pipeline."""
        key = repr(df) if df is not None else "(full)"
        if key in self._cs_cache:
            return self._cs_cache[key]
        level = self.level if df is None else self.level.quotient_by(df)
        dd = dict(df.factors) if df is not None else {}
        chains = {}
        for pid, chain in self.chainsF.items():
            e = dd.get(pid, 0)
            if e not in (0, chain.length):
                raise ValueError("only full-or-trivial strips are supported")
            if e == 0:
                chains[pid] = chain
        cs = build_class_set_S(self.field, level, algF=self.algF, v0=self.v0F, chains=chains)
        self._cs_cache[key] = cs
        return cs

    def zeta_connector(self, df: IdealF | None, dp: IdealF | None, target: ClassSetS) -> Lattice:
        """Right target-root ideal X with (gamma^{(df,dp)} o zeta)([I]) = [embed(I) X]."""
        x = target.root
        if df is None:
            return x
        dd = dict(df.factors)
        dpd = dict(dp.factors) if dp is not None else {}
        for pid, chain in _sorted_pid_items(self.chainsF):
            e = dd.get(pid, 0)
            ep = dpd.get(pid, 0)
            if e == 0:
                if ep:
                    raise ValueError("dp must divide df")
                continue
            if e != chain.length:
                raise ValueError("only full-or-trivial strips are supported")
            if ep == 0:
                continue
            piece = chain.connectors[ep].mul(target.root)
            x = glue_lattices(piece, x, [pid])
        return x

    def zeta_gamma_map(self, df: IdealF | None, dp: IdealF | None, target: ClassSetS):
        """The composite map T_{M,D} -> S_{M/df} as a list of target indices."""
        x = self.zeta_connector(df, dp, target)
        out = []
        for rec in self.csT.classes:
            emb = embed_lattice(self.algF, rec.ideal)
            out.append(target.identify(emb.mul(x)))
        return out

    def zeta_map(self, target: ClassSetS | None = None):
        if target is None:
            target = self.class_set_S()
        return self.zeta_gamma_map(None, None, target)

    # -- window-rooted targets (arbitrary ideal divisors) -----------------------
    def window_class_set(self, df: IdealF, dp: IdealF) -> ClassSetS:
        """S at level M*O_F/df rooted at the dp-shifted window, supporting
        arbitrary (df, dp) with dp | df | level.  The composed map
        gamma^{(df,dp)} o zeta is then [I] -> [embed(I) * root]."""
        key = ("win", repr(df), repr(dp))
        if key in self._cs_cache:
            return self._cs_cache[key]
        dd = dict(df.factors)
        dpd = dict(dp.factors)
        level2 = self.level.quotient_by(df)
        items = _sorted_pid_items(self.chainsF)
        v0p = self.v0F
        for pid, chain in items:
            ep = dpd.get(pid, 0)
            if ep:
                v0p = glue_lattices(chain.orders[ep], v0p, [pid])
        root = v0p
        for pid, chain in items:
            e = dd.get(pid, 0)
            ep = dpd.get(pid, 0)
            s = chain.length
            if ep > e or e > s:
                raise ValueError("window parameters out of range")
            piece = chain.orders[ep].intersect(chain.orders[ep + s - e])
            root = glue_lattices(piece, root, [pid])
        chains2 = {}
        for pid, chain in items:
            e = dd.get(pid, 0)
            ep = dpd.get(pid, 0)
            s = chain.length
            if s - e > 0:
                chains2[pid] = Chain(pid, [chain.orders[ep + t] for t in range(s - e + 1)], [None] * (s - e + 1))
        cs = build_class_set_S(self.field, level2, algF=self.algF, v0=v0p, chains=chains2, root=root)
        self._cs_cache[key] = cs
        return cs

    def window_map(self, target: ClassSetS):
        """[I] -> [embed(I) * target.root]: the composite of zeta with the
        degeneracy map whose window roots the target."""
        out = []
        for rec in self.csT.classes:
            emb = embed_lattice(self.algF, rec.ideal)
            out.append(target.identify(emb.mul(target.root)))
        return out


def _ideal_power_product(fld: RealQuadraticField, m: int) -> IdealF:
    facs = []
    for q, e in factor(m).factors:
        for pid in primes_above(fld, q):
            facs.append((pid, e * (2 if pid.ramified else 1)))
    return IdealF(fld, tuple(sorted(facs, key=lambda t: (t[0].norm, t[0].ell, -1 if t[0].root is None else t[0].root))))

"""The real quadratic field F = Q(sqrt d): splitting, the character eta,
narrow class number, O_F arithmetic, prime ideals and residue-field models.

Conventions pinned here and relied on everywhere downstream:
  * omega = (1+sqrt d)/2 if d = 1 mod 4, else sqrt d; elements are x + y*omega.
  * the residue field at an inert prime l is modeled as F_l[t]/(minpoly of
    omega mod l); tau_bullet sends omega to t, tau_circ to t^l.
  * prime ideals above a split/ramified l are (l, omega - c) for the roots c
    of the minimal polynomial mod l, ordered by increasing c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import factor, is_prime, is_squarefree, kronecker
from .gfq import GF


class RealQuadraticField:
    def __init__(self, d: int):
        if d <= 1 or not is_squarefree(d):
            raise ValueError(f"d = {d} must be squarefree and > 1")
        self.d = d
        if d % 4 == 1:
            self.disc = d
            self.omega_trace = 1  # omega^2 = omega + (d-1)/4
            self.omega_norm = -((d - 1) // 4)
        else:
            self.disc = 4 * d
            self.omega_trace = 0  # omega^2 = d
            self.omega_norm = -d
        # minpoly t^2 - omega_trace*t + omega_norm; tail for GF: t^2 = s*t + c
        self.min_s = self.omega_trace
        self.min_c = -self.omega_norm
        self._h_plus = None
        self._fund_unit = None

    def __repr__(self):
        return f"Q(sqrt {self.d})"

    def __eq__(self, other):
        return isinstance(other, RealQuadraticField) and self.d == other.d

    def __hash__(self):
        return hash(("RQF", self.d))

    # -- element arithmetic on (x, y) pairs, x + y*omega ---------------------
    def add(self, a, b):
        return (a[0] + b[0], a[1] + b[1])

    def sub(self, a, b):
        return (a[0] - b[0], a[1] - b[1])

    def neg(self, a):
        return (-a[0], -a[1])

    def mul(self, a, b):
        s, c = self.min_s, self.min_c
        x1, y1 = a
        x2, y2 = b
        yy = y1 * y2
        return (x1 * x2 + c * yy, x1 * y2 + x2 * y1 + s * yy)

    def conj(self, a):
        x, y = a
        return (x + self.min_s * y, -y)

    def norm(self, a):
        x, y = a
        return x * x + self.min_s * x * y - self.min_c * y * y

    def trace(self, a):
        return 2 * a[0] + self.min_s * a[1]

    def inv(self, a):
        n = self.norm(a)
        if n == 0:
            raise ZeroDivisionError
        cx, cy = self.conj(a)
        return (Fraction(cx, 1) / n, Fraction(cy, 1) / n)

    def embed_signs(self, a):
        """Signs of a under the two real embeddings (omega -> larger root first)."""
        x, y = a
        # a = x + y*(s + sqrt(disc_poly))/2 under embedding 1, minus sqrt under 2
        # where disc_poly = s^2 + 4c = disc of minpoly.
        dd = self.min_s**2 + 4 * self.min_c
        signs = []
        for eps in (1, -1):
            # sign of (2x + s y) + eps * y * sqrt(dd)
            u = 2 * x + self.min_s * y
            v = eps * y
            if v == 0:
                signs.append(0 if u == 0 else (1 if u > 0 else -1))
                continue
            # compare u against -v*sqrt(dd)
            if u >= 0 and v >= 0:
                signs.append(1)
            elif u <= 0 and v <= 0:
                signs.append(-1)
            else:
                # opposite signs: compare u^2 vs v^2*dd
                if u * u > v * v * dd:
                    signs.append(1 if u > 0 else -1)
                elif u * u < v * v * dd:
                    signs.append(1 if v > 0 else -1)
                else:
                    signs.append(0)
        return tuple(signs)

    def is_totally_positive(self, a):
        return self.embed_signs(a) == (1, 1)

    # -- units ---------------------------------------------------------------
    def fundamental_unit(self):
        """Fundamental unit > 1 of O_F as a pair (x, y)."""
        if self._fund_unit is not None:
            return self._fund_unit
        d = self.d
        # continued fraction of sqrt(d) -> minimal x + y sqrt(d), x^2 - d y^2 = +-1
        a0 = math.isqrt(d)
        m, den, a = 0, 1, a0
        p_prev, p = 1, a0
        q_prev, q = 0, 1
        for _ in range(10000):
            if p * p - d * q * q in (1, -1):
                break
            m = den * a - m
            den = (d - m * m) // den
            a = (a0 + m) // den
            p_prev, p = p, a * p + p_prev
            q_prev, q = q, a * q + q_prev
        else:
            raise RuntimeError("Pell solver did not terminate")
        # unit in (x + y*omega) coordinates
        if d % 4 == 1:
            cand = (p - q, 2 * q)  # p + q sqrt d = (p - q) + 2q * omega
        else:
            cand = (p, q)
        # look for a smaller unit of O_F (half-integral cases, d = 1 mod 4)
        best = cand
        bestval = self._approx(cand)
        y = 1
        while True:
            # units u = x + y*omega with |N(u)| = 1; |x| bounded via bestval
            bound = int(bestval) + 2
            if y * math.isqrt(self.disc) > 2 * bound + 2:
                break
            for x in range(-bound, bound + 1):
                u = (x, y)
                if abs(self.norm(u)) == 1 and self._approx(u) > 1.0001 and self._approx(u) < bestval - 1e-9:
                    best = u
                    bestval = self._approx(u)
            y += 1
        self._fund_unit = best
        return best

    def _approx(self, a) -> float:
        dd = self.min_s**2 + 4 * self.min_c
        return a[0] + a[1] * (self.min_s + math.sqrt(dd)) / 2

    def has_norm_minus_one_unit(self):
        return self.norm(self.fundamental_unit()) == -1

    # -- class numbers --------------------------------------------------------
    def narrow_class_number(self) -> int:
        """|Cl(F)^+| by cycle-counting reduced indefinite binary quadratic forms."""
        if self._h_plus is not None:
            return self._h_plus
        disc = self.disc
        r = math.isqrt(disc)

        def is_reduced(a, b, c):
            if b <= 0 or b > r:
                return False
            t = abs(2 * a)
            # sqrt(disc) - b < 2|a| < sqrt(disc) + b, exact for nonsquare disc
            left = (r - b < t) if (r - b) >= 0 else True
            if r - b >= 0:
                # need strict sqrt(disc)-b < t: t >= r-b+1 works unless t == r-b+.. careful:
                # sqrt(disc) irrational: sqrt > r, so sqrt - b > r - b; t > sqrt-b iff t >= r-b+1
                left = t >= r - b + 1
            right = t <= r + b  # t < sqrt+b iff t <= r+b
            return left and right

        forms = set()
        for b in range(1, r + 1):
            if (disc - b * b) % 4:
                continue
            acp = (b * b - disc) // 4  # = a*c < 0
            for a in range(1, r + b + 1):
                for sa in (a, -a):
                    if acp % sa:
                        continue
                    c = acp // sa
                    if is_reduced(sa, b, c):
                        forms.add((sa, b, c))

        def rho(form):
            a, b, c = form
            # next form (c, b', c') with b' = -b mod 2|c| in the reduction window
            tc = 2 * abs(c)
            # choose b' = -b + k*2|c| with sqrt(disc) - 2|c| < b' < sqrt(disc)
            lo = r - tc + 1  # b' > sqrt-2|c| iff b' >= r-2|c|+1
            hi = r  # b' < sqrt iff b' <= r
            k = (lo + b) // tc
            bp = -b + k * tc
            while bp < lo:
                bp += tc
                k += 1
            assert lo <= bp <= hi, "reduction window error"
            cp = (bp * bp - disc) // (4 * c)
            return (c, bp, cp)

        seen = set()
        cycles = 0
        for f in sorted(forms):
            if f in seen:
                continue
            cycles += 1
            g = f
            while True:
                seen.add(g)
                g = rho(g)
                if g == f:
                    break
        self._h_plus = cycles
        return cycles

    def zeta_minus_one(self) -> Fraction:
        """Siegel's finite formula: zeta_F(-1) = (1/60) sum sigma((disc-b^2)/4)."""
        disc = self.disc
        total = 0
        b = disc % 2
        while b * b < disc:
            if (disc - b * b) % 4 == 0:
                sig = _sigma1((disc - b * b) // 4)
                total += sig if b == 0 else 2 * sig
            b += 2
        return Fraction(total, 60)

    # -- residue fields -------------------------------------------------------
    def residue_field_inert(self, ell: int) -> GF:
        """GF(ell^2) = F_ell[t]/(t^2 - s t - c), the pinned model."""
        return GF(ell, (self.min_c % ell, self.min_s % ell))

    def tau_bullet(self, a, gf: GF):
        """x + y*omega -> x + y*t in the pinned model."""
        return gf.el(a[0], a[1])

    def tau_circ(self, a, gf: GF):
        return gf.frob(self.tau_bullet(a, gf))

    def minpoly_roots_mod(self, ell: int) -> list[int]:
        return [c for c in range(ell) if (c * c - self.min_s * c - self.min_c) % ell == 0]


def _sigma1(n: int) -> int:
    out = 1
    for p, e in factor(n).factors:
        out *= (p ** (e + 1) - 1) // (p - 1)
    return out


@dataclass(frozen=True)
class OFElement:
    """Integral element x + y*omega of O_F."""

    x: int
    y: int

    def pair(self):
        return (self.x, self.y)


@dataclass(frozen=True)
class Splitting:
    kind: str  # split | inert | ramified


def make_field(d: int) -> RealQuadraticField:
    return RealQuadraticField(d)


def splitting(field: RealQuadraticField, ell: int) -> Splitting:
    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")
    k = kronecker(field.disc, ell)
    return Splitting({1: "split", -1: "inert", 0: "ramified"}[k])


def eta(field: RealQuadraticField, ell: int) -> int:
    """+1 / -1 / 0 for split / inert / ramified; the character of F at ell."""
    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")
    return kronecker(field.disc, ell)


def split_conductor(n: int, field: RealQuadraticField) -> tuple[int, int]:
    """N = N+ * N- with N+ the split part and N- the inert part."""
    if n < 1:
        raise ValueError("conductor must be positive")
    if math.gcd(n, field.disc) != 1:
        raise ValueError(f"conductor {n} shares a ramified prime with disc {field.disc}")
    n_plus = n_minus = 1
    for p, e in factor(n).factors:
        if eta(field, p) == 1:
            n_plus *= p**e
        else:
            n_minus *= p**e
    return n_plus, n_minus


def narrow_class_number(field: RealQuadraticField) -> int:
    return field.narrow_class_number()


# ---------------------------------------------------------------------------
# prime ideals and ideals of O_F (narrow class number 1 contexts)


@dataclass(frozen=True)
class PrimeIdeal:
    """Prime of O_F above ell.  For split/ramified primes `root` is the root c
    of omega's minimal polynomial mod ell defining the ideal (ell, omega - c)."""

    ell: int
    degree: int  # 1 or 2
    root: int | None  # None iff inert
    ramified: bool = False

    @property
    def norm(self) -> int:
        return self.ell**self.degree

    def __repr__(self):
        if self.degree == 2:
            return f"({self.ell})"
        tag = "ram" if self.ramified else "split"
        return f"({self.ell},w-{self.root}|{tag})"


def primes_above(field: RealQuadraticField, ell: int) -> list[PrimeIdeal]:
    kind = splitting(field, ell).kind
    if kind == "inert":
        return [PrimeIdeal(ell, 2, None)]
    roots = field.minpoly_roots_mod(ell)
    if kind == "ramified":
        return [PrimeIdeal(ell, 1, roots[0], True)]
    assert len(roots) == 2
    return [PrimeIdeal(ell, 1, r) for r in sorted(roots)]


def prime_ideals_up_to(field: RealQuadraticField, norm_bound: int) -> list[PrimeIdeal]:
    """All primes of O_F of norm <= norm_bound, by increasing (norm, root)."""
    out = []
    for ell in range(2, norm_bound + 1):
        if not is_prime(ell):
            continue
        for pid in primes_above(field, ell):
            if pid.norm <= norm_bound:
                out.append(pid)
    return sorted(out, key=lambda p: (p.norm, p.ell, -1 if p.root is None else p.root))


@dataclass(frozen=True)
class IdealF:
    """Integral ideal of O_F as a product of prime ideals (h+ = 1 contexts)."""

    field: RealQuadraticField
    factors: tuple[tuple[PrimeIdeal, int], ...]  # sorted, exponents >= 1

    @property
    def norm(self) -> int:
        n = 1
        for p, e in self.factors:
            n *= p.norm**e
        return n

    def is_one(self) -> bool:
        return not self.factors

    def divisors(self) -> list["IdealF"]:
        divs = [()]
        for p, e in self.factors:
            divs = [d + ((p, k),) if k else d for d in divs for k in range(e + 1)]
        ideals = [IdealF(self.field, tuple(t for t in d if t[1])) for d in divs]
        return sorted(ideals, key=lambda i: (i.norm, repr(i)))

    def quotient_by(self, other: "IdealF") -> "IdealF":
        mine = dict(self.factors)
        for p, e in other.factors:
            if mine.get(p, 0) < e:
                raise ValueError("not a divisor")
            mine[p] -= e
        return IdealF(self.field, tuple(sorted(((p, e) for p, e in mine.items() if e), key=lambda t: (t[0].norm, t[0].ell, t[0].root or -1))))

    def __repr__(self):
        if not self.factors:
            return "(1)"
        return "*".join(f"{p}^{e}" if e > 1 else f"{p}" for p, e in self.factors)


def ideal_from_int(field: RealQuadraticField, n: int) -> IdealF:
    """The ideal n*O_F factored into primes."""
    facs: list[tuple[PrimeIdeal, int]] = []
    for p, e in factor(n).factors:
        for pid in primes_above(field, p):
            mult = e * (2 if pid.ramified else 1)
            facs.append((pid, mult))
    return IdealF(field, tuple(sorted(facs, key=lambda t: (t[0].norm, t[0].ell, t[0].root or -1))))


def totally_positive_generator(field: RealQuadraticField, ideal: IdealF):
    """A totally positive generator of the ideal (requires h+ = 1)."""
    if field.narrow_class_number() != 1:
        raise ValueError("totally positive generators need narrow class number 1")
    gen = (1, 0)
    for p, e in ideal.factors:
        g = _prime_generator(field, p)
        for _ in range(e):
            gen = field.mul(gen, g)
    return _make_totally_positive(field, gen)


def _prime_generator(field: RealQuadraticField, pid: PrimeIdeal):
    if pid.degree == 2:
        return (pid.ell, 0)
    # search x + y*omega with norm +-ell and omega = root mod (the ideal)
    target = pid.ell
    bound = 1
    while bound < 10**6:
        bound = max(4, bound * 4)
        for y in range(-bound, bound + 1):
            for x in range(-bound, bound + 1):
                if abs(field.norm((x, y))) == target:
                    # membership in (ell, omega - c): x + y*c = 0 mod ell
                    if (x + y * pid.root) % pid.ell == 0:
                        return (x, y)
    raise RuntimeError(f"no small generator found for {pid}")


def _make_totally_positive(field: RealQuadraticField, gen):
    cands = [gen, field.neg(gen)]
    u = field.fundamental_unit()
    for c in list(cands):
        cands.append(field.mul(c, u))
        cands.append(field.mul(field.mul(c, u), u))
    for c in cands:
        if field.is_totally_positive(c):
            return _reduce_by_units(field, c)
    raise RuntimeError("no totally positive associate found (is h+ really 1?)")


def _reduce_by_units(field: RealQuadraticField, gen):
    """Minimize the trace of a totally positive element over its tp-unit orbit."""
    u = field.fundamental_unit()
    u2 = field.mul(u, u)
    n = field.norm(u2)
    u2inv = field.conj(u2) if n == 1 else field.neg(field.conj(u2))
    best = gen
    improved = True
    while improved:
        improved = False
        for step in (u2, u2inv):
            c = field.mul(best, step)
            if field.is_totally_positive(c) and field.trace(c) < field.trace(best):
                best = c
                improved = True
    return best

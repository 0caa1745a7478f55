"""Period sums and testing factors, the Kolyvagin constants, and the explicit
congruence-formula right-hand sides, culminating in the rank prediction.

The period integer attached to a testing pair (d, dF) is the finite sum over
the classes t of T_{N+M, N-} of

    (zeta^* gamma^* f_pi)(t) * (delta^* g_sigma)(t),

computed exactly over the integers.  Its p-divisibility is n_div; the density
exponent n_den comes from the scan statistics; n_bad and n_red are
user-supplied assumption constants with no computable recipe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .arith import factor, mult_order, ord_p


def ff(r: int) -> int:
    """ff(1) = 1, ff(2) = 4, ff(r+1) = 2 (ff(r) + 1)."""
    if r < 1:
        raise ValueError("r must be positive")
    if r == 1:
        return 1
    val = 4
    for _ in range(r - 2):
        val = 2 * (val + 1)
    return val


def fp_bad(p: int) -> set:
    """{mu in F_p^* : mu^r = 1 for some r in {1, 2, 3, 4, 6}}."""
    if p == 2 or not _is_odd_prime(p):
        raise ValueError("p must be an odd prime")
    out = set()
    for mu in range(1, p):
        if mult_order(mu, p) in (1, 2, 3, 4, 6):
            out.add(mu)
    return out


def _is_odd_prime(p):
    from .arith import is_prime

    return is_prime(p) and p % 2 == 1


def n_den(density: Fraction, p: int) -> int:
    """Least n >= 0 with p^(n+1) > 1/density."""
    density = Fraction(density)
    if density <= 0 or density > 1:
        raise ValueError("density must lie in (0, 1]")
    inv = 1 / density
    n = 0
    power = p
    while power <= inv:
        power *= p
        n += 1
    return n


def period_sum(g_values, f_values, delta_map, zeta_map, modulus: int | None = None):
    """sum_t f(zeta-composite(t)) * g(delta(t)); exact integer, or a residue
    when a modulus is given (mod-p^n eigenforms)."""
    if len(delta_map) != len(zeta_map):
        raise ValueError("class-set mismatch: the two pullback maps have different domains")
    total = 0
    for t in range(len(delta_map)):
        total += f_values[zeta_map[t]] * g_values[delta_map[t]]
    return total % modulus if modulus is not None else total


@dataclass
class PeriodEntry:
    d: int
    d_ideal: str
    value: int
    delta_map: list
    zeta_map: list


@dataclass
class PeriodReport:
    entries: list
    chosen: int | None
    level_data: tuple  # (N+ * M, N-)

    def chosen_entry(self):
        return None if self.chosen is None else self.entries[self.chosen]


def find_testing_factors(period_values) -> PeriodReport:
    """Choose the first nonzero entry in the fixed iteration order
    (increasing d, then increasing ideal norm); a zero-everywhere report is
    evidence of a vanishing central value, not a bug."""
    chosen = None
    for idx, e in enumerate(period_values.entries):
        if e.value != 0:
            chosen = idx
            break
    period_values.chosen = chosen
    return period_values


def n_div(report: PeriodReport, p: int) -> int:
    entry = report.chosen_entry()
    if entry is None:
        raise ValueError("no testing factors were found; n_div is undefined")
    v = ord_p(entry.value, p)
    # cross-check by repeated division
    x, k = entry.value, 0
    while x % p == 0:
        x //= p
        k += 1
    assert k == v
    return int(v)


def congruence_rhs_bis(ell: int, nu_bullet: int, nu_circ: int, a_trace: int, eps_sigma: int, period: int, p: int, n: int) -> int:
    """(tr(Fr_{l^2}) - 2 eps l) (nu_circ + eps nu_bullet) * period mod p^n."""
    q = p**n
    return (a_trace - 2 * eps_sigma * ell) * (nu_circ + eps_sigma * nu_bullet) % q * (period % q) % q


def congruence_rhs_even(
    case: str,
    ell1: int,
    ell2: int | None,
    nu_bullet: int,
    nu_circ: int,
    raised_sum: int,
    eps1: int,
    eps2: int | None,
    a_trace_ell2: int | None,
    p: int,
    n: int,
) -> int:
    """Right-hand sides of the level-raised congruence formulae.

    case "unramified-at-l1": (nu_bullet + eps1 nu_circ) * S;
    case "singular-at-l2":  (tr(Fr_{l2^2}) - 2 eps2 l2)(nu_circ + eps2 nu_bullet) * S;
    where S is the period-type sum over T_{N+M, N- l1} of
    (zeta^* f_pi^(d))(t) (delta^* g-raised)(t), supplied as raised_sum mod p^n.
    """
    q = p**n
    if case == "unramified-at-l1":
        return (nu_bullet + eps1 * nu_circ) % q * (raised_sum % q) % q
    if case == "singular-at-l2":
        if ell2 is None or eps2 is None or a_trace_ell2 is None:
            raise ValueError("the singular case needs the second prime's data")
        return (a_trace_ell2 - 2 * eps2 * ell2) * (nu_circ + eps2 * nu_bullet) % q * (raised_sum % q) % q
    raise ValueError("case must be 'unramified-at-l1' or 'singular-at-l2'")


@dataclass
class KolyvaginConstants:
    n_div: int | None
    n_den: int | None
    density_estimate: Fraction | None
    n_bad: int
    n_red: int
    notes: tuple = ()

    def as_dict(self):
        return {
            "n_div": self.n_div,
            "n_den": self.n_den,
            "density_estimate": None if self.density_estimate is None else [self.density_estimate.numerator, self.density_estimate.denominator],
            "n_bad": {"value": self.n_bad, "status": "assumed"},
            "n_red": {"value": self.n_red, "status": "assumed"},
            "notes": list(self.notes),
        }


def kolyvagin_constants(report: PeriodReport | None, p: int, n_admissible_count: int, strongly_count: int, n_bad: int, n_red: int, min_sample: int = 20) -> KolyvaginConstants:
    notes = []
    nd = None
    if report is not None and report.chosen is not None:
        nd = n_div(report, p)
    elif report is not None:
        notes.append("period vanished for every testing pair; n_div undefined")
    else:
        notes.append("odd-type pipeline: n_div is ord_p of an Abel-Jacobi class, not computable here")
    dens = None
    nden = None
    if n_admissible_count >= min_sample and strongly_count > 0:
        dens = Fraction(strongly_count, n_admissible_count)
        nden = n_den(dens, p)
        notes.append(f"density from scan statistics ({strongly_count}/{n_admissible_count}); Chebotarev density proxied empirically")
    else:
        notes.append(f"insufficient scan sample for n_den ({strongly_count}/{n_admissible_count} < {min_sample} admissible)")
    notes.append("n_bad and n_red are assumption inputs (no computable recipe)")
    return KolyvaginConstants(nd, nden, dens, n_bad, n_red, tuple(notes))


@dataclass
class Verdict:
    kind: str  # "dimension-0" | "rank-1-conditional" | "out-of-hypotheses" | "no-testing-factors"
    statement: str
    assumptions: tuple
    data: dict


def predict(parity_type: str, report: PeriodReport | None, constants: KolyvaginConstants | None, assumption_notes, extra=None) -> Verdict:
    """The rank prediction of the main bounding theorem, with every heuristic
    input itemized."""
    extra = extra or {}
    notes = tuple(assumption_notes)
    if parity_type == "out-of-hypotheses":
        return Verdict("out-of-hypotheses", "the pair falls outside the running hypotheses (Assumption E failed)", notes, extra)
    if parity_type == "even":
        if report is not None and report.chosen is not None:
            st = (
                "Selmer dimension 0 predicted for this good p (conditional on the Ichino-period/"
                "central-value correspondence: the period equals C * L(1/2) with C nonzero but uncomputed)"
            )
            return Verdict("dimension-0", st, notes, {"period": report.chosen_entry().value, **extra})
        st = (
            "every testing pair gave period 0: consistent with a vanishing central value; "
            "no dimension bound is asserted"
        )
        return Verdict("no-testing-factors", st, notes, extra)
    st = (
        "odd type: a rank-1 prediction requires nonvanishing of the Abel-Jacobi class of the "
        "Hirzebruch-Zagier cycle, which is not computable by this tool; congruence data attached"
    )
    return Verdict("rank-1-conditional", st, notes, extra)

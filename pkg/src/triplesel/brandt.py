"""Brandt matrices on class sets, integral eigenforms, and mod-p^n level raising.

The Hecke matrix T^{(v)} is computed column by column: column j lists how the
v+1 norm-v right sub-ideals of the class representative I_j distribute over
the classes.  Every cached matrix is checked for the degree (column sums
v + 1), weighted symmetry w_i T_ij = w_j T_ji, and commutation with the other
cached matrices; these are structural certificates, not tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .arith import is_prime
from .elliptic import EllipticCurveF, EllipticCurveQ, a_pid, ap_trace
from .linalg import howell_form, kernel_mod_pn, kernel_rational, mat_mul, module_rank_free
from .orders import ClassSetS, ClassSetT, EnumerationError, neighbor_ideals
from .quadfield import PrimeIdeal, prime_ideals_up_to


class BrandtModule:
    """Hecke matrices over a class set (T side or S side)."""

    def __init__(self, class_set):
        self.cs = class_set
        self.hecke_cache: dict = {}

    @property
    def size(self):
        return len(self.cs)

    def hecke(self, modulus):
        """The Brandt matrix T^{(v)} (resp. S^{(v)}) for v coprime to the level."""
        key = str(modulus)
        if key in self.hecke_cache:
            return self.hecke_cache[key]
        cs = self.cs
        if isinstance(modulus, PrimeIdeal):
            if any(p == modulus for p, _ in cs.level.factors):
                raise ValueError(f"{modulus} divides the level")
            deg = modulus.norm + 1
        else:
            if not is_prime(modulus):
                raise ValueError("Hecke index must be prime")
            if isinstance(cs, ClassSetT) and (cs.D * cs.M) % modulus == 0:
                raise ValueError(f"{modulus} divides the level or discriminant")
            deg = modulus + 1
        h = len(cs)
        mat = [[0] * h for _ in range(h)]
        for j, rec in enumerate(cs.classes):
            for K in neighbor_ideals(rec.order, modulus):
                i = cs.identify(K.mul(rec.ideal))
                mat[i][j] += 1
        for j in range(h):
            if sum(mat[i][j] for i in range(h)) != deg:
                raise EnumerationError("Brandt column sum is not the degree")
        w = cs.weights()
        for i in range(h):
            for j in range(h):
                if w[i] * mat[i][j] != w[j] * mat[j][i]:
                    raise EnumerationError("weighted symmetry failed")
        for other in self.hecke_cache.values():
            if mat_mul(mat, other) != mat_mul(other, mat):
                raise EnumerationError("Brandt matrices do not commute")
        self.hecke_cache[key] = mat
        return mat


@dataclass
class Eigenform:
    vector: list
    eigenvalues: dict
    module: BrandtModule

    def __post_init__(self):
        g = 0
        for x in self.vector:
            g = math.gcd(g, abs(x))
        if g != 1:
            raise ValueError("eigenform vector is not primitive")

    def is_cuspidal(self):
        return sum(self.vector) == 0


@dataclass
class ModPnEigenform:
    p: int
    n: int
    vector: list
    op_sign: int
    eigenvalues: dict
    module: BrandtModule


def good_hecke_moduli_t(cs: ClassSetT, bound: int):
    return [v for v in range(2, bound + 1) if is_prime(v) and (cs.D * cs.M) % v != 0]


def good_hecke_moduli_s(cs: ClassSetS, bound_norm: int):
    level_primes = {repr(p) for p, _ in cs.level.factors}
    return [pid for pid in prime_ideals_up_to(cs.field, bound_norm) if repr(pid) not in level_primes and not pid.ramified]


def sturm_bound(level_disc: int) -> int:
    """Verification bound: ceil(D*M/6) + 1 with a hard floor of 20 primes."""
    b = -(-level_disc // 6) + 1
    count = 0
    v = 2
    while count < 20:
        if is_prime(v):
            count += 1
        v += 1
    return max(b, v)


def _cut_kernel(module: BrandtModule, moduli_traces, need_all_verified=True):
    """Intersect rational kernels of (T(v) - a_v) until one-dimensional.

    moduli_traces: list of (modulus, trace).  Returns the primitive integer
    vector with positive leading entry; raises on dimension 0 or >= 2.
    """
    h = module.size
    basis = [[1 if i == j else 0 for j in range(h)] for i in range(h)]
    for modulus, a_v in moduli_traces:
        if len(basis) == 1:
            break
        t = module.hecke(modulus)
        cols = [[sum(t[i][k] * b[k] for k in range(h)) - a_v * b[i] for i in range(h)] for b in basis]
        mat = [[cols[c][i] for c in range(len(cols))] for i in range(h)]
        ker = kernel_rational(mat)
        basis = [[sum(cv[c] * basis[c][i] for c in range(len(basis))) for i in range(h)] for cv in ker]
        if not basis:
            raise ValueError(f"no such eigenform at this level (kernel died at {modulus})")
    if len(basis) != 1:
        raise ValueError("ambiguous eigenform: kernel dimension >= 2 at the verification bound")
    vec = basis[0]
    g = 0
    for x in vec:
        g = math.gcd(g, abs(x))
    vec = [x // g for x in vec]
    if next(x for x in vec if x) < 0:
        vec = [-x for x in vec]
    # verify the whole table
    eigs = {}
    for modulus, a_v in moduli_traces:
        t = module.hecke(modulus)
        if [sum(t[i][k] * vec[k] for k in range(h)) for i in range(h)] != [a_v * x for x in vec]:
            raise ValueError(f"eigen-equation fails at {modulus}")
        eigs[modulus if isinstance(modulus, int) else repr(modulus)] = a_v
    return vec, eigs


def eigenform_from_traces(module: BrandtModule, traces, verify_bound: int | None = None) -> Eigenform:
    """The primitive integral eigenvector with T^{(v)} g = traces(v) g for all
    good v <= verify_bound (Sturm-style default)."""
    cs = module.cs
    if verify_bound is None:
        verify_bound = sturm_bound(cs.D * cs.M)
    get = traces.__getitem__ if isinstance(traces, dict) else traces
    pairs = [(v, get(v)) for v in good_hecke_moduli_t(cs, verify_bound)]
    vec, eigs = _cut_kernel(module, pairs)
    return Eigenform(vec, eigs, module)


def eigenform_gsigma(curve_e: EllipticCurveQ, module: BrandtModule, verify_bound: int | None = None) -> Eigenform:
    """g_sigma on T_{N+,N-} from the curve's point-counted traces."""
    return eigenform_from_traces(module, lambda v: ap_trace(curve_e, v), verify_bound)


def eigenform_pi(curve_a: EllipticCurveF, module: BrandtModule, verify_norm_bound: int = 50) -> Eigenform:
    """f_pi on S_M from the Jacquet-Langlands eigenvalue system a_v(A)."""
    cs = module.cs
    pairs = []
    for pid in good_hecke_moduli_s(cs, verify_norm_bound):
        if curve_a.has_good_reduction(pid):
            pairs.append((pid, a_pid(curve_a, pid)))
    if not pairs:
        raise ValueError("no good primes below the verification bound")
    vec, eigs = _cut_kernel(module, pairs)
    return Eigenform(vec, eigs, module)


def mod_pn_reduction(form: Eigenform, p: int, n: int) -> list:
    """g_sigma^n: the integral eigenform reduced mod p^n."""
    q = p**n
    return [x % q for x in form.vector]


def level_raise(
    curve_e: EllipticCurveQ,
    module: BrandtModule,
    ell: int,
    p: int,
    n: int,
    eps_sigma: int,
    hecke_bound: int | None = None,
) -> ModPnEigenform:
    """The mod-p^n level-raised eigenform g^n on T_{N+, N- ell}.

    Intersects the kernels of T^{(v)} - a_v(E) over Z/p^n for good v up to the
    bound, then the op_ell eigenspace of sign eps_sigma (the certified A3
    sign); the result must be free of rank one.  Rank 0 contradicts
    admissibility and is surfaced loudly.
    """
    cs = module.cs
    if cs.D % ell != 0:
        raise ValueError("ell must divide the discriminant of the raised class set")
    if hecke_bound is None:
        hecke_bound = 30
    q = p**n
    h = len(cs)
    gens = [[1 if i == j else 0 for j in range(h)] for i in range(h)]
    used = []
    for v in good_hecke_moduli_t(cs, hecke_bound):
        if v == p:
            continue
        a_v = ap_trace(curve_e, v)
        used.append((v, a_v % q))
        t = module.hecke(v)
        mat = [[(sum(t[i][k] * g[k] for k in range(h)) - a_v * g[i]) % q for i in range(h)] for g in gens]
        mat_t = [[mat[c][i] for c in range(len(gens))] for i in range(h)]
        coeffs = kernel_mod_pn(mat_t, p, n)
        gens = [[sum(cv[c] * gens[c][i] for c in range(len(gens))) % q for i in range(h)] for cv in coeffs]
        gens = howell_form(gens, p, n) if gens else []
        if not gens:
            raise EnumerationError("level raising failed: empty Hecke kernel (contradicts admissibility)")
        if len(gens) == 1:
            break
    perm = cs.op_map(ell)
    # condition (g o op)(i) = g(perm[i]) = eps * g(i)
    mat = [[(g[perm[i]] - eps_sigma * g[i]) % q for i in range(h)] for g in gens]
    mat_t = [[mat[c][i] for c in range(len(gens))] for i in range(h)]
    coeffs = kernel_mod_pn(mat_t, p, n)
    gens = [[sum(cv[c] * gens[c][i] for c in range(len(gens))) % q for i in range(h)] for cv in coeffs]
    gens = howell_form(gens, p, n) if gens else []
    free, gen = module_rank_free(gens, p, n)
    if not free:
        if not gens:
            raise EnumerationError("level raising failed: no op-eigenvector (contradicts admissibility)")
        raise EnumerationError("level-raised eigenspace is not free of rank 1; raise the verify bound")
    vec = list(gen)
    eigs = dict(used)
    for v, a_v in used:
        t = module.hecke(v)
        if any((sum(t[i][k] * vec[k] for k in range(h)) - a_v * vec[i]) % q for i in range(h)):
            raise EnumerationError("raised eigenform fails an eigen-equation")
    if any((vec[perm[i]] - eps_sigma * vec[i]) % q for i in range(h)):
        raise EnumerationError("raised eigenform fails the op sign")
    return ModPnEigenform(p, n, vec, eps_sigma, eigs, module)

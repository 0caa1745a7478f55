"""Exact integer kernel: factorization, primality, quadratic symbols, valuations, orders.

Everything here works on plain Python ints (arbitrary precision).  All inputs
coming from the rest of the package are desk-scale (conductors, levels, scan
bounds), so factorization is trial division up to 10^6 backed by Pollard rho,
with primality re-checks guarding every factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

INF = math.inf

_TRIAL_BOUND = 10**6

# Deterministic Miller-Rabin witness set for n < 2^64.
_MR_BASES_64 = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
# Fixed witnesses above 2^64 (probabilistic but deterministic across runs).
_MR_BASES_BIG = tuple(p for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    bases = _MR_BASES_64 if n < 2**64 else _MR_BASES_BIG
    for a in bases:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """A nontrivial factor of composite odd n."""
    if n % 2 == 0:
        return 2
    seed = 1
    while True:
        seed += 1
        x = y = 2
        c = seed
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d


@dataclass(frozen=True)
class Factorization:
    """value = prod prime^exponent, primes strictly increasing."""

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        prev = 1
        for p, e in self.factors:
            if not (e >= 1 and p > prev and is_prime(p)):
                raise ValueError(f"invalid factorization of {self.value}")
            prev = p
            prod *= p**e
        if prod != self.value:
            raise ValueError(f"factors do not multiply back to {self.value}")

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def divisors(self) -> list[int]:
        divs = [1]
        for p, e in self.factors:
            divs = [d * p**k for d in divs for k in range(e + 1)]
        return sorted(divs)


def factor(n: int) -> Factorization:
    if n < 1:
        raise ValueError("factor() needs n >= 1")
    m = n
    found: dict[int, int] = {}
    for p in range(2, _TRIAL_BOUND):
        if p * p > m:
            break
        while m % p == 0:
            found[p] = found.get(p, 0) + 1
            m //= p
    stack = [m] if m > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            found[m] = found.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.append(d)
        stack.append(m // d)
    return Factorization(n, tuple(sorted(found.items())))


def omega(n: int) -> int:
    """Number of distinct prime factors of n."""
    return len(factor(n).factors)


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    return all(e == 1 for _, e in factor(n).factors)


def kronecker(a: int, b: int) -> int:
    """Kronecker symbol (a|b), extending Jacobi to all integers."""
    if b == 0:
        return 1 if a in (1, -1) else 0
    if a == 0 and b in (1, -1):
        return 1
    result = 1
    if b < 0:
        b = -b
        if a < 0:
            result = -result
    # strip factors of 2 from b
    v = 0
    while b % 2 == 0:
        b //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 == 1 and a % 8 in (3, 5):
            result = -result
    a %= b
    # Jacobi loop (b odd positive now)
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if b % 8 in (3, 5):
                result = -result
        a, b = b % a, a
        if a % 4 == 3 and b % 4 == 3:
            result = -result
    return result if b == 1 else 0


def ord_p(x: int, p: int) -> int | float:
    """Largest n with p^n | x; infinity for x = 0."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if x == 0:
        return INF
    n = 0
    while x % p == 0:
        x //= p
        n += 1
    return n


def _carmichael(m: int) -> int:
    lam = 1
    for p, e in factor(m).factors:
        if p == 2:
            block = 1 if e == 1 else (2 if e == 2 else 2 ** (e - 2))
        else:
            block = (p - 1) * p ** (e - 1)
        lam = lam * block // math.gcd(lam, block)
    return lam


def mult_order(a: int, m: int) -> int:
    """Least r >= 1 with a^r = 1 mod m.  Requires gcd(a, m) = 1."""
    if m < 1:
        raise ValueError("modulus must be positive")
    if m == 1:
        return 1
    a %= m
    if math.gcd(a, m) != 1:
        raise ValueError(f"gcd({a}, {m}) != 1")
    order = _carmichael(m)
    for p, _ in factor(order).factors:
        while order % p == 0 and pow(a, order // p, m) == 1:
            order //= p
    return order


def isqrt_exact(n: int) -> int | None:
    """Integer square root if n is a perfect square, else None."""
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None

"""Exact integer arithmetic: primes, factorization, CRT assembly."""

from __future__ import annotations

import math
import random
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np

# Deterministic Miller-Rabin: the first 13 primes are a valid base set below this bound.
_MR_DETERMINISTIC_LIMIT = 3317044064679887385961981
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_TRIAL_LIMIT = 10**6

_small_primes_cache: list[int] = []


def primes_up_to(limit: int) -> list[int]:
    """All primes <= limit in ascending order (empty if limit < 2)."""
    if limit < 2:
        return []
    limit = int(limit)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    is_prime[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if is_prime[p]:
            is_prime[p * p :: 2 * p] = False
    return np.flatnonzero(is_prime).tolist()


def _small_primes() -> list[int]:
    global _small_primes_cache
    if not _small_primes_cache:
        _small_primes_cache = primes_up_to(_TRIAL_LIMIT)
    return _small_primes_cache


@dataclass(frozen=True)
class PrimeClass:
    """Primes q with q % 4 == 3 and q > lower_exclusive."""

    lower_exclusive: int

    @classmethod
    def for_form(cls, a: int, b: int) -> PrimeClass:
        return cls(a + abs(b))

    def __contains__(self, q: int) -> bool:
        return q > self.lower_exclusive and q % 4 == 3 and is_prime(q)


def sieve_primes_q(range_lo: int, range_hi: int, pc: PrimeClass) -> list[int]:
    """Primes q in (range_lo, range_hi] with q = 3 (mod 4) and q > pc.lower_exclusive."""
    if range_lo > range_hi:
        raise ValueError("range_lo must not exceed range_hi")
    lo = max(range_lo, pc.lower_exclusive)
    return [q for q in primes_up_to(range_hi) if q > lo and q % 4 == 3]


def solve_cq(a: int, b: int, q: int) -> int:
    """The unique c in [1, q-1] with a*c + b = 0 (mod q)."""
    if a % q == 0 or b % q == 0:
        raise ValueError(f"q={q} divides a={a} or b={b}")
    return (-b * pow(a, -1, q)) % q


def _is_sprp(n: int, base: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(base, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _is_strong_lucas_prp(n: int) -> bool:
    if math.isqrt(n) ** 2 == n:
        return False
    # Selfridge method A parameters.
    D = 5
    while True:
        j = _jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
    P, Q = 1, (1 - D) // 4
    d, s = n + 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    U, V, Qk = 1, P, Q % n
    for bit in bin(d)[3:]:
        U, V = U * V % n, (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = P * U + V, D * U + P * V
            U = (U + n if U % 2 else U) // 2 % n
            V = (V + n if V % 2 else V) // 2 % n
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        if V == 0:
            return True
        Qk = Qk * Qk % n
    return False


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_prime(n: int) -> bool:
    """Primality test.

    Deterministic Miller-Rabin below ~3.3e24; Baillie-PSW above (no known
    counterexample, and none exist below 2**64).
    """
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if n < _MR_DETERMINISTIC_LIMIT:
        return all(_is_sprp(n, b) for b in _MR_BASES)
    return _is_sprp(n, 2) and _is_strong_lucas_prp(n)


def _pollard_brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of n >= 1 as ascending (prime, exponent) pairs."""
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    factors: dict[int, int] = {}
    for p in _small_primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors[p] = e
    if n > 1:
        rng = random.Random(n)
        stack = [n]
        while stack:
            m = stack.pop()
            if m == 1:
                continue
            if is_prime(m):
                factors[m] = factors.get(m, 0) + 1
                continue
            r = math.isqrt(m)
            if r * r == m:
                stack += [r, r]
                continue
            g = _pollard_brent(m, rng)
            stack += [g, m // g]
    return sorted(factors.items())


@dataclass(frozen=True)
class CrtValue:
    residues: tuple[tuple[int, int], ...]  # (prime, residue)
    combined_d: int
    combined_P: int

    def satisfies_all(self) -> bool:
        return all(self.combined_d % q == r for q, r in self.residues)


def crt_combine(residues: Iterable[tuple[int, int]]) -> CrtValue:
    """Fold (residue, prime) congruences one at a time into d mod P."""
    d, P = 0, 1
    seen: set[int] = set()
    pairs = []
    for r, q in residues:
        if q in seen:
            raise ValueError(f"duplicate modulus {q}")
        if not 0 <= r < q:
            raise ValueError(f"residue {r} out of range for modulus {q}")
        seen.add(q)
        pairs.append((q, r))
        # d + P*t = r (mod q)  =>  t = (r - d) * P^-1 (mod q)
        t = (r - d) * pow(P % q, -1, q) % q
        d += P * t
        P *= q
    return CrtValue(tuple(pairs), d, P)


@dataclass(frozen=True)
class ResidueSystem:
    """Chosen residues d mod q for a set of distinct prime moduli."""

    residues: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        for q, r in self.residues.items():
            if not 0 <= r < q:
                raise ValueError(f"residue {r} out of range for modulus {q}")

    @property
    def primes(self) -> frozenset[int]:
        return frozenset(self.residues)

    def __len__(self) -> int:
        return len(self.residues)

    def __getitem__(self, q: int) -> int:
        return self.residues[q]

    def merged(self, *others: ResidueSystem) -> ResidueSystem:
        out = dict(self.residues)
        for other in others:
            overlap = out.keys() & other.residues.keys()
            if overlap:
                raise ValueError(f"residue systems overlap on {sorted(overlap)}")
            out.update(other.residues)
        return ResidueSystem(out)

    def crt(self) -> CrtValue:
        return crt_combine((r, q) for q, r in sorted(self.residues.items()))

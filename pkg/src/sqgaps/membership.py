"""Membership in R (coprime two-square sums) and S (two-square sums), and maximal gaps.

R = {x^2 + y^2 : gcd(x, y) = 1} is the set of n = 2^a * m with a in {0, 1} and m
built from primes = 1 (mod 4). S allows any prime = 3 (mod 4) to an even power.
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Callable, Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .arith import factorize, is_prime, primes_up_to

SEGMENT_SIZE = 1 << 20
_QUICK_PRIMES = primes_up_to(1 << 16)


def _strip_small(n: int) -> tuple[int, bool]:
    """Divide out small odd primes; return (cofactor, saw_3mod4_to_odd_power)."""
    odd_3mod4 = False
    for p in _QUICK_PRIMES[1:]:
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if p % 4 == 3 and e % 2:
                odd_3mod4 = True
    return n, odd_3mod4


def is_in_R(n: int) -> bool:
    if n <= 0 or n % 4 == 0:
        return False
    if n % 2 == 0:
        n //= 2
    # Cheap rejection: an odd number = 3 (mod 4) has a prime factor = 3 (mod 4).
    if n % 4 == 3:
        return False
    for p in _QUICK_PRIMES[1:]:
        if p * p > n:
            break
        if n % p == 0:
            if p % 4 == 3:
                return False
            while n % p == 0:
                n //= p
            if n % 4 == 3:
                return False
    if n == 1 or is_prime(n):
        return n % 4 == 1
    return all(p % 4 == 1 for p, _ in factorize(n))


def is_in_S(n: int) -> bool:
    if n < 0:
        return False
    if n == 0:
        return True
    while n % 2 == 0:
        n //= 2
    rest, odd_3mod4 = _strip_small(n)
    if odd_3mod4:
        return False
    if rest == 1 or is_prime(rest):
        return rest % 4 == 1
    return all(p % 4 == 1 or e % 2 == 0 for p, e in factorize(rest))


def _plainly_not_in_R(n: int) -> bool:
    if n <= 0 or n % 4 == 0:
        return True
    if n % 2 == 0:
        n //= 2
    if n % 4 == 3:
        return True
    return any(n % p == 0 for p in _QUICK_PRIMES if p % 4 == 3)


def pair_bad(n: int, a: int, b: int) -> bool:
    """True when n or a*n + b fails to lie in R."""
    m = a * n + b
    # Cheap tests on both first, so a huge n is never factored needlessly.
    if _plainly_not_in_R(n) or _plainly_not_in_R(m):
        return True
    return not (is_in_R(n) and is_in_R(m))


@dataclass(frozen=True)
class MembershipMask:
    window_lo: int
    window_hi: int
    in_R: np.ndarray
    in_S: np.ndarray

    def members(self, which: str = "R") -> np.ndarray:
        mask = self.in_R if which == "R" else self.in_S
        return self.window_lo + np.flatnonzero(mask)


def classify_range(lo: int, hi: int, segment_size: int = SEGMENT_SIZE) -> MembershipMask:
    """Sieve-based membership of every n in [lo, hi].

    Every prime <= sqrt(hi) is divided out of a cofactor array while the parity
    of each 3-mod-4 exponent is tracked; what remains is 1 or a single prime.
    """
    if lo < 1 or hi < lo:
        raise ValueError(f"invalid range [{lo}, {hi}]")
    if hi - lo + 1 > segment_size:
        raise ValueError(f"window width {hi - lo + 1} exceeds segment size {segment_size}")
    if hi >= 1 << 62:
        raise ValueError("classify_range is limited to 62-bit windows")
    width = hi - lo + 1
    rest = np.arange(lo, hi + 1, dtype=np.int64)
    twos = np.zeros(width, dtype=np.int8)
    odd3 = np.zeros(width, dtype=bool)
    any3 = np.zeros(width, dtype=bool)
    for p in primes_up_to(math.isqrt(hi)):
        first = (-lo) % p
        if first >= width:
            continue
        # parity of v_p(n), indexed along the multiples of p in the window
        parity = np.zeros((width - 1 - first) // p + 1, dtype=bool)
        pk = p
        while pk <= hi:
            start = (-lo) % pk
            if start >= width:
                break
            rest[start::pk] //= p
            if p == 2:
                twos[start::pk] += 1
            elif p % 4 == 3:
                parity[(start - first) // p :: pk // p] ^= True
            pk *= p
        if p % 4 == 3:
            any3[first::p] = True
            odd3[first::p] |= parity
    big3 = (rest > 1) & (rest % 4 == 3)
    in_S = ~(odd3 | big3)
    in_R = ~(any3 | big3) & (twos <= 1)
    return MembershipMask(lo, hi, in_R, in_S)


def _selector(set_selector: str, a: int | None, b: int | None) -> Callable[[int, int], np.ndarray]:
    if set_selector == "R":
        return lambda lo, hi: classify_range(lo, hi).in_R
    if set_selector == "S":
        return lambda lo, hi: classify_range(lo, hi).in_S
    if set_selector in ("good", "pair_good"):
        if a is None or b is None:
            raise ValueError("pair-good selector needs a and b")

        def good(lo: int, hi: int) -> np.ndarray:
            m = classify_range(lo, hi).in_R.copy()
            for i in np.flatnonzero(m):
                m[i] = is_in_R(a * (lo + int(i)) + b)
            return m

        return good
    raise ValueError(f"unknown set selector {set_selector!r}")


@dataclass(frozen=True)
class GapReport:
    limit_N: int
    max_gap: int
    argmax_element: int
    gap_table: list[tuple[int, int]]

    def to_csv(self, fh: io.TextIOBase | None = None) -> str:
        out = fh or io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["member", "next", "gap"])
        for m, g in self.gap_table:
            w.writerow([m, m + g, g])
        return out.getvalue() if fh is None else ""

    def summary(self) -> dict:
        return {"N": self.limit_N, "max_gap": self.max_gap, "argmax": self.argmax_element}


def _windows(lo: int, hi: int, step: int) -> Iterator[tuple[int, int]]:
    while lo <= hi:
        yield lo, min(hi, lo + step - 1)
        lo += step


def max_gap(
    set_selector: str,
    N: int,
    *,
    a: int | None = None,
    b: int | None = None,
    segment_size: int = SEGMENT_SIZE,
    threads: int = 1,
) -> GapReport:
    """G(N) = max over members m <= N of (next member - m).

    set_selector is "R", "S" or "good" (n with n and a*n + b both in R). The
    last member <= N is paired with its successor found past N.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    member_mask = _selector(set_selector, a, b)
    windows = list(_windows(1, N, segment_size))
    if threads > 1 and len(windows) > 1:
        with ThreadPoolExecutor(threads) as pool:
            masks = list(pool.map(lambda w: member_mask(*w), windows))
    else:
        masks = [member_mask(*w) for w in windows]
    members = np.concatenate([lo + np.flatnonzero(m) for (lo, _), m in zip(windows, masks)])
    if members.size == 0:
        raise ValueError(f"no members of {set_selector} in [1, {N}]")

    lookahead = int(10 * math.log(N) ** 2) + 10
    nxt = None
    lo = N + 1
    while lo <= N + lookahead:
        hi = min(N + lookahead, lo + segment_size - 1)
        found = np.flatnonzero(member_mask(lo, hi))
        if found.size:
            nxt = lo + int(found[0])
            break
        lo = hi + 1
    if nxt is None:
        raise ValueError(f"no successor of {int(members[-1])} within {lookahead} of N={N}")

    seq = np.append(members, nxt)
    gaps = np.diff(seq)
    i = int(np.argmax(gaps))
    table = list(zip(members.tolist(), gaps.tolist()))
    return GapReport(N, int(gaps[i]), int(members[i]), table)

"""Analytic weights for the two-square sieve.

Densities sigma(x) = prod (1 - 2/q), the admissibility function behind C(rho),
the scale ladder of H values with its prime blocks, the error weights E_A,
the counts N(v), exact survival probabilities and the lambda importance weights.

All logarithms are natural.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .arith import PrimeClass, ResidueSystem, factorize, sieve_primes_q, solve_cq

PRIMED = "primed"
DOUBLEPRIMED = "doubleprimed"


# --- C(rho) -----------------------------------------------------------------


def f_rho(delta: float) -> float:
    """6 * 10**(2*delta) / log(1 / (2*delta)); delta < C(rho) iff this is < rho."""
    if not 0 < delta < 0.5:
        raise ValueError(f"delta={delta} outside (0, 1/2)")
    return 6.0 * 10.0 ** (2.0 * delta) / math.log(1.0 / (2.0 * delta))


def f_rho_mp(delta, dps: int = 70):
    with mpmath.workdps(dps):
        delta = mpmath.mpf(delta)
        if not 0 < delta < mpmath.mpf(1) / 2:
            raise ValueError(f"delta={delta} outside (0, 1/2)")
        return 6 * mpmath.power(10, 2 * delta) / mpmath.log(1 / (2 * delta))


def compute_C(rho: float, tol: float = 1e-12, *, high_precision: bool = False, dps: int = 70):
    """C(rho) = sup{delta in (0, 1/2): f_rho(delta) < rho}, by bisection.

    f_rho increases from 0 to +inf on (0, 1/2), so the supremum is the unique
    root of f_rho(delta) = rho. Bisection stops once both the bracket width and
    the spread of f_rho across it are <= tol (or the bracket stops shrinking);
    the bracket midpoint is returned. With high_precision=True the whole
    computation runs in mpmath at `dps` digits and an mpf is returned.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if rho <= 0:
        raise ValueError(f"no admissible delta for rho={rho}: inf f_rho = 0")
    if high_precision:
        if dps < 60:
            raise ValueError("high-precision mode needs at least 60 digits")
        with mpmath.workdps(dps):
            rho_mp = mpmath.mpf(rho)
            lo, hi = mpmath.mpf(0), mpmath.mpf(1) / 2
            # resolve well past tol so the result is good to ~dps digits
            stop = mpmath.mpf(10) ** (-(dps - 5))
            while hi - lo > stop:
                mid = (lo + hi) / 2
                if f_rho_mp(mid, dps) < rho_mp:
                    lo = mid
                else:
                    hi = mid
            return (lo + hi) / 2
    lo, hi = 0.0, 0.5
    f_lo, f_hi = 0.0, math.inf
    while True:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi) or (hi - lo <= tol and f_hi - f_lo <= tol):
            return mid
        f_mid = f_rho(mid)
        if f_mid < rho:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid


def estimate_Cprime(K: float, M: float, xi: float, delta: float) -> float:
    """Asymptotic covering density K/(4(K+2)M) * (1 - 1/xi)/log(xi) * log(1/(2 delta))."""
    if K <= 0:
        raise ValueError("K must be positive")
    if not 6 < M <= 7:
        raise ValueError("M must lie in (6, 7]")
    if xi <= 1:
        raise ValueError("xi must exceed 1")
    if not 0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2)")
    return K / (4 * (K + 2) * M) * (1 - 1 / xi) / math.log(xi) * math.log(1 / (2 * delta))


# --- densities --------------------------------------------------------------


def _density(primes: Iterable[int], exact: bool):
    one = Fraction(1) if exact else 1.0
    out = one
    for q in primes:
        assert q > 2, "class primes are odd"
        out *= one - Fraction(2, q) if exact else 1.0 - 2.0 / q
    return out


def sigma_product(x_hi: int, pc: PrimeClass, *, exact: bool = False):
    """sigma(x) = prod over class primes q <= x of (1 - 2/q)."""
    return _density(sieve_primes_q(0, max(int(x_hi), 0), pc), exact)


def sigma_range(z_lo: int, x_hi: int, pc: PrimeClass, *, exact: bool = False):
    """sigma(z, x): the same product restricted to z < q <= x."""
    if x_hi <= z_lo:
        return Fraction(1) if exact else 1.0
    return _density(sieve_primes_q(int(z_lo), int(x_hi), pc), exact)


# --- the H ladder and prime blocks ------------------------------------------


@dataclass(frozen=True)
class HGrid:
    xi: float
    exponents: tuple[int, ...]

    @property
    def members(self) -> list[float]:
        return [self.xi**j for j in self.exponents]

    @property
    def primed(self) -> list[float]:
        return [self.xi**j for j in self.exponents if j % 2 == 0]

    @property
    def doubleprimed(self) -> list[float]:
        return [self.xi**j for j in self.exponents if j % 2 == 1]

    def asymptotic_range_ok(self, x: float, delta: float) -> bool:
        """Whether every H obeys (log x)**delta <= H <= sqrt(log x)/loglog x.

        Only meaningful for astronomically large x; at desk scale this is a
        diagnostic and is usually False.
        """
        lx = math.log(x)
        if lx <= math.e:
            return False
        upper = math.sqrt(lx) / math.log(lx)
        return all(lx**delta <= H <= upper for H in self.members)


def build_h_grid(y: int, x: int, z: int, xi: float) -> HGrid:
    """H = xi**j (j >= 0) with 2y/x <= H <= y/(xi z)."""
    if xi <= 1:
        raise ValueError("xi must exceed 1")
    lo, hi = 2 * y / x, y / (xi * z)
    exps = []
    j = 0
    while xi**j <= hi:
        if xi**j >= lo:
            exps.append(j)
        j += 1
    return HGrid(xi, tuple(exps))


@dataclass(frozen=True)
class QBlock:
    H: float
    j: int
    primes: tuple[int, ...]
    side: str


def q_blocks(grid: HGrid, y: int, pc: PrimeClass) -> list[QBlock]:
    """Q_H = {class primes q : y/(xi H) < q <= y/H} for each H in the grid."""
    blocks = []
    for j in grid.exponents:
        H = grid.xi**j
        lo, hi = y / (grid.xi * H), y / H
        primes = tuple(q for q in sieve_primes_q(math.floor(lo), math.floor(hi), pc) if q > lo)
        blocks.append(QBlock(H, j, primes, PRIMED if j % 2 == 0 else DOUBLEPRIMED))
    return blocks


def qh_asymptotic(H: float, xi: float, y: int, x: int) -> float:
    """Expected block size (1 - 1/xi) * y / (2 H log x)."""
    return (1 - 1 / xi) * y / (2 * H * math.log(x))


# --- weights on the window (H^M, z] -----------------------------------------


@dataclass(frozen=True)
class WeightContext:
    a: int
    b: int
    prime_window: tuple[int, ...]
    I: dict = field(repr=False)
    sigma2: float
    sigma2_exact: Fraction = field(repr=False)
    K: float = 1.0
    H: float = 1.0

    def diff_set(self, q: int) -> frozenset[int]:
        """I_q - I_q = {0, c_q, -c_q} mod q."""
        c = self.I[q][1]
        return frozenset((0, c, q - c))


def weight_context(
    a: int,
    b: int,
    *,
    H: float = 1.0,
    M: float | None = None,
    z: int | None = None,
    K: float = 1.0,
    primes: Sequence[int] | None = None,
) -> WeightContext:
    """Context over the class primes in (H**M, z], or over an explicit prime list."""
    pc = PrimeClass.for_form(a, b)
    if primes is None:
        if M is None or z is None:
            raise ValueError("give either primes or (M, z)")
        primes = sieve_primes_q(min(math.floor(H**M), z), z, pc)
    else:
        primes = tuple(sorted(primes))
        for q in primes:
            if q not in pc:
                raise ValueError(f"{q} is not a class prime for a={a}, b={b}")
    I = {q: (0, solve_cq(a, b, q)) for q in primes}
    s2 = _density(primes, exact=True)
    return WeightContext(a, b, tuple(primes), I, float(s2), s2, K, H)


def e_weight(A: float, m: int, ctx: WeightContext, *, exact: bool = False):
    """E_A(m) via the Euler product prod_q (1 + A [m mod q in I_q - I_q] / q) - 1."""
    if m == 0:
        return Fraction(0) if exact else 0.0
    if exact:
        A = Fraction(A)
        out = Fraction(1)
        for q in ctx.prime_window:
            if m % q in ctx.diff_set(q):
                out *= 1 + A / q
        return out - 1
    out = 1.0
    for q in ctx.prime_window:
        if m % q in ctx.diff_set(q):
            out *= 1.0 + A / q
    return out - 1.0


def count_N(v: int, a: int, b: int, pc: PrimeClass | None = None) -> int:
    """Number of class primes q with v mod q in I_q - I_q, i.e. q | v(av+b)(-av+b)."""
    if v == 0:
        raise ValueError("N(v) is defined for v != 0")
    pc = pc or PrimeClass.for_form(a, b)
    support: set[int] = set()
    for f in (v, a * v + b, -a * v + b):
        support.update(p for p, _ in factorize(abs(f)))
    return sum(1 for p in support if p % 4 == 3 and p > pc.lower_exclusive)


def prob_subset(U: Iterable[int], ctx: WeightContext, *, exact: bool = False):
    """P(U is inside the survivors) for a uniform shift modulo the window primes.

    Equals prod_q (1 - #(U mod q - I_q) / q).
    """
    U = set(U)
    out = Fraction(1) if exact else 1.0
    for q in ctx.prime_window:
        hit = {(u - alpha) % q for u in U for alpha in ctx.I[q]}
        if len(hit) >= q:
            raise ValueError(f"window prime {q} too small for a set of size {len(U)}")
        out *= (1 - Fraction(len(hit), q)) if exact else (1.0 - len(hit) / q)
    return out


# --- lambda weights -----------------------------------------------------------


def survives(m: int, side: str, residues: ResidueSystem, I: dict, N: int = 0) -> bool:
    """Sieve test for one integer against the primes of `residues`.

    Primed: (m - d) mod p outside I_p. Doubleprimed: (m + N + d) mod p outside I_p.
    """
    if side == PRIMED:
        return all((m - r) % p not in I[p] for p, r in residues.residues.items())
    return all((m + N + r) % p not in I[p] for p, r in residues.residues.items())


def ap_members(q: int, c: int, n: int, J: int, side: str) -> list[int]:
    """The two progressions {n + alpha + s q h : 1 <= h <= J}, alpha in {0, c}, s = +1/-1 by side."""
    step = q if side == PRIMED else -q
    return [n + alpha + step * h for alpha in (0, c) for h in range(1, J + 1)]


def lambda_weight(
    H: float,
    q: int,
    n: int,
    side: str,
    d1_residues: ResidueSystem,
    d2_residues: ResidueSystem,
    ctx: WeightContext,
    N: int = 0,
    K: float | None = None,
    *,
    exact: bool = False,
):
    """1{AP subset of S_2} / sigma2**#AP, AP the length-[KH] progressions filtered by S_1.

    Primed survivors satisfy (m - d) mod p outside I_p, doubleprimed ones
    (m + N + d) mod p outside I_p; d1 carries the small primes (<= H**M) and
    d2 the window primes of ctx.
    """
    if d1_residues.primes & d2_residues.primes:
        raise ValueError("d1 and d2 residue systems share primes")
    if d2_residues.primes != frozenset(ctx.prime_window):
        raise ValueError("d2 residues must cover exactly the context window")
    if side not in (PRIMED, DOUBLEPRIMED):
        raise ValueError(f"unknown side {side!r}")
    K = ctx.K if K is None else K
    J = math.floor(K * H)
    a, b = ctx.a, ctx.b
    I1 = {p: (0, solve_cq(a, b, p)) for p in d1_residues.primes}
    ap = [
        m
        for m in ap_members(q, solve_cq(a, b, q), n, J, side)
        if survives(m, side, d1_residues, I1, N)
    ]
    s2 = ctx.sigma2_exact if exact else ctx.sigma2
    if all(survives(m, side, d2_residues, ctx.I, N) for m in ap):
        return s2 ** -len(ap)
    return Fraction(0) if exact else 0.0

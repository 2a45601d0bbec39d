"""Three-stage sieve construction of two intervals with n(an+b) outside R everywhere.

Stage 1 fixes d modulo the small class primes (<= z) at random. Stage 2 spends
the medium primes of the H-ladder blocks covering survivors of [1, y] (primed
side) and [-y, -1] (doubleprimed side). Stage 3 kills each remaining survivor
with its own large prime from (x/2, x]. The residues are glued with the CRT,
lifted to d1 in [-0.3N, -0.2N] and turned into

    I1 = [d2 + 1, d2 + y],  I2 = [N - d2 - y, N - d2 - 1],  d2 = -d1,

where every n carries a witness prime q = 3 (mod 4), q <= x, dividing n(an+b).
Correctness of an output never rests on the heuristics: `verify_certificate`
re-derives everything from the certificate alone.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import analysis
from .analysis import DOUBLEPRIMED, PRIMED
from .arith import (
    PrimeClass,
    ResidueSystem,
    is_prime,
    sieve_primes_q,
    solve_cq,
)
from .membership import pair_bad

log = logging.getLogger(__name__)

DEFAULT_DELTA = 1 / 325565


class ConstructionError(Exception):
    """A pipeline stage could not produce its output."""

    stage = "construct"

    def __init__(self, message: str, **diagnostics: Any):
        super().__init__(message)
        self.diagnostics = diagnostics


class ParameterError(ConstructionError, ValueError):
    stage = "params"


class Stage1Error(ConstructionError):
    stage = "stage1"


class CleanupDeficit(ConstructionError):
    stage = "stage3"


class CoverageHole(ConstructionError):
    stage = "assemble"


# --- parameters ---------------------------------------------------------------


@dataclass(frozen=True)
class SieveParams:
    a: int
    b: int
    delta: float
    x: int
    y: int
    z: int
    K: float
    M: float
    xi: float
    epsilon: float
    N: int
    seed: int
    mode: str = "free"

    @property
    def pc(self) -> PrimeClass:
        return PrimeClass.for_form(self.a, self.b)

    @property
    def grid(self) -> analysis.HGrid:
        return analysis.build_h_grid(self.y, self.x, self.z, self.xi)

    @property
    def blocks(self) -> list[analysis.QBlock]:
        return analysis.q_blocks(self.grid, self.y, self.pc)

    @property
    def sigma(self) -> float:
        return analysis.sigma_product(self.z, self.pc)

    @property
    def eta(self) -> float:
        ly = math.log(self.y)
        return 1.0 / (ly**self.delta * math.log(ly)) if ly > math.e else math.inf

    def to_json(self) -> dict:
        d = asdict(self)
        d["N"] = str(self.N)
        return d

    @classmethod
    def from_json(cls, d: dict) -> SieveParams:
        d = dict(d)
        d["N"] = int(d["N"])
        return cls(**d)


def asymptotic_scale(x: int, delta: float) -> tuple[int, int]:
    """y = [x (log x)**delta] and z = [y loglog x / sqrt(log x)]."""
    lx = math.log(x)
    y = math.floor(x * lx**delta)
    z = math.floor(y * math.log(lx) / math.sqrt(lx))
    return y, z


def class_primorial(x: int, pc: PrimeClass) -> int:
    return math.prod(sieve_primes_q(0, x, pc))


def default_N(x: int, pc: PrimeClass) -> int:
    """A target sum comfortably above 10 P(x), so d1 fits in [-0.3N, -0.2N]."""
    return 20 * class_primorial(x, pc) + 1


def derive_params(
    a: int,
    b: int,
    x: int,
    *,
    delta: float = DEFAULT_DELTA,
    K: float = 2.0,
    M: float = 6.5,
    xi: float = 2.0,
    epsilon: float | None = None,
    N: int | None = None,
    seed: int = 0,
    mode: str = "free",
    y: int | None = None,
    z: int | None = None,
) -> SieveParams:
    """Validate the knobs and fill in y, z (mode="paper") and N (if omitted)."""
    if a <= 0:
        raise ParameterError("a must be positive")
    if b % a == 0:
        raise ParameterError("a divides b", a=a, b=b)
    if not 1e-6 < delta < 0.5:
        raise ParameterError("delta must lie in (1e-6, 1/2)")
    if K <= 0:
        raise ParameterError("K must be positive")
    if not 6 < M <= 7:
        raise ParameterError("M must lie in (6, 7]")
    if xi <= 1:
        raise ParameterError("xi must exceed 1")
    if epsilon is None:
        epsilon = (M - 6) / 14
    if not 0 < epsilon < (M - 6) / 7:
        raise ParameterError("epsilon must lie in (0, (M-6)/7)")
    if mode == "paper":
        if x < 16:
            raise ParameterError("mode 'paper' needs x >= 16")
        y, z = asymptotic_scale(x, delta)
    elif mode == "free":
        if y is None or z is None:
            raise ParameterError("free mode needs explicit y and z")
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    if not 1 <= z < y:
        raise ParameterError("need 1 <= z < y", y=y, z=z)
    if 2 * z >= x:
        raise ParameterError("no medium-prime room: z >= x/2", x=x, z=z)
    pc = PrimeClass.for_form(a, b)
    if N is None:
        N = default_N(x, pc)
    # |d1| <= 0.3 N and both intervals of length y must fit inside [1, N]
    if N <= 5 * y:
        raise ParameterError("N too small: need N > 5y", N=str(N), y=y)
    return SieveParams(a, b, delta, x, y, z, K, M, xi, epsilon, N, seed, mode)


# --- survivor bookkeeping -----------------------------------------------------


@dataclass(frozen=True)
class SurvivorSet:
    side: str
    window: tuple[int, int]
    offsets: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.offsets)


def side_window(side: str, y: int) -> tuple[int, int]:
    return (1, y) if side == PRIMED else (-y, -1)


def sieve_mask(values: np.ndarray, side: str, residues: dict[int, int], cq: dict[int, int], N: int) -> np.ndarray:
    """Boolean survivors among `values` against residues {q: d mod q}.

    Primed: (n - d) mod q outside {0, c_q}. Doubleprimed: (n + N + d) mod q outside {0, c_q}.
    """
    keep = np.ones(values.shape, dtype=bool)
    for q, r in residues.items():
        shift = -r if side == PRIMED else N % q + r
        t = (values + shift) % q
        keep &= (t != 0) & (t != cq[q])
    return keep


def survivors(params: SieveParams, side: str, residues: dict[int, int], cq: dict[int, int]) -> SurvivorSet:
    lo, hi = side_window(side, params.y)
    vals = np.arange(lo, hi + 1, dtype=np.int64)
    kept = vals[sieve_mask(vals, side, residues, cq, params.N)]
    return SurvivorSet(side, (lo, hi), tuple(int(v) for v in kept))


def _cq_table(params: SieveParams, primes) -> dict[int, int]:
    return {q: solve_cq(params.a, params.b, q) for q in primes}


# --- stage 1 ------------------------------------------------------------------


@dataclass(frozen=True)
class Stage1Result:
    residues: ResidueSystem
    primed: SurvivorSet
    doubleprimed: SurvivorSet
    attempts: int
    threshold: float


def stage1_choose_d(params: SieveParams, rng: np.random.Generator | None = None, max_retries: int = 64) -> Stage1Result:
    """Random d mod P(z) with at most 2 sigma(z) y survivors on each side."""
    if max_retries < 1:
        raise ValueError("max_retries must be at least 1")
    rng = rng if rng is not None else np.random.default_rng(params.seed)
    primes = sieve_primes_q(0, params.z, params.pc)
    cq = _cq_table(params, primes)
    threshold = 2 * params.sigma * params.y
    best = None
    for attempt in range(1, max_retries + 1):
        residues = {q: int(rng.integers(q)) for q in primes}
        sp = survivors(params, PRIMED, residues, cq)
        sdp = survivors(params, DOUBLEPRIMED, residues, cq)
        worst = max(len(sp), len(sdp))
        if best is None or worst < best[0]:
            best = (worst, residues)
        if worst <= threshold:
            return Stage1Result(ResidueSystem(residues), sp, sdp, attempt, threshold)
    raise Stage1Error(
        f"no draw met the survivor bound {threshold:.1f} in {max_retries} attempts",
        best_max_survivors=best[0],
        best_residues=best[1],
    )


# --- stage 2 ------------------------------------------------------------------


@dataclass(frozen=True)
class CoverAssignment:
    choices: dict[int, int]  # q -> n_q
    sides: dict[int, str]  # q -> side
    H_of: dict[int, float]  # q -> H_q
    residues: ResidueSystem  # q -> d mod q implied by n_q
    covered: dict[str, tuple[int, ...]]  # side -> survivors in the union of e_q
    leftovers: dict[str, tuple[int, ...]]  # side -> survivors of every stage-1/2 prime
    flags: dict[str, Any] = field(default_factory=dict)

    def cover_set(self, q: int, c: int, J: int) -> list[int]:
        return analysis.ap_members(q, c, self.choices[q], J, self.sides[q])


def assign_sides(blocks: list[analysis.QBlock]) -> tuple[list[tuple[int, analysis.QBlock]], bool]:
    """Pair every medium prime with its block, in processing order (large H first).

    Sides follow the parity of the H exponent; if that leaves one side with no
    primes while the other has some, primes are dealt round-robin instead.
    """
    ordered = []
    for blk in sorted(blocks, key=lambda b: -b.H):
        for q in sorted(blk.primes, reverse=True):
            ordered.append((q, blk))
    sides = {blk.side for _, blk in ordered}
    if len(ordered) >= 2 and len(sides) == 1:
        dealt = [
            (q, analysis.QBlock(blk.H, blk.j, blk.primes, PRIMED if i % 2 == 0 else DOUBLEPRIMED))
            for i, (q, blk) in enumerate(ordered)
        ]
        return dealt, True
    return ordered, False


def _candidate_range(side: str, K: float, y: int) -> tuple[int, int]:
    # primed: -(K+1)y < n <= y ; doubleprimed: -y <= n < (K+1)y
    if side == PRIMED:
        return math.floor(-(K + 1) * y) + 1, y
    return -y, math.ceil((K + 1) * y) - 1


def _greedy_choice(uncovered: np.ndarray, q: int, c: int, J: int, side: str, lo: int, hi: int) -> int:
    """n in [lo, hi] whose two progressions hit the most uncovered values; smallest n on ties."""
    if uncovered.size == 0:
        return lo
    step = q if side == PRIMED else -q
    h = np.arange(1, J + 1, dtype=np.int64)
    starts = np.concatenate([uncovered[:, None] - step * h[None, :], uncovered[:, None] - c - step * h[None, :]], axis=1)
    starts = starts.ravel()
    starts = starts[(starts >= lo) & (starts <= hi)]
    if starts.size == 0:
        return lo
    scores = np.bincount(starts - lo, minlength=hi - lo + 1)
    return lo + int(np.argmax(scores))


def _lambda_vector(
    params: SieveParams,
    q: int,
    c: int,
    H: float,
    side: str,
    stage1: ResidueSystem,
    cq: dict[int, int],
    lo: int,
    hi: int,
) -> np.ndarray:
    """lambda(H; q, n) for every n in [lo, hi], vectorised over n."""
    J = math.floor(params.K * H)
    cut = H**params.M
    small = {p: r for p, r in stage1.residues.items() if p <= cut}
    window = {p: r for p, r in stage1.residues.items() if p > cut}
    sigma2 = math.prod(1 - 2 / p for p in window)
    n = np.arange(lo, hi + 1, dtype=np.int64)
    if J == 0:
        return np.ones(n.shape)
    step = q if side == PRIMED else -q
    h = np.arange(1, J + 1, dtype=np.int64)
    members = np.concatenate([n[:, None] + step * h, n[:, None] + c + step * h], axis=1)
    in_s1 = sieve_mask(members, side, small, cq, params.N)
    in_s2 = sieve_mask(members, side, window, cq, params.N)
    ok = np.all(in_s2 | ~in_s1, axis=1)
    size = in_s1.sum(axis=1)
    return np.where(ok, sigma2 ** (-size.astype(float)), 0.0)


def stage2_cover(
    params: SieveParams,
    survivors_p: SurvivorSet,
    survivors_dp: SurvivorSet,
    stage1: ResidueSystem | None = None,
    strategy: str = "greedy",
    rng: np.random.Generator | None = None,
) -> CoverAssignment:
    """Choose a translate n_q for every medium prime and record what it covers.

    greedy: n_q maximises the number of still-uncovered survivors in the two
    progressions {n_q + alpha + s q h : 1 <= h <= [K H_q]}. randomized: n_q is
    drawn with probability proportional to lambda(H_q; q, n).
    """
    if strategy not in ("greedy", "randomized"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if strategy == "randomized":
        if stage1 is None:
            raise ValueError("randomized strategy needs the stage-1 residues")
        rng = rng if rng is not None else np.random.default_rng(params.seed)
    order, rebalanced = assign_sides(params.blocks)
    cq_all = _cq_table(params, [q for q, _ in order])
    if stage1 is not None:
        cq_all.update(_cq_table(params, stage1.primes))
    surv = {
        PRIMED: np.array(survivors_p.offsets, dtype=np.int64),
        DOUBLEPRIMED: np.array(survivors_dp.offsets, dtype=np.int64),
    }
    alive = {s: np.ones(len(v), dtype=bool) for s, v in surv.items()}
    covered = {s: np.zeros(len(v), dtype=bool) for s, v in surv.items()}
    choices, sides, H_of, residues = {}, {}, {}, {}
    flags: dict[str, Any] = {"side_rebalanced": rebalanced}
    fallback = 0
    for q, blk in order:
        side, H = blk.side, blk.H
        c = cq_all[q]
        J = math.floor(params.K * H)
        lo, hi = _candidate_range(side, params.K, params.y)
        vals = surv[side]
        if strategy == "greedy":
            n_q = _greedy_choice(vals[alive[side]], q, c, J, side, lo, hi)
        else:
            w = _lambda_vector(params, q, c, H, side, stage1, cq_all, lo, hi)
            total = w.sum()
            if total > 0:
                n_q = lo + int(rng.choice(len(w), p=w / total))
            else:
                fallback += 1
                n_q = lo + int(rng.integers(len(w)))
        choices[q], sides[q], H_of[q] = n_q, side, H
        r = n_q % q if side == PRIMED else (-params.N - n_q) % q
        residues[q] = r
        e_q = np.isin(vals, analysis.ap_members(q, c, n_q, J, side))
        covered[side] |= e_q
        alive[side] &= sieve_mask(vals, side, {q: r}, cq_all, params.N)
    if strategy == "randomized":
        flags["lambda_uniform_fallbacks"] = fallback
    leftovers = {s: tuple(int(v) for v in surv[s][alive[s]]) for s in surv}
    n_surv = sum(len(v) for v in surv.values())
    n_left = sum(len(v) for v in leftovers.values())
    flags["leftover_fraction"] = n_left / n_surv if n_surv else 0.0
    flags["eta"] = params.eta
    return CoverAssignment(
        choices,
        sides,
        H_of,
        ResidueSystem(residues),
        {s: tuple(int(v) for v in surv[s][covered[s]]) for s in surv},
        leftovers,
        flags,
    )


# --- stage 3 ------------------------------------------------------------------


def large_prime_pools(params: SieveParams) -> tuple[list[int], list[int]]:
    """D' = class primes in (x/2, 3x/4], D'' = class primes in (3x/4, x]."""
    primes = sieve_primes_q(0, params.x, params.pc)
    d1 = [q for q in primes if 2 * q > params.x and 4 * q <= 3 * params.x]
    d2 = [q for q in primes if 4 * q > 3 * params.x]
    return d1, d2


def stage3_cleanup(params: SieveParams, leftovers_p, leftovers_dp) -> ResidueSystem:
    """Give every leftover its own large prime (first fit, both lists ascending)."""
    pool_p, pool_dp = large_prime_pools(params)
    left_p, left_dp = sorted(leftovers_p), sorted(leftovers_dp)
    deficit_p = max(0, len(left_p) - len(pool_p))
    deficit_dp = max(0, len(left_dp) - len(pool_dp))
    if deficit_p or deficit_dp:
        raise CleanupDeficit(
            f"not enough large primes: deficit {deficit_p} (primed), {deficit_dp} (doubleprimed)",
            deficit_primed=deficit_p,
            deficit_doubleprimed=deficit_dp,
            leftovers_primed=len(left_p),
            leftovers_doubleprimed=len(left_dp),
        )
    residues = {q: s % q for s, q in zip(left_p, pool_p)}
    residues.update({q: (-params.N - s) % q for s, q in zip(left_dp, pool_dp)})
    return ResidueSystem(residues)


# --- assembly and certificates -------------------------------------------------


@dataclass
class CoverCertificate:
    params: SieveParams
    stages: dict[str, list[tuple[int, int]]]
    interval_1: tuple[int, int]
    interval_2: tuple[int, int]
    n1: int
    n2: int
    witnesses: dict[int, int]
    flags: dict[str, Any] = field(default_factory=dict)

    @property
    def m(self) -> int:
        """Half-width of the odd-length strings centred at n1 and n2."""
        return min(self.n1 - self.interval_1[0], self.interval_1[1] - self.n1)

    @property
    def centered_1(self) -> tuple[int, int]:
        return self.n1 - self.m, self.n1 + self.m

    @property
    def centered_2(self) -> tuple[int, int]:
        return self.n2 - self.m, self.n2 + self.m

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "stages": {k: [[str(q), str(r)] for q, r in v] for k, v in self.stages.items()},
            "interval_1": [str(v) for v in self.interval_1],
            "interval_2": [str(v) for v in self.interval_2],
            "centered_1": [str(v) for v in self.centered_1],
            "centered_2": [str(v) for v in self.centered_2],
            "n1": str(self.n1),
            "n2": str(self.n2),
            "witnesses": [[str(n), str(q)] for n, q in sorted(self.witnesses.items())],
            "flags": self.flags,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, d: dict) -> CoverCertificate:
        return cls(
            params=SieveParams.from_json(d["params"]),
            stages={k: [(int(q), int(r)) for q, r in v] for k, v in d["stages"].items()},
            interval_1=tuple(int(v) for v in d["interval_1"]),
            interval_2=tuple(int(v) for v in d["interval_2"]),
            n1=int(d["n1"]),
            n2=int(d["n2"]),
            witnesses={int(n): int(q) for n, q in d["witnesses"]},
            flags=dict(d.get("flags", {})),
        )

    @classmethod
    def loads(cls, text: str) -> CoverCertificate:
        return cls.from_json(json.loads(text))


def lift_d1(d: int, P: int, N: int) -> tuple[int, bool]:
    """Representative of d mod P in [-0.3N, -0.2N]; else the one nearest -N/4 (relaxed)."""
    lower = -((3 * N) // 10)  # ceil(-0.3 N)
    upper = -((2 * N + 9) // 10)  # floor(-0.2 N)
    d1 = lower + (d - lower) % P
    if d1 <= upper:
        return d1, False
    k = math.floor((Fraction(-N, 4) - d) / P + Fraction(1, 2))
    return d + k * P, True


def assemble(
    params: SieveParams,
    stage1_rs: ResidueSystem,
    stage2: CoverAssignment,
    stage3_rs: ResidueSystem,
) -> CoverCertificate:
    """CRT-combine all residues, place the intervals and attach a witness to every n."""
    pc = params.pc
    all_primes = sieve_primes_q(0, params.x, pc)
    chosen = stage1_rs.merged(stage2.residues, stage3_rs)
    filler = ResidueSystem({q: 0 for q in all_primes if q not in chosen.primes})
    full = chosen.merged(filler)
    crt = full.crt()
    d1, relaxed = lift_d1(crt.combined_d, crt.combined_P, params.N)
    d2 = -d1
    y, N = params.y, params.N
    I1 = (d2 + 1, d2 + y)
    I2 = (N - d2 - y, N - d2 - 1)
    flags = {
        "range_relaxed": relaxed,
        "primorial_le_N_over_10": crt.combined_P * 10 <= N,
        "primorial_le_cuberoot_N": crt.combined_P**3 <= N,
        "h_range_asymptotic": params.grid.asymptotic_range_ok(params.x, params.delta),
        **{k: v for k, v in stage2.flags.items()},
        "filler_primes": len(filler),
    }
    if I1[0] < 1 or I2[1] > N or I2[0] < 1 or I1[1] > N:
        raise CoverageHole("intervals leave [1, N]", interval_1=I1, interval_2=I2, range_relaxed=relaxed)

    cq = _cq_table(params, all_primes)
    witnesses: dict[int, int] = {}
    holes = []
    for start, end in (I1, I2):
        found = np.zeros(end - start + 1, dtype=bool)
        wit = np.zeros(end - start + 1, dtype=np.int64)
        k = np.arange(end - start + 1, dtype=np.int64)
        for q in all_primes:
            t = (start % q + k) % q
            hit = ~found & ((t == 0) | (t == cq[q]))
            wit[hit] = q
            found |= hit
        for i in range(end - start + 1):
            if found[i]:
                witnesses[start + i] = int(wit[i])
            else:
                holes.append(start + i)
    if holes:
        raise CoverageHole(f"coverage hole at {len(holes)} positions", holes=holes)
    stages = {
        "stage1": sorted(stage1_rs.residues.items()),
        "stage2": sorted(stage2.residues.residues.items()),
        "stage3": sorted(stage3_rs.residues.items()),
        "filler": sorted(filler.residues.items()),
    }
    return CoverCertificate(params, stages, I1, I2, d2 + y // 2, N - d2 - y // 2, witnesses, flags)


def verify_certificate(cert: CoverCertificate, params: SieveParams | None = None) -> tuple[bool, list[str]]:
    """Re-check a certificate from scratch; returns (ok, violations)."""
    p = params or cert.params
    a, b, x, N = p.a, p.b, p.x, p.N
    bad: list[str] = []
    if cert.n1 + cert.n2 != N:
        bad.append(f"n1 + n2 = {cert.n1 + cert.n2} != N")
    for name, (lo, hi), n in (("interval_1", cert.interval_1, cert.n1), ("interval_2", cert.interval_2, cert.n2)):
        if lo > hi:
            bad.append(f"{name} is empty")
        if lo < 1 or hi > N:
            bad.append(f"{name} not inside [1, N]")
        if not lo <= n <= hi:
            bad.append(f"{name} does not contain its centre")
    members = [n for lo, hi in (cert.interval_1, cert.interval_2) for n in range(lo, hi + 1)]
    checked_q: dict[int, str | None] = {}
    for n in members:
        q = cert.witnesses.get(n)
        if q is None:
            bad.append(f"no witness for {n}")
            continue
        if q not in checked_q:
            why = None
            if not is_prime(q):
                why = "not prime"
            elif q % 4 != 3:
                why = "not 3 mod 4"
            elif q <= a + abs(b):
                why = "not above a+|b|"
            elif q > x:
                why = "exceeds x"
            checked_q[q] = why
        if checked_q[q]:
            bad.append(f"witness {q} for {n}: {checked_q[q]}")
            continue
        if (n * (a * n + b)) % q:
            bad.append(f"witness {q} does not divide n(an+b) at n={n}")
            continue
        if not pair_bad(n, a, b):
            bad.append(f"pair_bad fails at {n}")
    return not bad, bad


# --- pipeline -------------------------------------------------------------------


@dataclass
class PipelineRun:
    params: SieveParams
    stage1: Stage1Result
    stage2: CoverAssignment
    stage3: ResidueSystem
    certificate: CoverCertificate


def run_pipeline(params: SieveParams, strategy: str = "greedy", max_retries: int = 64) -> PipelineRun:
    """Run all stages from a single generator seeded with params.seed."""
    rng = np.random.default_rng(params.seed)
    s1 = stage1_choose_d(params, rng, max_retries)
    log.info("stage1: %d/%d survivors after %d draws", len(s1.primed), len(s1.doubleprimed), s1.attempts)
    s2 = stage2_cover(params, s1.primed, s1.doubleprimed, s1.residues, strategy, rng)
    log.info("stage2: leftovers %s", {k: len(v) for k, v in s2.leftovers.items()})
    s3 = stage3_cleanup(params, s2.leftovers[PRIMED], s2.leftovers[DOUBLEPRIMED])
    cert = assemble(params, s1.residues, s2, s3)
    return PipelineRun(params, s1, s2, s3, cert)

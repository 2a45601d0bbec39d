"""Acceptance checks, one test per criterion.

Each test prints a PASS/FAIL line; the lines are also collected into the
pytest terminal summary. Run directly with `python tests/test_acceptance.py`.
"""

import itertools
import json
import math
import random
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from sqgaps import analysis, cli
from sqgaps.analysis import DOUBLEPRIMED, PRIMED
from sqgaps.arith import PrimeClass, ResidueSystem, sieve_primes_q
from sqgaps.membership import is_in_R, is_in_S, max_gap, pair_bad

RESULTS: list[str] = []
PC = PrimeClass.for_form(2, 1)


def report(k, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] acceptance {k}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


# 1 -------------------------------------------------------------------------------


def test_criterion_1_constant():
    t0 = time.perf_counter()
    delta = 1 / 325565
    f = analysis.f_rho(delta)
    c = analysis.compute_C(0.5, 1e-12)
    f_hp = analysis.f_rho_mp(delta, dps=70)
    c_hp = analysis.compute_C(0.5, high_precision=True, dps=70)
    margin, margin_hp = 0.5 - f, 0.5 - f_hp
    same_sign = (margin > 0) == (margin_hp > 0) and (c > delta) == (c_hp > delta)
    dt = time.perf_counter() - t0
    ok = f < 0.5 and c > delta and same_sign and dt < 1.0
    report(1, ok, f"f_rho(1/325565)={f:.17g}, C(1/2)={c:.17g} > {delta:.17g}, margin {margin:.3e} (hp {float(margin_hp):.3e}), {dt:.2f}s")


# 2 -------------------------------------------------------------------------------


def test_criterion_2_membership_oracle():
    t0 = time.perf_counter()
    limit = 10**5
    in_R = [False] * (limit + 1)
    in_S = [False] * (limit + 1)
    for x in range(math.isqrt(limit) + 1):
        for y in range(x, math.isqrt(limit - x * x) + 1):
            n = x * x + y * y
            in_S[n] = True
            if math.gcd(x, y) == 1:
                in_R[n] = True
    bad = [n for n in range(1, limit + 1) if is_in_R(n) != in_R[n] or is_in_S(n) != in_S[n]]
    dt = time.perf_counter() - t0
    report(2, not bad and dt < 30, f"{len(bad)} mismatches for n <= {limit}, {dt:.1f}s")


# 3 -------------------------------------------------------------------------------


def naive_in_R(n):
    if n % 4 == 0:
        return False
    m, p = n, 3
    while m % 2 == 0:
        m //= 2
    while p * p <= m:
        if m % p == 0:
            if p % 4 == 3:
                return False
            while m % p == 0:
                m //= p
        p += 2
    return m == 1 or m % 4 == 1


def naive_max_gap(N):
    prev, best, arg, n = None, 0, None, 1
    while True:
        if naive_in_R(n):
            if prev is not None and n - prev > best:
                best, arg = n - prev, prev
            if n > N:
                return best, arg
            prev = n
        n += 1


PINNED_GAPS = {30: (8, 17), 10**3: (16, 709), 10**4: (25, 1825), 10**5: (44, 77573)}


def test_criterion_3_gap_values():
    t0 = time.perf_counter()
    rows, ok = [], True
    for N, pinned in PINNED_GAPS.items():
        rep = max_gap("R", N)
        naive = naive_max_gap(N)
        ok &= (rep.max_gap, rep.argmax_element) == naive == pinned
        rows.append(f"G_R({N})={rep.max_gap}@{rep.argmax_element}")
    dt = time.perf_counter() - t0
    report(3, ok and dt < 60, f"{', '.join(rows)} agree with naive scan, {dt:.1f}s")


# 4 -------------------------------------------------------------------------------


def test_criterion_4_exact_probability():
    rng = random.Random(404)
    pool = sieve_primes_q(0, 120, PC)
    done = 0
    worst_P = 0
    while done < 50:
        k = rng.randrange(1, 5)
        window = sorted(rng.sample(pool, k))
        P = math.prod(window)
        if P > 10**6:
            continue
        ctx = analysis.weight_context(2, 1, primes=window)
        U = rng.sample(range(-60, 61), rng.randrange(0, 5))
        if any(len({(u - a) % q for u in U for a in ctx.I[q]}) >= q for q in window):
            continue
        d = np.arange(P, dtype=np.int64)
        alive = np.ones(P, dtype=bool)
        for q in window:
            c = ctx.I[q][1]
            for u in U:
                t = (u - d) % q
                alive &= (t != 0) & (t != c)
        empirical = Fraction(int(alive.sum()), P)
        assert analysis.prob_subset(U, ctx, exact=True) == empirical, (window, U)
        worst_P = max(worst_P, P)
        done += 1
    report(4, True, f"prob_subset == enumeration over all d2 for {done} instances (largest modulus {worst_P})")


# 5 -------------------------------------------------------------------------------


def _systems(primes):
    for rs in itertools.product(*(range(q) for q in primes)):
        yield ResidueSystem(dict(zip(primes, rs)))


def test_criterion_5_lambda_normalization():
    rng = random.Random(55)
    cases = 0
    envelopes = []
    for window, d1_primes in ([(11, 19), (7,)], [(11, 19, 23), (7,)], [(19, 23), (7, 11)], [(23, 31), ()]):
        P = math.prod(window)
        assert P <= 10**5
        ctx = analysis.weight_context(2, 1, primes=window, K=2.0)
        for side in (PRIMED, DOUBLEPRIMED):
            for _ in range(2):
                H = rng.choice([1.0, 1.5, 2.0])
                q = rng.choice([43, 47, 59])
                n = rng.randrange(-30, 30)
                N = rng.randrange(10**6, 10**7)
                d1 = ResidueSystem({p: rng.randrange(p) for p in d1_primes})
                I1 = {p: (0, analysis.solve_cq(2, 1, p)) for p in d1_primes}
                J = math.floor(ctx.K * H)
                ap = [m for m in analysis.ap_members(q, analysis.solve_cq(2, 1, q), n, J, side) if analysis.survives(m, side, d1, I1, N)]
                U = ap if side == PRIMED else [m + N for m in ap]
                mean = sum(analysis.lambda_weight(H, q, n, side, d1, d2, ctx, N, exact=True) for d2 in _systems(window)) / P
                target = analysis.prob_subset(U, ctx, exact=True) * ctx.sigma2_exact ** -len(ap)
                assert mean == target, (window, side, H, q, n)
                envelopes.append(abs(float(target) - 1))
                cases += 1
    report(5, True, f"exact mean of lambda == prob_subset * sigma2^-#AP on {cases} cases (max |mean-1| = {max(envelopes):.3f}, diagnostic)")


# 6 -------------------------------------------------------------------------------

FROZEN_SHA256 = "2d8893a6a4362e4bb73b7fe9f21375d54eda5a6ebd2bd5889dfab05115727d52"


def _independent_bad(n, a, b, qs):
    # some class prime <= x divides n or a n + b
    return any(n % q == 0 or (a * n + b) % q == 0 for q in qs)


def test_criterion_6_end_to_end(tmp_path, capsys):
    import hashlib

    t0 = time.perf_counter()
    codes = {}
    qs = sieve_primes_q(0, 5000, PC)
    for seed in range(100):
        out = tmp_path / f"c{seed}.json"
        code = cli.main(["construct", "--seed", str(seed), "--out", str(out)])
        codes[seed] = code
        if code != 0:
            continue
        cert = json.loads(out.read_text())
        a, b, N = int(cert["params"]["a"]), int(cert["params"]["b"]), int(cert["params"]["N"])
        n1, n2 = int(cert["n1"]), int(cert["n2"])
        assert n1 + n2 == N, seed
        for lo, hi in (cert["interval_1"], cert["interval_2"]):
            for n in range(int(lo), int(hi) + 1):
                assert pair_bad(n, a, b), (seed, n)
                assert _independent_bad(n, a, b, qs), (seed, n)
        if seed == 0:
            assert hashlib.sha256(out.read_bytes()).hexdigest() == FROZEN_SHA256
    capsys.readouterr()
    dt = time.perf_counter() - t0
    ok_runs = sum(c == 0 for c in codes.values())
    others = sorted(set(codes.values()) - {0})
    ok = ok_runs > 0 and set(others) <= {cli.EXIT_INFEASIBLE} and dt < 300
    report(6, ok, f"{ok_runs}/100 runs exit 0 and are sound, the rest exit {others or '-'} (stage-3 deficit); frozen seed 0 matches, {dt:.1f}s")


# 7 -------------------------------------------------------------------------------


def _direct_E(A, m, window):
    """Sum over squarefree n > 1 of A^nu(n)/n [m mod n in I_n - I_n], I_n built by CRT."""
    if m == 0:
        return Fraction(0)
    total = Fraction(0)
    for k in range(1, len(window) + 1):
        for sub in itertools.combinations(window, k):
            n = math.prod(sub)
            residues = set()
            for choice in itertools.product(*[(0, analysis.solve_cq(2, 1, q)) for q in sub]):
                r = 0
                for q, c in zip(sub, choice):
                    M = n // q
                    r += c * M * pow(M, -1, q)
                residues.add(r % n)
            diffs = {(u - v) % n for u in residues for v in residues}
            if m % n in diffs:
                total += Fraction(A) ** k / n
    return total


def test_criterion_7_E_properties():
    t0 = time.perf_counter()
    rng = random.Random(77)
    pool = sieve_primes_q(0, 50, PC)  # 7 11 19 23 31 43 47
    big = analysis.weight_context(2, 1, primes=sieve_primes_q(0, 200, PC))
    assert analysis.e_weight(3, 0, big, exact=True) == 0
    for _ in range(1000):
        m = rng.randrange(1, 10**9)
        assert analysis.e_weight(Fraction(5, 2), m, big, exact=True) == analysis.e_weight(Fraction(5, 2), -m, big, exact=True)
    for _ in range(1000):
        m = rng.randrange(-10**6, 10**6)
        A1 = Fraction(rng.randrange(100, 500), 100)
        A2 = A1 + Fraction(rng.randrange(1, 500), 100)
        assert analysis.e_weight(A1, m, big, exact=True) <= analysis.e_weight(A2, m, big, exact=True)
    windows = 0
    for k in range(1, 5):
        for window in itertools.combinations(pool, k):
            ctx = analysis.weight_context(2, 1, primes=window)
            P = math.prod(window)
            ms = [rng.randrange(-P, P) for _ in range(6)] + [0, P, 1]
            # also hit the difference sets on purpose
            ms += [analysis.solve_cq(2, 1, window[0]), -analysis.solve_cq(2, 1, window[-1])]
            for m in ms:
                assert analysis.e_weight(2, m, ctx, exact=True) == _direct_E(2, m, window), (window, m)
            windows += 1
    dt = time.perf_counter() - t0
    report(7, dt < 10, f"E_A(0)=0, symmetry and monotonicity on 1000 draws each, product == direct sum on all {windows} windows of <= 4 primes, {dt:.1f}s")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))

import math
import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from sqgaps.arith import (
    PrimeClass,
    ResidueSystem,
    crt_combine,
    factorize,
    is_prime,
    primes_up_to,
    sieve_primes_q,
    solve_cq,
)


@pytest.mark.parametrize(
    "limit, expected",
    [(10, [2, 3, 5, 7]), (2, [2]), (30, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]), (1, []), (-5, [])],
)
def test_primes_up_to_examples(limit, expected):
    assert primes_up_to(limit) == expected


def test_primes_up_to_matches_sympy():
    assert primes_up_to(10**5) == list(sympy.primerange(2, 10**5 + 1))


def test_sieve_primes_q_examples():
    pc = PrimeClass.for_form(2, 1)
    assert pc.lower_exclusive == 3
    assert sieve_primes_q(3, 40, pc) == [7, 11, 19, 23, 31]
    assert sieve_primes_q(0, 3, pc) == []
    assert sieve_primes_q(40, 60, pc) == [43, 47, 59]
    with pytest.raises(ValueError):
        sieve_primes_q(10, 5, pc)


def test_sieve_primes_q_is_filtered_prime_list():
    for lo_ex in (0, 3, 10, 50):
        pc = PrimeClass(lo_ex)
        got = sieve_primes_q(0, 5000, pc)
        assert got == [p for p in primes_up_to(5000) if p % 4 == 3 and p > lo_ex]
        assert all(q in pc for q in got)
    assert 5 not in PrimeClass(3) and 3 not in PrimeClass(3) and 21 not in PrimeClass(3)


@pytest.mark.parametrize("a, b, q, c", [(2, 1, 7, 3), (2, 1, 11, 5), (3, 2, 7, 4)])
def test_solve_cq_examples(a, b, q, c):
    assert solve_cq(a, b, q) == c


def test_solve_cq_all_small_triples():
    qs = sieve_primes_q(0, 10**4, PrimeClass(0))
    rng = random.Random(5)
    for _ in range(3000):
        q = rng.choice(qs)
        a = rng.randrange(2, 40)
        b = rng.choice([v for v in range(-40, 41) if v % a])
        if a + abs(b) >= q:
            continue
        c = solve_cq(a, b, q)
        assert 1 <= c < q and (a * c + b) % q == 0


def test_solve_cq_rejects_divisible():
    with pytest.raises(ValueError):
        solve_cq(7, 1, 7)
    with pytest.raises(ValueError):
        solve_cq(2, 14, 7)


@pytest.mark.parametrize("n, expected", [(1, []), (360, [(2, 3), (3, 2), (5, 1)]), (97, [(97, 1)])])
def test_factorize_examples(n, expected):
    assert factorize(n) == expected


def test_factorize_zero_raises():
    with pytest.raises(ValueError):
        factorize(0)


def test_factorize_recomposes_exhaustively():
    for n in range(1, 30001):
        f = factorize(n)
        assert math.prod(p**e for p, e in f) == n
        assert [p for p, _ in f] == sorted(p for p, _ in f)


@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=1, max_value=10**6))
def test_factorize_recomposes_property(n):
    f = factorize(n)
    assert math.prod(p**e for p, e in f) == n
    assert all(is_prime(p) for p, _ in f)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=2, max_value=2**62))
def test_factorize_matches_sympy_large(n):
    assert factorize(n) == sorted(sympy.factorint(n).items())


def test_factorize_semiprime_beyond_trial_range():
    p, q = 1000003, 998244353
    assert factorize(p * q * q) == [(p, 1), (q, 2)]
    r = 2**61 - 1
    assert factorize(r * 1000033) == [(1000033, 1), (r, 1)]


def test_is_prime_matches_sieve():
    table = set(primes_up_to(200000))
    assert all(is_prime(n) == (n in table) for n in range(-3, 200001))


@pytest.mark.parametrize(
    "n",
    [
        3215031751,  # strong pseudoprime to 2, 3, 5, 7
        3825123056546413051,  # strong pseudoprime to the first nine prime bases
        318665857834031151167461,  # strong pseudoprime to the first twelve prime bases
        561 * 1105,
        (2**31 - 1) ** 2,
        (2**89 - 1) * (2**61 - 1),
    ],
)
def test_is_prime_rejects_hard_composites(n):
    assert not is_prime(n)


@pytest.mark.parametrize("n", [2**61 - 1, 2**89 - 1, 2**127 - 1, 10**30 + 57, 2**521 - 1])
def test_is_prime_accepts_large_primes(n):
    assert sympy.isprime(n)
    assert is_prime(n)


def test_is_prime_agrees_with_sympy_above_mr_bound():
    rng = random.Random(11)
    for _ in range(400):
        n = rng.randrange(10**25, 10**40) | 1
        assert is_prime(n) == sympy.isprime(n)


@pytest.mark.parametrize(
    "pairs, d, P",
    [([(1, 3), (2, 5)], 7, 15), ([(0, 7)], 0, 7), ([(3, 7), (5, 11), (1, 19)], 115, 1463)],
)
def test_crt_examples(pairs, d, P):
    v = crt_combine(pairs)
    assert (v.combined_d, v.combined_P) == (d, P)
    assert v.satisfies_all()


def test_crt_errors():
    with pytest.raises(ValueError):
        crt_combine([(1, 7), (2, 7)])
    with pytest.raises(ValueError):
        crt_combine([(7, 7)])
    with pytest.raises(ValueError):
        crt_combine([(-1, 7)])


def test_crt_empty_is_trivial():
    v = crt_combine([])
    assert (v.combined_d, v.combined_P) == (0, 1)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_crt_round_trip(data):
    qs = data.draw(st.lists(st.sampled_from(primes_up_to(3000)), min_size=1, max_size=40, unique=True))
    pairs = [(data.draw(st.integers(0, q - 1)), q) for q in qs]
    v = crt_combine(pairs)
    assert 0 <= v.combined_d < v.combined_P == math.prod(qs)
    assert all(v.combined_d % q == r for r, q in pairs)


def test_crt_handles_huge_moduli():
    qs = sieve_primes_q(0, 5000, PrimeClass(3))
    rng = random.Random(2)
    pairs = [(rng.randrange(q), q) for q in qs]
    v = crt_combine(pairs)
    assert v.combined_P.bit_length() > 3000
    assert v.satisfies_all()


def test_residue_system_merge_and_crt():
    a = ResidueSystem({7: 3, 11: 5})
    b = ResidueSystem({19: 1})
    m = a.merged(b)
    assert m.primes == {7, 11, 19} and len(m) == 3 and m[19] == 1
    assert m.crt().combined_d == 115
    with pytest.raises(ValueError):
        a.merged(ResidueSystem({7: 0}))
    with pytest.raises(ValueError):
        ResidueSystem({7: 9})

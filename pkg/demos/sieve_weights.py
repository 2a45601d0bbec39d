# Density products, error weights E_A and exact survival probabilities.
import math
from fractions import Fraction

from sqgaps.analysis import count_N, e_weight, prob_subset, sigma_product, weight_context
from sqgaps.arith import PrimeClass

pc = PrimeClass.for_form(2, 1)  # primes q = 3 mod 4, q > 3
for x in (10**2, 10**3, 10**4, 10**5):
    s = sigma_product(x, pc)
    print(f"sigma({x:>6}) = {s:.5f}   sigma * log x = {s * math.log(x):.4f}")

# E_A(m) is a product over the window primes where m hits {0, c_q, -c_q}.
ctx = weight_context(2, 1, primes=[7, 11, 19, 23])
for m in (0, 1, 3, 4, 7 * 11, 3 * 11 * 19):
    print(f"E_2({m}) = {e_weight(2, m, ctx, exact=True)}")

# N(v): how many class primes divide v(2v+1)(-2v+1).
print("N(v) for v = 1..12:", [count_N(v, 2, 1) for v in range(1, 13)])

# Probability that a set U survives a uniform shift mod the window primes.
U = [0, 5, 9]
p = prob_subset(U, ctx, exact=True)
print(f"P(U survives) = {p} = {float(p):.5f}; independent guess sigma^|U| = {float(ctx.sigma2_exact ** len(U)):.5f}")
assert p == math.prod(1 - Fraction(len({(u - a) % q for u in U for a in ctx.I[q]}), q) for q in ctx.prime_window)

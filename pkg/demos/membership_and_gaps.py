# Which integers are sums of two (coprime) squares, and how far apart do they get?
import numpy as np

from sqgaps import classify_range, is_in_R, is_in_S, max_gap

# R needs n = 2^a m with a <= 1 and m built from primes = 1 mod 4.
# S only needs every prime = 3 mod 4 to appear to an even power.
for n in (1, 9, 21, 25, 45, 50):
    print(f"{n:>3}  in R: {is_in_R(n)!s:5}  in S: {is_in_S(n)}")

# A sieve classifies a whole window at once.
mask = classify_range(10**9, 10**9 + 99)
print("R members in [1e9, 1e9+99]:", mask.members("R").tolist())
print("density of S there:", mask.in_S.mean())

# Maximal gaps G(N) grow slowly; compare with log N.
for N in (10**3, 10**4, 10**5, 10**6):
    r, s = max_gap("R", N), max_gap("S", N)
    print(f"N={N:>8}  G_R={r.max_gap:>3} at {r.argmax_element:>7}   G_S={s.max_gap:>3}   log N={np.log(N):.1f}")

# Gaps of the set where both n and 2n+1 lie in R are much longer.
good = max_gap("good", 10**5, a=2, b=1)
print("pair-good set, N=1e5:", good.summary())

# C(rho) is the supremum of delta with 6 * 10^(2 delta) / log(1/(2 delta)) < rho.
import mpmath

from sqgaps.analysis import compute_C, estimate_Cprime, f_rho, f_rho_mp

delta = 1 / 325565
print("f_rho(1/325565)        =", f"{f_rho(delta):.17g}")
print("same, 70 digits        =", mpmath.nstr(f_rho_mp(delta), 40))
c = compute_C(0.5)
print("C(1/2)                 =", f"{c:.17g}", "  1/C(1/2) =", f"{1 / c:.6f}")
print("C(1/2), high precision =", mpmath.nstr(compute_C(0.5, high_precision=True), 40))

# The margin is tiny: about 2e-8 out of 1/2.
print("margin 1/2 - f_rho     =", 0.5 - f_rho(delta))

for rho in (0.5, 1, 2, 10):
    print(f"C({rho}) = {compute_C(rho):.6g}")

# Covering density C' needs to reach 10^(2 delta)/2; only extreme knobs get there.
need = 10 ** (2 * delta) / 2
for K, M, xi in [(4, 6.5, 1.5), (1e3, 6.01, 1.01), (1e9, 6 + 1e-9, 1 + 1e-9)]:
    v = estimate_Cprime(K, M, xi, delta)
    print(f"K={K:g} M={M} xi={xi}: C' = {v:.8f}  (need {need:.8f})  {'ok' if v >= need else 'short'}")

# Build two blocks of consecutive integers summing to N where every n has n(2n+1) outside R.
from sqgaps import construct

params = construct.derive_params(2, 1, 5000, y=200, z=20, K=4, xi=1.5, M=6.5, seed=0)
print(f"x={params.x}, y={params.y}, z={params.z}; N has {len(str(params.N))} digits")

run = construct.run_pipeline(params)
s1, s2 = run.stage1, run.stage2
print(f"stage 1: {len(s1.primed)} + {len(s1.doubleprimed)} survivors (bound {s1.threshold:.1f}, {s1.attempts} draw)")
print(f"stage 2: {len(s2.choices)} medium primes, leftovers {len(s2.leftovers['primed'])} + {len(s2.leftovers['doubleprimed'])}")
print(f"stage 3: {len(run.stage3)} large primes absorb the rest")

cert = run.certificate
ok, violations = construct.verify_certificate(cert)
print("verified:", ok)
print("n1 + n2 == N:", cert.n1 + cert.n2 == params.N)
print("centred strings have length", 2 * cert.m + 1)
for n in range(cert.interval_1[0], cert.interval_1[0] + 5):
    q = cert.witnesses[n]
    print(f"  ...{n % 10**8:08d}: {q} divides {'n' if n % q == 0 else '2n+1'}")
print("flags:", {k: v for k, v in cert.flags.items() if isinstance(v, bool)})

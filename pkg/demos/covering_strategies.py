# Greedy versus lambda-weighted random translates in stage 2.
from collections import Counter

import numpy as np

from sqgaps import construct

outcomes = {}
for strategy in ("greedy", "randomized"):
    tally = Counter()
    left = []
    for seed in range(20):
        p = construct.derive_params(2, 1, 5000, y=200, z=20, K=4, xi=1.5, M=6.5, seed=seed)
        rng = np.random.default_rng(seed)
        s1 = construct.stage1_choose_d(p, rng)
        s2 = construct.stage2_cover(p, s1.primed, s1.doubleprimed, s1.residues, strategy, rng)
        left.append(s2.flags["leftover_fraction"])
        try:
            construct.stage3_cleanup(p, s2.leftovers["primed"], s2.leftovers["doubleprimed"])
            tally["complete"] += 1
        except construct.CleanupDeficit:
            tally["deficit"] += 1
    outcomes[strategy] = tally
    print(f"{strategy:>10}: mean leftover fraction {np.mean(left):.3f}, {dict(tally)}")

# Greedy keeps far fewer leftovers, which is why it is the default.

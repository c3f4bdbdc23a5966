# Calibrating the flat-Dirichlet baseline against the tree prior.
#
# The two priors are comparable once they assign the same prior variance to
# an arbitrary complete ballot's probability. The closed form below is exact;
# the Monte Carlo columns confirm it by simulation.

import numpy as np

from rankedaudit import PriorConfig, complete_ballot_prior_variance, leaf_count, \
    match_dirichlet_a0

print(f"{'k':>3} {'partial':>8} {'tree a0':>8} {'matched a0prime':>16} "
      f"{'tree var':>12} {'flat var':>12}")
for k in (3, 4, 5):
    for partial in (False, True):
        for a0 in (1.0, 10.0):
            matched = match_dirichlet_a0(a0, k, partial)
            v_tree = complete_ballot_prior_variance(PriorConfig("dirichlet-tree", a0, partial), k)
            v_flat = complete_ballot_prior_variance(PriorConfig("dirichlet", matched, partial), k)
            print(f"{k:>3} {str(partial):>8} {a0:>8.1f} {matched:>16.6f} "
                  f"{v_tree:>12.3e} {v_flat:>12.3e}")

# Monte Carlo spot check for k=3 with termination branches: the complete
# ballot probability is a product of independent Beta branch marginals.
gen = np.random.default_rng(7)
n = 200_000
p = gen.beta(1.0, 2.0, size=n) * gen.beta(1.0, 2.0, size=n)
matched = match_dirichlet_a0(1.0, 3, True)
K = leaf_count(3, True)
q = gen.beta(matched, (K - 1) * matched, size=n)
print(f"\nMC check (k=3, partial, a0=1): tree var {p.var():.5f}  "
      f"matched flat var {q.var():.5f}  closed form {5 / 324:.5f}")

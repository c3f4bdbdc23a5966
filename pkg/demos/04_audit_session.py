# One ballot-polling audit, start to stop.
#
# A synthetic 5-candidate election with a solid winner stands in for the
# official count. We "draw" ballots in a random order, batch them into the
# session, and after each batch estimate the posterior probability that the
# reported winner is the true winner. The audit stops once that probability
# reaches the threshold.

import numpy as np

from rankedaudit import (AuditConfig, AuditSession, BallotMultiset, ElectionMeta,
                         PriorConfig, Roster, synthetic_ranked_ballots, tally_irv)

roster = Roster(("Ada", "Boole", "Curie", "Dirac", "Erdos"))
population = synthetic_ranked_ballots([4.5, 3.2, 2.4, 1.4, 0.9], 10_000,
                                      seed=42, partial_fraction=0.25)
reported = tally_irv(population, roster).winner
print(f"reported winner: {roster.name_of(reported)} "
      f"({population.total} ballots on file)\n")

session = AuditSession(
    ElectionMeta(roster, population.total, reported),
    AuditConfig(prior=PriorConfig("dirichlet-tree", a0=1.0, allow_partial=True),
                threshold=0.95, draws_per_estimate=100, seed=9),
)

types = sorted(dict(population.items()))
expanded = np.repeat(np.arange(len(types)), [population.count_of(t) for t in types])
order = np.random.default_rng(9).permutation(expanded)

drawn = 0
for batch_size in [10] * 30:
    batch = BallotMultiset()
    for idx in order[drawn:drawn + batch_size]:
        batch.add(types[idx])
    session.observe(batch)
    drawn += batch_size
    estimate = session.estimate_posterior()
    decision = session.decide()
    bar = "#" * int(round(40 * estimate.prob_reported_winner))
    print(f"n={drawn:>4}  P(winner)={estimate.prob_reported_winner:5.2f}  {bar}")
    if decision != "continue-sampling":
        print(f"\ndecision: {decision} after {drawn} ballots")
        break
else:
    print("\nthreshold not reached in 300 ballots; keep sampling")

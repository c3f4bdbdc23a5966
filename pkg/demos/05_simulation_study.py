# Comparing priors over repeated simulated audits.
#
# Every trial shuffles the same synthetic election and replays an audit,
# recording the posterior probability of the true winner as the sample grows.
# The bootstrap (a0 = 0) is erratic early; heavier priors respond more
# slowly. Artifacts (two CSVs and an SVG of the trajectory bands) land in
# demos/output/.

from pathlib import Path

from rankedaudit import (PriorConfig, Roster, TrialPlan, emit, run_trials_loaded, summarize,
                         synthetic_ranked_ballots)

roster = Roster(("Ada", "Boole", "Curie", "Dirac", "Erdos"))
population = synthetic_ranked_ballots([4.5, 3.2, 2.4, 1.4, 0.9], 10_000,
                                      seed=11, partial_fraction=0.25)

plan = TrialPlan(
    ballot_file="-", roster_file="-",
    priors=(PriorConfig("dirichlet-tree", 0.0, True),
            PriorConfig("dirichlet-tree", 1.0, True),
            PriorConfig("dirichlet-tree", 100.0, True)),
    with_matched_dirichlet=False,
    trials=15, max_sample=100, eval_step=10, draws=50, base_seed=11,
)
table = run_trials_loaded(roster, population, plan)
summary = summarize(table)

for label in table.labels():
    medians = {n: q50 for lab, n, _, q50, _ in summary.rows if lab == label}
    path = "  ".join(f"{n}:{medians[n]:.2f}" for n in sorted(medians))
    print(f"{label:<14s} median path  {path}")

out = Path(__file__).parent / "output"
for artifact in emit(table, summary, out):
    print("wrote", artifact)

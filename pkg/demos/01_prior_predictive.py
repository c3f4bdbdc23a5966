# How the ranking-trie prior behaves, before and after data.
#
# Three candidates, termination branches on: the prior spreads mass over all
# nine ballot types (six complete, three first-preference-only). Watching the
# predictive probabilities move as ballots arrive shows the conjugate update
# at work: every branch on an observed path gains weight.

from rankedaudit import PriorConfig, Roster, new_tree
from rankedaudit.dirtree import iter_leaf_types

roster = Roster(("Apple", "Berry", "Cherry"))
tree = new_tree(roster, PriorConfig("dirichlet-tree", a0=1.0, allow_partial=True))

types = list(iter_leaf_types(roster.k, allow_partial=True))


def show(title):
    print(f"\n{title}  (n = {tree.n})")
    for t in types:
        names = " > ".join(roster.name_of(c) for c in t)
        print(f"  {names:<28s} {tree.predictive_probability(t):.4f}")
    print(f"  total = {sum(tree.predictive_probability(t) for t in types):.6f}")


show("Prior predictive")

# A handful of ballots: two complete, one that stops after the first choice.
tree.update((0, 1, 2), 2)
tree.update((0,), 1)
tree.update((2, 0, 1), 1)
show("After 4 ballots")

# The bootstrap prior (a0 = 0) has no spread at all: only observed types
# can ever be imputed.
bootstrap = new_tree(roster, PriorConfig("dirichlet-tree", a0=0.0, allow_partial=True))
bootstrap.update((0, 1, 2), 3)
print("\nBootstrap predictive, after seeing only Apple > Berry > Cherry:")
print("  same type   ->", bootstrap.predictive_probability((0, 1, 2)))
print("  other type  ->", bootstrap.predictive_probability((1, 0, 2)))

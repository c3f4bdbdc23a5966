# A small instant-runoff count, round by round.
#
# Nobody clears a majority on first preferences, so the weakest candidate is
# eliminated and their ballots transfer until one remains. Ballots that run
# out of ranked continuing candidates become exhausted and leave the
# denominator.

from rankedaudit import BallotMultiset, Roster, tally_irv

roster = Roster(("Davis", "Einstein", "Franklin", "Gauss"))
ballots = BallotMultiset.from_pairs(
    [
        ((0, 1), 340),          # Davis > Einstein
        ((1, 2, 3, 0), 300),    # Einstein > Franklin > Gauss > Davis
        ((2, 1), 270),          # Franklin > Einstein
        ((3,), 90),             # Gauss only
    ],
    roster.k,
)

result = tally_irv(ballots, roster)
for i, (counts, exhausted) in enumerate(zip(result.rounds, result.exhausted), start=1):
    standing = ", ".join(f"{roster.name_of(c)}={v}" for c, v in sorted(counts.items()))
    print(f"round {i}: {standing}  (exhausted {exhausted})")
    print(f"  eliminated: {roster.name_of(result.elimination_order[i - 1])}")
print(f"winner: {roster.name_of(result.winner)}")

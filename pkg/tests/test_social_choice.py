import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankedaudit.ballots import BallotMultiset, Roster, canonicalize
from rankedaudit.social_choice import (FixedProfileTally, TiePolicy, tally_irv,
                                       tally_irv_arrays)

from .oracles import all_types, brute_irv

ROSTER3 = Roster(("A", "B", "C"))


def multiset(pairs, k):
    return BallotMultiset.from_pairs(pairs, k)


def test_single_candidate():
    roster = Roster(("Solo",))
    result = tally_irv(multiset([((0,), 5)], 1), roster)
    assert result.winner == 0
    assert result.elimination_order == ()


def test_hand_tally_winner_keeps_lead():
    ms = multiset([((0,), 6), ((1, 2), 3), ((2, 1), 2)], 3)
    result = tally_irv(ms, ROSTER3)
    assert result.winner == 0
    assert result.elimination_order == (2, 1)
    assert result.rounds[0] == {0: 6, 1: 3, 2: 2}
    assert result.rounds[1] == {0: 6, 1: 5}
    assert result.exhausted == (0, 0)


def test_hand_tally_transfer_overtakes():
    ms = multiset([((0,), 4), ((1, 2), 3), ((2, 1), 2)], 3)
    result = tally_irv(ms, ROSTER3)
    assert result.winner == 1
    assert result.elimination_order == (2, 0)


def test_exhausted_ballots_leave_denominator():
    ms = multiset([((0,), 4), ((1,), 3), ((2,), 2)], 3)
    result = tally_irv(ms, ROSTER3)
    assert result.winner == 0
    assert result.exhausted == (0, 2)
    assert result.rounds[1] == {0: 4, 1: 3}


def test_tie_roster_order_eliminates_latest():
    ms = multiset([((0, 1, 2), 2), ((1, 0, 2), 2), ((2, 0, 1), 2)], 3)
    result = tally_irv(ms, ROSTER3)
    # three-way tie at 2: candidate C (latest in roster order) goes first
    assert result.elimination_order[0] == 2


def test_tie_seeded_random_is_deterministic():
    ms = multiset([((0, 1, 2), 2), ((1, 0, 2), 2), ((2, 0, 1), 2)], 3)
    tie = TiePolicy("seeded-random", seed=7)
    first = tally_irv(ms, ROSTER3, tie)
    second = tally_irv(ms, ROSTER3, tie)
    assert first == second


def test_errors():
    with pytest.raises(ValueError):
        tally_irv(BallotMultiset(), ROSTER3)
    bad = BallotMultiset()
    bad.add((5,), 1)
    with pytest.raises(ValueError):
        tally_irv(bad, ROSTER3)


def test_invalid_tie_mode():
    with pytest.raises(ValueError):
        TiePolicy("coin-flip")


def _random_profile(rng, k, max_total):
    types = all_types(k, allow_partial=True)
    ms = BallotMultiset()
    total = rng.integers(1, max_total + 1)
    for _ in range(total):
        t = types[rng.integers(0, len(types))]
        ms.add(canonicalize(t, k))
    return ms


def test_matches_brute_force_on_random_k4_profiles():
    rng = np.random.default_rng(2024)
    roster = Roster(("A", "B", "C", "D"))
    for _ in range(300):
        ms = _random_profile(rng, 4, 12)
        result = tally_irv(ms, roster)
        winner, elim = brute_irv(dict(ms.items()), 4)
        assert (result.winner, list(result.elimination_order)) == (winner, elim)


def test_counts_conserved_every_round():
    rng = np.random.default_rng(99)
    roster = Roster(("A", "B", "C", "D"))
    for _ in range(50):
        ms = _random_profile(rng, 4, 20)
        result = tally_irv(ms, roster)
        for round_counts, exhausted in zip(result.rounds, result.exhausted):
            assert sum(round_counts.values()) + exhausted == ms.total


@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=2, max_value=9))
@settings(max_examples=60, deadline=None)
def test_scaling_invariance(seed, scale):
    rng = np.random.default_rng(seed)
    ms = _random_profile(rng, 3, 8)
    scaled = BallotMultiset()
    for ranking, count in ms.items():
        scaled.add(ranking, count * scale)
    base = tally_irv(ms, ROSTER3)
    big = tally_irv(scaled, ROSTER3)
    assert base.winner == big.winner
    assert base.elimination_order == big.elimination_order


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=60, deadline=None)
def test_majority_first_preferences_win(seed):
    rng = np.random.default_rng(seed)
    k = 4
    roster = Roster(("A", "B", "C", "D"))
    favourite = int(rng.integers(0, k))
    ms = _random_profile(rng, k, 10)
    # give the favourite a strict majority of first preferences
    ms.add(canonicalize((favourite,), k), ms.total + 1)
    assert tally_irv(ms, roster).winner == favourite


def test_permutation_invariance_of_entry_order():
    pairs = [((0,), 4), ((1, 2), 3), ((2, 1), 2), ((1, 0, 2), 1)]
    forward = multiset(pairs, 3)
    backward = multiset(list(reversed(pairs)), 3)
    assert tally_irv(forward, ROSTER3) == tally_irv(backward, ROSTER3)


def test_fixed_profile_tally_agrees_with_general_tally():
    # third route: the shared-map tally used by the audit hot loop must agree
    # with both the general implementation and the brute-force oracle
    rng = np.random.default_rng(7)
    for k in (2, 3, 4, 5):
        roster = Roster(tuple("ABCDE"[:k]))
        types = [canonicalize(t, k) for t in all_types(k, allow_partial=True)]
        rows = np.full((len(types), k), -1, dtype=np.int16)
        for i, t in enumerate(types):
            rows[i, : len(t)] = t
        fast = FixedProfileTally(rows, k)
        for _ in range(200):
            counts = rng.poisson(1.2, size=len(types)).astype(np.float64)
            if counts.sum() == 0:
                counts[rng.integers(0, len(types))] = 1
            expected = tally_irv_arrays(rows, counts.astype(np.int64), k).winner
            profile = {t: int(c) for t, c in zip(types, counts) if c}
            assert fast.winner(counts) == expected == brute_irv(profile, k)[0]


def test_fixed_profile_tally_single_candidate():
    rows = np.zeros((1, 1), dtype=np.int16)
    assert FixedProfileTally(rows, 1).winner(np.array([4.0])) == 0


def test_exhaustive_small_profiles_match_brute_force():
    # every multiset of up to 4 ballots over the 9 canonical 3-candidate types
    types = [canonicalize(t, 3) for t in all_types(3, allow_partial=True)]
    for total in range(1, 5):
        for combo in itertools.combinations_with_replacement(types, total):
            ms = BallotMultiset()
            for t in combo:
                ms.add(t)
            result = tally_irv(ms, ROSTER3)
            winner, elim = brute_irv(dict(ms.items()), 3)
            assert (result.winner, list(result.elimination_order)) == (winner, elim)

"""Instant-runoff tallying over ballot multisets.

The tally runs the plain one-at-a-time elimination rule: each round, every
ballot counts for its highest-ranked continuing candidate, the candidate with
the fewest continuing votes is eliminated, and ballots with no continuing
ranked candidate leave the denominator as exhausted. No early majority exit is
taken, so the full elimination order is always produced.

The winner computation is exposed behind a plain callable signature
(ballots, roster) -> winner index, so the audit engine stays agnostic to the
social choice function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ballots import BallotMultiset, Roster

PAD = -1


@dataclass(frozen=True)
class TiePolicy:
    """How to pick the eliminated candidate among tied minima.

    roster-order (default) eliminates the tied candidate latest in roster
    order, which is fully deterministic. seeded-random draws lots with a fixed
    seed, for jurisdictions that require it; deterministic given the seed.
    """

    mode: str = "roster-order"
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("roster-order", "seeded-random"):
            raise ValueError(f"unknown tie policy mode {self.mode!r}")


@dataclass(frozen=True)
class TallyResult:
    winner: int
    elimination_order: tuple[int, ...]
    rounds: tuple[dict[int, int], ...]   # per round: continuing candidate -> votes
    exhausted: tuple[int, ...]           # per round: ballots with no continuing choice

    def round_table(self, roster: Roster) -> list[dict[str, int]]:
        return [{roster.name_of(c): v for c, v in r.items()} for r in self.rounds]


def ballots_to_arrays(ballots: BallotMultiset, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Pack a multiset into a PAD-filled (entries x k) preference matrix."""
    entries = list(ballots.items())
    prefs = np.full((len(entries), k), PAD, dtype=np.int16)
    counts = np.empty(len(entries), dtype=np.int64)
    for i, (ranking, count) in enumerate(entries):
        prefs[i, : len(ranking)] = ranking
        counts[i] = count
    return prefs, counts


def _pick_loser(tallies: np.ndarray, continuing: np.ndarray, tie: TiePolicy,
                rng: np.random.Generator | None) -> int:
    alive = np.flatnonzero(continuing)
    minimum = tallies[alive].min()
    tied = alive[tallies[alive] == minimum]
    if len(tied) == 1 or tie.mode == "roster-order":
        return int(tied[-1])
    return int(tied[rng.integers(0, len(tied))])


def tally_irv_arrays(prefs: np.ndarray, counts: np.ndarray, k: int,
                     tie: TiePolicy = TiePolicy()) -> TallyResult:
    """IRV tally over the packed array form. Rows may repeat; counts sum."""
    total = int(counts.sum())
    if total < 1:
        raise ValueError("cannot tally an empty ballot multiset")
    if prefs.size and int(prefs.max()) >= k:
        raise ValueError("ranking references a candidate index out of range")

    n_rows = prefs.shape[0]
    row_len = (prefs != PAD).sum(axis=1)
    pos = np.zeros(n_rows, dtype=np.int64)
    top = prefs[:, 0].astype(np.int64, copy=True)
    continuing = np.ones(k, dtype=bool)
    rng = np.random.default_rng(tie.seed) if tie.mode == "seeded-random" else None

    rounds: list[dict[int, int]] = []
    exhausted: list[int] = []
    elimination_order: list[int] = []

    for _ in range(k - 1):
        live = top >= 0
        tallies = np.bincount(top[live], weights=counts[live], minlength=k)
        exhausted.append(total - int(counts[live].sum()))
        rounds.append({int(c): int(tallies[c]) for c in np.flatnonzero(continuing)})

        loser = _pick_loser(tallies, continuing, tie, rng)
        continuing[loser] = False
        elimination_order.append(loser)

        # advance ballots that were counting for the loser
        stale = np.flatnonzero(top == loser)
        while stale.size:
            pos[stale] += 1
            done = pos[stale] >= row_len[stale]
            top[stale[done]] = PAD
            alive_rows = stale[~done]
            top[alive_rows] = prefs[alive_rows, pos[alive_rows]]
            stale = alive_rows[~continuing[top[alive_rows]]]

    winner = int(np.flatnonzero(continuing)[0])
    return TallyResult(winner, tuple(elimination_order), tuple(rounds), tuple(exhausted))


def tally_irv(ballots: BallotMultiset, roster: Roster,
              tie: TiePolicy = TiePolicy()) -> TallyResult:
    """Tally a canonical ballot multiset under the roster."""
    prefs, counts = ballots_to_arrays(ballots, roster.k)
    return tally_irv_arrays(prefs, counts, roster.k, tie)


class FixedProfileTally:
    """IRV winner over a fixed type table, for many count vectors.

    A round's ballot-to-top-choice map depends only on the continuing set, so
    maps are cached per continuing bitmask and shared across tallies of the
    same table. Roster-order tie policy only. Top value k marks exhausted.
    """

    def __init__(self, rows: np.ndarray, k: int):
        self.rows = rows
        self.k = k
        self._maps: dict[int, np.ndarray] = {}

    def _top_map(self, mask: int) -> np.ndarray:
        top = self._maps.get(mask)
        if top is None:
            k = self.k
            continuing_ext = np.zeros(k + 1, dtype=bool)
            for c in range(k):
                continuing_ext[c] = bool((mask >> c) & 1)
            valid = continuing_ext[self.rows]  # PAD=-1 hits the always-False slot
            first = valid.argmax(axis=1)
            top = np.where(valid.any(axis=1),
                           self.rows[np.arange(self.rows.shape[0]), first],
                           k).astype(np.int64)
            self._maps[mask] = top
        return top

    def winner(self, counts: np.ndarray) -> int:
        k = self.k
        mask = (1 << k) - 1
        for _ in range(k - 1):
            tallies = np.bincount(self._top_map(mask), weights=counts, minlength=k + 1)
            alive = [c for c in range(k) if (mask >> c) & 1]
            low = min(tallies[c] for c in alive)
            loser = max(c for c in alive if tallies[c] == low)
            mask &= ~(1 << loser)
        return mask.bit_length() - 1


def irv_winner(tie: TiePolicy = TiePolicy()) -> Callable[[BallotMultiset, Roster], int]:
    """IRV as a social choice function: (ballots, roster) -> winner index."""
    def winner(ballots: BallotMultiset, roster: Roster) -> int:
        return tally_irv(ballots, roster, tie).winner
    return winner

"""The sequential ballot-polling audit loop.

A session accumulates sampled ballots, estimates the posterior probability
that the reported winner is the true winner, and stops once that probability
reaches the configured threshold (or the census completes). Estimation is by
finite-population imputation: each posterior draw fills in the N - n unseen
ballots and retallies, so the census case is exact by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ballots import BallotMultiset, Roster
from .dirtree import PosteriorTree, PriorConfig, RandomStream, new_tree
from .social_choice import (FixedProfileTally, TiePolicy, ballots_to_arrays, tally_irv,
                            tally_irv_arrays)

IN_PROGRESS = "in-progress"
STOPPED_CONFIRMED = "stopped-confirmed"
CENSUS_COMPLETE = "census-complete"

CONTINUE = "continue-sampling"
STOP_CONFIRM = "stop-confirm"

SocialChoice = Callable[[BallotMultiset, Roster], int]


@dataclass(frozen=True)
class ElectionMeta:
    roster: Roster
    total_ballots: int
    reported_winner: int

    def __post_init__(self):
        if self.total_ballots < 1:
            raise ValueError("total_ballots must be at least 1")
        if not (0 <= self.reported_winner < self.roster.k):
            raise ValueError("reported_winner must be a valid candidate index")


@dataclass(frozen=True)
class AuditConfig:
    """Immutable audit parameters, recorded at session start.

    min_sample optionally delays stopping until that many ballots have been
    sampled, a guard mainly of interest for the erratic a0 = 0 bootstrap.
    social_choice swaps the winner function; the default is IRV under `tie`.
    """

    prior: PriorConfig = field(default_factory=PriorConfig)
    threshold: float = 0.95
    draws_per_estimate: int = 100
    tie: TiePolicy = field(default_factory=TiePolicy)
    seed: int = 0
    min_sample: int | None = None
    social_choice: SocialChoice | None = None

    def __post_init__(self):
        if not (0 < self.threshold < 1):
            raise ValueError("threshold must lie strictly between 0 and 1")
        if self.draws_per_estimate < 1:
            raise ValueError("draws_per_estimate must be positive")
        if self.min_sample is not None and self.min_sample < 0:
            raise ValueError("min_sample must be non-negative")


@dataclass(frozen=True)
class PosteriorEstimate:
    prob_reported_winner: float
    prob_by_candidate: tuple[float, ...]
    sample_size: int
    draws: int
    seed_used: int


class AuditSession:
    """One audit in progress: observations, posterior state, estimate history."""

    def __init__(self, meta: ElectionMeta, config: AuditConfig):
        self.meta = meta
        self.config = config
        self.tree: PosteriorTree = new_tree(meta.roster, config.prior)
        self.observed = BallotMultiset()
        self.history: list[PosteriorEstimate] = []
        self.status = IN_PROGRESS

    @property
    def sample_size(self) -> int:
        return self.observed.total

    def observe(self, ballots: BallotMultiset) -> None:
        """Merge a batch of sampled ballots into the session."""
        if self.status == STOPPED_CONFIRMED:
            raise ValueError("session already stopped")
        if self.status == CENSUS_COMPLETE:
            raise ValueError("census already complete")
        new_total = self.observed.total + ballots.total
        if new_total > self.meta.total_ballots:
            raise ValueError(
                f"observing {ballots.total} ballots would exceed the census of "
                f"{self.meta.total_ballots}")
        self.tree.update_all(ballots)
        self.observed.merge(ballots)
        if new_total == self.meta.total_ballots:
            self.status = CENSUS_COMPLETE

    def estimate_posterior(self, draws: int | None = None) -> PosteriorEstimate:
        """Estimate P(candidate wins) as the mean over posterior draws.

        Each draw imputes the unseen ballots and retallies the full election;
        the reported estimate is the fraction of draws each candidate won.
        Draw d of estimate e uses the (seed, e, d) random stream, so histories
        replay bit-identically and draws could run in any order.
        """
        k = self.meta.roster.k
        n = self.observed.total
        total = self.meta.total_ballots
        draws = self.config.draws_per_estimate if draws is None else draws
        if draws < 1:
            raise ValueError("draws must be positive")
        if self.config.prior.a0 == 0 and n == 0:
            raise ValueError("the a0=0 bootstrap needs at least one observed ballot")

        if n == total:
            result = tally_irv(self.observed, self.meta.roster, self.config.tie)
            probs = tuple(1.0 if c == result.winner else 0.0 for c in range(k))
            estimate = PosteriorEstimate(probs[self.meta.reported_winner], probs,
                                         n, 1, self.config.seed)
            self.history.append(estimate)
            return estimate

        estimate_index = len(self.history)
        wins = np.zeros(k, dtype=np.int64)
        sampler = None
        if self.config.social_choice is None and self.config.tie.mode == "roster-order":
            sampler = self.tree.fixed_type_sampler()
        if self.config.social_choice is not None:
            for d in range(draws):
                stream = RandomStream(self.config.seed, (estimate_index, d))
                imputed = self.tree.sample_remaining(total - n, stream)
                combined = self.observed.copy()
                combined.merge(imputed)
                wins[self.config.social_choice(combined, self.meta.roster)] += 1
        elif sampler is not None:
            # observed and imputed share one type table; tallies reuse its
            # per-round top-choice maps across draws
            if sampler.index is None:
                obs_vec = self.tree.observed_arrays()[1].astype(np.float64)
            else:
                obs_vec = np.zeros(sampler.rows.shape[0], dtype=np.float64)
                for ranking, count in self.observed.items():
                    obs_vec[sampler.index[ranking]] += count
            tally = FixedProfileTally(sampler.rows, k)
            for d in range(draws):
                gen = np.random.default_rng((self.config.seed, estimate_index, d))
                counts = obs_vec + sampler.draw_counts(total - n, gen)
                wins[tally.winner(counts)] += 1
        else:
            obs_rows, obs_counts = (self.tree.observed_arrays() if n > 0
                                    else ballots_to_arrays(self.observed, k))
            for d in range(draws):
                gen = np.random.default_rng((self.config.seed, estimate_index, d))
                imp_rows, imp_counts = self.tree.sample_remaining_arrays(total - n, gen)
                rows = np.vstack([obs_rows, imp_rows])
                counts = np.concatenate([obs_counts, imp_counts])
                wins[tally_irv_arrays(rows, counts, k, self.config.tie).winner] += 1

        probs = tuple(float(w) / draws for w in wins)
        estimate = PosteriorEstimate(probs[self.meta.reported_winner], probs,
                                     n, draws, self.config.seed)
        self.history.append(estimate)
        return estimate

    def decide(self) -> str:
        """Apply the stopping rule to the latest estimate.

        Census completion wins over everything; otherwise stop and confirm
        when the latest estimate reaches the threshold (inclusive), unless a
        configured minimum sample size has not been met yet.
        """
        if not self.history:
            raise ValueError("no estimate to decide on; call estimate_posterior first")
        if self.observed.total == self.meta.total_ballots:
            return CENSUS_COMPLETE
        latest = self.history[-1]
        if self.config.min_sample is not None and self.observed.total < self.config.min_sample:
            return CONTINUE
        if latest.prob_reported_winner >= self.config.threshold:
            self.status = STOPPED_CONFIRMED
            return STOP_CONFIRM
        return CONTINUE


def start_session(meta: ElectionMeta, config: AuditConfig) -> AuditSession:
    """A fresh in-progress session holding the prior and no observations."""
    return AuditSession(meta, config)

"""Bayesian ballot-polling audits for instant-runoff elections."""

from .audit import (AuditConfig, AuditSession, ElectionMeta, PosteriorEstimate,
                    start_session)
from .ballots import (BallotMultiset, BallotParseError, Ranking, Roster, canonicalize,
                      parse_ballots, parse_roster, serialize_ballots)
from .dirtree import (DIRICHLET, DIRICHLET_TREE, PosteriorTree, PriorConfig, RandomStream,
                      complete_ballot_prior_variance, leaf_count, match_dirichlet_a0,
                      new_tree)
from .simulate import (QuantileSummary, TrialPlan, TrialTable, emit, run_trials,
                       run_trials_loaded, summarize, synthetic_ranked_ballots)
from .social_choice import TallyResult, TiePolicy, tally_irv

__version__ = "0.1.0"

__all__ = [
    "AuditConfig", "AuditSession", "BallotMultiset", "BallotParseError", "DIRICHLET",
    "DIRICHLET_TREE", "ElectionMeta", "PosteriorEstimate", "PosteriorTree", "PriorConfig",
    "QuantileSummary", "RandomStream", "Ranking", "Roster", "TallyResult", "TiePolicy",
    "TrialPlan", "TrialTable", "canonicalize", "complete_ballot_prior_variance", "emit",
    "leaf_count", "match_dirichlet_a0", "new_tree", "parse_ballots", "parse_roster",
    "run_trials", "run_trials_loaded", "serialize_ballots", "start_session", "summarize",
    "synthetic_ranked_ballots", "tally_irv",
]

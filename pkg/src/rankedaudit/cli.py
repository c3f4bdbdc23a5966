"""Command-line interface.

Subcommands: tally, match-a0, audit run, simulate, serve. Ballot and roster
files use the formats documented in the README; `audit run` reads sampled
ballots line by line from stdin and prints one JSON decision object per line.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .audit import AuditConfig, AuditSession, ElectionMeta
from .ballots import (BallotMultiset, BallotParseError, parse_ballot_line, parse_ballots,
                      parse_roster)
from .dirtree import DIRICHLET, DIRICHLET_TREE, PriorConfig, complete_ballot_prior_variance, \
    match_dirichlet_a0
from .simulate import TrialPlan, emit, run_trials, summarize
from .social_choice import TiePolicy, tally_irv


@click.group()
def main():
    """Bayesian ballot-polling audits for instant-runoff elections."""


def _load_roster(path: str):
    return parse_roster(Path(path).read_text(encoding="utf-8"))


@main.command()
@click.option("--roster", "roster_path", required=True, type=click.Path(exists=True),
              help="Roster file, one candidate per line.")
@click.option("--ballots", "ballots_path", required=True, type=click.Path(exists=True),
              help="Ballot file, count,name1,...,nameL per line.")
@click.option("--tie-mode", type=click.Choice(["roster-order", "seeded-random"]),
              default="roster-order", show_default=True)
@click.option("--tie-seed", type=int, default=0, show_default=True)
def tally(roster_path, ballots_path, tie_mode, tie_seed):
    """Tally an election and print winner, elimination order and rounds."""
    roster = _load_roster(roster_path)
    ballots = parse_ballots(Path(ballots_path).read_text(encoding="utf-8"), roster)
    result = tally_irv(ballots, roster, TiePolicy(tie_mode, tie_seed))
    doc = {
        "winner": roster.name_of(result.winner),
        "eliminationOrder": [roster.name_of(c) for c in result.elimination_order],
        "rounds": result.round_table(roster),
        "exhausted": list(result.exhausted),
    }
    click.echo(json.dumps(doc, indent=1))


@main.command("match-a0")
@click.option("--k", type=int, required=True, help="Number of candidates.")
@click.option("--a0", "tree_a0", type=float, required=True, help="Dirichlet-tree a0.")
@click.option("--allow-partial/--no-partial", default=True, show_default=True)
def match_a0(k, tree_a0, allow_partial):
    """Variance-match a flat Dirichlet a0' to a Dirichlet-tree prior."""
    matched = match_dirichlet_a0(tree_a0, k, allow_partial)
    click.echo(f"a0'={matched!r}")
    if tree_a0 > 0:
        tree_var = complete_ballot_prior_variance(
            PriorConfig(DIRICHLET_TREE, tree_a0, allow_partial), k)
        flat_var = complete_ballot_prior_variance(
            PriorConfig(DIRICHLET, matched, allow_partial), k)
        click.echo(f"tree_variance={tree_var!r}")
        click.echo(f"dirichlet_variance={flat_var!r}")


@main.group()
def audit():
    """Run or inspect audit sessions."""


@audit.command("run")
@click.option("--roster", "roster_path", required=True, type=click.Path(exists=True))
@click.option("--total-ballots", "-N", "total_ballots", type=int, required=True)
@click.option("--reported-winner", required=True, help="Candidate name.")
@click.option("--prior-kind", type=click.Choice([DIRICHLET_TREE, DIRICHLET]),
              default=DIRICHLET_TREE, show_default=True)
@click.option("--a0", type=float, default=1.0, show_default=True)
@click.option("--allow-partial/--no-partial", default=True, show_default=True)
@click.option("--threshold", type=float, default=0.95, show_default=True)
@click.option("--draws", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--min-sample", type=int, default=None)
def audit_run(roster_path, total_ballots, reported_winner, prior_kind, a0,
              allow_partial, threshold, draws, seed, min_sample):
    """Stream sampled ballots from stdin; print one JSON decision per line.

    Each input line is a ballot record (`count,name1,...` with the count
    optional and defaulting to 1). After every line the posterior is
    re-estimated and `{"n":..., "probWinner":..., "decision":...}` printed.
    """
    roster = _load_roster(roster_path)
    meta = ElectionMeta(roster, total_ballots, roster.index_of(reported_winner))
    config = AuditConfig(prior=PriorConfig(prior_kind, a0, allow_partial),
                         threshold=threshold, draws_per_estimate=draws, seed=seed,
                         min_sample=min_sample)
    session = AuditSession(meta, config)
    for lineno, raw in enumerate(sys.stdin, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        ranking, count = parse_ballot_line(line, roster, lineno, count_required=False)
        batch = BallotMultiset()
        batch.add(ranking, count)
        session.observe(batch)
        estimate = session.estimate_posterior()
        decision = session.decide()
        click.echo(json.dumps({"n": estimate.sample_size,
                               "probWinner": estimate.prob_reported_winner,
                               "decision": decision}))
        if decision != "continue-sampling":
            break


def _parse_priors(spec: str, allow_partial: bool) -> tuple[PriorConfig, ...]:
    priors = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            kind_text, a0_text = part.split(":")
            kind = {"tree": DIRICHLET_TREE, "dirichlet": DIRICHLET}[kind_text.strip()]
            priors.append(PriorConfig(kind, float(a0_text), allow_partial))
        except (ValueError, KeyError):
            raise click.UsageError(
                f"bad prior {part!r}; expected kind:a0 like tree:1 or dirichlet:0.5")
    if not priors:
        raise click.UsageError("at least one prior is required")
    return tuple(priors)


@main.command()
@click.option("--roster", "roster_path", required=True, type=click.Path(exists=True))
@click.option("--ballots", "ballots_path", required=True, type=click.Path(exists=True))
@click.option("--priors", default="tree:0,tree:1,tree:10,tree:100", show_default=True,
              help="Comma-separated kind:a0 entries.")
@click.option("--with-matched-dirichlet", is_flag=True,
              help="Add a variance-matched Dirichlet companion per tree prior.")
@click.option("--allow-partial/--no-partial", default=True, show_default=True)
@click.option("--trials", type=int, default=100, show_default=True)
@click.option("--max-sample", type=int, default=200, show_default=True)
@click.option("--eval-step", type=int, default=1, show_default=True)
@click.option("--draws", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), default="simulation-out",
              show_default=True)
def simulate(roster_path, ballots_path, priors, with_matched_dirichlet, allow_partial,
             trials, max_sample, eval_step, draws, seed, out_dir):
    """Simulate repeated audits over a ballot file and emit CSV + SVG."""
    try:
        plan = TrialPlan(
            ballot_file=ballots_path, roster_file=roster_path,
            priors=_parse_priors(priors, allow_partial),
            with_matched_dirichlet=with_matched_dirichlet,
            trials=trials, max_sample=max_sample, eval_step=eval_step,
            draws=draws, base_seed=seed)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    try:
        table = run_trials(plan)
    except (BallotParseError, OSError, ValueError) as exc:
        click.echo(f"data error: {exc}", err=True)
        sys.exit(3)
    paths = emit(table, summarize(table), out_dir)
    for path in paths:
        click.echo(str(path))


@main.command()
@click.option("--port", type=int, default=8400, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data-dir", type=click.Path(), default="audit-sessions", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True,
              help="Default seed for sessions that do not specify one.")
@click.option("--ui-dir", type=click.Path(exists=True), default=None,
              help="Serve the console UI bundle from this directory at /ui.")
def serve(port, host, data_dir, seed, ui_dir):
    """Serve the audit-session HTTP API (and optionally the console UI)."""
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=data_dir, default_seed=seed, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()

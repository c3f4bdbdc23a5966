"""Simulation harness: repeated audits over permuted ballots.

Each trial shuffles the full ballot file with its own seed, feeds the audit
ballots in sample order, and records the posterior probability of the true
winner at every evaluation point. Trajectories never stop early, so the
quantile bands are defined at every sample size.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audit import AuditConfig, AuditSession, ElectionMeta
from .ballots import BallotMultiset, Roster, parse_ballots, parse_roster
from .dirtree import DIRICHLET, DIRICHLET_TREE, PriorConfig, match_dirichlet_a0
from .social_choice import TiePolicy, tally_irv


def format_a0(a0: float) -> str:
    return str(int(a0)) if float(a0).is_integer() else repr(float(a0))


def prior_label(config: PriorConfig, matched: bool = False) -> str:
    if config.kind == DIRICHLET_TREE:
        return f"tree(a0={format_a0(config.a0)})"
    if matched:
        return f"dirichlet(a0'={format_a0(config.a0)})"
    return f"dirichlet(a0={format_a0(config.a0)})"


@dataclass(frozen=True)
class TrialPlan:
    ballot_file: str | Path
    roster_file: str | Path
    priors: tuple[PriorConfig, ...]
    with_matched_dirichlet: bool = False
    trials: int = 100
    max_sample: int = 200
    eval_step: int = 1
    draws: int = 100
    base_seed: int = 0
    tie: TiePolicy = field(default_factory=TiePolicy)

    def __post_init__(self):
        if self.trials < 1 or self.max_sample < 1 or self.eval_step < 1 or self.draws < 1:
            raise ValueError("trials, max_sample, eval_step and draws must be positive")


@dataclass
class TrialTable:
    """Long-format rows of (prior label, trial, sample size, prob of true winner)."""

    rows: list[tuple[str, int, int, float]]
    true_winner: int

    def labels(self) -> list[str]:
        seen: dict[str, None] = {}
        for label, _, _, _ in self.rows:
            seen.setdefault(label)
        return list(seen)


@dataclass
class QuantileSummary:
    """Per (prior label, sample size): nearest-rank 5/50/95 percent quantiles."""

    rows: list[tuple[str, int, float, float, float]]
    threshold: float = 0.95


def expand_priors(priors: tuple[PriorConfig, ...], with_matched: bool,
                  k: int) -> list[tuple[str, PriorConfig]]:
    """Label the planned priors, appending matched-Dirichlet companions on request."""
    out = [(prior_label(p), p) for p in priors]
    if with_matched:
        for p in priors:
            if p.kind != DIRICHLET_TREE:
                continue
            matched_a0 = match_dirichlet_a0(p.a0, k, p.allow_partial)
            companion = PriorConfig(DIRICHLET, matched_a0, p.allow_partial)
            out.append((prior_label(companion, matched=True), companion))
    return out


def _session_seed(base_seed: int, prior_index: int, trial: int) -> int:
    seq = np.random.SeedSequence((base_seed, 1 + prior_index, trial))
    return int(seq.generate_state(1, np.uint64)[0])


def run_trials_loaded(roster: Roster, ballots: BallotMultiset, plan: TrialPlan) -> TrialTable:
    """The harness proper, over already-parsed inputs."""
    total = ballots.total
    if plan.max_sample > total:
        raise ValueError(f"max_sample {plan.max_sample} exceeds the {total} ballots on file")
    true_winner = tally_irv(ballots, roster, plan.tie).winner

    types = sorted(dict(ballots.items()))
    type_counts = [ballots.count_of(t) for t in types]
    population = np.repeat(np.arange(len(types)), type_counts)
    eval_points = list(range(plan.eval_step, plan.max_sample + 1, plan.eval_step))

    rows: list[tuple[str, int, int, float]] = []
    for prior_index, (label, prior) in enumerate(
            expand_priors(plan.priors, plan.with_matched_dirichlet, roster.k)):
        for trial in range(plan.trials):
            order = np.random.default_rng((plan.base_seed, trial)).permutation(population)
            config = AuditConfig(prior=prior, draws_per_estimate=plan.draws, tie=plan.tie,
                                 seed=_session_seed(plan.base_seed, prior_index, trial))
            session = AuditSession(
                ElectionMeta(roster, total_ballots=total, reported_winner=true_winner),
                config)
            fed = 0
            for point in eval_points:
                batch = BallotMultiset()
                for type_index in order[fed:point]:
                    batch.add(types[type_index])
                session.observe(batch)
                fed = point
                estimate = session.estimate_posterior()
                rows.append((label, trial, point, estimate.prob_reported_winner))
    return TrialTable(rows, true_winner)


def run_trials(plan: TrialPlan) -> TrialTable:
    roster = parse_roster(Path(plan.roster_file).read_text(encoding="utf-8"))
    ballots = parse_ballots(Path(plan.ballot_file).read_text(encoding="utf-8"), roster)
    return run_trials_loaded(roster, ballots, plan)


def summarize(table: TrialTable, threshold: float = 0.95) -> QuantileSummary:
    """Nearest-rank quantiles of prob_true_winner across trials, per (prior, n)."""
    if not table.rows:
        raise ValueError("cannot summarize an empty trial table")
    grouped: dict[tuple[str, int], list[float]] = {}
    order: list[tuple[str, int]] = []
    for label, _, n, prob in table.rows:
        key = (label, n)
        if key not in grouped:
            grouped[key] = []
            order.append(key)
        grouped[key].append(prob)
    rows = []
    for label, n in order:
        values = np.array(grouped[(label, n)])
        q05, q50, q95 = (float(np.quantile(values, q, method="inverted_cdf"))
                         for q in (0.05, 0.50, 0.95))
        rows.append((label, n, q05, q50, q95))
    return QuantileSummary(rows, threshold)


# ------------------------------------------------------------------ emission

def trials_csv_text(table: TrialTable) -> str:
    buf = io.StringIO()
    buf.write(f"# trueWinner={table.true_winner}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["prior", "trial", "n", "prob"])
    for label, trial, n, prob in table.rows:
        writer.writerow([label, trial, n, repr(prob)])
    return buf.getvalue()


def read_trials_csv(text: str) -> TrialTable:
    lines = text.splitlines()
    true_winner = int(lines[0].split("=", 1)[1])
    rows = []
    for record in csv.reader(lines[2:]):
        label, trial, n, prob = record
        rows.append((label, int(trial), int(n), float(prob)))
    return TrialTable(rows, true_winner)


def summary_csv_text(summary: QuantileSummary) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["prior", "n", "q05", "q50", "q95"])
    for label, n, q05, q50, q95 in summary.rows:
        writer.writerow([label, n, repr(q05), repr(q50), repr(q95)])
    return buf.getvalue()


def posterior_paths_svg(summary: QuantileSummary) -> str:
    """Fig-style small multiples: median line, 5-95% band, dashed threshold."""
    panels: dict[str, list[tuple[int, float, float, float]]] = {}
    for label, n, q05, q50, q95 in summary.rows:
        panels.setdefault(label, []).append((n, q05, q50, q95))

    pw, ph, mx, my, top = 240, 170, 42, 26, 24
    labels = list(panels)
    width = mx + len(labels) * (pw + 18)
    height = top + ph + my + 14
    max_n = max(n for rows in panels.values() for n, *_ in rows)

    def sx(x0: int, n: float) -> float:
        return x0 + (n / max_n) * pw

    def sy(p: float) -> float:
        return top + (1.0 - p) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        '<style>text{font-family:sans-serif;font-size:10px}.t{font-size:11px;font-weight:bold}</style>',
    ]
    for i, label in enumerate(labels):
        x0 = mx + i * (pw + 18)
        rows = sorted(panels[label])
        band_up = " ".join(f"{sx(x0, n):.2f},{sy(q95):.2f}" for n, _, _, q95 in rows)
        band_dn = " ".join(f"{sx(x0, n):.2f},{sy(q05):.2f}" for n, q05, _, _ in reversed(rows))
        median = " ".join(f"{sx(x0, n):.2f},{sy(q50):.2f}" for n, _, q50, _ in rows)
        thr = sy(summary.threshold)
        parts += [
            f'<g><text class="t" x="{x0:.2f}" y="{top - 8}">{label}</text>',
            f'<rect x="{x0:.2f}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
            f'<polygon points="{band_up} {band_dn}" fill="#9ecae1" fill-opacity="0.55" stroke="none"/>',
            f'<polyline points="{median}" fill="none" stroke="#08519c" stroke-width="1.5"/>',
            f'<line x1="{x0:.2f}" y1="{thr:.2f}" x2="{x0 + pw:.2f}" y2="{thr:.2f}" '
            f'stroke="#666" stroke-dasharray="5,3"/>',
            f'<text x="{x0 - 4:.2f}" y="{sy(1.0) + 3:.2f}" text-anchor="end">1</text>',
            f'<text x="{x0 - 4:.2f}" y="{sy(0.0) + 3:.2f}" text-anchor="end">0</text>',
            f'<text x="{x0:.2f}" y="{top + ph + 12}" text-anchor="middle">0</text>',
            f'<text x="{x0 + pw:.2f}" y="{top + ph + 12}" text-anchor="middle">{max_n}</text>',
            f'<text x="{x0 + pw / 2:.2f}" y="{top + ph + 24}" text-anchor="middle">sample size</text></g>',
        ]
    parts.append("</svg>")
    return "\n".join(parts)


def emit(table: TrialTable, summary: QuantileSummary, out_dir: str | Path) -> list[Path]:
    """Write trials.csv, summary.csv and posterior_paths.svg; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    artifacts = []
    for name, text in [("trials.csv", trials_csv_text(table)),
                       ("summary.csv", summary_csv_text(summary)),
                       ("posterior_paths.svg", posterior_paths_svg(summary))]:
        path = out / name
        path.write_text(text, encoding="utf-8")
        artifacts.append(path)
    return artifacts


# ---------------------------------------------------------------- synthetic

def synthetic_ranked_ballots(strengths: "np.ndarray | list[float]", n_ballots: int,
                             seed: int, partial_fraction: float = 0.0) -> BallotMultiset:
    """A synthetic ballot population from a Plackett-Luce model.

    Rankings come from Gumbel-perturbed log-strengths; a partial_fraction of
    ballots truncates to a uniform length in 1..k-2. Deterministic per seed.
    """
    strengths = np.asarray(strengths, dtype=np.float64)
    k = strengths.size
    gen = np.random.default_rng((seed,))
    scores = np.log(strengths)[None, :] + gen.gumbel(size=(n_ballots, k))
    rows = np.argsort(-scores, axis=1).astype(np.int16)
    if partial_fraction > 0 and k >= 3:
        cut = gen.random(n_ballots) < partial_fraction
        lengths = np.where(cut, gen.integers(1, k - 1, size=n_ballots), k)
        rows = np.where(np.arange(k)[None, :] < lengths[:, None], rows, -1)
    uniq, counts = np.unique(rows, axis=0, return_counts=True)
    out = BallotMultiset()
    for row, count in zip(uniq, counts):
        out.add(tuple(int(c) for c in row if c >= 0), int(count))
    return out

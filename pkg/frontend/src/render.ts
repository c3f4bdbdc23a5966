// HTML renderers. Pure string builders so the exact-rendering contract is
// testable without a browser; app.ts injects the results into the page.

import { badgeFor, historyCsv, trajectorySvg } from "./chart.js";
import type { EstimateView, SessionView } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderHistoryTable(history: EstimateView[]): string {
  if (history.length === 0) {
    return `<p class="empty">No estimates yet. Enter sampled ballots, then trigger one.</p>`;
  }
  const rows = history
    .map(
      (h, i) =>
        `<tr><td>${i + 1}</td><td>${h.n}</td><td class="num">${h.probWinner}</td>` +
        `<td>${h.draws}</td><td><span class="badge ${h.decision}">${h.decision}</span></td></tr>`,
    )
    .join("");
  return (
    `<table class="history"><thead><tr>` +
    `<th>#</th><th>n</th><th>P(reported winner)</th><th>draws</th><th>decision</th>` +
    `</tr></thead><tbody>${rows}</tbody></table>`
  );
}

export function renderTrajectoryPanel(view: SessionView): string {
  const badge = badgeFor(view.history);
  const chart =
    view.history.length === 0
      ? `<p class="empty">The trajectory appears after the first estimate.</p>`
      : trajectorySvg(view.history, view.config.threshold);
  const csvHref =
    "data:text/csv;charset=utf-8," + encodeURIComponent(historyCsv(view.history));
  return (
    `<div class="panel-head"><span class="badge big ${badge}">${badge}</span>` +
    `<a class="csv" download="audit-history.csv" href="${csvHref}">export CSV</a></div>` +
    chart +
    renderHistoryTable(view.history)
  );
}

export function renderLatestEstimate(view: SessionView): string {
  const last = view.history[view.history.length - 1];
  if (!last) return "";
  const rows = last.probByCandidate
    .map(
      (c) =>
        `<tr><td>${escapeHtml(c.name)}</td><td class="num">${c.prob}</td></tr>`,
    )
    .join("");
  return (
    `<table class="by-candidate"><thead><tr><th>candidate</th>` +
    `<th>P(wins) at n=${last.n}</th></tr></thead><tbody>${rows}</tbody></table>`
  );
}

export function renderSessionHeader(view: SessionView): string {
  const meta = view.meta;
  return (
    `<h2>${escapeHtml(meta.reportedWinner.name)} <small>reported winner</small></h2>` +
    `<p class="facts">${meta.candidates.length} candidates - ` +
    `${meta.totalBallots} ballots on file - sampled <strong>${view.sampleSize}</strong> - ` +
    `threshold ${view.config.threshold} - prior ${escapeHtml(view.config.prior.kind)}` +
    `(a0=${view.config.prior.a0}) - status <span class="badge ${view.status}">` +
    `${view.status}</span></p>`
  );
}

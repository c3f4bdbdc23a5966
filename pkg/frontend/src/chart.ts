// Trajectory panel pieces: an SVG line chart of probWinner vs n with a
// dashed threshold rule, the decision badge, and a CSV export of the
// history. Every number shown comes straight off the service's history.

import type { Decision, EstimateView } from "./types.js";

const W = 560;
const H = 240;
const M = { left: 44, right: 16, top: 14, bottom: 30 };

function sx(n: number, maxN: number): number {
  return M.left + (n / Math.max(maxN, 1)) * (W - M.left - M.right);
}

function sy(p: number): number {
  return M.top + (1 - p) * (H - M.top - M.bottom);
}

export function trajectorySvg(history: EstimateView[], threshold: number): string {
  const maxN = Math.max(...history.map((h) => h.n), 10);
  const thr = sy(threshold);
  const axis =
    `<line x1="${M.left}" y1="${sy(1)}" x2="${M.left}" y2="${sy(0)}" stroke="#555"/>` +
    `<line x1="${M.left}" y1="${sy(0)}" x2="${W - M.right}" y2="${sy(0)}" stroke="#555"/>` +
    `<text x="${M.left - 6}" y="${sy(1) + 4}" text-anchor="end" class="tick">1</text>` +
    `<text x="${M.left - 6}" y="${sy(0) + 4}" text-anchor="end" class="tick">0</text>` +
    `<text x="${M.left - 6}" y="${thr + 4}" text-anchor="end" class="tick">${threshold}</text>` +
    `<text x="${W - M.right}" y="${H - 8}" text-anchor="end" class="tick">n = ${maxN}</text>`;
  const rule =
    `<line x1="${M.left}" y1="${thr}" x2="${W - M.right}" y2="${thr}" ` +
    `stroke="#888" stroke-dasharray="6,4"/>`;
  const pts = history
    .map((h) => `${sx(h.n, maxN).toFixed(1)},${sy(h.probWinner).toFixed(1)}`)
    .join(" ");
  const line = history.length
    ? `<polyline points="${pts}" fill="none" stroke="#0b6fa4" stroke-width="2"/>`
    : "";
  const dots = history
    .map(
      (h) =>
        `<circle cx="${sx(h.n, maxN).toFixed(1)}" cy="${sy(h.probWinner).toFixed(1)}" ` +
        `r="3" fill="#0b6fa4"><title>n=${h.n} p=${h.probWinner}</title></circle>`,
    )
    .join("");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" ` +
    `width="${W}" height="${H}" role="img">` +
    axis + rule + line + dots + "</svg>"
  );
}

/** The badge mirrors the latest decision the service reported. */
export function badgeFor(history: EstimateView[]): Decision | "no-estimates" {
  if (history.length === 0) return "no-estimates";
  return history[history.length - 1].decision;
}

export function historyCsv(history: EstimateView[]): string {
  const lines = ["n,probWinner,draws,decision"];
  for (const h of history) {
    lines.push(`${h.n},${h.probWinner},${h.draws},${h.decision}`);
  }
  return lines.join("\n") + "\n";
}

// SVG chart builders. Pure functions from API documents to markup strings:
// easy to test in node and framework-free in the browser.

import { escapeHtml, formatNumber, MEMBER_COLORS, OUTCOME_COLORS, OUTCOME_LABELS } from "./format.js";
import type { DetailResponse, HistogramDoc, MetricKind, TeamDoc } from "./types.js";
import { OUTCOME_KINDS } from "./types.js";

const W = 640;
const H = 220;
const PAD = { left: 44, right: 12, top: 14, bottom: 34 };

function scaleLinear(domainMax: number, rangePx: number): (v: number) => number {
  const max = domainMax > 0 ? domainMax : 1;
  return (v: number) => (v / max) * rangePx;
}

function svgOpen(title: string): string {
  return (
    `<svg viewBox="0 0 ${W} ${H}" role="img" class="chart">` +
    `<title>${escapeHtml(title)}</title>`
  );
}

/** Distribution of one statistic across all teams (counts per bin). */
export function histogramSvg(h: HistogramDoc, title: string): string {
  const innerW = W - PAD.left - PAD.right;
  const innerH = H - PAD.top - PAD.bottom;
  const maxCount = Math.max(...h.counts, 1);
  const y = scaleLinear(maxCount, innerH);
  const n = h.counts.length;
  const barW = innerW / n;
  let bars = "";
  for (let i = 0; i < n; i++) {
    const height = y(h.counts[i]);
    bars +=
      `<rect x="${(PAD.left + i * barW).toFixed(1)}" ` +
      `y="${(PAD.top + innerH - height).toFixed(1)}" ` +
      `width="${Math.max(barW - 2, 1).toFixed(1)}" height="${height.toFixed(1)}" ` +
      `class="hist-bar"><title>${h.counts[i]} teams in [${formatNumber(h.bin_edges[i])}, ` +
      `${formatNumber(h.bin_edges[i + 1])}${i === n - 1 ? "]" : ")"}</title></rect>`;
  }
  const lo = formatNumber(h.bin_edges[0]);
  const hi = formatNumber(h.bin_edges[h.bin_edges.length - 1]);
  return (
    svgOpen(title) +
    bars +
    `<text x="${PAD.left}" y="${H - 10}" class="axis">${lo}</text>` +
    `<text x="${W - PAD.right}" y="${H - 10}" text-anchor="end" class="axis">${hi}</text>` +
    `<text x="8" y="${PAD.top + 4}" class="axis">${maxCount}</text>` +
    `<text x="8" y="${H - 10}" class="axis">teams</text>` +
    `</svg>`
  );
}

/** Alternate view: one bar per team, so each team's standing is visible. */
export function barPerTeamSvg(
  teams: TeamDoc[],
  metric: MetricKind,
  statistic: "total" | "diff" | "normdiff",
  title: string,
): string {
  const innerW = W - PAD.left - PAD.right;
  const innerH = H - PAD.top - PAD.bottom;
  const values = teams.map((t) => t[statistic][metric]);
  const y = scaleLinear(Math.max(...values, 1), innerH);
  const barW = innerW / Math.max(teams.length, 1);
  let bars = "";
  teams.forEach((team, i) => {
    const height = y(values[i]);
    bars +=
      `<rect x="${(PAD.left + i * barW).toFixed(1)}" ` +
      `y="${(PAD.top + innerH - height).toFixed(1)}" ` +
      `width="${Math.max(barW - 2, 1).toFixed(1)}" height="${height.toFixed(1)}" ` +
      `class="team-bar" data-team="${escapeHtml(team.team_id)}">` +
      `<title>${escapeHtml(team.name)}: ${formatNumber(values[i])}</title></rect>`;
  });
  return svgOpen(title) + bars + `</svg>`;
}

/**
 * Per-member activity over the window's buckets, stacked or grouped.
 * Milestone overlays are drawn as labeled vertical lines.
 */
export function timelineSvg(
  detail: DetailResponse,
  metric: MetricKind,
  mode: "stacked" | "grouped",
  title: string,
): string {
  const innerW = W - PAD.left - PAD.right;
  const innerH = H - PAD.top - PAD.bottom;
  const members = detail.members.map((m) => m.canonical_id);
  const buckets = detail.bucket_starts;
  const perBucketTotal = buckets.map((_, i) =>
    members.reduce((acc, m) => acc + detail.series[m][metric][i], 0),
  );
  const maxMember = Math.max(
    1,
    ...members.flatMap((m) => detail.series[m][metric]),
  );
  const domainMax = mode === "stacked" ? Math.max(...perBucketTotal, 1) : maxMember;
  const y = scaleLinear(domainMax, innerH);
  const slotW = innerW / Math.max(buckets.length, 1);

  let bars = "";
  buckets.forEach((_, i) => {
    if (mode === "stacked") {
      let cursor = 0;
      members.forEach((m, mi) => {
        const v = detail.series[m][metric][i];
        if (v === 0) return;
        const height = y(v);
        cursor += height;
        bars +=
          `<rect x="${(PAD.left + i * slotW).toFixed(1)}" ` +
          `y="${(PAD.top + innerH - cursor).toFixed(1)}" ` +
          `width="${Math.max(slotW - 1.5, 0.8).toFixed(1)}" height="${height.toFixed(1)}" ` +
          `fill="${MEMBER_COLORS[mi % MEMBER_COLORS.length]}" data-member="${escapeHtml(m)}">` +
          `<title>${escapeHtml(m)} ${buckets[i]}: ${v}</title></rect>`;
      });
    } else {
      const laneW = Math.max(slotW / members.length - 0.8, 0.8);
      members.forEach((m, mi) => {
        const v = detail.series[m][metric][i];
        if (v === 0) return;
        const height = y(v);
        bars +=
          `<rect x="${(PAD.left + i * slotW + mi * laneW).toFixed(1)}" ` +
          `y="${(PAD.top + innerH - height).toFixed(1)}" ` +
          `width="${laneW.toFixed(1)}" height="${height.toFixed(1)}" ` +
          `fill="${MEMBER_COLORS[mi % MEMBER_COLORS.length]}" data-member="${escapeHtml(m)}">` +
          `<title>${escapeHtml(m)} ${buckets[i]}: ${v}</title></rect>`;
      });
    }
  });

  let overlays = "";
  for (const milestone of detail.overlays) {
    const idx = bucketIndexFor(milestone.date, buckets, detail.bucket);
    if (idx === null) continue;
    const x = PAD.left + idx * slotW + slotW / 2;
    overlays +=
      `<line x1="${x.toFixed(1)}" x2="${x.toFixed(1)}" y1="${PAD.top}" ` +
      `y2="${PAD.top + innerH}" class="milestone" data-milestone="${escapeHtml(milestone.name)}"/>` +
      `<text x="${(x + 3).toFixed(1)}" y="${PAD.top + 10}" class="milestone-label">` +
      `${escapeHtml(milestone.name)}</text>`;
  }

  const first = buckets[0] ?? "";
  const last = buckets[buckets.length - 1] ?? "";
  return (
    svgOpen(title) +
    bars +
    overlays +
    `<text x="${PAD.left}" y="${H - 10}" class="axis">${first}</text>` +
    `<text x="${W - PAD.right}" y="${H - 10}" text-anchor="end" class="axis">${last}</text>` +
    `<text x="8" y="${PAD.top + 4}" class="axis">${domainMax}</text>` +
    `</svg>`
  );
}

/** Index of the bucket containing an ISO date, or null when out of range. */
export function bucketIndexFor(
  date: string,
  bucketStarts: string[],
  bucket: "day" | "week",
): number | null {
  const stepDays = bucket === "week" ? 7 : 1;
  for (let i = 0; i < bucketStarts.length; i++) {
    const start = new Date(`${bucketStarts[i]}T00:00:00Z`).getTime();
    const end = start + stepDays * 86400_000;
    const t = new Date(`${date}T00:00:00Z`).getTime();
    if (t >= start && t < end) return i;
  }
  return null;
}

/** Office-hours outcomes per member, one stacked bar each, fixed colors. */
export function outcomeSvg(detail: DetailResponse, title: string): string {
  const innerW = W - PAD.left - PAD.right;
  const innerH = H - PAD.top - PAD.bottom;
  const members = detail.members;
  const totals = members.map((m) =>
    OUTCOME_KINDS.reduce((acc, o) => acc + detail.per_member_ticket_outcomes[m.canonical_id][o], 0),
  );
  const y = scaleLinear(Math.max(...totals, 1), innerH);
  const slotW = innerW / Math.max(members.length, 1);
  let bars = "";
  members.forEach((m, i) => {
    let cursor = 0;
    for (const outcome of OUTCOME_KINDS) {
      const v = detail.per_member_ticket_outcomes[m.canonical_id][outcome];
      if (v === 0) continue;
      const height = y(v);
      cursor += height;
      bars +=
        `<rect x="${(PAD.left + i * slotW + slotW * 0.2).toFixed(1)}" ` +
        `y="${(PAD.top + innerH - cursor).toFixed(1)}" ` +
        `width="${(slotW * 0.6).toFixed(1)}" height="${height.toFixed(1)}" ` +
        `fill="${OUTCOME_COLORS[outcome]}" data-outcome="${outcome}">` +
        `<title>${escapeHtml(m.display_name)}: ${v} ${OUTCOME_LABELS[outcome]}</title></rect>`;
    }
    bars +=
      `<text x="${(PAD.left + i * slotW + slotW / 2).toFixed(1)}" y="${H - 10}" ` +
      `text-anchor="middle" class="axis">${escapeHtml(m.display_name)}</text>`;
  });
  return svgOpen(title) + bars + `</svg>`;
}

/** The three-category outcome legend required next to any outcome chart. */
export function outcomeLegendHtml(): string {
  return (
    `<ul class="legend" data-testid="outcome-legend">` +
    OUTCOME_KINDS.map(
      (o) =>
        `<li><span class="swatch" style="background:${OUTCOME_COLORS[o]}"></span>` +
        `${OUTCOME_LABELS[o]}</li>`,
    ).join("") +
    `</ul>`
  );
}

// Team detail page: per-member timelines per activity kind, milestone
// overlays, and the office-hours outcome breakdown.

import { outcomeLegendHtml, outcomeSvg, timelineSvg } from "../charts.js";
import { escapeHtml, formatWindow, MEMBER_COLORS, METRIC_LABELS } from "../format.js";
import type { DetailResponse } from "../types.js";
import { METRIC_KINDS } from "../types.js";
import { bucketSums } from "../viewmodels.js";

export interface DetailPageState {
  detail: DetailResponse;
  mode: "stacked" | "grouped";
}

export function renderDetailPage(page: DetailPageState): string {
  const { detail, mode } = page;
  const memberLegend = detail.members
    .map(
      (m, i) =>
        `<li><span class="swatch" style="background:${MEMBER_COLORS[i % MEMBER_COLORS.length]}"></span>` +
        `${escapeHtml(m.display_name)}</li>`,
    )
    .join("");

  const charts = METRIC_KINDS.map((kind) => {
    const title = `${METRIC_LABELS[kind]} per ${detail.bucket}`;
    return `<figure>${timelineSvg(detail, kind, mode, title)}<figcaption>${title}; dashed lines mark milestones</figcaption></figure>`;
  }).join("");

  const sums = bucketSums(detail);
  const totalsRows = detail.members
    .map((m) => {
      const cells = METRIC_KINDS.map(
        (k) => `<td data-member="${escapeHtml(m.canonical_id)}" data-kind="${k}">${sums[m.canonical_id][k]}</td>`,
      ).join("");
      return `<tr><th>${escapeHtml(m.display_name)}</th>${cells}</tr>`;
    })
    .join("");

  return `
<section class="page detail">
  <header>
    <h1>${escapeHtml(detail.name)}, ${formatWindow(detail.window)}</h1>
    <nav>
      <button data-action="bucket" data-bucket="day" class="${detail.bucket === "day" ? "active" : ""}">daily</button>
      <button data-action="bucket" data-bucket="week" class="${detail.bucket === "week" ? "active" : ""}">weekly</button>
      <button data-action="toggle-mode" data-testid="toggle-mode">
        ${mode === "stacked" ? "switch to side-by-side bars" : "switch to stacked bars"}
      </button>
      ${detail.repo_url ? `<a href="${escapeHtml(detail.repo_url)}" target="_blank" rel="noopener">repository</a>` : ""}
      <button data-action="back-to-selected">back to selected teams</button>
    </nav>
    <ul class="legend">${memberLegend}</ul>
  </header>

  <div class="chart-grid">${charts}</div>

  <section>
    <h2>Window totals per member (sums of the buckets above)</h2>
    <table data-testid="window-totals">
      <thead><tr><th></th>${METRIC_KINDS.map((k) => `<th>${METRIC_LABELS[k]}</th>`).join("")}</tr></thead>
      <tbody>${totalsRows}</tbody>
    </table>
  </section>

  <section>
    <h2>Office-hours outcomes</h2>
    <figure>${outcomeSvg(detail, "Office-hours outcomes per member")}
      <figcaption>Each bar is one member; colors show how their help requests ended.</figcaption>
    </figure>
    ${outcomeLegendHtml()}
  </section>
</section>`;
}

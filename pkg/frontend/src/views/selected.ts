// Selected-teams page: the teams the filter flagged, next to course averages.

import { escapeHtml, formatNumber, formatWindow, METRIC_LABELS } from "../format.js";
import type { ApplyResponse, StatsDoc } from "../types.js";
import { METRIC_KINDS } from "../types.js";
import { selectedTeamsView, sidebarRows } from "../viewmodels.js";

export function renderSelectedTeamsPage(applied: ApplyResponse, overviewStats: StatsDoc): string {
  const view = selectedTeamsView(applied);
  const header = METRIC_KINDS.map((k) => `<th>${METRIC_LABELS[k]}</th>`).join("");
  const rows = view.rows
    .map((row) => {
      const cells = METRIC_KINDS.map(
        (k) =>
          `<td>${formatNumber(row.totals[k])}` +
          `<span class="nd" title="normalized difference">${formatNumber(row.normdiff[k])}</span></td>`,
      ).join("");
      const repo = row.repoUrl
        ? `<a href="${escapeHtml(row.repoUrl)}" target="_blank" rel="noopener">repository</a>`
        : "";
      return (
        `<tr data-team="${escapeHtml(row.teamId)}">` +
        `<td><a href="#/teams/${encodeURIComponent(row.teamId)}" data-action="open-detail">` +
        `${escapeHtml(row.name)}</a><br/><small>${row.memberNames.map(escapeHtml).join(", ")}</small></td>` +
        cells +
        `<td>${repo}</td>` +
        `<td><button data-action="email-team" data-team="${escapeHtml(row.teamId)}">Email</button></td>` +
        `</tr>`
      );
    })
    .join("");

  const sidebar = sidebarRows(overviewStats)
    .map(
      (r) =>
        `<tr data-metric="${r.metric}"><th>${r.label}</th>` +
        `<td data-cell="mean-total">${r.meanTotal}</td>` +
        `<td data-cell="median-total">${r.medianTotal}</td>` +
        `<td data-cell="mean-diff">${r.meanDiff}</td>` +
        `<td data-cell="median-diff">${r.medianDiff}</td></tr>`,
    )
    .join("");

  const table = view.empty
    ? `<p class="empty" data-testid="empty-selection">No teams matched this filter.</p>`
    : `<table class="teams" data-testid="selected-teams">
        <thead><tr><th>Team</th>${header}<th></th><th></th></tr></thead>
        <tbody>${rows}</tbody>
      </table>
      <p class="hint">Large numbers under counts are team totals; the small number is the
      normalized difference (0 = even, 1 = one member did everything).</p>`;

  return `
<section class="page selected">
  <header>
    <h1>${view.rows.length} team${view.rows.length === 1 ? "" : "s"} flagged by
      <code>${escapeHtml(view.expr)}</code></h1>
    <p>${formatWindow(applied.window)}</p>
    <nav><button data-action="back-to-charts">back to charts</button></nav>
  </header>
  <div class="columns">
    <div class="main">${table}</div>
    <aside class="sidebar" data-testid="course-averages">
      <h2>Course averages</h2>
      <table>
        <thead><tr><th></th><th>mean total</th><th>median total</th><th>mean diff</th><th>median diff</th></tr></thead>
        <tbody>${sidebar}</tbody>
      </table>
    </aside>
  </div>
</section>`;
}

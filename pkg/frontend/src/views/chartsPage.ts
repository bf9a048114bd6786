// Charts + filtering page: activity distributions for the whole class, with a
// filter builder whose output is the grammar text the service stores.

import { barPerTeamSvg, histogramSvg } from "../charts.js";
import {
  escapeHtml,
  formatWindow,
  METRIC_LABELS,
  STATISTIC_DEFINITIONS,
  STATISTIC_LABELS,
} from "../format.js";
import type { OverviewResponse, SavedFilterDoc, Statistic } from "../types.js";

export interface ChartsPageState {
  overview: OverviewResponse;
  statistic: Statistic;
  chartMode: "distribution" | "per-team";
  filterText: string;
  savedFilters: SavedFilterDoc[];
  filterError: string | null;
}

export function renderChartsPage(page: ChartsPageState): string {
  const { overview, statistic } = page;
  const charts = overview.sources
    .map((kind) => {
      const title = `${METRIC_LABELS[kind]} - ${STATISTIC_LABELS[statistic]}`;
      if (page.chartMode === "per-team") {
        return (
          `<figure>${barPerTeamSvg(overview.teams, kind, statistic, title)}` +
          `<figcaption>${title}, one bar per team</figcaption></figure>`
        );
      }
      const h = overview.histograms.find(
        (doc) => doc.metric === kind && doc.statistic === statistic,
      );
      if (!h) return "";
      return (
        `<figure>${histogramSvg(h, title)}` +
        `<figcaption>${title}: how many teams fall in each range</figcaption></figure>`
      );
    })
    .join("");

  const statButtons = (["total", "diff", "normdiff"] as Statistic[])
    .map(
      (s) =>
        `<button data-action="stat" data-stat="${s}"` +
        ` class="${s === statistic ? "active" : ""}"` +
        ` title="${escapeHtml(STATISTIC_DEFINITIONS[s])}">${STATISTIC_LABELS[s]}</button>`,
    )
    .join("");

  const saved = page.savedFilters
    .map(
      (f) =>
        `<li><button data-action="load-filter" data-name="${escapeHtml(f.name)}">@${escapeHtml(
          f.name,
        )}</button> <code>${escapeHtml(f.expr)}</code>` +
        ` <button data-action="delete-filter" data-name="${escapeHtml(f.name)}" class="danger">delete</button></li>`,
    )
    .join("");

  return `
<section class="page charts">
  <header>
    <h1>${escapeHtml(overview.course_id)}: team activity, ${formatWindow(overview.window)}</h1>
    <nav>
      ${statButtons}
      <button data-action="chart-mode" data-testid="chart-mode">
        ${page.chartMode === "distribution" ? "show one bar per team" : "show distributions"}
      </button>
      <button data-action="back-to-selection">change selection</button>
    </nav>
    <p class="hint">${escapeHtml(STATISTIC_DEFINITIONS[statistic])}</p>
  </header>
  <div class="chart-grid">${charts}</div>

  <section class="filter-box">
    <h2>Flag teams</h2>
    <div id="builder-rows"></div>
    <p>
      <button data-action="builder-add-atom">add condition</button>
      <button data-action="builder-add-ref">add saved filter</button>
      <select data-action="builder-connective">
        <option value="and" selected>all must hold (and)</option>
        <option value="or">any may hold (or)</option>
      </select>
    </p>
    <label class="filter-text">filter text (editable)
      <textarea data-action="filter-text" rows="2">${escapeHtml(page.filterText)}</textarea>
    </label>
    ${page.filterError ? `<p class="problem" data-testid="filter-error">${escapeHtml(page.filterError)}</p>` : ""}
    <p>
      <input type="text" placeholder="name to save as" data-action="save-name"/>
      <button data-action="save-filter">save filter</button>
      <button class="primary" data-action="apply-filter" data-testid="apply">apply filter</button>
    </p>
    <h3>Saved filters</h3>
    <ul class="saved-filters">${saved || "<li>none yet</li>"}</ul>
  </section>
</section>`;
}

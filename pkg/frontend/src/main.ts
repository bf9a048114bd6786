// Dashboard controller: hash routing, state, and API wiring. Pages are
// rendered from API responses only; a QueryGate discards stale responses so
// the screen never shows data from a superseded window.

import { api, ApiError } from "./api.js";
import {
  buildFilterText,
  defaultAtomRow,
  type BuilderRow,
} from "./filterBuilder.js";
import { escapeHtml } from "./format.js";
import {
  initialState,
  lastWeekWindow,
  QueryGate,
  sinceDateWindow,
  wholeTermWindow,
  type ViewState,
} from "./state.js";
import type { CourseSummary, EmailDraftDoc, SavedFilterDoc, Statistic } from "./types.js";
import { METRIC_KINDS } from "./types.js";
import { renderChartsPage } from "./views/chartsPage.js";
import { renderDetailPage } from "./views/detail.js";
import { renderSelectedTeamsPage } from "./views/selected.js";
import { renderSelectionPage } from "./views/selection.js";

/** The email button must use the service's draft verbatim. */
export function mailtoHref(draft: EmailDraftDoc): string {
  return draft.mailto_url;
}

interface AppState extends ViewState {
  courses: CourseSummary[];
  statistic: Statistic;
  chartMode: "distribution" | "per-team";
  savedFilters: SavedFilterDoc[];
  filterError: string | null;
  builderRows: BuilderRow[];
  builderConnective: "and" | "or";
  detail: import("./types.js").DetailResponse | null;
  detailMode: "stacked" | "grouped";
  detailBucket: "day" | "week";
}

const state: AppState = {
  ...initialState(),
  courses: [],
  statistic: "total",
  chartMode: "distribution",
  savedFilters: [],
  filterError: null,
  builderRows: [defaultAtomRow()],
  builderConnective: "and",
  detail: null,
  detailMode: "stacked",
  detailBucket: "day",
};

const gate = new QueryGate();
const root = () => document.getElementById("app")!;

function todayIso(): string {
  return new Date().toISOString().slice(0, 10);
}

// ---------------------------------------------------------------- rendering

function show(html: string) {
  root().innerHTML = html;
}

function renderSelection() {
  show(
    renderSelectionPage({
      courses: state.courses,
      courseId: state.course?.course_id ?? null,
      start: state.window?.start ?? "",
      end: state.window?.end ?? "",
      sources: state.sources,
    }),
  );
}

function renderCharts() {
  if (!state.overview) return navigate("#/select");
  show(
    renderChartsPage({
      overview: state.overview,
      statistic: state.statistic,
      chartMode: state.chartMode,
      filterText: state.filterText,
      savedFilters: state.savedFilters,
      filterError: state.filterError,
    }),
  );
  const rowsHost = document.getElementById("builder-rows");
  if (rowsHost) rowsHost.innerHTML = renderBuilderRows();
}

function renderSelected() {
  if (!state.applied || !state.overview) return navigate("#/charts");
  show(renderSelectedTeamsPage(state.applied, state.overview.stats));
}

function renderDetail() {
  if (!state.detail) return navigate("#/selected");
  show(renderDetailPage({ detail: state.detail, mode: state.detailMode }));
}

function renderBuilderRows(): string {
  const metricOptions = (selected: string) =>
    METRIC_KINDS.map(
      (k) => `<option value="${k}"${k === selected ? " selected" : ""}>${k}</option>`,
    ).join("");
  const statOptions = (selected: string) =>
    ["total", "diff", "normdiff", "max", "min"]
      .map((s) => `<option value="${s}"${s === selected ? " selected" : ""}>${s}</option>`)
      .join("");
  const cmpOptions = (selected: string) =>
    ["<", "<=", ">", ">=", "==", "!="]
      .map(
        (c) =>
          `<option value="${escapeHtml(c)}"${c === selected ? " selected" : ""}>${escapeHtml(c)}</option>`,
      )
      .join("");
  return state.builderRows
    .map((row, i) => {
      const negate = `<label><input type="checkbox" data-row="${i}" data-field="negate"${
        row.negate ? " checked" : ""
      }/> not</label>`;
      if (row.kind === "ref") {
        const names = state.savedFilters
          .map(
            (f) =>
              `<option value="${escapeHtml(f.name)}"${f.name === row.name ? " selected" : ""}>@${escapeHtml(f.name)}</option>`,
          )
          .join("");
        return `<p class="builder-row">${negate}<select data-row="${i}" data-field="name">${names}</select>
          <button data-action="builder-remove" data-row="${i}">remove</button></p>`;
      }
      const operand =
        row.operand.kind === "number"
          ? `<input type="number" step="any" value="${row.operand.value}" data-row="${i}" data-field="number"/>`
          : `<span>course.${row.operand.stat}.${row.operand.of}.${row.operand.metric}</span>`;
      return `<p class="builder-row">${negate}
        <select data-row="${i}" data-field="metric">${metricOptions(row.metric)}</select>.<select
          data-row="${i}" data-field="stat">${statOptions(row.stat)}</select>
        <select data-row="${i}" data-field="cmp">${cmpOptions(row.cmp)}</select>
        ${operand}
        <button data-action="builder-remove" data-row="${i}">remove</button></p>`;
    })
    .join("");
}

// ---------------------------------------------------------------- queries

async function loadCourses() {
  state.courses = await api.courses();
  renderSelection();
}

async function runOverview() {
  if (!state.course || !state.window) return;
  const token = gate.begin();
  const overview = await api.overview(state.course.course_id, state.window, state.sources);
  if (!gate.isCurrent(token)) return; // a newer query superseded this one
  state.overview = overview;
  await refreshSavedFilters();
  navigate("#/charts");
}

async function refreshSavedFilters() {
  if (!state.course) return;
  state.savedFilters = (await api.listFilters(state.course.course_id)).filters;
}

async function runApply() {
  if (!state.course || !state.window) return;
  const token = gate.begin();
  try {
    const applied = await api.applyFilter(
      state.course.course_id,
      { expr_text: state.filterText },
      state.window,
      state.sources,
    );
    if (!gate.isCurrent(token)) return;
    state.applied = applied;
    state.filterError = null;
    navigate("#/selected");
  } catch (err) {
    if (err instanceof ApiError) {
      state.filterError = `${err.payload.kind}: ${err.payload.message}`;
      renderCharts();
    } else {
      throw err;
    }
  }
}

async function openDetail(teamId: string) {
  if (!state.course || !state.window) return;
  const token = gate.begin();
  const detail = await api.teamDetail(
    state.course.course_id,
    teamId,
    state.window,
    state.detailBucket,
  );
  if (!gate.isCurrent(token)) return;
  state.detail = detail;
  state.detailTeamId = teamId;
  navigate(`#/teams/${encodeURIComponent(teamId)}`);
}

async function emailTeam(teamId: string) {
  if (!state.course || !state.window) return;
  const draft = await api.emailDraft(state.course.course_id, teamId, state.window, "default");
  window.location.href = mailtoHref(draft); // the draft, not a re-rendering
}

// ---------------------------------------------------------------- routing

function navigate(hash: string) {
  if (location.hash === hash) route();
  else location.hash = hash;
}

function route() {
  const hash = location.hash || "#/select";
  if (hash.startsWith("#/teams/")) return renderDetail();
  if (hash === "#/selected") return renderSelected();
  if (hash === "#/charts") return renderCharts();
  return renderSelection();
}

// ---------------------------------------------------------------- events

function syncFilterTextFromBuilder() {
  state.filterText = buildFilterText(state.builderRows, state.builderConnective);
}

function onClick(event: Event) {
  const target = (event.target as HTMLElement).closest("[data-action]") as HTMLElement | null;
  if (!target) return;
  const action = target.dataset.action!;
  switch (action) {
    case "preset-week":
      if (state.course) state.window = lastWeekWindow(todayIso());
      return renderSelection();
    case "preset-term":
      if (state.course) state.window = wholeTermWindow(state.course);
      return renderSelection();
    case "continue":
      void runOverview();
      return;
    case "stat":
      state.statistic = target.dataset.stat as Statistic;
      return renderCharts();
    case "chart-mode":
      state.chartMode = state.chartMode === "distribution" ? "per-team" : "distribution";
      return renderCharts();
    case "back-to-selection":
      return navigate("#/select");
    case "back-to-charts":
      return navigate("#/charts");
    case "back-to-selected":
      return navigate("#/selected");
    case "builder-add-atom":
      state.builderRows.push(defaultAtomRow());
      syncFilterTextFromBuilder();
      return renderCharts();
    case "builder-add-ref":
      if (state.savedFilters.length === 0) {
        state.filterError = "save a filter first, then reference it with @name";
        return renderCharts();
      }
      state.builderRows.push({ kind: "ref", negate: false, name: state.savedFilters[0].name });
      syncFilterTextFromBuilder();
      return renderCharts();
    case "builder-remove":
      state.builderRows.splice(Number(target.dataset.row), 1);
      syncFilterTextFromBuilder();
      return renderCharts();
    case "apply-filter":
      void runApply();
      return;
    case "save-filter": {
      const nameInput = document.querySelector<HTMLInputElement>("[data-action='save-name']");
      const name = nameInput?.value.trim() ?? "";
      if (!state.course || !name) return;
      void api
        .saveFilter(state.course.course_id, name, state.filterText)
        .then(refreshSavedFilters)
        .then(renderCharts)
        .catch((err: ApiError) => {
          state.filterError = `${err.payload.kind}: ${err.payload.message}`;
          renderCharts();
        });
      return;
    }
    case "load-filter": {
      const found = state.savedFilters.find((f) => f.name === target.dataset.name);
      if (found) {
        state.filterText = found.expr;
        state.filterError = null;
      }
      return renderCharts();
    }
    case "delete-filter":
      if (!state.course) return;
      void api
        .deleteFilter(state.course.course_id, target.dataset.name!)
        .then(refreshSavedFilters)
        .then(renderCharts)
        .catch((err: ApiError) => {
          state.filterError = `${err.payload.kind}: ${err.payload.message}`;
          renderCharts();
        });
      return;
    case "email-team":
      void emailTeam(target.dataset.team!);
      return;
    case "open-detail":
      event.preventDefault();
      void openDetail((target.closest("tr") as HTMLElement).dataset.team!);
      return;
    case "bucket":
      state.detailBucket = target.dataset.bucket as "day" | "week";
      if (state.detailTeamId) void openDetail(state.detailTeamId);
      return;
    case "toggle-mode":
      state.detailMode = state.detailMode === "stacked" ? "grouped" : "stacked";
      return renderDetail();
  }
}

function onChange(event: Event) {
  const target = event.target as HTMLElement;
  const action = target.dataset.action;
  if (action === "select-course") {
    const id = (target as HTMLSelectElement).value;
    state.course = state.courses.find((c) => c.course_id === id) ?? null;
    state.window = state.course ? wholeTermWindow(state.course) : null;
    return renderSelection();
  }
  if (action === "set-start" || action === "set-end") {
    const value = (target as HTMLInputElement).value;
    const current = state.window ?? { start: "", end: "" };
    state.window =
      action === "set-start" ? { ...current, start: value } : { ...current, end: value };
    return renderSelection();
  }
  if (action === "preset-since") {
    const value = (target as HTMLInputElement).value;
    if (value) state.window = sinceDateWindow(value, todayIso());
    return renderSelection();
  }
  if (action === "filter-text") {
    state.filterText = (target as HTMLTextAreaElement).value;
    return;
  }
  if (action === "builder-connective") {
    state.builderConnective = (target as HTMLSelectElement).value as "and" | "or";
    syncFilterTextFromBuilder();
    return renderCharts();
  }
  if (target.dataset.source !== undefined) {
    const kind = target.dataset.source as (typeof METRIC_KINDS)[number];
    const checked = (target as HTMLInputElement).checked;
    state.sources = checked
      ? [...METRIC_KINDS.filter((k) => state.sources.includes(k) || k === kind)]
      : state.sources.filter((k) => k !== kind);
    return renderSelection();
  }
  if (target.dataset.row !== undefined && target.dataset.field !== undefined) {
    const row = state.builderRows[Number(target.dataset.row)];
    const field = target.dataset.field;
    if (row.kind === "atom") {
      if (field === "negate") row.negate = (target as HTMLInputElement).checked;
      else if (field === "metric") row.metric = (target as HTMLSelectElement).value as never;
      else if (field === "stat") row.stat = (target as HTMLSelectElement).value as never;
      else if (field === "cmp") row.cmp = (target as HTMLSelectElement).value as never;
      else if (field === "number")
        row.operand = { kind: "number", value: Number((target as HTMLInputElement).value) };
    } else if (field === "negate") {
      row.negate = (target as HTMLInputElement).checked;
    } else if (field === "name") {
      row.name = (target as HTMLSelectElement).value;
    }
    syncFilterTextFromBuilder();
    const textarea = document.querySelector<HTMLTextAreaElement>("[data-action='filter-text']");
    if (textarea) textarea.value = state.filterText;
    return;
  }
}

export function start() {
  document.addEventListener("click", onClick);
  document.addEventListener("change", onChange);
  window.addEventListener("hashchange", route);
  route();
  void loadCourses();
}

// In the browser, boot immediately; tests import the pure pieces instead.
if (typeof document !== "undefined" && document.getElementById("app")) {
  start();
}

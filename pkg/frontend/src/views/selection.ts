// Landing page: pick a course, a time frame, and which activity sources to see.

import { escapeHtml } from "../format.js";
import { METRIC_LABELS } from "../format.js";
import { selectionReady, windowProblem } from "../state.js";
import type { CourseSummary, MetricKind } from "../types.js";
import { METRIC_KINDS } from "../types.js";

export interface SelectionFormState {
  courses: CourseSummary[];
  courseId: string | null;
  start: string;
  end: string;
  sources: MetricKind[];
}

export function renderSelectionPage(form: SelectionFormState): string {
  const problem = windowProblem(form.start, form.end);
  const ready = form.courseId !== null && selectionReady(form.start, form.end, form.sources);
  const options = form.courses
    .map(
      (c) =>
        `<option value="${escapeHtml(c.course_id)}"` +
        `${c.course_id === form.courseId ? " selected" : ""}>` +
        `${escapeHtml(c.title)} (${c.team_count} teams)</option>`,
    )
    .join("");
  const checkboxes = METRIC_KINDS.map(
    (kind) =>
      `<label class="source"><input type="checkbox" data-source="${kind}"` +
      `${form.sources.includes(kind) ? " checked" : ""}/> ${METRIC_LABELS[kind]}</label>`,
  ).join("");
  return `
<section class="page selection">
  <h1>Pick a course, time frame, and sources</h1>
  <div class="field">
    <label for="course-select">Course</label>
    <select id="course-select" data-action="select-course">
      <option value=""${form.courseId === null ? " selected" : ""} disabled>choose a course</option>
      ${options}
    </select>
  </div>
  <div class="field">
    <span class="label">Time frame (activity at the end date is excluded)</span>
    <div class="presets">
      <button data-action="preset-week" ${form.courseId === null ? "disabled" : ""}>Last week</button>
      <button data-action="preset-term" ${form.courseId === null ? "disabled" : ""}>Whole term</button>
      <label>since <input type="date" data-action="preset-since"/></label>
    </div>
    <div class="range">
      <label>start <input type="date" data-action="set-start" value="${form.start}"/></label>
      <label>end <input type="date" data-action="set-end" value="${form.end}"/></label>
    </div>
    ${problem ? `<p class="problem" data-testid="window-problem">${problem}</p>` : ""}
  </div>
  <div class="field">
    <span class="label">Activity sources</span>
    ${checkboxes}
    ${form.sources.length === 0 ? `<p class="problem" data-testid="sources-problem">pick at least one source</p>` : ""}
  </div>
  <button class="primary" data-action="continue" data-testid="continue" ${ready ? "" : "disabled"}>
    Continue to charts
  </button>
</section>`;
}

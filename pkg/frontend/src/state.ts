// Dashboard view state. Mirrors exactly one valid API query at a time;
// in-flight queries are sequenced so a stale response can never land on
// top of a newer one (last write wins).

import type { ApplyResponse, CourseSummary, MetricKind, OverviewResponse } from "./types.js";

export interface ViewState {
  course: CourseSummary | null;
  window: { start: string; end: string } | null;
  sources: MetricKind[];
  filterText: string;
  overview: OverviewResponse | null;
  applied: ApplyResponse | null;
  detailTeamId: string | null;
}

export function initialState(): ViewState {
  return {
    course: null,
    window: null,
    sources: ["posts", "replies", "commits", "additions", "tickets"],
    filterText: "",
    overview: null,
    applied: null,
    detailTeamId: null,
  };
}

export class QueryGate {
  private seq = 0;

  /** Start a query; the returned token identifies the newest request. */
  begin(): number {
    return ++this.seq;
  }

  /** True iff no newer query has started since `token` was issued. */
  isCurrent(token: number): boolean {
    return token === this.seq;
  }
}

/**
 * Window validation shared by the selection form: both bounds present and
 * start strictly before end (the window is half-open [start, end)).
 */
export function windowProblem(start: string, end: string): string | null {
  if (!start || !end) return "choose both a start and an end";
  if (start >= end) return "the end must come after the start";
  return null;
}

/** The Continue button stays disabled until at least one source is chosen. */
export function selectionReady(start: string, end: string, sources: MetricKind[]): boolean {
  return windowProblem(start, end) === null && sources.length > 0;
}

/** Whole-term preset: end is exclusive, so step one day past the last term day. */
export function wholeTermWindow(course: CourseSummary): { start: string; end: string } {
  return { start: course.term_start, end: nextDay(course.term_end) };
}

export function lastWeekWindow(today: string): { start: string; end: string } {
  const end = nextDay(today);
  const start = addDays(end, -7);
  return { start, end };
}

export function sinceDateWindow(date: string, today: string): { start: string; end: string } {
  return { start: date, end: nextDay(today) };
}

export function nextDay(isoDate: string): string {
  return addDays(isoDate, 1);
}

export function addDays(isoDate: string, days: number): string {
  const d = new Date(`${isoDate}T00:00:00Z`);
  d.setUTCDate(d.getUTCDate() + days);
  return d.toISOString().slice(0, 10);
}

// Pure mappers from API responses to what the pages display. Every number in
// a view model is copied from one response field; nothing is recomputed here
// except the sums the detail page labels as window totals (checked against
// the overview by the test suite).

import { formatNumber, METRIC_LABELS } from "./format.js";
import type {
  ApplyResponse,
  DetailResponse,
  KindMap,
  MetricKind,
  StatsDoc,
  TeamDoc,
} from "./types.js";
import { METRIC_KINDS } from "./types.js";

export interface SelectedTeamRow {
  teamId: string;
  name: string;
  repoUrl: string | null;
  memberNames: string[];
  totals: KindMap;
  normdiff: KindMap;
}

export interface SelectedTeamsView {
  expr: string;
  rows: SelectedTeamRow[];
  empty: boolean;
}

/** Rows of the selected-teams table, in the API's (team-id) order. */
export function selectedTeamsView(applied: ApplyResponse): SelectedTeamsView {
  return {
    expr: applied.expr,
    empty: applied.team_ids.length === 0,
    rows: applied.teams.map((team) => ({
      teamId: team.team_id,
      name: team.name,
      repoUrl: team.repo_url,
      memberNames: team.members.map((m) => m.display_name),
      totals: team.total,
      normdiff: team.normdiff,
    })),
  };
}

export interface SidebarRow {
  metric: MetricKind;
  label: string;
  meanTotal: string;
  medianTotal: string;
  meanDiff: string;
  medianDiff: string;
}

/**
 * The course-average sidebar. Values come from the overview response's
 * stats document, the single source of truth for baselines.
 */
export function sidebarRows(stats: StatsDoc): SidebarRow[] {
  return METRIC_KINDS.map((metric) => ({
    metric,
    label: METRIC_LABELS[metric],
    meanTotal: formatNumber(stats.mean_total[metric]),
    medianTotal: formatNumber(stats.median_total[metric]),
    meanDiff: formatNumber(stats.mean_diff[metric]),
    medianDiff: formatNumber(stats.median_diff[metric]),
  }));
}

/** Per-member window totals shown on the detail page: sums of the displayed buckets. */
export function bucketSums(detail: DetailResponse): Record<string, KindMap> {
  const out: Record<string, KindMap> = {};
  for (const member of detail.members) {
    const series = detail.series[member.canonical_id];
    out[member.canonical_id] = Object.fromEntries(
      METRIC_KINDS.map((kind) => [kind, series[kind].reduce((a, b) => a + b, 0)]),
    ) as KindMap;
  }
  return out;
}

/** Overview totals for one team, keyed per member (for conservation checks). */
export function overviewMemberCounts(team: TeamDoc): Record<string, KindMap> {
  return Object.fromEntries(team.per_member.map((m) => [m.canonical_id, m.counts]));
}

// Acceptance (UI parity): the selected-teams view shows exactly the team ids
// the CLI report returns for the same course, window, and filter, and the
// sidebar averages equal the overview endpoint's course stats.

import { describe, expect, it } from "vitest";
import { renderSelectedTeamsPage } from "../src/views/selected.js";
import { sidebarRows } from "../src/viewmodels.js";
import { formatNumber } from "../src/format.js";
import { METRIC_KINDS, type ApplyResponse, type OverviewResponse } from "../src/types.js";
import apply from "./fixtures/apply.json";
import cliReport from "./fixtures/cli_report.json";
import overview from "./fixtures/overview.json";

const applied = apply as unknown as ApplyResponse;
const ov = overview as unknown as OverviewResponse;

function teamIdsShown(html: string): string[] {
  return [...html.matchAll(/<tr data-team="([^"]+)"/g)].map((m) => m[1]);
}

describe("selected-teams view parity with the CLI report", () => {
  it("shows exactly the team ids the CLI selected, in the same order", () => {
    const html = renderSelectedTeamsPage(applied, ov.stats);
    expect(teamIdsShown(html)).toEqual(cliReport.team_ids);
  });

  it("applies the same filter expression the CLI ran", () => {
    expect(applied.expr).toBe(cliReport.expr);
    expect(applied.team_ids).toEqual(cliReport.team_ids);
  });

  it("renders the explicit empty state when nothing matches", () => {
    const empty = { ...applied, team_ids: [], teams: [] };
    const html = renderSelectedTeamsPage(empty, ov.stats);
    expect(html).toContain('data-testid="empty-selection"');
    expect(html).toContain("No teams matched");
  });
});

describe("course-averages sidebar parity with the overview stats", () => {
  it("every sidebar number is the overview CourseStats field, formatted", () => {
    const rows = sidebarRows(ov.stats);
    for (const row of rows) {
      expect(row.meanTotal).toBe(formatNumber(ov.stats.mean_total[row.metric]));
      expect(row.medianTotal).toBe(formatNumber(ov.stats.median_total[row.metric]));
      expect(row.meanDiff).toBe(formatNumber(ov.stats.mean_diff[row.metric]));
      expect(row.medianDiff).toBe(formatNumber(ov.stats.median_diff[row.metric]));
    }
    expect(rows.map((r) => r.metric)).toEqual(METRIC_KINDS);
  });

  it("the rendered sidebar carries those same values", () => {
    const html = renderSelectedTeamsPage(applied, ov.stats);
    for (const metric of METRIC_KINDS) {
      const pattern = new RegExp(
        `<tr data-metric="${metric}">.*?data-cell="mean-total">([^<]*)<.*?` +
          `data-cell="median-total">([^<]*)<.*?data-cell="mean-diff">([^<]*)<.*?` +
          `data-cell="median-diff">([^<]*)<`,
        "s",
      );
      const match = html.match(pattern);
      expect(match, `sidebar row for ${metric}`).not.toBeNull();
      expect(match![1]).toBe(formatNumber(ov.stats.mean_total[metric]));
      expect(match![2]).toBe(formatNumber(ov.stats.median_total[metric]));
      expect(match![3]).toBe(formatNumber(ov.stats.mean_diff[metric]));
      expect(match![4]).toBe(formatNumber(ov.stats.median_diff[metric]));
    }
  });

  it("the stats in the apply response agree with the overview stats", () => {
    expect(applied.stats).toEqual(ov.stats);
  });
});

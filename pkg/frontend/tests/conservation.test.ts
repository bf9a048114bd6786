// Acceptance (detail-view conservation): the window totals the detail page
// displays (sums of the timeline buckets) equal the overview totals for the
// same team and window.

import { describe, expect, it } from "vitest";
import { bucketSums, overviewMemberCounts } from "../src/viewmodels.js";
import { renderDetailPage } from "../src/views/detail.js";
import { METRIC_KINDS, type DetailResponse, type OverviewResponse } from "../src/types.js";
import detail from "./fixtures/detail.json";
import overview from "./fixtures/overview.json";

const det = detail as unknown as DetailResponse;
const ov = overview as unknown as OverviewResponse;

describe("detail-view conservation", () => {
  const team = ov.teams.find((t) => t.team_id === det.team_id)!;

  it("the fixture windows match, so the comparison is like for like", () => {
    expect(det.window).toEqual(ov.window);
    expect(team).toBeDefined();
  });

  it("bucket sums equal the overview per-member counts for every kind", () => {
    const sums = bucketSums(det);
    const expected = overviewMemberCounts(team);
    expect(sums).toEqual(expected);
  });

  it("the rendered window-totals table shows those sums", () => {
    const html = renderDetailPage({ detail: det, mode: "stacked" });
    const sums = bucketSums(det);
    for (const member of det.members) {
      for (const kind of METRIC_KINDS) {
        const pattern = new RegExp(
          `<td data-member="${member.canonical_id}" data-kind="${kind}">(\\d+)</td>`,
        );
        const match = html.match(pattern);
        expect(match, `${member.canonical_id}/${kind}`).not.toBeNull();
        expect(Number(match![1])).toBe(sums[member.canonical_id][kind]);
      }
    }
  });

  it("buckets span the window contiguously (weekly)", () => {
    expect(det.bucket).toBe("week");
    for (let i = 1; i < det.bucket_starts.length; i++) {
      const prev = new Date(`${det.bucket_starts[i - 1]}T00:00:00Z`).getTime();
      const cur = new Date(`${det.bucket_starts[i]}T00:00:00Z`).getTime();
      expect(cur - prev).toBe(7 * 86400_000);
    }
  });

  it("ticket outcome totals add up across members", () => {
    for (const outcome of ["resolved", "unresolved_helped", "unserved"] as const) {
      const fromMembers = det.members.reduce(
        (acc, m) => acc + det.per_member_ticket_outcomes[m.canonical_id][outcome],
        0,
      );
      expect(fromMembers).toBe(det.ticket_outcomes[outcome]);
    }
  });
});

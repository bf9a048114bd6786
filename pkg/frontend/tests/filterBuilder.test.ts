// The builder emits the same grammar text an instructor could type by hand.

import { describe, expect, it } from "vitest";
import { buildFilterText, type BuilderRow } from "../src/filterBuilder.js";

const atom = (overrides: Partial<Extract<BuilderRow, { kind: "atom" }>> = {}): BuilderRow => ({
  kind: "atom",
  negate: false,
  metric: "commits",
  stat: "total",
  cmp: "<",
  operand: { kind: "number", value: 5 },
  ...overrides,
});

describe("filter text builder", () => {
  it("builds the struggling-team query", () => {
    const rows: BuilderRow[] = [
      atom(),
      atom({ metric: "posts", cmp: "==", operand: { kind: "number", value: 0 } }),
      atom({ metric: "tickets", cmp: "==", operand: { kind: "number", value: 0 } }),
    ];
    expect(buildFilterText(rows, "and")).toBe(
      "commits.total < 5 and posts.total == 0 and tickets.total == 0",
    );
  });

  it("builds an unbalanced-work query on normalized difference", () => {
    const rows: BuilderRow[] = [
      atom({ stat: "normdiff", cmp: ">=", operand: { kind: "number", value: 0.9 } }),
    ];
    expect(buildFilterText(rows, "and")).toBe("commits.normdiff >= 0.9");
  });

  it("supports course baselines with a scale", () => {
    const rows: BuilderRow[] = [
      atom({
        cmp: ">",
        operand: { kind: "baseline", stat: "median", of: "total", metric: "commits", scale: 1.25 },
      }),
    ];
    expect(buildFilterText(rows, "and")).toBe(
      "commits.total > course.median.total.commits * 1.25",
    );
  });

  it("omits the scale when it is 1", () => {
    const rows: BuilderRow[] = [
      atom({
        metric: "posts",
        cmp: ">=",
        operand: { kind: "baseline", stat: "mean", of: "diff", metric: "posts" },
      }),
    ];
    expect(buildFilterText(rows, "and")).toBe("posts.total >= course.mean.diff.posts");
  });

  it("mixes saved-filter references and negation", () => {
    const rows: BuilderRow[] = [
      { kind: "ref", negate: false, name: "silent" },
      atom({ negate: true, metric: "tickets", cmp: ">", operand: { kind: "number", value: 0 } }),
    ];
    expect(buildFilterText(rows, "or")).toBe("@silent or not tickets.total > 0");
  });
});

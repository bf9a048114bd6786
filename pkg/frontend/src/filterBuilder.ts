// Builds filter grammar text from structured rows, so filters assembled by
// clicking are interchangeable with hand-written ones (same text, same store).

import type { MetricKind } from "./types.js";

export type AtomStat = "total" | "diff" | "normdiff" | "max" | "min";
export type Cmp = "<" | "<=" | ">" | ">=" | "==" | "!=";

export interface NumberOperand {
  kind: "number";
  value: number;
}

export interface BaselineOperand {
  kind: "baseline";
  stat: "mean" | "median";
  of: "total" | "diff";
  metric: MetricKind;
  scale?: number; // default 1
}

export interface AtomRow {
  kind: "atom";
  negate: boolean;
  metric: MetricKind;
  stat: AtomStat;
  cmp: Cmp;
  operand: NumberOperand | BaselineOperand;
}

export interface RefRow {
  kind: "ref";
  negate: boolean;
  name: string;
}

export type BuilderRow = AtomRow | RefRow;

export function operandText(operand: NumberOperand | BaselineOperand): string {
  if (operand.kind === "number") return String(operand.value);
  const base = `course.${operand.stat}.${operand.of}.${operand.metric}`;
  const scale = operand.scale ?? 1;
  return scale === 1 ? base : `${base} * ${scale}`;
}

export function rowText(row: BuilderRow): string {
  const body =
    row.kind === "ref"
      ? `@${row.name}`
      : `${row.metric}.${row.stat} ${row.cmp} ${operandText(row.operand)}`;
  return row.negate ? `not ${body}` : body;
}

/** Join rows with one connective; `not` binds tighter, so no parens needed. */
export function buildFilterText(rows: BuilderRow[], connective: "and" | "or"): string {
  return rows.map(rowText).join(` ${connective} `);
}

export function defaultAtomRow(): AtomRow {
  return {
    kind: "atom",
    negate: false,
    metric: "commits",
    stat: "total",
    cmp: "<",
    operand: { kind: "number", value: 5 },
  };
}

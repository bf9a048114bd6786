// Labels, number formatting, and the plain-language metric definitions shown
// next to every chart (the numbers are not self-explanatory on their own).

import type { MetricKind, OutcomeKind, Statistic } from "./types.js";

export const METRIC_LABELS: Record<MetricKind, string> = {
  posts: "Forum posts",
  replies: "Forum replies",
  commits: "Commits",
  additions: "Lines added",
  tickets: "Office-hours tickets",
};

export const STATISTIC_LABELS: Record<Statistic, string> = {
  total: "Team total",
  diff: "Member difference",
  normdiff: "Normalized difference",
};

export const STATISTIC_DEFINITIONS: Record<Statistic, string> = {
  total: "Sum of the metric over all members of the team.",
  diff: "Most active member minus least active member; bigger means more imbalance.",
  normdiff:
    "Member difference divided by the team total, from 0 (perfectly even) to 1 " +
    "(one member did everything).",
};

export const OUTCOME_LABELS: Record<OutcomeKind, string> = {
  resolved: "Resolved",
  unresolved_helped: "Helped, not resolved",
  unserved: "Not served",
};

export const OUTCOME_COLORS: Record<OutcomeKind, string> = {
  resolved: "#2e7d32",
  unresolved_helped: "#f9a825",
  unserved: "#c62828",
};

export const MEMBER_COLORS = ["#1565c0", "#ef6c00", "#6a1b9a", "#00838f", "#558b2f", "#ad1457"];

/** Integers exact; reals trimmed to at most 2 decimals (matches the API's style). */
export function formatNumber(value: number): string {
  if (Number.isInteger(value)) return String(value);
  return String(Math.round(value * 100) / 100);
}

export function formatWindow(window: { start: string; end: string }): string {
  return `${window.start.slice(0, 10)} to ${window.end.slice(0, 10)} (end exclusive)`;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

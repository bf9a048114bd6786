// Response shapes of the analytics HTTP API. The dashboard never aggregates
// on its own: every number it shows comes from one of these fields.

export type MetricKind = "posts" | "replies" | "commits" | "additions" | "tickets";
export const METRIC_KINDS: MetricKind[] = ["posts", "replies", "commits", "additions", "tickets"];

export type Statistic = "total" | "diff" | "normdiff";
export const STATISTICS: Statistic[] = ["total", "diff", "normdiff"];

export type KindMap<T = number> = Record<MetricKind, T>;

export interface CourseSummary {
  course_id: string;
  title: string;
  term_start: string; // ISO date
  term_end: string;
  team_count: number;
  milestones: { name: string; date: string }[];
}

export interface MemberRef {
  canonical_id: string;
  display_name: string;
  email?: string;
}

export interface TeamDoc {
  team_id: string;
  name: string;
  repo_url: string | null;
  members: MemberRef[];
  total: KindMap;
  diff: KindMap;
  normdiff: KindMap;
  per_member: { canonical_id: string; counts: KindMap }[];
}

export interface StatsDoc {
  team_count: number;
  mean_total: KindMap;
  median_total: KindMap;
  mean_diff: KindMap;
  median_diff: KindMap;
}

export interface HistogramDoc {
  metric: MetricKind;
  statistic: Statistic;
  bin_edges: number[];
  counts: number[];
}

export interface OverviewResponse {
  course_id: string;
  window: { start: string; end: string };
  sources: MetricKind[];
  teams: TeamDoc[];
  stats: StatsDoc;
  histograms: HistogramDoc[];
}

export interface ApplyResponse {
  course_id: string;
  window: { start: string; end: string };
  sources: MetricKind[];
  expr: string;
  team_ids: string[];
  teams: TeamDoc[];
  stats: StatsDoc;
}

export interface SavedFilterDoc {
  name: string;
  expr: string;
  created_at: string;
}

export type OutcomeKind = "resolved" | "unresolved_helped" | "unserved";
export const OUTCOME_KINDS: OutcomeKind[] = ["resolved", "unresolved_helped", "unserved"];

export interface DetailResponse {
  team_id: string;
  name: string;
  repo_url: string | null;
  bucket: "day" | "week";
  window: { start: string; end: string };
  members: MemberRef[];
  bucket_starts: string[];
  series: Record<string, KindMap<number[]>>;
  overlays: { name: string; date: string }[];
  ticket_outcomes: Record<OutcomeKind, number>;
  per_member_ticket_outcomes: Record<string, Record<OutcomeKind, number>>;
}

export interface EmailDraftDoc {
  recipients: string[];
  subject: string;
  body: string;
  mailto_url: string;
}

export interface TemplateDoc {
  name: string;
  subject: string;
  body: string;
}

export interface ApiErrorPayload {
  kind: string;
  message: string;
  location: unknown;
}

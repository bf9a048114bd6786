// Thin typed client for the analytics API. Same-origin by default; the
// service serves this app, so no prefix is needed.

import type {
  ApiErrorPayload,
  ApplyResponse,
  CourseSummary,
  DetailResponse,
  EmailDraftDoc,
  MetricKind,
  OverviewResponse,
  SavedFilterDoc,
  TemplateDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, public payload: ApiErrorPayload) {
    super(`${payload.kind}: ${payload.message}`);
  }
}

export interface QueryWindow {
  start: string;
  end: string;
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, init);
  if (!response.ok) {
    let payload: ApiErrorPayload = {
      kind: `HTTP${response.status}`,
      message: response.statusText,
      location: null,
    };
    try {
      payload = (await response.json()).error ?? payload;
    } catch {
      // non-JSON error body; keep the status fallback
    }
    throw new ApiError(response.status, payload);
  }
  return (await response.json()) as T;
}

function windowParams(window: QueryWindow, sources: MetricKind[] | null): URLSearchParams {
  const params = new URLSearchParams({ start: window.start, end: window.end });
  if (sources && sources.length) params.set("sources", sources.join(","));
  return params;
}

export const api = {
  courses(): Promise<CourseSummary[]> {
    return request("/api/courses");
  },

  overview(courseId: string, window: QueryWindow, sources: MetricKind[] | null, bins = 10) {
    const params = windowParams(window, sources);
    params.set("bins", String(bins));
    return request<OverviewResponse>(`/api/courses/${courseId}/overview?${params}`);
  },

  applyFilter(
    courseId: string,
    query: { expr_text?: string; name?: string },
    window: QueryWindow,
    sources: MetricKind[] | null,
  ) {
    return request<ApplyResponse>(`/api/courses/${courseId}/filters/apply`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        ...query,
        start: window.start,
        end: window.end,
        ...(sources && sources.length ? { sources } : {}),
      }),
    });
  },

  listFilters(courseId: string) {
    return request<{ filters: SavedFilterDoc[] }>(`/api/courses/${courseId}/filters`);
  },

  saveFilter(courseId: string, name: string, expr: string, overwrite = false) {
    return request<SavedFilterDoc>(`/api/courses/${courseId}/filters/${encodeURIComponent(name)}`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ expr, overwrite }),
    });
  },

  deleteFilter(courseId: string, name: string) {
    return request<{ deleted: string }>(
      `/api/courses/${courseId}/filters/${encodeURIComponent(name)}`,
      { method: "DELETE" },
    );
  },

  teamDetail(courseId: string, teamId: string, window: QueryWindow, bucket: "day" | "week") {
    const params = windowParams(window, null);
    params.set("bucket", bucket);
    return request<DetailResponse>(
      `/api/courses/${courseId}/teams/${encodeURIComponent(teamId)}/detail?${params}`,
    );
  },

  emailDraft(courseId: string, teamId: string, window: QueryWindow, templateName: string, memberId?: string) {
    const params = windowParams(window, null);
    return request<EmailDraftDoc>(
      `/api/courses/${courseId}/teams/${encodeURIComponent(teamId)}/email?${params}`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({
          template_name: templateName,
          ...(memberId ? { member_id: memberId } : {}),
        }),
      },
    );
  },

  listTemplates(courseId: string) {
    return request<{ templates: TemplateDoc[] }>(`/api/courses/${courseId}/templates`);
  },
};

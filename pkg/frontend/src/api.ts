/** Typed client for the model service; all curves come from here. */

import type {
  ApiErrorBody,
  FitRequest,
  FitResponse,
  ObservationsResponse,
  ProjectRequest,
  ProjectionResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
    public readonly details?: unknown,
  ) {
    super(message);
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, init);
  if (!response.ok) {
    let body: ApiErrorBody | null = null;
    try {
      body = (await response.json()) as ApiErrorBody;
    } catch {
      // non-JSON error body; fall through to the generic message
    }
    throw new ApiError(
      response.status,
      body?.code ?? "error",
      body?.message ?? `request failed with status ${response.status}`,
      body?.details,
    );
  }
  return (await response.json()) as T;
}

function post<T>(path: string, payload: unknown): Promise<T> {
  return request<T>(path, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(payload),
  });
}

export function fetchCountries(): Promise<{ countries: string[] }> {
  return request("/api/countries");
}

export function fetchObservations(
  country: string,
  start: string,
  end: string,
  scale: number,
): Promise<ObservationsResponse> {
  const params = new URLSearchParams({ start, end, scale: String(scale) });
  return request(`/api/observations/${encodeURIComponent(country)}?${params}`);
}

export function runFit(body: FitRequest): Promise<FitResponse> {
  return post("/api/fit", body);
}

export function runProjection(body: ProjectRequest): Promise<ProjectionResponse> {
  return post("/api/project", body);
}

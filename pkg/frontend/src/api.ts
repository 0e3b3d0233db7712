import type {
  AlertRequestBody,
  AlertResponse,
  DashboardPayload,
  Disease,
  Headline,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    detail: string,
  ) {
    super(detail);
  }
}

declare global {
  interface Window {
    EPIWARN_API_BASE?: string;
  }
}

export function apiBase(): string {
  return (typeof window !== "undefined" && window.EPIWARN_API_BASE) || "";
}

let sessionToken: string | null = null;

export function setToken(token: string | null): void {
  sessionToken = token;
}

export function hasToken(): boolean {
  return sessionToken !== null;
}

async function request<T>(path: string, init: RequestInit = {}): Promise<T> {
  const headers: Record<string, string> = {
    ...(init.headers as Record<string, string> | undefined),
  };
  if (init.body !== undefined) headers["Content-Type"] = "application/json";
  if (sessionToken !== null) headers["Authorization"] = `Bearer ${sessionToken}`;
  const resp = await fetch(apiBase() + path, { ...init, headers });
  if (!resp.ok) {
    let code = "http_error";
    let detail = `HTTP ${resp.status}`;
    try {
      const body = (await resp.json()) as { error?: string; detail?: string };
      if (body.error) code = body.error;
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body: keep the generic code
    }
    throw new ApiError(resp.status, code, detail);
  }
  return (await resp.json()) as T;
}

export function login(email: string, password: string): Promise<{ token: string }> {
  return request("/auth/login", { method: "POST", body: JSON.stringify({ email, password }) });
}

export function fetchDashboard(disease: Disease): Promise<DashboardPayload> {
  return request(`/diseases/${disease}/dashboard`);
}

export function fetchNews(disease: Disease): Promise<{ headlines: Headline[] }> {
  return request(`/diseases/${disease}/news`);
}

export function postAlert(body: AlertRequestBody): Promise<AlertResponse> {
  return request("/alerts", { method: "POST", body: JSON.stringify(body) });
}

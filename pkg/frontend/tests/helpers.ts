import { vi } from "vitest";

import type { DashboardPayload, HistoryRow } from "../src/types.js";

export function fixtureHistory(weeks: number): HistoryRow[] {
  const rows: HistoryRow[] = [];
  for (let i = 0; i < weeks; i++) {
    rows.push({
      week: `2021-W${String(i + 1).padStart(2, "0")}`,
      iso_year: 2021,
      iso_week: i + 1,
      precipitation: 1.5,
      temperature: 4.0,
      search_volume: 40,
      tweet_count: 12,
      cases: 100 + i,
    });
  }
  return rows;
}

export function fixtureDashboard(): DashboardPayload {
  return {
    disease: "influenza",
    history: fixtureHistory(50),
    forecast: [151, 152, 153, 154, 155],
    forecast_weeks: ["2021-W51", "2021-W52", "2022-W01", "2022-W02", "2022-W03"],
    probability: 0.73,
    medicines: ["oseltamivir", "zanamivir"],
    model_meta: { forecaster: "lstm", classifier: "random_forest" },
  };
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export function stubFetch(handler: (url: string, init?: RequestInit) => Response | Promise<Response>) {
  const mock = vi.fn(handler);
  vi.stubGlobal("fetch", mock);
  return mock;
}

// Shapes of the JSON the API serves; the UI renders these verbatim and never
// computes forecasts or probabilities itself.

export type Disease = "influenza" | "malaria" | "hepatitis";
export type Category = "pharmacy" | "health_center" | "hospital";

export const DISEASES: Disease[] = ["influenza", "malaria", "hepatitis"];
export const CATEGORIES: Category[] = ["pharmacy", "health_center", "hospital"];

export interface HistoryRow {
  week: string;
  iso_year: number;
  iso_week: number;
  precipitation: number;
  temperature: number;
  search_volume: number;
  tweet_count: number;
  cases: number;
}

export interface DashboardPayload {
  disease: Disease;
  history: HistoryRow[];
  forecast: number[];
  forecast_weeks: string[];
  probability: number;
  medicines: string[];
  model_meta: { forecaster: string; classifier: string };
}

export interface DeliveryStatus {
  recipient: string;
  status: "sent" | "failed";
  detail: string;
}

export interface AlertResponse {
  id: number;
  timestamp: number;
  diseases: string[];
  categories: string[];
  message: string;
  recipient_count: number;
  statuses: DeliveryStatus[];
}

export interface AlertRequestBody {
  diseases: Disease[] | "all";
  categories: Category[] | "all";
  message: string;
}

export interface Headline {
  title: string;
  source: string;
  date: string;
}

export interface ApiErrorBody {
  error: string;
  detail: string;
}

import { ApiError, fetchDashboard } from "./api.js";
import { renderChart } from "./chart.js";
import type { DashboardPayload, Disease } from "./types.js";

export interface DashboardView {
  root: HTMLElement;
  onSessionExpired: () => void;
}

// stale async responses are dropped: only the latest load may render
let loadSequence = 0;

export function formatProbability(p: number): string {
  return `${Math.round(p * 100)}%`;
}

function el(tag: string, cls: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderPayload(root: HTMLElement, payload: DashboardPayload): void {
  root.textContent = "";

  const heading = el("h2", "dashboard-title", `${payload.disease} - weekly cases and 5-week forecast`);
  root.appendChild(heading);

  const chartBox = el("div", "chart-box");
  chartBox.id = "chart";
  root.appendChild(chartBox);
  renderChart(
    chartBox,
    payload.history.map((row) => ({ week: row.week, value: row.cases })),
    payload.forecast.map((value, i) => ({ week: payload.forecast_weeks[i] ?? `+${i + 1}`, value })),
  );

  const stats = el("div", "stats");
  const probability = el("div", "stat probability");
  probability.appendChild(el("span", "stat-label", "Outbreak probability"));
  probability.appendChild(el("span", "stat-value", formatProbability(payload.probability)));
  stats.appendChild(probability);

  const meta = el("div", "stat model-meta");
  meta.appendChild(el("span", "stat-label", "Models"));
  meta.appendChild(
    el("span", "stat-value", `${payload.model_meta.forecaster} / ${payload.model_meta.classifier}`),
  );
  stats.appendChild(meta);
  root.appendChild(stats);

  const medicines = el("div", "medicines");
  medicines.appendChild(el("h3", "panel-title", "Medicines to keep ready"));
  const list = el("ul", "medicine-list");
  for (const name of payload.medicines) {
    list.appendChild(el("li", "medicine", name));
  }
  medicines.appendChild(list);
  root.appendChild(medicines);
}

export async function loadDashboard(view: DashboardView, disease: Disease): Promise<void> {
  const seq = ++loadSequence;
  view.root.textContent = "";
  view.root.appendChild(el("p", "loading", "Loading..."));
  try {
    const payload = await fetchDashboard(disease);
    if (seq !== loadSequence) return; // a newer load superseded this one
    renderPayload(view.root, payload);
  } catch (err) {
    if (seq !== loadSequence) return;
    if (err instanceof ApiError && err.status === 401) {
      view.onSessionExpired();
      return;
    }
    view.root.textContent = "";
    const detail = err instanceof ApiError ? err.message : "network error";
    view.root.appendChild(el("p", "error-banner", `Could not load dashboard: ${detail}`));
  }
}

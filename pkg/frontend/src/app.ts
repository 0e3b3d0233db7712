import { ApiError, hasToken, login, setToken } from "./api.js";
import { renderAlertForm } from "./alerts.js";
import { loadDashboard } from "./dashboard.js";
import { loadNews } from "./news.js";
import type { Disease } from "./types.js";
import { DISEASES } from "./types.js";

let currentDisease: Disease = "influenza";

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

export function showLogin(): void {
  byId("login-view").hidden = false;
  byId("main-view").hidden = true;
}

function showMain(): void {
  byId("login-view").hidden = true;
  byId("main-view").hidden = false;
  void refresh();
}

async function refresh(): Promise<void> {
  const view = { root: byId("dashboard"), onSessionExpired: showLogin };
  await Promise.all([loadDashboard(view, currentDisease), loadNews(byId("news"), currentDisease)]);
}

function renderDiseaseTabs(): void {
  const tabs = byId("disease-tabs");
  tabs.textContent = "";
  for (const disease of DISEASES) {
    const button = document.createElement("button");
    button.className = disease === currentDisease ? "tab active" : "tab";
    button.textContent = disease;
    button.addEventListener("click", () => {
      currentDisease = disease;
      renderDiseaseTabs();
      void refresh();
    });
    tabs.appendChild(button);
  }
}

function wireLogin(): void {
  const form = byId("login-form") as HTMLFormElement;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const email = (form.querySelector('input[name="email"]') as HTMLInputElement).value;
    const password = (form.querySelector('input[name="password"]') as HTMLInputElement).value;
    const feedback = byId("login-feedback");
    feedback.textContent = "";
    login(email, password)
      .then(({ token }) => {
        setToken(token);
        showMain();
      })
      .catch((err) => {
        feedback.textContent =
          err instanceof ApiError ? err.message : "Login failed: network error";
      });
  });
}

export function boot(): void {
  wireLogin();
  renderDiseaseTabs();
  renderAlertForm(byId("alert-panel"));
  if (hasToken()) {
    showMain();
  } else {
    // dashboard and news are public reads; alerts need the admin session
    showLogin();
  }
}

if (typeof document !== "undefined" && document.getElementById("login-view")) {
  boot();
}

import { ApiError, fetchNews } from "./api.js";
import type { Disease } from "./types.js";

export async function loadNews(root: HTMLElement, disease: Disease): Promise<void> {
  root.textContent = "Loading news...";
  try {
    const { headlines } = await fetchNews(disease);
    root.textContent = "";
    const title = document.createElement("h3");
    title.className = "panel-title";
    title.textContent = `News: ${disease}`;
    root.appendChild(title);
    if (headlines.length === 0) {
      const empty = document.createElement("p");
      empty.className = "news-empty";
      empty.textContent = "No headlines in the last 7 days.";
      root.appendChild(empty);
      return;
    }
    const list = document.createElement("ul");
    list.className = "news-list";
    for (const h of headlines) {
      const item = document.createElement("li");
      item.className = "headline";
      item.innerHTML = `<span class="headline-date"></span> <span class="headline-title"></span> <span class="headline-source"></span>`;
      item.querySelector(".headline-date")!.textContent = h.date;
      item.querySelector(".headline-title")!.textContent = h.title;
      item.querySelector(".headline-source")!.textContent = `(${h.source})`;
      list.appendChild(item);
    }
    root.appendChild(list);
  } catch (err) {
    root.textContent = "";
    const banner = document.createElement("p");
    banner.className = "error-banner";
    banner.textContent =
      err instanceof ApiError ? `Could not load news: ${err.message}` : "Could not load news.";
    root.appendChild(banner);
  }
}

import { ApiError, postAlert } from "./api.js";
import type { AlertRequestBody, Category, Disease } from "./types.js";
import { CATEGORIES, DISEASES } from "./types.js";

// The payload always carries exactly what the admin ticked: "all" is sent
// only when the explicit all-box is checked, never inferred from selections.

export interface AlertFormState {
  diseases: Disease[];
  allDiseases: boolean;
  categories: Category[];
  allCategories: boolean;
  message: string;
}

export function readForm(form: HTMLElement): AlertFormState {
  const checked = (name: string): string[] =>
    Array.from(form.querySelectorAll<HTMLInputElement>(`input[name="${name}"]:checked`)).map(
      (box) => box.value,
    );
  const message = form.querySelector<HTMLTextAreaElement>('textarea[name="message"]');
  return {
    diseases: checked("disease") as Disease[],
    allDiseases: form.querySelector<HTMLInputElement>('input[name="all-diseases"]')?.checked ?? false,
    categories: checked("category") as Category[],
    allCategories:
      form.querySelector<HTMLInputElement>('input[name="all-categories"]')?.checked ?? false,
    message: message?.value ?? "",
  };
}

export function validate(state: AlertFormState): string | null {
  if (!state.message.trim()) return "Message must not be empty.";
  if (!state.allDiseases && state.diseases.length === 0)
    return "Pick at least one disease or choose all diseases.";
  if (!state.allCategories && state.categories.length === 0)
    return "Pick at least one recipient category or choose all categories.";
  return null;
}

export function toRequestBody(state: AlertFormState): AlertRequestBody {
  return {
    diseases: state.allDiseases ? "all" : state.diseases,
    categories: state.allCategories ? "all" : state.categories,
    message: state.message,
  };
}

export function summarize(statuses: { status: string }[]): string {
  const sent = statuses.filter((s) => s.status === "sent").length;
  const failed = statuses.length - sent;
  return `${sent} sent, ${failed} failed`;
}

function checkboxRow(name: string, values: readonly string[]): string {
  return values
    .map(
      (v) =>
        `<label class="check"><input type="checkbox" name="${name}" value="${v}"> ${v.replace("_", " ")}</label>`,
    )
    .join("\n");
}

export function renderAlertForm(root: HTMLElement): void {
  root.innerHTML = `
    <form id="alert-form" class="alert-form">
      <h3 class="panel-title">Send an alert</h3>
      <fieldset>
        <legend>Diseases</legend>
        ${checkboxRow("disease", DISEASES)}
        <label class="check"><input type="checkbox" name="all-diseases"> all diseases</label>
      </fieldset>
      <fieldset>
        <legend>Recipients</legend>
        ${checkboxRow("category", CATEGORIES)}
        <label class="check"><input type="checkbox" name="all-categories"> all categories</label>
      </fieldset>
      <textarea name="message" rows="3" placeholder="Alert message"></textarea>
      <button type="submit">Send alert</button>
      <p class="form-feedback" aria-live="polite"></p>
    </form>
  `;
  const form = root.querySelector<HTMLFormElement>("#alert-form")!;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void submitAlert(form);
  });
}

export async function submitAlert(form: HTMLElement): Promise<void> {
  const feedback = form.querySelector<HTMLElement>(".form-feedback")!;
  const state = readForm(form);
  const problem = validate(state);
  if (problem !== null) {
    // invalid input never reaches the network
    feedback.textContent = problem;
    feedback.className = "form-feedback invalid";
    return;
  }
  feedback.textContent = "Sending...";
  feedback.className = "form-feedback";
  try {
    const response = await postAlert(toRequestBody(state));
    feedback.textContent = summarize(response.statuses);
    feedback.className = "form-feedback sent";
  } catch (err) {
    feedback.textContent =
      err instanceof ApiError ? `Alert failed: ${err.message}` : "Alert failed: network error";
    feedback.className = "form-feedback invalid";
  }
}

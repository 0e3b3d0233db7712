import { afterEach, describe, expect, it, vi } from "vitest";

import { renderAlertForm, submitAlert, summarize, toRequestBody, validate } from "../src/alerts.js";
import type { AlertResponse } from "../src/types.js";
import { jsonResponse, stubFetch } from "./helpers.js";

afterEach(() => {
  vi.unstubAllGlobals();
  document.body.innerHTML = "";
});

function mountForm(): HTMLElement {
  const root = document.createElement("div");
  document.body.appendChild(root);
  renderAlertForm(root);
  return root.querySelector("#alert-form")!;
}

function tick(form: HTMLElement, name: string, value?: string): void {
  const selector = value
    ? `input[name="${name}"][value="${value}"]`
    : `input[name="${name}"]`;
  const box = form.querySelector<HTMLInputElement>(selector)!;
  box.checked = true;
}

function setMessage(form: HTMLElement, text: string): void {
  form.querySelector<HTMLTextAreaElement>('textarea[name="message"]')!.value = text;
}

function mixedResponse(): AlertResponse {
  return {
    id: 1,
    timestamp: 1700000000,
    diseases: ["influenza"],
    categories: ["pharmacy"],
    message: "stock up",
    recipient_count: 3,
    statuses: [
      { recipient: "+1", status: "sent", detail: "" },
      { recipient: "+2", status: "sent", detail: "" },
      { recipient: "+3", status: "failed", detail: "gateway down" },
    ],
  };
}

describe("alert form", () => {
  it("posts exactly the selected sets", async () => {
    const calls: { url: string; body: unknown }[] = [];
    stubFetch((url, init) => {
      calls.push({ url: String(url), body: JSON.parse(String(init?.body)) });
      return jsonResponse(mixedResponse());
    });
    const form = mountForm();
    tick(form, "disease", "influenza");
    tick(form, "category", "pharmacy");
    setMessage(form, "stock up");
    await submitAlert(form);
    expect(calls.length).toBe(1);
    expect(calls[0].url).toContain("/alerts");
    expect(calls[0].body).toEqual({
      diseases: ["influenza"],
      categories: ["pharmacy"],
      message: "stock up",
    });
  });

  it("renders '2 sent, 1 failed' for a mixed-status response", async () => {
    stubFetch(() => jsonResponse(mixedResponse()));
    const form = mountForm();
    tick(form, "disease", "influenza");
    tick(form, "category", "pharmacy");
    setMessage(form, "stock up");
    await submitAlert(form);
    expect(form.querySelector(".form-feedback")!.textContent).toBe("2 sent, 1 failed");
  });

  it("never broadens selections to 'all' implicitly", () => {
    const body = toRequestBody({
      diseases: ["influenza", "malaria", "hepatitis"],
      allDiseases: false,
      categories: ["pharmacy", "health_center", "hospital"],
      allCategories: false,
      message: "x",
    });
    expect(body.diseases).toEqual(["influenza", "malaria", "hepatitis"]);
    expect(body.categories).toEqual(["pharmacy", "health_center", "hospital"]);
  });

  it("sends 'all' only when the all-box is ticked", async () => {
    const calls: unknown[] = [];
    stubFetch((_url, init) => {
      calls.push(JSON.parse(String(init?.body)));
      return jsonResponse(mixedResponse());
    });
    const form = mountForm();
    tick(form, "all-diseases");
    tick(form, "all-categories");
    setMessage(form, "x");
    await submitAlert(form);
    expect(calls[0]).toEqual({ diseases: "all", categories: "all", message: "x" });
  });

  it("blocks an empty message before any network call", async () => {
    const mock = stubFetch(() => jsonResponse(mixedResponse()));
    const form = mountForm();
    tick(form, "disease", "influenza");
    tick(form, "category", "pharmacy");
    setMessage(form, "   ");
    await submitAlert(form);
    expect(mock).not.toHaveBeenCalled();
    expect(form.querySelector(".form-feedback")!.textContent).toContain("Message");
  });

  it("blocks empty selections before any network call", async () => {
    const mock = stubFetch(() => jsonResponse(mixedResponse()));
    const form = mountForm();
    setMessage(form, "hello");
    await submitAlert(form);
    expect(mock).not.toHaveBeenCalled();
    expect(form.querySelector(".form-feedback")!.textContent).toContain("disease");
  });

  it("surfaces API errors in the feedback line", async () => {
    stubFetch(() => jsonResponse({ error: "no_recipients", detail: "nobody registered" }, 422));
    const form = mountForm();
    tick(form, "disease", "malaria");
    tick(form, "category", "hospital");
    setMessage(form, "x");
    await submitAlert(form);
    expect(form.querySelector(".form-feedback")!.textContent).toContain("nobody registered");
  });
});

describe("pure helpers", () => {
  it("summarize counts statuses", () => {
    expect(summarize(mixedResponse().statuses)).toBe("2 sent, 1 failed");
    expect(summarize([])).toBe("0 sent, 0 failed");
  });

  it("validate requires message and selections", () => {
    const base = {
      diseases: [] as never[],
      allDiseases: false,
      categories: [] as never[],
      allCategories: false,
      message: "",
    };
    expect(validate(base)).toContain("Message");
    expect(validate({ ...base, message: "x" })).toContain("disease");
    expect(validate({ ...base, message: "x", allDiseases: true })).toContain("category");
    expect(validate({ ...base, message: "x", allDiseases: true, allCategories: true })).toBeNull();
  });
});

// DOM-level end-to-end: drives the real compiled UI through the full
// enter-URL -> select-features -> view-result -> open-preview flow against
// the API double, asserting on the rendered DOM exactly as a browser
// session would see it.

import { beforeEach, describe, expect, it, vi } from "vitest";

import { mountApp } from "../src/main";
import type { App } from "../src/main";
import { makeApiDouble } from "./apiDouble";
import type { ApiDouble } from "./apiDouble";

let root: HTMLElement;
let double: ApiDouble;
let opened: string[];
let copied: string[];

function mount(): App {
  return mountApp(root, {
    apiBase: "",
    fetchImpl: double.fetch,
    storage: sessionStorage,
    openTab: (url) => opened.push(url),
    writeClipboard: (text) => {
      copied.push(text);
    },
  });
}

function q<T extends HTMLElement>(testid: string): T {
  const node = root.querySelector(`[data-testid="${testid}"]`);
  if (!node) throw new Error(`missing [data-testid=${testid}]`);
  return node as T;
}

function maybe(testid: string): HTMLElement | null {
  return root.querySelector(`[data-testid="${testid}"]`);
}

function typeUrl(value: string): void {
  const input = q<HTMLInputElement>("url-input");
  input.value = value;
  input.dispatchEvent(new Event("input"));
}

async function analyzeFixture(app: App, url = "https://fixture.test/login"): Promise<void> {
  typeUrl(url);
  q("url-submit").click();
  await app.whenIdle();
}

beforeEach(() => {
  sessionStorage.clear();
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app") as HTMLElement;
  double = makeApiDouble();
  opened = [];
  copied = [];
});

describe("screen 1: enter URL", () => {
  it("renders the URL form first", () => {
    mount();
    expect(q("url-input")).toBeTruthy();
    expect(maybe("feature-list")).toBeNull();
  });

  it("malformed URL shows inline validation without any API call", async () => {
    const app = mount();
    typeUrl("not-a-url");
    q("url-submit").click();
    await app.whenIdle();
    expect(q("error-banner").textContent).toMatch(/absolute url/i);
    expect(double.log.calls).toHaveLength(0);
    expect(app.state.screen).toBe("enter_url");
  });

  it("a 502 from the API surfaces as a retryable banner with state preserved", async () => {
    double.failAnalyzeWith = 502;
    const app = mount();
    await analyzeFixture(app);
    expect(app.state.screen).toBe("enter_url");
    expect(q("error-banner").textContent).toMatch(/upstream fetch failed/);
    expect(maybe("retry-button")).not.toBeNull();
    expect(q<HTMLInputElement>("url-input").value).toBe("https://fixture.test/login");
    // retry after the upstream recovers
    double.failAnalyzeWith = undefined;
    q("retry-button").click();
    await app.whenIdle();
    expect(app.state.screen).toBe("select_features");
  });
});

describe("screen 2: select features", () => {
  it("lists applicable features enabled and inapplicable ones disabled with reasons", async () => {
    const app = mount();
    await analyzeFixture(app);
    expect(app.state.screen).toBe("select_features");
    const c1 = q<HTMLInputElement>("feature-checkbox-C1");
    expect(c1.hasAttribute("disabled")).toBe(false);
    const c7 = q<HTMLInputElement>("feature-checkbox-C7");
    expect(c7.hasAttribute("disabled")).toBe(true);
    expect(q("feature-row-C7").textContent).toMatch(/not applicable/i);
  });

  it("checking C5 disables the C10 checkbox in the DOM", async () => {
    const app = mount();
    await analyzeFixture(app);
    q<HTMLInputElement>("feature-checkbox-C5").click();
    expect(q<HTMLInputElement>("feature-checkbox-C5").checked).toBe(true);
    const c10 = q<HTMLInputElement>("feature-checkbox-C10");
    expect(c10.hasAttribute("disabled")).toBe(true);
    expect(q("feature-row-C10").textContent).toMatch(/conflicts/i);
    // unchecking C5 re-enables C10
    q<HTMLInputElement>("feature-checkbox-C5").click();
    expect(q<HTMLInputElement>("feature-checkbox-C10").hasAttribute("disabled")).toBe(false);
  });

  it("zero checked features blocks submission with a message and no API call", async () => {
    const app = mount();
    await analyzeFixture(app);
    const before = double.log.generateCount();
    q("selection-submit").click();
    await app.whenIdle();
    expect(double.log.generateCount()).toBe(before);
    expect(q("error-banner").textContent).toMatch(/at least one feature/i);
    expect(app.state.screen).toBe("select_features");
  });

  it("random-mode toggle swaps checkboxes for count spinners", async () => {
    const app = mount();
    await analyzeFixture(app);
    expect(maybe("random-counts")).toBeNull();
    q<HTMLInputElement>("random-toggle").click();
    expect(maybe("random-counts")).not.toBeNull();
    expect(maybe("feature-list")).toBeNull();
    const content = q<HTMLInputElement>("count-content");
    content.value = "2";
    content.dispatchEvent(new Event("input"));
    expect(app.state.countContent).toBe(2);
    q<HTMLInputElement>("random-toggle").click();
    expect(maybe("feature-list")).not.toBeNull();
  });

  it("param edits for checked features reach the generate request", async () => {
    const app = mount();
    await analyzeFixture(app);
    q<HTMLInputElement>("feature-checkbox-C12").click();
    const param = q<HTMLInputElement>("param-C12-n");
    param.value = "9";
    param.dispatchEvent(new Event("input"));
    q("selection-submit").click();
    await app.whenIdle();
    const generateCall = double.log.calls.find((c) => c.path === "/generate");
    expect(generateCall?.body).toMatchObject({ params: { C12: { n: 9 } } });
  });
});

describe("screen 3: view result and the full flow", () => {
  it("completes enter-URL -> select [C1, V1] -> view-result -> open preview", async () => {
    const app = mount();
    await analyzeFixture(app);

    q<HTMLInputElement>("feature-checkbox-C1").click();
    q<HTMLInputElement>("feature-checkbox-V1").click();
    const seed = q<HTMLInputElement>("seed-input");
    seed.value = "7";
    seed.dispatchEvent(new Event("input"));
    q("selection-submit").click();
    await app.whenIdle();

    expect(app.state.screen).toBe("view_result");
    expect(maybe("ledger-row-C1")).not.toBeNull();
    expect(maybe("ledger-row-V1")).not.toBeNull();
    expect(q("spoofed-url").textContent).toBe("https://examp1e-login.co/");
    expect(q("bundle-seed").textContent).toBe("7");

    q("open-preview").click();
    expect(opened).toHaveLength(1);
    expect(opened[0]).toMatch(/^\/bundles\/session-1\/[0-9a-f]+\/index\.html$/);

    const generateCall = double.log.calls.find((c) => c.path === "/generate");
    expect(generateCall?.body).toMatchObject({
      session_id: "session-1",
      features: ["C1", "V1"],
      seed: 7,
    });
  });

  it("copy control copies the exact spoofed URL string from the API", async () => {
    const app = mount();
    await analyzeFixture(app);
    q<HTMLInputElement>("feature-checkbox-C1").click();
    q("selection-submit").click();
    await app.whenIdle();
    q("copy-spoofed").click();
    expect(copied).toEqual(["https://examp1e-login.co/"]);
  });

  it("back navigation preserves the selections", async () => {
    const app = mount();
    await analyzeFixture(app);
    q<HTMLInputElement>("feature-checkbox-C1").click();
    q<HTMLInputElement>("feature-checkbox-C6").click();
    q("selection-submit").click();
    await app.whenIdle();
    q("back-to-select").click();
    expect(app.state.screen).toBe("select_features");
    expect(q<HTMLInputElement>("feature-checkbox-C1").checked).toBe(true);
    expect(q<HTMLInputElement>("feature-checkbox-C6").checked).toBe(true);
  });

  it("refresh restores the flow from session storage", async () => {
    const app = mount();
    await analyzeFixture(app);
    q<HTMLInputElement>("feature-checkbox-C1").click();
    q("selection-submit").click();
    await app.whenIdle();
    expect(app.state.screen).toBe("view_result");

    // simulate a refresh: fresh mount over the same storage
    document.body.innerHTML = '<div id="app"></div>';
    root = document.getElementById("app") as HTMLElement;
    const reloaded = mount();
    expect(reloaded.state.screen).toBe("view_result");
    expect(reloaded.state.sessionId).toBe("session-1");
    expect(maybe("ledger-row-C1")).not.toBeNull();
  });

  it("API conflict errors surface to the user", async () => {
    const app = mount();
    await analyzeFixture(app);
    // bypass the UI guard to prove server-side 409s still surface
    app.state = {
      ...app.state,
      rows: app.state.rows.map((row) =>
        row.id === "C5" || row.id === "C10" ? { ...row, checked: true } : row,
      ),
    };
    app.submitSelection();
    await app.whenIdle();
    expect(q("error-banner").textContent).toMatch(/conflicting features/i);
    expect(app.state.screen).toBe("select_features");
  });

  it("start over clears persisted state and returns to the URL screen", async () => {
    const app = mount();
    await analyzeFixture(app);
    q<HTMLInputElement>("feature-checkbox-C1").click();
    q("selection-submit").click();
    await app.whenIdle();
    q("start-over").click();
    expect(app.state.screen).toBe("enter_url");
    expect(sessionStorage.getItem("phishforge:current")).toBeNull();
  });
});

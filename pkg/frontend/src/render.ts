// DOM rendering for the three screens. Pure functions of (state, handlers);
// the controller re-renders on every state change.

import type { FlowState } from "./state";
import { rowDisabled, blockedByConflict, checkedIds } from "./features";
import type { FeatureRow } from "./features";

export interface Handlers {
  onUrlInput(value: string): void;
  onSubmitUrl(): void;
  onToggleFeature(id: string): void;
  onParamEdit(id: string, name: string, value: string): void;
  onRandomToggle(on: boolean): void;
  onCountChange(kind: "content" | "visual", value: number): void;
  onSeedEdit(value: string): void;
  onSubmitSelection(): void;
  onBack(): void;
  onOpenPreview(): void;
  onCopySpoofed(): void;
  onStartOver(): void;
  onRetry(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [name, value] of Object.entries(attrs)) {
    node.setAttribute(name, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

function header(): HTMLElement {
  return el("header", {}, [
    el("h1", {}, ["phishforge"]),
    el("p", { class: "tagline" }, [
      "Generate an adversarial phishing page from a legitimate URL - research use only.",
    ]),
  ]);
}

function errorBanner(state: FlowState, handlers: Handlers): HTMLElement | null {
  if (!state.error) return null;
  const children: (Node | string)[] = [state.error];
  if (state.errorRetryable) {
    const retry = el("button", { class: "secondary", "data-testid": "retry-button" }, ["Retry"]);
    retry.addEventListener("click", () => handlers.onRetry());
    children.push(" ", retry);
  }
  return el("div", { class: "banner error", "data-testid": "error-banner", role: "alert" }, children);
}

// -- screen 1: enter URL -------------------------------------------------

function renderEnterUrl(state: FlowState, handlers: Handlers): HTMLElement[] {
  const input = el("input", {
    type: "text",
    placeholder: "https://example.com/login",
    value: state.sourceUrl,
    "data-testid": "url-input",
  });
  input.addEventListener("input", () => handlers.onUrlInput(input.value));
  input.addEventListener("keydown", (ev) => {
    if ((ev as KeyboardEvent).key === "Enter") handlers.onSubmitUrl();
  });
  const submit = el("button", { "data-testid": "url-submit" }, [
    state.busy ? "Fetching..." : "Analyze",
  ]);
  if (state.busy) submit.setAttribute("disabled", "");
  submit.addEventListener("click", () => handlers.onSubmitUrl());
  const form = el("div", { class: "url-form" }, [input, submit]);
  return [el("h2", {}, ["1. Enter a legitimate URL"]), form];
}

// -- screen 2: select features ----------------------------------------------

function paramEditor(row: FeatureRow, handlers: Handlers): HTMLElement | null {
  if (!row.checked || row.paramSpecs.length === 0) return null;
  const grid = el("div", { class: "param-grid" });
  for (const spec of row.paramSpecs) {
    const input = el("input", {
      type: "text",
      value: row.params[spec.name] ?? "",
      placeholder: spec.default === null ? "auto" : JSON.stringify(spec.default),
      title: spec.description,
      "data-testid": `param-${row.id}-${spec.name}`,
    });
    input.addEventListener("input", () =>
      handlers.onParamEdit(row.id, spec.name, input.value),
    );
    grid.append(el("label", {}, [`${spec.name}:`, input]));
  }
  return grid;
}

function featureItem(row: FeatureRow, state: FlowState, handlers: Handlers): HTMLElement {
  const disabled = rowDisabled(row, state.rows);
  const checkbox = el("input", {
    type: "checkbox",
    "data-testid": `feature-checkbox-${row.id}`,
  }) as HTMLInputElement;
  checkbox.checked = row.checked;
  if (disabled && !row.checked) checkbox.setAttribute("disabled", "");
  checkbox.addEventListener("change", () => handlers.onToggleFeature(row.id));

  const why: HTMLElement[] = [];
  if (!row.applicable) {
    why.push(el("div", { class: "feature-reason" }, ["Not applicable to this page."]));
  } else if (blockedByConflict(row.id, state.rows)) {
    why.push(el("div", { class: "feature-reason" }, ["Conflicts with the selected feature."]));
  }
  const body = el("div", {}, [
    el("div", { class: "feature-name" }, [row.name]),
    el("div", { class: "feature-desc" }, [row.description]),
    ...why,
  ]);
  const editor = paramEditor(row, handlers);
  if (editor) body.append(editor);

  return el(
    "li",
    {
      class: `feature-row${row.applicable ? "" : " inapplicable"}`,
      "data-testid": `feature-row-${row.id}`,
    },
    [checkbox, el("span", { class: "feature-id" }, [row.id]), body],
  );
}

function renderSelect(state: FlowState, handlers: Handlers): HTMLElement[] {
  const randomToggle = el("input", {
    type: "checkbox",
    "data-testid": "random-toggle",
  }) as HTMLInputElement;
  randomToggle.checked = state.randomMode;
  randomToggle.addEventListener("change", () => handlers.onRandomToggle(randomToggle.checked));

  const seed = el("input", {
    type: "text",
    value: state.seedText,
    placeholder: "seed (optional)",
    "data-testid": "seed-input",
  });
  seed.addEventListener("input", () => handlers.onSeedEdit(seed.value));

  const toolbar = el("div", { class: "toolbar" }, [
    el("label", {}, [randomToggle, "Random selection"]),
    el("label", {}, ["seed:", seed]),
  ]);

  let middle: HTMLElement;
  if (state.randomMode) {
    const contentCount = el("input", {
      type: "number",
      min: "0",
      max: "12",
      value: String(state.countContent),
      "data-testid": "count-content",
    });
    contentCount.addEventListener("input", () =>
      handlers.onCountChange("content", Number(contentCount.value)),
    );
    const visualCount = el("input", {
      type: "number",
      min: "0",
      max: "5",
      value: String(state.countVisual),
      "data-testid": "count-visual",
    });
    visualCount.addEventListener("input", () =>
      handlers.onCountChange("visual", Number(visualCount.value)),
    );
    middle = el("div", { class: "toolbar", "data-testid": "random-counts" }, [
      el("label", {}, ["content features:", contentCount]),
      el("label", {}, ["visual features:", visualCount]),
    ]);
  } else {
    middle = el(
      "ul",
      { class: "feature-list", "data-testid": "feature-list" },
      state.rows.map((row) => featureItem(row, state, handlers)),
    );
  }

  const submit = el("button", { "data-testid": "selection-submit" }, [
    state.busy ? "Generating..." : "Generate phishing page",
  ]);
  if (state.busy) submit.setAttribute("disabled", "");
  submit.addEventListener("click", () => handlers.onSubmitSelection());

  const back = el("button", { class: "secondary", "data-testid": "back-to-url" }, [
    "Different URL",
  ]);
  back.addEventListener("click", () => handlers.onStartOver());

  return [
    el("h2", {}, ["2. Select phishing features"]),
    el("div", { class: "banner note" }, [
      `Analyzed: ${state.sourceUrl} - ${checkedIds(state.rows).length} selected`,
    ]),
    toolbar,
    middle,
    el("div", { class: "actions" }, [submit, back]),
  ];
}

// -- screen 3: view result ----------------------------------------------------

function renderResult(state: FlowState, handlers: Handlers): HTMLElement[] {
  const bundle = state.lastBundle;
  if (!bundle) return [el("p", {}, ["No bundle yet."])];

  const ledgerRows = bundle.ledger.map((entry) =>
    el("tr", { "data-testid": `ledger-row-${entry.feature}` }, [
      el("td", {}, [entry.feature]),
      el("td", {}, [JSON.stringify(entry.params_used)]),
      el("td", {}, [String(entry.touched_nodes.length + entry.injected_nodes.length)]),
    ]),
  );

  const copy = el("button", { class: "secondary", "data-testid": "copy-spoofed" }, ["Copy"]);
  copy.addEventListener("click", () => handlers.onCopySpoofed());

  const preview = el("button", { "data-testid": "open-preview" }, ["Open preview in new tab"]);
  preview.addEventListener("click", () => handlers.onOpenPreview());

  const back = el("button", { class: "secondary", "data-testid": "back-to-select" }, [
    "Back to features",
  ]);
  back.addEventListener("click", () => handlers.onBack());

  const again = el("button", { class: "secondary", "data-testid": "start-over" }, [
    "Start over",
  ]);
  again.addEventListener("click", () => handlers.onStartOver());

  return [
    el("h2", {}, ["3. Generated phishing page"]),
    el("dl", { class: "result-grid" }, [
      el("dt", {}, ["Source"]),
      el("dd", {}, [state.sourceUrl]),
      el("dt", {}, ["Spoofed URL"]),
      el("dd", {}, [
        el("span", { class: "spoofed", "data-testid": "spoofed-url" }, [bundle.spoofed_url]),
        " ",
        copy,
      ]),
      el("dt", {}, ["Seed"]),
      el("dd", { "data-testid": "bundle-seed" }, [String(bundle.seed)]),
    ]),
    el("table", { class: "ledger", "data-testid": "ledger-table" }, [
      el("thead", {}, [
        el("tr", {}, [
          el("th", {}, ["Feature"]),
          el("th", {}, ["Parameters"]),
          el("th", {}, ["Nodes"]),
        ]),
      ]),
      el("tbody", {}, ledgerRows),
    ]),
    el("div", { class: "actions" }, [preview, back, again]),
  ];
}

export function render(root: HTMLElement, state: FlowState, handlers: Handlers): void {
  root.replaceChildren();
  const parts: (HTMLElement | null)[] = [header(), errorBanner(state, handlers)];
  if (state.screen === "enter_url") {
    parts.push(...renderEnterUrl(state, handlers));
  } else if (state.screen === "select_features") {
    parts.push(...renderSelect(state, handlers));
  } else {
    parts.push(...renderResult(state, handlers));
  }
  for (const part of parts) {
    if (part) root.append(part);
  }
}

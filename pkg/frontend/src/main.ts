// Controller: owns the flow state, talks to the API, re-renders on change.
// One in-flight request at a time; submit controls stay disabled while busy.

import { ApiClient, ApiError } from "./api";
import type { CatalogFeature, GenerateRequest } from "./api";
import {
  buildParamsPayload,
  buildRows,
  checkedIds,
  setParam,
  toggleRow,
} from "./features";
import { render } from "./render";
import type { Handlers } from "./render";
import {
  canEnter,
  clearPersisted,
  initialState,
  persist,
  restore,
  validateUrl,
} from "./state";
import type { FlowState, Screen } from "./state";

export interface AppOptions {
  apiBase?: string;
  fetchImpl?: typeof fetch;
  storage?: Storage;
  openTab?: (url: string) => void;
  writeClipboard?: (text: string) => Promise<void> | void;
}

const SCREEN_HASH: Record<Screen, string> = {
  enter_url: "#/",
  select_features: "#/select",
  view_result: "#/result",
};

export class App {
  state: FlowState;
  private api: ApiClient;
  private catalog: CatalogFeature[] | null = null;
  private storage: Storage;
  private openTab: (url: string) => void;
  private writeClipboard: (text: string) => Promise<void> | void;
  private inflight: Promise<void> = Promise.resolve();

  constructor(
    private root: HTMLElement,
    options: AppOptions = {},
  ) {
    this.api = new ApiClient(options.apiBase ?? "", options.fetchImpl ?? fetch.bind(globalThis));
    this.storage = options.storage ?? sessionStorage;
    this.openTab = options.openTab ?? ((url) => window.open(url, "_blank"));
    this.writeClipboard =
      options.writeClipboard ?? ((text) => navigator.clipboard?.writeText(text));
    this.state = restore(this.storage) ?? initialState();
  }

  /** Resolves when the current async action (if any) settles. */
  whenIdle(): Promise<void> {
    return this.inflight;
  }

  private update(patch: Partial<FlowState>): void {
    this.state = { ...this.state, ...patch };
    if (this.state.sessionId) persist(this.state, this.storage);
    this.render();
  }

  private goto(screen: Screen): void {
    if (!canEnter(screen, this.state)) return;
    this.update({ screen, error: null, errorRetryable: false });
    if (typeof location !== "undefined") {
      history.replaceState(null, "", SCREEN_HASH[screen]);
    }
  }

  private run(action: () => Promise<void>): void {
    if (this.state.busy) return; // one request per screen at a time
    this.inflight = (async () => {
      this.update({ busy: true, error: null, errorRetryable: false });
      try {
        await action();
      } catch (err) {
        const retryable = err instanceof ApiError ? err.retryable : false;
        this.update({ error: String(err instanceof Error ? err.message : err), errorRetryable: retryable });
      } finally {
        this.update({ busy: false });
      }
    })();
  }

  private async ensureCatalog(): Promise<CatalogFeature[]> {
    if (!this.catalog) {
      this.catalog = (await this.api.getFeatures()).features;
    }
    return this.catalog;
  }

  // -- actions ------------------------------------------------------------

  submitUrl(): void {
    const problem = validateUrl(this.state.sourceUrl);
    if (problem) {
      // inline validation: no API call
      this.update({ error: problem, errorRetryable: false });
      return;
    }
    this.run(async () => {
      const catalog = await this.ensureCatalog();
      const response = await this.api.analyze(this.state.sourceUrl.trim());
      this.update({
        sessionId: response.session_id,
        report: response.report,
        rows: buildRows(catalog, response.report),
        lastBundle: null,
      });
      this.goto("select_features");
    });
  }

  submitSelection(): void {
    const sessionId = this.state.sessionId;
    if (!sessionId) return;
    let request: GenerateRequest;
    if (this.state.randomMode) {
      request = {
        session_id: sessionId,
        random: {
          count_content: this.state.countContent,
          count_visual: this.state.countVisual,
        },
      };
    } else {
      const features = checkedIds(this.state.rows);
      if (features.length === 0) {
        this.update({ error: "Select at least one feature first.", errorRetryable: false });
        return;
      }
      request = {
        session_id: sessionId,
        features,
        params: buildParamsPayload(this.state.rows),
      };
    }
    const seedText = this.state.seedText.trim();
    if (seedText && /^\d+$/.test(seedText)) {
      request.seed = Number(seedText);
    }
    this.run(async () => {
      const bundle = await this.api.generate(request);
      this.update({ lastBundle: bundle });
      this.goto("view_result");
    });
  }

  private handlers: Handlers = {
    onUrlInput: (value) => {
      this.state = { ...this.state, sourceUrl: value };
    },
    onSubmitUrl: () => this.submitUrl(),
    onToggleFeature: (id) => this.update({ rows: toggleRow(this.state.rows, id) }),
    onParamEdit: (id, name, value) => {
      this.state = { ...this.state, rows: setParam(this.state.rows, id, name, value) };
      if (this.state.sessionId) persist(this.state, this.storage);
    },
    onRandomToggle: (on) => this.update({ randomMode: on }),
    onCountChange: (kind, value) =>
      this.update(
        kind === "content"
          ? { countContent: clamp(value, 0, 12) }
          : { countVisual: clamp(value, 0, 5) },
      ),
    onSeedEdit: (value) => {
      this.state = { ...this.state, seedText: value };
      if (this.state.sessionId) persist(this.state, this.storage);
    },
    onSubmitSelection: () => this.submitSelection(),
    onBack: () => this.goto("select_features"),
    onOpenPreview: () => {
      if (this.state.lastBundle) {
        this.openTab(this.api.previewHref(this.state.lastBundle));
      }
    },
    onCopySpoofed: () => {
      if (this.state.lastBundle) {
        void this.writeClipboard(this.state.lastBundle.spoofed_url);
      }
    },
    onStartOver: () => {
      clearPersisted(this.storage);
      this.state = initialState();
      this.goto("enter_url");
      this.render();
    },
    onRetry: () => {
      if (this.state.screen === "enter_url") this.submitUrl();
      else if (this.state.screen === "select_features") this.submitSelection();
    },
  };

  render(): void {
    render(this.root, this.state, this.handlers);
  }
}

function clamp(value: number, lo: number, hi: number): number {
  if (Number.isNaN(value)) return lo;
  return Math.min(hi, Math.max(lo, Math.round(value)));
}

export function mountApp(root: HTMLElement, options: AppOptions = {}): App {
  const app = new App(root, options);
  app.render();
  return app;
}

// browser entry point; tests mount explicitly
if (typeof document !== "undefined" && document.getElementById("app") && !("vitest" in globalThis)) {
  mountApp(document.getElementById("app") as HTMLElement);
}

// Three-screen flow state with sessionStorage persistence so a refresh on
// any screen restores where the user was (keyed by session id).

import type { AnalyzeReport, BundleInfo } from "./api";
import type { FeatureRow } from "./features";

export type Screen = "enter_url" | "select_features" | "view_result";

export interface FlowState {
  screen: Screen;
  sourceUrl: string;
  sessionId: string | null;
  report: AnalyzeReport | null;
  rows: FeatureRow[];
  randomMode: boolean;
  countContent: number;
  countVisual: number;
  seedText: string;
  lastBundle: BundleInfo | null;
  error: string | null;
  errorRetryable: boolean;
  busy: boolean;
}

export function initialState(): FlowState {
  return {
    screen: "enter_url",
    sourceUrl: "",
    sessionId: null,
    report: null,
    rows: [],
    randomMode: false,
    countContent: 3,
    countVisual: 1,
    seedText: "",
    lastBundle: null,
    error: null,
    errorRetryable: false,
    busy: false,
  };
}

/** Inline validation before any network call; returns an error message or
 * null when the URL is submittable. */
export function validateUrl(raw: string): string | null {
  const text = raw.trim();
  if (!text) return "Enter a URL first.";
  let parsed: URL;
  try {
    parsed = new URL(text);
  } catch {
    return "That does not look like an absolute URL (include http:// or https://).";
  }
  if (parsed.protocol !== "http:" && parsed.protocol !== "https:") {
    return "Only http(s) URLs can be analyzed.";
  }
  if (!parsed.hostname) {
    return "The URL needs a host.";
  }
  return null;
}

const POINTER_KEY = "phishforge:current";

function stateKey(sessionId: string): string {
  return `phishforge:${sessionId}`;
}

/** Screen transitions require the prior screen's data. */
export function canEnter(screen: Screen, state: FlowState): boolean {
  if (screen === "enter_url") return true;
  if (screen === "select_features") return state.sessionId !== null && state.report !== null;
  return state.lastBundle !== null;
}

export function persist(state: FlowState, storage: Storage = sessionStorage): void {
  if (!state.sessionId) return;
  const snapshot = { ...state, busy: false, error: null, errorRetryable: false };
  storage.setItem(stateKey(state.sessionId), JSON.stringify(snapshot));
  storage.setItem(POINTER_KEY, state.sessionId);
}

export function restore(storage: Storage = sessionStorage): FlowState | null {
  const pointer = storage.getItem(POINTER_KEY);
  if (!pointer) return null;
  const raw = storage.getItem(stateKey(pointer));
  if (!raw) return null;
  try {
    const parsed = JSON.parse(raw) as FlowState;
    if (!parsed.sessionId || !parsed.report) return null;
    return { ...initialState(), ...parsed, busy: false, error: null };
  } catch {
    return null;
  }
}

export function clearPersisted(storage: Storage = sessionStorage): void {
  const pointer = storage.getItem(POINTER_KEY);
  if (pointer) storage.removeItem(stateKey(pointer));
  storage.removeItem(POINTER_KEY);
}

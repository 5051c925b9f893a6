// Typed client for the generation service. The UI never builds bundles
// itself; everything comes from these endpoints.

export interface CatalogParam {
  name: string;
  type: string;
  default: unknown;
  description: string;
}

export interface CatalogFeature {
  id: string;
  category: "content" | "visual";
  name: string;
  description: string;
  params: CatalogParam[];
}

export interface ReportFeature {
  id: string;
  category: string;
  applicable: boolean;
  evidence_count: number;
  description: string;
}

export interface AnalyzeReport {
  features: ReportFeature[];
  counts: Record<string, number>;
}

export interface AnalyzeResponse {
  session_id: string;
  report: AnalyzeReport;
}

export interface LedgerEntry {
  feature: string;
  params_used: Record<string, unknown>;
  touched_nodes: number[];
  injected_nodes: number[];
  notes: string;
}

export interface BundleInfo {
  bundle_id: string;
  seed: number;
  spoofed_url: string;
  ledger: LedgerEntry[];
  preview_url: string;
}

export interface GenerateRequest {
  session_id: string;
  features?: string[];
  random?: { count_content: number | null; count_visual: number | null };
  seed?: number;
  params?: Record<string, Record<string, unknown>>;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }

  get retryable(): boolean {
    return this.status === 0 || this.status >= 500;
  }
}

async function request<T>(fetchImpl: typeof fetch, url: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetchImpl(url, init);
  } catch (err) {
    throw new ApiError(0, `service unreachable: ${String(err)}`);
  }
  let payload: unknown = null;
  try {
    payload = await response.json();
  } catch {
    // non-JSON error body; fall through with status text
  }
  if (!response.ok) {
    const detail =
      payload && typeof payload === "object" && "error" in payload
        ? String((payload as { error: unknown }).error)
        : response.statusText || `HTTP ${response.status}`;
    throw new ApiError(response.status, detail);
  }
  return payload as T;
}

export class ApiClient {
  constructor(
    private base: string = "",
    private fetchImpl: typeof fetch = fetch.bind(globalThis),
  ) {}

  getFeatures(): Promise<{ features: CatalogFeature[] }> {
    return request(this.fetchImpl, `${this.base}/features`);
  }

  analyze(url: string): Promise<AnalyzeResponse> {
    return request(this.fetchImpl, `${this.base}/analyze`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ url }),
    });
  }

  generate(req: GenerateRequest): Promise<BundleInfo> {
    return request(this.fetchImpl, `${this.base}/generate`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
  }

  previewHref(bundle: BundleInfo): string {
    return `${this.base}${bundle.preview_url}`;
  }
}

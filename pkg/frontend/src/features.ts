// Feature-row state: applicability, checkbox selection, the C5/C10
// conflict rule, and parameter editing.

import type { AnalyzeReport, CatalogFeature, CatalogParam } from "./api";

export interface FeatureRow {
  id: string;
  category: string;
  name: string;
  description: string;
  applicable: boolean;
  checked: boolean;
  paramSpecs: CatalogParam[];
  /** raw text edits keyed by param name; parsed on submit */
  params: Record<string, string>;
}

// pairs that can never be selected together (checking one disables the other)
export const CONFLICT_PAIRS: ReadonlyArray<readonly [string, string]> = [["C5", "C10"]];

export function buildRows(catalog: CatalogFeature[], report: AnalyzeReport): FeatureRow[] {
  const applicability = new Map(report.features.map((f) => [f.id, f.applicable]));
  return catalog.map((feature) => ({
    id: feature.id,
    category: feature.category,
    name: feature.name,
    description: feature.description,
    applicable: applicability.get(feature.id) ?? false,
    checked: false,
    paramSpecs: feature.params,
    params: {},
  }));
}

export function conflictPartner(id: string): string | null {
  for (const [a, b] of CONFLICT_PAIRS) {
    if (id === a) return b;
    if (id === b) return a;
  }
  return null;
}

/** A row is blocked when its conflict partner is currently checked. */
export function blockedByConflict(id: string, rows: FeatureRow[]): boolean {
  const partner = conflictPartner(id);
  if (!partner) return false;
  return rows.some((row) => row.id === partner && row.checked);
}

export function rowDisabled(row: FeatureRow, rows: FeatureRow[]): boolean {
  return !row.applicable || blockedByConflict(row.id, rows);
}

/** Toggle a checkbox; no-op when the row is inapplicable or blocked. */
export function toggleRow(rows: FeatureRow[], id: string): FeatureRow[] {
  return rows.map((row) => {
    if (row.id !== id) return row;
    if (!row.checked && rowDisabled(row, rows)) return row;
    return { ...row, checked: !row.checked };
  });
}

export function checkedIds(rows: FeatureRow[]): string[] {
  return rows.filter((row) => row.checked).map((row) => row.id);
}

export function setParam(rows: FeatureRow[], id: string, name: string, raw: string): FeatureRow[] {
  return rows.map((row) =>
    row.id === id ? { ...row, params: { ...row.params, [name]: raw } } : row,
  );
}

/** Parse a raw edit: JSON when valid, comma-separated numbers as a list,
 * bare numbers as numbers, anything else as a string. */
export function parseParamValue(raw: string): unknown {
  const text = raw.trim();
  if (!text) return undefined;
  try {
    return JSON.parse(text);
  } catch {
    // not JSON; try the friendlier forms
  }
  if (text.includes(",")) {
    const parts = text.split(",").map((p) => p.trim());
    if (parts.every((p) => p !== "" && !Number.isNaN(Number(p)))) {
      return parts.map(Number);
    }
    return parts;
  }
  return text;
}

export function buildParamsPayload(
  rows: FeatureRow[],
): Record<string, Record<string, unknown>> {
  const payload: Record<string, Record<string, unknown>> = {};
  for (const row of rows) {
    if (!row.checked) continue;
    const edited: Record<string, unknown> = {};
    for (const [name, raw] of Object.entries(row.params)) {
      const value = parseParamValue(raw);
      if (value !== undefined) edited[name] = value;
    }
    if (Object.keys(edited).length > 0) payload[row.id] = edited;
  }
  return payload;
}

import { describe, expect, it } from "vitest";

import {
  blockedByConflict,
  buildParamsPayload,
  buildRows,
  checkedIds,
  conflictPartner,
  parseParamValue,
  rowDisabled,
  setParam,
  toggleRow,
} from "../src/features";
import { APPLICABLE, CATALOG } from "./apiDouble";

function report() {
  return {
    features: CATALOG.map((f) => ({
      id: f.id,
      category: f.category,
      applicable: APPLICABLE.has(f.id),
      evidence_count: 0,
      description: f.description,
    })),
    counts: {},
  };
}

describe("buildRows", () => {
  it("produces all 17 rows in catalog order with applicability merged", () => {
    const rows = buildRows(CATALOG, report());
    expect(rows).toHaveLength(17);
    expect(rows.map((r) => r.id).slice(0, 3)).toEqual(["C1", "C2", "C3"]);
    expect(rows.find((r) => r.id === "C7")?.applicable).toBe(false);
    expect(rows.find((r) => r.id === "C1")?.applicable).toBe(true);
    expect(rows.every((r) => !r.checked)).toBe(true);
  });
});

describe("toggleRow and the conflict rule", () => {
  it("checks applicable rows only (checked implies applicable)", () => {
    let rows = buildRows(CATALOG, report());
    rows = toggleRow(rows, "C7"); // inapplicable
    expect(checkedIds(rows)).toEqual([]);
    rows = toggleRow(rows, "C1");
    expect(checkedIds(rows)).toEqual(["C1"]);
    for (const row of rows) {
      if (row.checked) expect(row.applicable).toBe(true);
    }
  });

  it("checking C5 blocks C10 and vice versa", () => {
    let rows = buildRows(CATALOG, report());
    rows = toggleRow(rows, "C5");
    expect(blockedByConflict("C10", rows)).toBe(true);
    expect(rowDisabled(rows.find((r) => r.id === "C10")!, rows)).toBe(true);
    // toggling the blocked row is a no-op
    rows = toggleRow(rows, "C10");
    expect(checkedIds(rows)).toEqual(["C5"]);
    // unchecking releases the block
    rows = toggleRow(rows, "C5");
    expect(blockedByConflict("C10", rows)).toBe(false);
    rows = toggleRow(rows, "C10");
    expect(checkedIds(rows)).toEqual(["C10"]);
  });

  it("conflictPartner is symmetric and null elsewhere", () => {
    expect(conflictPartner("C5")).toBe("C10");
    expect(conflictPartner("C10")).toBe("C5");
    expect(conflictPartner("C1")).toBeNull();
  });
});

describe("parameter editing", () => {
  it("parses numbers, lists, JSON, and bare strings", () => {
    expect(parseParamValue("7")).toBe(7);
    expect(parseParamValue("0.3")).toBe(0.3);
    expect(parseParamValue("0.7, 0.95")).toEqual([0.7, 0.95]);
    expect(parseParamValue('"quoted"')).toBe("quoted");
    expect(parseParamValue("Georgia")).toBe("Georgia");
    expect(parseParamValue("a, b")).toEqual(["a", "b"]);
    expect(parseParamValue("   ")).toBeUndefined();
  });

  it("builds a payload only for checked rows with edits", () => {
    let rows = buildRows(CATALOG, report());
    rows = toggleRow(rows, "C12");
    rows = setParam(rows, "C12", "n", "9");
    rows = setParam(rows, "C1", "x", "ignored"); // unchecked row
    expect(buildParamsPayload(rows)).toEqual({ C12: { n: 9 } });
  });
});

import { describe, expect, it } from "vitest";

import { SchemaError, cellAt, matrixRows, parseMatrixDoc } from "../src/schema.js";

function validDoc() {
  return {
    kind: "PKAN",
    labels: ["a", "b"],
    excluded_targets: [],
    seed: 42,
    config: {},
    cells: [
      { row: "a", col: "a", strength: 1.0, curve: [[0, 0], [1, 1]], raw: {} },
      { row: "a", col: "b", strength: 0.5, curve: [[0, 0.1], [1, 0.4]], raw: {} },
      { row: "b", col: "a", strength: 0.25, curve: [[0, 0], [1, 2]], raw: {} },
      { row: "b", col: "b", strength: 1.0, curve: [[0, 0], [1, 1]], raw: {} },
    ],
  };
}

describe("parseMatrixDoc", () => {
  it("accepts a valid document", () => {
    const doc = parseMatrixDoc(validDoc());
    expect(doc.kind).toBe("PKAN");
    expect(doc.labels).toEqual(["a", "b"]);
    expect(cellAt(doc, "a", "b")?.strength).toBe(0.5);
  });

  it("rejects unknown kinds", () => {
    expect(() => parseMatrixDoc({ ...validDoc(), kind: "WIBBLE" })).toThrow(SchemaError);
  });

  it("rejects strengths outside the unit interval", () => {
    const bad = validDoc();
    bad.cells[1].strength = 1.5;
    expect(() => parseMatrixDoc(bad)).toThrow(SchemaError);
  });

  it("rejects grids whose cell count mismatches the labels", () => {
    const bad = validDoc();
    bad.cells.pop();
    expect(() => parseMatrixDoc(bad)).toThrow(/expected 4 cells/);
  });

  it("handles excluded targets in the row computation", () => {
    const doc = parseMatrixDoc({
      ...validDoc(),
      excluded_targets: ["a"],
      cells: validDoc().cells.filter((c) => c.row !== "a"),
    });
    expect(matrixRows(doc)).toEqual(["b"]);
  });

  it("allows null curves for baseline matrices", () => {
    const base = validDoc();
    base.kind = "NMI";
    for (const cell of base.cells) (cell as { curve: unknown }).curve = null;
    const doc = parseMatrixDoc(base);
    expect(doc.cells.every((c) => c.curve === null)).toBe(true);
  });
});

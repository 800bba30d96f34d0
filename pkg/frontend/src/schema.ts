// Types and validation for the matrix JSON documents served by the backend.
// The UI performs no scientific computation: every number shown on screen
// comes straight out of these documents.

export type MatrixKind = "PKAN" | "MKAN" | "PEARSON" | "NMI";

export interface CellDoc {
  row: string;
  col: string;
  strength: number;
  curve: [number, number][] | null;
  raw: Record<string, unknown>;
}

export interface MatrixDoc {
  kind: MatrixKind;
  labels: string[];
  excluded_targets: string[];
  seed: number;
  config: Record<string, unknown>;
  cells: CellDoc[];
}

export class SchemaError extends Error {}

const KINDS = new Set(["PKAN", "MKAN", "PEARSON", "NMI"]);

export function parseMatrixDoc(data: unknown): MatrixDoc {
  if (typeof data !== "object" || data === null) {
    throw new SchemaError("matrix document is not an object");
  }
  const doc = data as Record<string, unknown>;
  if (typeof doc.kind !== "string" || !KINDS.has(doc.kind)) {
    throw new SchemaError(`unknown matrix kind ${String(doc.kind)}`);
  }
  if (!Array.isArray(doc.labels) || doc.labels.some((l) => typeof l !== "string")) {
    throw new SchemaError("labels must be a list of strings");
  }
  if (!Array.isArray(doc.cells)) {
    throw new SchemaError("cells missing");
  }
  const labels = doc.labels as string[];
  const excluded = Array.isArray(doc.excluded_targets)
    ? (doc.excluded_targets as string[])
    : [];
  const cells: CellDoc[] = [];
  for (const item of doc.cells) {
    const c = item as Record<string, unknown>;
    if (typeof c.row !== "string" || typeof c.col !== "string") {
      throw new SchemaError("cell missing row/col");
    }
    if (typeof c.strength !== "number" || c.strength < 0 || c.strength > 1) {
      throw new SchemaError(`cell ${c.row},${c.col} strength out of [0, 1]`);
    }
    let curve: [number, number][] | null = null;
    if (c.curve !== null && c.curve !== undefined) {
      if (!Array.isArray(c.curve)) throw new SchemaError("curve must be a list");
      curve = (c.curve as unknown[]).map((pt) => {
        if (!Array.isArray(pt) || pt.length !== 2) throw new SchemaError("bad curve point");
        const [u, v] = pt;
        if (typeof u !== "number" || typeof v !== "number") {
          throw new SchemaError("bad curve point");
        }
        return [u, v] as [number, number];
      });
    }
    cells.push({
      row: c.row,
      col: c.col,
      strength: c.strength,
      curve,
      raw: (c.raw ?? {}) as Record<string, unknown>,
    });
  }
  const rows = rowsOf(labels, excluded);
  if (cells.length !== rows.length * labels.length) {
    throw new SchemaError(
      `expected ${rows.length * labels.length} cells, got ${cells.length}`,
    );
  }
  return {
    kind: doc.kind as MatrixKind,
    labels,
    excluded_targets: excluded,
    seed: typeof doc.seed === "number" ? doc.seed : 0,
    config: (doc.config ?? {}) as Record<string, unknown>,
    cells,
  };
}

export function rowsOf(labels: string[], excluded: string[]): string[] {
  const skip = new Set(excluded);
  return labels.filter((l) => !skip.has(l));
}

export function matrixRows(doc: MatrixDoc): string[] {
  return rowsOf(doc.labels, doc.excluded_targets);
}

export function cellAt(doc: MatrixDoc, row: string, col: string): CellDoc | undefined {
  return doc.cells.find((c) => c.row === row && c.col === col);
}

export function cellFlags(cell: CellDoc): string[] {
  const flags = cell.raw["flags"];
  return Array.isArray(flags) ? flags.map(String) : [];
}

export function xRange(cell: CellDoc): [number, number] | null {
  const r = cell.raw["x_range"];
  if (Array.isArray(r) && r.length === 2 && r.every((v) => typeof v === "number")) {
    return [r[0] as number, r[1] as number];
  }
  return null;
}

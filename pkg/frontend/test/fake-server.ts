// In-memory stand-in for the backend with the same endpoint semantics:
// CSV upload, sessions with transform stacks, undo by replay, and matrix
// documents in the export schema. Strengths are deterministic hashes, not
// science; the UI never computes anything from data, so tests only need
// schema-faithful documents that react to the transform stack.

import { TransformSpec } from "../src/opstring.js";

interface FakeDataset {
  columns: string[];
  nRows: number;
}

interface FakeSession {
  id: string;
  datasetId: string;
  history: TransformSpec[];
}

function hash01(text: string): number {
  let h = 2166136261;
  for (let i = 0; i < text.length; i++) {
    h = Math.imul(h ^ text.charCodeAt(i), 16777619);
  }
  return (h >>> 0) / 4294967295;
}

function applyStack(base: FakeDataset, history: TransformSpec[]): FakeDataset {
  let columns = [...base.columns];
  let nRows = base.nRows;
  for (const spec of history) {
    if (!columns.includes(spec.column)) throw new Error(`unknown column ${spec.column}`);
    if (spec.kind === "drop") {
      columns = columns.filter((c) => c !== spec.column);
    } else if (spec.kind === "lag") {
      const k = spec.k ?? 0;
      if (k < 1 || k >= nRows) throw new Error(`bad lag k=${k}`);
      columns = [...columns, `${spec.column}_lag${k}`];
      nRows -= k;
    }
    // log / subtract_mean / subtract_group_mean keep the shape
  }
  return { columns, nRows };
}

function matrixDoc(kind: string, columns: string[], excluded: string[], stamp: string) {
  const upper = kind.toUpperCase();
  const rows = columns.filter((c) => !excluded.includes(c));
  const cells = [];
  for (const row of rows) {
    for (const col of columns) {
      const diag = row === col;
      let strength: number;
      if (upper === "PKAN" && diag) strength = 1.0;
      else strength = Math.round(hash01(`${stamp}|${row}|${col}`) * 1000) / 1000;
      const withCurve = upper === "PKAN" || upper === "MKAN";
      const curve = withCurve
        ? Array.from({ length: 9 }, (_, i) => {
            const u = i / 8;
            return [u, diag ? u : Math.sin(3 * u + strength)] as [number, number];
          })
        : null;
      cells.push({
        row,
        col,
        strength,
        curve,
        raw: {
          metric: strength,
          share: diag ? 1.0 : 0.5,
          flags: strength === 0 ? ["pruned"] : [],
          x_range: [0, 10],
        },
      });
    }
  }
  return {
    kind: upper,
    labels: columns,
    excluded_targets: excluded,
    seed: 42,
    config: { curve_samples: 9 },
    cells,
  };
}

export class FakeServer {
  datasets = new Map<string, FakeDataset>();
  sessions = new Map<string, FakeSession>();
  computeCount = 0;
  private nextId = 1;

  fetch = async (url: string | URL | Request, init?: RequestInit): Promise<Response> => {
    const u = new URL(String(url));
    const method = init?.method ?? "GET";
    const path = u.pathname;
    const jsonBody = () => (init?.body ? JSON.parse(String(init.body)) : null);

    const json = (status: number, data: unknown, headers: Record<string, string> = {}) =>
      new Response(JSON.stringify(data), {
        status,
        headers: { "Content-Type": "application/json", ...headers },
      });
    const error = (status: number, code: string, message: string) =>
      json(status, { code, message, detail: null });

    if (path === "/health") return json(200, { status: "ok" });

    if (path === "/datasets" && method === "POST") {
      const text = String(init?.body ?? "");
      const lines = text.trim().split("\n");
      if (lines.length < 2) return error(400, "PARSE_ERROR", "zero data rows");
      const columns = lines[0].split(",").map((c) => c.trim());
      const id = `ds_${this.nextId++}`;
      this.datasets.set(id, { columns, nRows: lines.length - 1 });
      return json(200, {
        dataset_id: id,
        columns,
        n_rows: lines.length - 1,
        rows_dropped: 0,
      });
    }

    if (path === "/sessions" && method === "POST") {
      const body = jsonBody();
      const ds = this.datasets.get(body.dataset_id);
      if (!ds) return error(404, "UNKNOWN_DATASET", "no such dataset");
      const id = `s_${this.nextId++}`;
      this.sessions.set(id, { id, datasetId: body.dataset_id, history: [] });
      return json(200, this.describe(this.sessions.get(id)!));
    }

    const sessionMatch = path.match(/^\/sessions\/([^/]+)(\/.*)?$/);
    if (sessionMatch) {
      const session = this.sessions.get(sessionMatch[1]);
      if (!session) return error(404, "UNKNOWN_SESSION", "no such session");
      const rest = sessionMatch[2] ?? "";

      if (rest === "" && method === "GET") return json(200, this.describe(session));

      if (rest === "/transforms" && method === "POST") {
        const candidate = [...session.history, jsonBody() as TransformSpec];
        try {
          applyStack(this.datasets.get(session.datasetId)!, candidate);
        } catch (err) {
          return error(422, "INVALID_TRANSFORM", String(err));
        }
        session.history = candidate;
        return json(200, this.describe(session));
      }

      if (rest === "/transforms/last" && method === "DELETE") {
        if (session.history.length === 0) return error(422, "EMPTY_STACK", "nothing to undo");
        session.history = session.history.slice(0, -1);
        return json(200, this.describe(session));
      }

      if (rest === "/compute" && method === "POST") {
        const body = jsonBody();
        this.computeCount += 1;
        const state = applyStack(this.datasets.get(session.datasetId)!, session.history);
        const excluded: string[] = body.excluded_targets ?? [];
        for (const name of excluded) {
          if (!state.columns.includes(name)) {
            return error(422, "INVALID_TARGETS", `unknown column ${name}`);
          }
        }
        const stamp = this.stackHash(session);
        return json(200, matrixDoc(body.kind, state.columns, excluded, stamp), {
          "X-Config-Hash": "fakecfg",
          "X-Stack-Hash": stamp,
        });
      }
    }
    return error(404, "NOT_FOUND", `no route ${method} ${path}`);
  };

  private stackHash(session: FakeSession): string {
    return `h${hash01(JSON.stringify(session.history)).toFixed(8)}`;
  }

  private describe(session: FakeSession) {
    const state = applyStack(this.datasets.get(session.datasetId)!, session.history);
    return {
      session_id: session.id,
      dataset_id: session.datasetId,
      columns: state.columns,
      n_rows: state.nRows,
      history: session.history,
      stack_hash: this.stackHash(session),
    };
  }
}

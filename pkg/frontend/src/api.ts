// Thin typed client for the backend HTTP/JSON API. All state lives on the
// server; the client only moves documents back and forth.

import { MatrixDoc, parseMatrixDoc } from "./schema.js";
import { TransformSpec } from "./opstring.js";

export interface DatasetMeta {
  dataset_id: string;
  columns: string[];
  n_rows: number;
  rows_dropped?: number;
}

export interface SessionState {
  session_id: string;
  dataset_id: string;
  columns: string[];
  n_rows: number;
  history: TransformSpec[];
  stack_hash: string;
}

export interface ComputeRequest {
  kind: string;
  targets?: string[];
  excluded_targets?: string[];
  config?: Record<string, unknown>;
}

export interface ComputeResult {
  doc: MatrixDoc;
  configHash: string;
  stackHash: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public detail?: unknown,
  ) {
    super(message);
  }
}

async function fail(response: Response): Promise<never> {
  let code = "HTTP_ERROR";
  let message = `${response.status}`;
  let detail: unknown;
  try {
    const body = (await response.json()) as Record<string, unknown>;
    code = String(body.code ?? code);
    message = String(body.message ?? message);
    detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, code, message, detail);
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: typeof fetch = fetch.bind(globalThis),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) await fail(response);
    return response;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.request(path, init);
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.json("/health");
  }

  uploadDataset(csvText: string): Promise<DatasetMeta> {
    return this.json("/datasets", {
      method: "POST",
      headers: { "Content-Type": "text/csv" },
      body: csvText,
    });
  }

  listDatasets(): Promise<{ datasets: DatasetMeta[] }> {
    return this.json("/datasets");
  }

  createSession(datasetId: string): Promise<SessionState> {
    return this.json("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ dataset_id: datasetId }),
    });
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.json(`/sessions/${sessionId}`);
  }

  addTransform(sessionId: string, spec: TransformSpec): Promise<SessionState> {
    return this.json(`/sessions/${sessionId}/transforms`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(spec),
    });
  }

  undoTransform(sessionId: string): Promise<SessionState> {
    return this.json(`/sessions/${sessionId}/transforms/last`, { method: "DELETE" });
  }

  async compute(sessionId: string, req: ComputeRequest): Promise<ComputeResult> {
    const response = await this.request(`/sessions/${sessionId}/compute`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
    const doc = parseMatrixDoc(await response.json());
    return {
      doc,
      configHash: response.headers.get("X-Config-Hash") ?? "",
      stackHash: response.headers.get("X-Stack-Hash") ?? "",
    };
  }

  async computeAsync(
    sessionId: string,
    req: ComputeRequest,
    pollMs = 150,
    maxPolls = 600,
  ): Promise<ComputeResult> {
    const started = await this.json<{ job_id: string }>(
      `/sessions/${sessionId}/compute`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ ...req, mode: "async" }),
      },
    );
    for (let i = 0; i < maxPolls; i++) {
      const response = await this.request(
        `/sessions/${sessionId}/jobs/${started.job_id}`,
      );
      const body = (await response.json()) as {
        status: string;
        error: string | null;
        matrix?: unknown;
      };
      if (body.status === "done") {
        return {
          doc: parseMatrixDoc(body.matrix),
          configHash: response.headers.get("X-Config-Hash") ?? "",
          stackHash: "",
        };
      }
      if (body.status === "error") {
        throw new ApiError(500, "COMPUTE_FAILED", body.error ?? "compute failed");
      }
      await new Promise((resolve) => setTimeout(resolve, pollMs));
    }
    throw new ApiError(504, "TIMEOUT", "compute did not finish in time");
  }
}

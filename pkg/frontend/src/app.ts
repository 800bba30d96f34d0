// Stagewise exploration view. All state of scientific interest lives on the
// server; this class holds only (session snapshot, active matrix document,
// selection, job status) and re-renders the whole view from that, so a
// refresh or reconnect reconstructs the same screen from the API alone.

import { ApiClient, ApiError, ComputeRequest, SessionState } from "./api.js";
import { renderMatrixGrid } from "./grid.js";
import { renderInspector } from "./inspector.js";
import { MatrixDoc } from "./schema.js";
import { TransformSpec } from "./opstring.js";
import { renderTransformPanel } from "./transforms.js";

export interface StageState {
  session: SessionState | null;
  matrix: MatrixDoc | null;
  matrixStackHash: string | null;
  selection: { row: string; col: string } | null;
  jobStatus: "idle" | "computing";
  transformError: string | null;
  lastError: string | null;
}

export class ExplorerApp {
  state: StageState = {
    session: null,
    matrix: null,
    matrixStackHash: null,
    selection: null,
    jobStatus: "idle",
    transformError: null,
    lastError: null,
  };
  private lastCompute: ComputeRequest | null = null;
  private pendingOp: Promise<unknown> = Promise.resolve();

  readonly statusBox: HTMLElement;
  readonly gridBox: HTMLElement;
  readonly panelBox: HTMLElement;
  readonly inspectorBox: HTMLElement;

  constructor(
    readonly root: HTMLElement,
    readonly api: ApiClient,
  ) {
    this.statusBox = this.section("status");
    this.panelBox = this.section("transform-panel");
    this.gridBox = this.section("grid");
    this.inspectorBox = this.section("inspector");
    this.render();
  }

  private section(cls: string): HTMLElement {
    const el = document.createElement("section");
    el.className = cls;
    this.root.appendChild(el);
    return el;
  }

  private track<T>(op: Promise<T>): Promise<T> {
    this.pendingOp = this.pendingOp.then(
      () => op.catch(() => undefined),
      () => op.catch(() => undefined),
    );
    return op;
  }

  /** Wait for event-handler-initiated operations to finish (used by tests). */
  async settle(): Promise<void> {
    let last;
    do {
      last = this.pendingOp;
      await last;
    } while (last !== this.pendingOp);
  }

  get isStale(): boolean {
    return (
      this.state.matrix !== null &&
      this.state.session !== null &&
      this.state.matrixStackHash !== null &&
      this.state.matrixStackHash !== this.state.session.stack_hash
    );
  }

  async uploadCsv(csvText: string): Promise<void> {
    const meta = await this.api.uploadDataset(csvText);
    this.state.session = await this.api.createSession(meta.dataset_id);
    this.state.matrix = null;
    this.state.matrixStackHash = null;
    this.state.selection = null;
    this.state.transformError = null;
    this.render();
  }

  async compute(req: ComputeRequest): Promise<void> {
    if (!this.state.session) throw new Error("no session");
    this.lastCompute = req;
    this.state.jobStatus = "computing";
    this.render();
    try {
      const result = await this.api.compute(this.state.session.session_id, req);
      this.state.matrix = result.doc;
      this.state.matrixStackHash = result.stackHash || this.state.session.stack_hash;
      this.state.selection = null;
      this.state.lastError = null;
    } catch (err) {
      this.state.lastError = err instanceof Error ? err.message : String(err);
    } finally {
      this.state.jobStatus = "idle";
      this.render();
    }
  }

  async recompute(): Promise<void> {
    if (this.lastCompute) await this.compute(this.lastCompute);
  }

  async applyTransform(spec: TransformSpec): Promise<boolean> {
    if (!this.state.session) return false;
    try {
      this.state.session = await this.api.addTransform(
        this.state.session.session_id,
        spec,
      );
      this.state.transformError = null;
      this.render();
      return true;
    } catch (err) {
      // server rejected: stack unchanged, error shown inline
      this.state.transformError =
        err instanceof ApiError ? err.message : String(err);
      this.render();
      return false;
    }
  }

  async undo(): Promise<void> {
    if (!this.state.session) return;
    this.state.session = await this.api.undoTransform(this.state.session.session_id);
    this.state.transformError = null;
    this.render();
    await this.recompute();
  }

  async dropColumn(col: string): Promise<void> {
    const applied = await this.applyTransform({ kind: "drop", column: col });
    if (applied) await this.recompute();
  }

  select(row: string, col: string): void {
    this.state.selection = { row, col };
    this.render();
  }

  render(): void {
    this.statusBox.textContent = "";
    if (this.state.jobStatus === "computing") {
      const busy = document.createElement("p");
      busy.className = "job-status";
      busy.textContent = "computing…";
      this.statusBox.appendChild(busy);
    }
    if (this.isStale) {
      const stale = document.createElement("p");
      stale.className = "stale-banner";
      stale.textContent =
        "matrix is stale: transforms changed since it was computed";
      this.statusBox.appendChild(stale);
    }
    if (this.state.lastError) {
      const err = document.createElement("p");
      err.className = "error-banner";
      err.textContent = this.state.lastError;
      this.statusBox.appendChild(err);
    }

    renderTransformPanel(
      this.panelBox,
      this.state.session,
      {
        onApply: (spec) => void this.track(this.applyTransform(spec)),
        onUndo: () => void this.track(this.undo()),
      },
      this.state.transformError,
    );

    this.gridBox.textContent = "";
    if (this.state.matrix) {
      renderMatrixGrid(this.gridBox, this.state.matrix, {
        onSelect: (row, col) => this.select(row, col),
        onDropColumn: (col) => void this.track(this.dropColumn(col)),
      });
    }

    renderInspector(this.inspectorBox, this.state.matrix, this.state.selection);
  }
}

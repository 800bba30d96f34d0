// The full stagewise loop against the in-memory fake backend: upload,
// compute, drop a column from a header click, recompute, undo, restore.

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ExplorerApp } from "../src/app.js";
import { FakeServer } from "./fake-server.js";

function csv(): string {
  const rows = ["x1,x2,x3"];
  for (let i = 0; i < 60; i++) rows.push(`${i},${i * i},${Math.sin(i)}`);
  return rows.join("\n") + "\n";
}

function gridDims(app: ExplorerApp): { rows: number; cols: number } {
  const table = app.gridBox.querySelector("table.matrix-grid") as HTMLElement;
  return { rows: Number(table.dataset.rows), cols: Number(table.dataset.cols) };
}

describe("stagewise exploration loop", () => {
  let server: FakeServer;
  let app: ExplorerApp;

  beforeEach(() => {
    document.body.innerHTML = "";
    const root = document.createElement("div");
    document.body.appendChild(root);
    server = new FakeServer();
    app = new ExplorerApp(root, new ApiClient("http://fake", server.fetch as typeof fetch));
  });

  it("uploads, computes, drops via header click, and undoes", async () => {
    await app.uploadCsv(csv());
    expect(app.state.session?.columns).toEqual(["x1", "x2", "x3"]);

    await app.compute({ kind: "mkan" });
    expect(gridDims(app)).toEqual({ rows: 3, cols: 3 });

    // displayed strengths come straight from the JSON document
    for (const cell of app.state.matrix!.cells) {
      const tile = app.gridBox.querySelector(
        `td[data-row="${cell.row}"][data-col="${cell.col}"]`,
      ) as HTMLElement;
      expect(tile.dataset.strength).toBe(cell.strength.toFixed(3));
    }

    // drop x3 through its column header
    const headers = [...app.gridBox.querySelectorAll("button.col-header")];
    const x3 = headers.find((h) => h.textContent === "x3") as HTMLButtonElement;
    x3.click();
    await app.settle();

    expect(app.state.session?.history).toEqual([{ kind: "drop", column: "x3" }]);
    expect(gridDims(app)).toEqual({ rows: 2, cols: 2 });
    const items = [...app.panelBox.querySelectorAll(".history li")];
    expect(items.map((li) => li.textContent)).toEqual(["drop:x3"]);

    // undo restores the original grid
    (app.panelBox.querySelector(".t-undo") as HTMLButtonElement).click();
    await app.settle();
    expect(app.state.session?.history).toEqual([]);
    expect(gridDims(app)).toEqual({ rows: 3, cols: 3 });
  });

  it("flags a stale matrix after a transform until recomputed", async () => {
    await app.uploadCsv(csv());
    await app.compute({ kind: "pkan" });
    expect(app.isStale).toBe(false);
    expect(app.statusBox.querySelector(".stale-banner")).toBeNull();

    await app.applyTransform({ kind: "lag", column: "x1", k: 5 });
    expect(app.isStale).toBe(true);
    expect(app.statusBox.querySelector(".stale-banner")).not.toBeNull();

    await app.recompute();
    expect(app.isStale).toBe(false);
  });

  it("keeps the stack unchanged when the server rejects a transform", async () => {
    await app.uploadCsv(csv());
    const ok = await app.applyTransform({ kind: "lag", column: "x1", k: 9999 });
    expect(ok).toBe(false);
    expect(app.state.session?.history).toEqual([]);
    expect(app.panelBox.querySelector(".transform-error")).not.toBeNull();
  });

  it("recomputes with the same request after a drop", async () => {
    await app.uploadCsv(csv());
    await app.compute({ kind: "mkan", excluded_targets: ["x1"] });
    expect(gridDims(app)).toEqual({ rows: 2, cols: 3 });
    await app.dropColumn("x2");
    expect(gridDims(app)).toEqual({ rows: 1, cols: 2 });
    expect(app.state.matrix?.excluded_targets).toEqual(["x1"]);
  });
});

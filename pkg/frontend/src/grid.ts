// The matrix grid: one colored tile per cell with an inline curve
// sparkline (spline matrices) or the numeric value (baselines). Column
// headers are buttons offering "drop this variable".

import { curveColor, strengthColor } from "./color.js";
import { CellDoc, MatrixDoc, cellAt, matrixRows } from "./schema.js";
import { sparklineSvg } from "./sparkline.js";

export interface GridCallbacks {
  onSelect?: (row: string, col: string) => void;
  onDropColumn?: (col: string) => void;
}

const TILE = 56;

function tileContent(doc: MatrixDoc, cell: CellDoc): string {
  if (doc.kind === "PEARSON" || doc.kind === "NMI") {
    const r = cell.raw["r"];
    const value = doc.kind === "PEARSON" && typeof r === "number" ? r : cell.strength;
    return `<span class="cell-value" style="color:${curveColor(cell.strength)}">${value.toFixed(3)}</span>`;
  }
  if (cell.curve !== null && cell.curve.length >= 2) {
    return sparklineSvg(cell.curve, TILE, TILE, curveColor(cell.strength));
  }
  return "";
}

export function renderMatrixGrid(
  container: HTMLElement,
  doc: MatrixDoc,
  callbacks: GridCallbacks = {},
): void {
  container.textContent = "";
  const rows = matrixRows(doc);

  const table = document.createElement("table");
  table.className = "matrix-grid";
  table.dataset.kind = doc.kind;
  table.dataset.rows = String(rows.length);
  table.dataset.cols = String(doc.labels.length);

  const header = document.createElement("tr");
  header.appendChild(document.createElement("th"));
  for (const col of doc.labels) {
    const th = document.createElement("th");
    const button = document.createElement("button");
    button.className = "col-header";
    button.textContent = col;
    button.title = `drop ${col}`;
    button.addEventListener("click", () => callbacks.onDropColumn?.(col));
    th.appendChild(button);
    header.appendChild(th);
  }
  table.appendChild(header);

  for (const row of rows) {
    const tr = document.createElement("tr");
    const th = document.createElement("th");
    th.className = "row-header";
    th.textContent = row;
    tr.appendChild(th);
    for (const col of doc.labels) {
      const cell = cellAt(doc, row, col);
      const td = document.createElement("td");
      td.className = "cell";
      td.dataset.row = row;
      td.dataset.col = col;
      if (cell) {
        td.dataset.strength = cell.strength.toFixed(3);
        td.title = `${row} ← ${col}: ${cell.strength.toFixed(3)}`;
        td.style.backgroundColor = strengthColor(cell.strength);
        td.innerHTML = tileContent(doc, cell);
        td.addEventListener("click", () => callbacks.onSelect?.(row, col));
      }
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  container.appendChild(table);
}

// Cell inspector: an enlarged curve with denormalized axis labels plus the
// raw metric value, attribution share, and any flags the backend attached.

import { curvePoints } from "./sparkline.js";
import { CellDoc, MatrixDoc, cellAt, cellFlags, xRange } from "./schema.js";

const W = 280;
const H = 180;
const PAD = 34;

function fmt(v: number): string {
  return Math.abs(v) >= 1000 || (v !== 0 && Math.abs(v) < 0.01)
    ? v.toExponential(2)
    : v.toFixed(3);
}

function curveFigure(cell: CellDoc): string {
  const curve = cell.curve!;
  const pts = curvePoints(curve, W - 2 * PAD, H - 2 * PAD);
  const shifted = pts
    .split(" ")
    .map((p) => {
      const [x, y] = p.split(",").map(Number);
      return `${(x + PAD).toFixed(2)},${(y + PAD).toFixed(2)}`;
    })
    .join(" ");
  const vs = curve.map(([, v]) => v);
  const vmin = Math.min(...vs);
  const vmax = Math.max(...vs);
  const range = xRange(cell);
  const xlo = range ? fmt(range[0]) : "0";
  const xhi = range ? fmt(range[1]) : "1";
  return (
    `<svg class="inspector-curve" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}">` +
    `<rect x="${PAD}" y="${PAD}" width="${W - 2 * PAD}" height="${H - 2 * PAD}" ` +
    `fill="none" stroke="#CCCCCC"/>` +
    `<polyline points="${shifted}" fill="none" stroke="#8B0000" stroke-width="2"/>` +
    `<text class="axis-x-min" x="${PAD}" y="${H - 10}" font-size="10">${xlo}</text>` +
    `<text class="axis-x-max" x="${W - PAD}" y="${H - 10}" font-size="10" ` +
    `text-anchor="end">${xhi}</text>` +
    `<text class="axis-y-min" x="${PAD - 4}" y="${H - PAD}" font-size="10" ` +
    `text-anchor="end">${fmt(vmin)}</text>` +
    `<text class="axis-y-max" x="${PAD - 4}" y="${PAD + 4}" font-size="10" ` +
    `text-anchor="end">${fmt(vmax)}</text>` +
    `</svg>`
  );
}

export function renderInspector(
  container: HTMLElement,
  doc: MatrixDoc | null,
  selection: { row: string; col: string } | null,
): void {
  container.textContent = "";
  if (!doc || !selection) {
    const hint = document.createElement("p");
    hint.className = "inspector-empty";
    hint.textContent = "Select a cell to inspect it.";
    container.appendChild(hint);
    return;
  }
  const cell = cellAt(doc, selection.row, selection.col);
  if (!cell) return;

  const title = document.createElement("h3");
  title.textContent = `${cell.row} ← ${cell.col}`;
  container.appendChild(title);

  const strength = document.createElement("p");
  strength.className = "inspector-strength";
  strength.textContent = `strength ${cell.strength.toFixed(3)}`;
  container.appendChild(strength);

  const details = document.createElement("dl");
  details.className = "inspector-raw";
  const metric = cell.raw["metric"];
  if (typeof metric === "number") {
    details.innerHTML += `<dt>raw metric</dt><dd class="raw-metric">${fmt(metric)}</dd>`;
  }
  const share = cell.raw["share"];
  if (typeof share === "number") {
    details.innerHTML += `<dt>attribution share</dt><dd class="raw-share">${fmt(share)}</dd>`;
  }
  const r = cell.raw["r"];
  if (typeof r === "number") {
    details.innerHTML += `<dt>signed r</dt><dd class="raw-r">${fmt(r)}</dd>`;
  }
  container.appendChild(details);

  const flags = cellFlags(cell);
  if (flags.length > 0) {
    const flagBox = document.createElement("p");
    flagBox.className = "inspector-flags";
    for (const flag of flags) {
      const badge = document.createElement("span");
      badge.className = `badge badge-${flag}`;
      badge.textContent = flag;
      flagBox.appendChild(badge);
    }
    container.appendChild(flagBox);
  }

  if (cell.curve !== null && cell.curve.length >= 2) {
    const fig = document.createElement("div");
    fig.className = "inspector-figure";
    fig.innerHTML = curveFigure(cell);
    container.appendChild(fig);
  }
}

// Transform panel: apply drop/lag/log/subtract_mean/subtract_group_mean,
// undo the last one, and show the replay-ordered history (copyable as a
// CLI op string).

import { SessionState } from "./api.js";
import { TransformSpec, historyToOpString, specToOpString } from "./opstring.js";

export interface TransformCallbacks {
  onApply: (spec: TransformSpec) => void;
  onUndo: () => void;
}

function field(label: string, input: HTMLElement): HTMLElement {
  const wrap = document.createElement("label");
  wrap.className = "field";
  const span = document.createElement("span");
  span.textContent = label;
  wrap.appendChild(span);
  wrap.appendChild(input);
  return wrap;
}

export function readSpecFromForm(form: HTMLElement): TransformSpec {
  const kind = (form.querySelector(".t-kind") as HTMLSelectElement).value;
  const column = (form.querySelector(".t-column") as HTMLSelectElement).value;
  const spec: TransformSpec = { kind: kind as TransformSpec["kind"], column };
  if (kind === "lag") {
    spec.k = parseInt((form.querySelector(".t-k") as HTMLInputElement).value, 10);
  }
  if (kind === "log") {
    const floor = (form.querySelector(".t-floor") as HTMLInputElement).value;
    if (floor !== "") spec.floor = parseFloat(floor);
  }
  if (kind === "subtract_group_mean") {
    const groups = (form.querySelector(".t-groups") as HTMLInputElement).value;
    spec.group_by = groups.split(",").map((g) => g.trim()).filter(Boolean);
  }
  return spec;
}

export function renderTransformPanel(
  container: HTMLElement,
  session: SessionState | null,
  callbacks: TransformCallbacks,
  errorMessage: string | null = null,
): void {
  container.textContent = "";
  if (!session) return;

  const form = document.createElement("div");
  form.className = "transform-form";

  const kindSelect = document.createElement("select");
  kindSelect.className = "t-kind";
  for (const kind of ["drop", "lag", "log", "subtract_mean", "subtract_group_mean"]) {
    const opt = document.createElement("option");
    opt.value = kind;
    opt.textContent = kind;
    kindSelect.appendChild(opt);
  }
  const columnSelect = document.createElement("select");
  columnSelect.className = "t-column";
  for (const col of session.columns) {
    const opt = document.createElement("option");
    opt.value = col;
    opt.textContent = col;
    columnSelect.appendChild(opt);
  }
  const kInput = document.createElement("input");
  kInput.className = "t-k";
  kInput.type = "number";
  kInput.value = "50";
  const floorInput = document.createElement("input");
  floorInput.className = "t-floor";
  floorInput.type = "text";
  floorInput.placeholder = "1e-6";
  const groupsInput = document.createElement("input");
  groupsInput.className = "t-groups";
  groupsInput.type = "text";
  groupsInput.placeholder = "time";

  form.appendChild(field("transform", kindSelect));
  form.appendChild(field("column", columnSelect));
  form.appendChild(field("lag k", kInput));
  form.appendChild(field("log floor", floorInput));
  form.appendChild(field("group by", groupsInput));

  const apply = document.createElement("button");
  apply.className = "t-apply";
  apply.textContent = "apply";
  apply.addEventListener("click", () => callbacks.onApply(readSpecFromForm(form)));
  form.appendChild(apply);

  const undo = document.createElement("button");
  undo.className = "t-undo";
  undo.textContent = "undo";
  undo.disabled = session.history.length === 0;
  undo.addEventListener("click", () => callbacks.onUndo());
  form.appendChild(undo);
  container.appendChild(form);

  if (errorMessage) {
    const err = document.createElement("p");
    err.className = "transform-error";
    err.textContent = errorMessage;
    container.appendChild(err);
  }

  const history = document.createElement("ol");
  history.className = "history";
  for (const spec of session.history) {
    const item = document.createElement("li");
    item.textContent = specToOpString(spec);
    history.appendChild(item);
  }
  container.appendChild(history);

  const copy = document.createElement("input");
  copy.className = "history-opstring";
  copy.readOnly = true;
  copy.value = historyToOpString(session.history);
  container.appendChild(copy);

  const meta = document.createElement("p");
  meta.className = "session-meta";
  meta.textContent = `${session.columns.length} columns · ${session.n_rows} rows`;
  container.appendChild(meta);
}

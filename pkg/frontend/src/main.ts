// Browser bootstrap: file upload, matrix-kind picker, and the stage view.

import { ApiClient } from "./api.js";
import { ExplorerApp } from "./app.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function boot(): ExplorerApp {
  const baseUrl =
    new URLSearchParams(window.location.search).get("api") ?? "http://127.0.0.1:8900";
  const api = new ApiClient(baseUrl);
  const app = new ExplorerApp(el("stage"), api);

  const fileInput = el<HTMLInputElement>("csv-file");
  fileInput.addEventListener("change", async () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    await app.uploadCsv(await file.text());
  });

  const kindSelect = el<HTMLSelectElement>("matrix-kind");
  const excludedInput = el<HTMLInputElement>("excluded-targets");
  el<HTMLButtonElement>("compute").addEventListener("click", () => {
    const excluded = excludedInput.value
      .split(",")
      .map((s) => s.trim())
      .filter(Boolean);
    void app.compute({
      kind: kindSelect.value,
      ...(excluded.length > 0 ? { excluded_targets: excluded } : {}),
    });
  });
  return app;
}

if (typeof document !== "undefined" && document.getElementById("stage")) {
  boot();
}

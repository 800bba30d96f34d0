// Transform history formatted as the CLI's transform op string, so an
// interactive session is copyable into a reproducible command line.

export interface TransformSpec {
  kind: "drop" | "lag" | "log" | "subtract_mean" | "subtract_group_mean";
  column: string;
  k?: number;
  floor?: number;
  group_by?: string[];
}

export function specToOpString(spec: TransformSpec): string {
  switch (spec.kind) {
    case "lag":
      return `lag:${spec.column}:${spec.k}`;
    case "log":
      return spec.floor !== undefined
        ? `log:${spec.column}:${spec.floor}`
        : `log:${spec.column}`;
    case "subtract_group_mean":
      return `subtract_group_mean:${spec.column}:${(spec.group_by ?? []).join(",")}`;
    default:
      return `${spec.kind}:${spec.column}`;
  }
}

export function historyToOpString(history: TransformSpec[]): string {
  return history.map(specToOpString).join(";");
}

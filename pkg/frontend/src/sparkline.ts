// Inline SVG sparklines for cell curves. The value range is mapped to the
// middle 90% of the box height (high values up), the same rule the server
// uses for its SVG export, so tiles and exported figures agree visually.

export function curvePoints(
  curve: [number, number][],
  width: number,
  height: number,
): string {
  const vs = curve.map(([, v]) => v);
  const vmin = Math.min(...vs);
  const vmax = Math.max(...vs);
  const span = vmax - vmin;
  return curve
    .map(([u, v]) => {
      const frac = span > 0 ? (v - vmin) / span : 0.5;
      const x = u * width;
      const y = height * (0.95 - 0.9 * frac);
      return `${x.toFixed(2)},${y.toFixed(2)}`;
    })
    .join(" ");
}

export function sparklineSvg(
  curve: [number, number][],
  width: number,
  height: number,
  color: string,
): string {
  const pts = curvePoints(curve, width, height);
  return (
    `<svg class="sparkline" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">` +
    `<polyline points="${pts}" fill="none" stroke="${color}" ` +
    `stroke-width="1.5" stroke-linejoin="round"/></svg>`
  );
}

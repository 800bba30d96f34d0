// Strength colors, mirroring the server's SVG rendering rules exactly:
// linear RGB ramp from white to dark red, white curves on dark tiles and
// grey curves on light ones.

const LOW = [255, 255, 255];
const HIGH = [139, 0, 0]; // #8B0000

function clamp01(s: number): number {
  return Math.min(Math.max(s, 0), 1);
}

export function strengthColor(strength: number): string {
  const s = clamp01(strength);
  const hex = (i: number) =>
    Math.round(LOW[i] + (HIGH[i] - LOW[i]) * s)
      .toString(16)
      .padStart(2, "0")
      .toUpperCase();
  return `#${hex(0)}${hex(1)}${hex(2)}`;
}

export function backgroundLuminance(strength: number): number {
  const s = clamp01(strength);
  const r = LOW[0] + (HIGH[0] - LOW[0]) * s;
  const g = LOW[1] + (HIGH[1] - LOW[1]) * s;
  const b = LOW[2] + (HIGH[2] - LOW[2]) * s;
  return (0.2126 * r + 0.7152 * g + 0.0722 * b) / 255;
}

export function curveColor(strength: number): string {
  return backgroundLuminance(strength) < 0.5 ? "#FFFFFF" : "#666666";
}

/**
 * Minimal deterministic SVG line charts: fixed geometry, fixed palette,
 * no timestamps or randomness, so identical inputs give identical bytes.
 */

export interface Series {
  label: string;
  x: number[];
  y: number[];
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

const WIDTH = 640;
const HEIGHT = 420;
const MARGIN = { top: 42, right: 24, bottom: 48, left: 76 };

const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo === hi) {
    const pad = lo === 0 ? 1 : Math.abs(lo) * 0.05;
    return [lo - pad, hi + pad];
  }
  return [lo, hi];
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e5 || a < 1e-3) return v.toExponential(2);
  return String(Number(v.toPrecision(5)));
}

function ticks(lo: number, hi: number, n = 5): number[] {
  const out: number[] = [];
  for (let i = 0; i < n; i++) out.push(lo + ((hi - lo) * i) / (n - 1));
  return out;
}

export function renderChart(spec: ChartSpec): string {
  if (spec.series.length === 0) {
    throw new Error(`chart "${spec.title}" has no series`);
  }
  const xs = spec.series.flatMap((s) => s.x);
  const ys = spec.series.flatMap((s) => s.y);
  if (xs.length === 0) {
    throw new Error(`chart "${spec.title}" has no points`);
  }
  const [x0, x1] = extent(xs);
  const [y0, y1] = extent(ys);
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const px = (x: number) => MARGIN.left + ((x - x0) / (x1 - x0)) * plotW;
  const py = (y: number) => MARGIN.top + plotH - ((y - y0) / (y1 - y0)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica,Arial,sans-serif">`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(`<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="15">` +
    `${spec.title}</text>`);

  // Axes and grid.
  for (const t of ticks(x0, x1)) {
    const x = px(t).toFixed(2);
    parts.push(`<line x1="${x}" y1="${MARGIN.top}" x2="${x}" ` +
      `y2="${MARGIN.top + plotH}" stroke="#dddddd" stroke-width="1"/>`);
    parts.push(`<text x="${x}" y="${MARGIN.top + plotH + 18}" ` +
      `text-anchor="middle" font-size="11">${fmt(t)}</text>`);
  }
  for (const t of ticks(y0, y1)) {
    const y = py(t).toFixed(2);
    parts.push(`<line x1="${MARGIN.left}" y1="${y}" ` +
      `x2="${MARGIN.left + plotW}" y2="${y}" stroke="#dddddd" stroke-width="1"/>`);
    parts.push(`<text x="${MARGIN.left - 8}" y="${y}" text-anchor="end" ` +
      `dominant-baseline="middle" font-size="11">${fmt(t)}</text>`);
  }
  parts.push(`<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" ` +
    `height="${plotH}" fill="none" stroke="#333333"/>`);
  parts.push(`<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 10}" ` +
    `text-anchor="middle" font-size="13">${spec.xLabel}</text>`);
  parts.push(`<text x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
    `font-size="13" transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">` +
    `${spec.yLabel}</text>`);

  // Series.
  spec.series.forEach((s, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    const pts = s.x
      .map((x, i) => `${px(x).toFixed(2)},${py(s.y[i]).toFixed(2)}`)
      .join(" ");
    parts.push(`<polyline points="${pts}" fill="none" stroke="${color}" ` +
      `stroke-width="2"/>`);
    for (let i = 0; i < s.x.length; i++) {
      parts.push(`<circle cx="${px(s.x[i]).toFixed(2)}" ` +
        `cy="${py(s.y[i]).toFixed(2)}" r="3" fill="${color}"/>`);
    }
    const ly = MARGIN.top + 14 + idx * 16;
    parts.push(`<line x1="${MARGIN.left + plotW - 120}" y1="${ly - 4}" ` +
      `x2="${MARGIN.left + plotW - 98}" y2="${ly - 4}" stroke="${color}" ` +
      `stroke-width="2"/>`);
    parts.push(`<text x="${MARGIN.left + plotW - 92}" y="${ly}" ` +
      `font-size="12">${s.label}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

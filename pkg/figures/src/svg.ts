// Hand-rolled SVG chart primitives: linear scales, line series with
// optional confidence bands, vertical reference lines, small multiples.

export interface Series {
  label: string;
  points: Array<[number, number]>;
  // optional confidence band: [x, low, high]
  band?: Array<[number, number, number]>;
}

export interface RefLine {
  x: number;
  label: string;
  dash: string; // SVG stroke-dasharray
  color: string;
}

export interface PanelSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  refLines?: RefLine[];
  diagonal?: boolean; // draw y = x reference
  xDomain?: [number, number];
  yDomain?: [number, number];
}

export const PALETTE = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
  "#8c564b", "#e377c2", "#7f7f7f",
];

const PANEL_W = 560;
const PANEL_H = 400;
const MARGIN = { top: 40, right: 24, bottom: 48, left: 60 };

type Scale = (v: number) => number;

function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

function ticks(domain: [number, number], count = 5): number[] {
  const [lo, hi] = domain;
  const out: number[] = [];
  for (let i = 0; i <= count; i++) out.push(lo + ((hi - lo) * i) / count);
  return out;
}

function fmt(v: number): string {
  const a = Math.abs(v);
  if (a !== 0 && (a < 0.01 || a >= 10000)) return v.toExponential(1);
  return Number(v.toFixed(2)).toString();
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!isFinite(lo)) return [0, 1];
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  return [lo, hi];
}

function pathFrom(points: Array<[number, number]>, x: Scale, y: Scale): string {
  return points
    .map(([px, py], i) => `${i === 0 ? "M" : "L"}${x(px).toFixed(2)},${y(py).toFixed(2)}`)
    .join(" ");
}

export function renderPanel(spec: PanelSpec, ox = 0, oy = 0): string {
  const innerW = PANEL_W - MARGIN.left - MARGIN.right;
  const innerH = PANEL_H - MARGIN.top - MARGIN.bottom;
  const allX = spec.series.flatMap((s) => s.points.map((p) => p[0]));
  const allY = spec.series.flatMap((s) =>
    s.points.map((p) => p[1]).concat((s.band ?? []).flatMap((b) => [b[1], b[2]]))
  );
  const xDom = spec.xDomain ?? extent(allX);
  const yDom = spec.yDomain ?? extent(allY);
  const x = linearScale(xDom, [0, innerW]);
  const y = linearScale(yDom, [innerH, 0]);

  const parts: string[] = [];
  parts.push(`<g transform="translate(${ox + MARGIN.left},${oy + MARGIN.top})">`);
  parts.push(
    `<text x="${innerW / 2}" y="-16" text-anchor="middle" font-size="14" font-weight="bold">${esc(spec.title)}</text>`
  );
  // axes + gridlines + tick labels
  for (const t of ticks(xDom)) {
    const tx = x(t).toFixed(2);
    parts.push(`<line x1="${tx}" y1="0" x2="${tx}" y2="${innerH}" stroke="#eee"/>`);
    parts.push(
      `<text x="${tx}" y="${innerH + 18}" text-anchor="middle" font-size="11">${fmt(t)}</text>`
    );
  }
  for (const t of ticks(yDom)) {
    const ty = y(t).toFixed(2);
    parts.push(`<line x1="0" y1="${ty}" x2="${innerW}" y2="${ty}" stroke="#eee"/>`);
    parts.push(
      `<text x="-8" y="${ty}" text-anchor="end" dominant-baseline="middle" font-size="11">${fmt(t)}</text>`
    );
  }
  parts.push(`<rect x="0" y="0" width="${innerW}" height="${innerH}" fill="none" stroke="#333"/>`);
  parts.push(
    `<text x="${innerW / 2}" y="${innerH + 38}" text-anchor="middle" font-size="12">${esc(spec.xLabel)}</text>`
  );
  parts.push(
    `<text transform="translate(${-44},${innerH / 2}) rotate(-90)" text-anchor="middle" font-size="12">${esc(spec.yLabel)}</text>`
  );

  if (spec.diagonal) {
    const lo = Math.max(xDom[0], yDom[0]);
    const hi = Math.min(xDom[1], yDom[1]);
    parts.push(
      `<line x1="${x(lo).toFixed(2)}" y1="${y(lo).toFixed(2)}" x2="${x(hi).toFixed(2)}" y2="${y(hi).toFixed(2)}" stroke="#999" stroke-dasharray="2,3"/>`
    );
  }

  spec.series.forEach((series, i) => {
    const color = PALETTE[i % PALETTE.length];
    if (series.band) {
      const upper = series.band.map(([bx, , hiV]) => [bx, hiV] as [number, number]);
      const lower = series.band
        .map(([bx, loV]) => [bx, loV] as [number, number])
        .reverse();
      parts.push(
        `<path d="${pathFrom(upper.concat(lower), x, y)} Z" fill="${color}" fill-opacity="0.15" stroke="none"/>`
      );
    }
    parts.push(
      `<path d="${pathFrom(series.points, x, y)}" fill="none" stroke="${color}" stroke-width="1.8"/>`
    );
  });

  (spec.refLines ?? []).forEach((ref) => {
    const rx = x(ref.x).toFixed(2);
    parts.push(
      `<line x1="${rx}" y1="0" x2="${rx}" y2="${innerH}" stroke="${ref.color}" stroke-dasharray="${ref.dash}" stroke-width="1.5"/>`
    );
  });

  // legend
  const legendEntries = spec.series
    .map((s, i) => ({ label: s.label, color: PALETTE[i % PALETTE.length], dash: "" }))
    .concat((spec.refLines ?? []).map((r) => ({ label: r.label, color: r.color, dash: r.dash })));
  legendEntries.forEach((entry, i) => {
    const ly = 12 + i * 16;
    parts.push(
      `<line x1="${innerW - 130}" y1="${ly}" x2="${innerW - 106}" y2="${ly}" stroke="${entry.color}" stroke-width="2"${entry.dash ? ` stroke-dasharray="${entry.dash}"` : ""}/>`
    );
    parts.push(
      `<text x="${innerW - 100}" y="${ly + 4}" font-size="11">${esc(entry.label)}</text>`
    );
  });

  parts.push("</g>");
  return parts.join("\n");
}

export function renderSvg(panels: PanelSpec[], inputHash: string, columns = 2): string {
  const cols = Math.min(columns, panels.length);
  const rows = Math.ceil(panels.length / cols);
  const width = cols * PANEL_W;
  const height = rows * PANEL_H;
  const body = panels
    .map((panel, i) =>
      renderPanel(panel, (i % cols) * PANEL_W, Math.floor(i / cols) * PANEL_H)
    )
    .join("\n");
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="sans-serif">`,
    `<metadata id="provenance">input-csv-sha256:${inputHash}</metadata>`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    body,
    "</svg>",
  ].join("\n");
}

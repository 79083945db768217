/**
 * Minimal deterministic SVG chart builder.
 *
 * Produces byte-stable output: no timestamps, no randomness, fixed
 * palette, and fixed number formatting. Everything is laid out with
 * plain arithmetic so the same chart always serializes identically.
 */

export interface Point {
  x: number;
  y: number;
}

export type MarkerShape = "circle" | "square" | "none";

export interface Series {
  label: string;
  points: Point[];
  color: string;
  line: boolean;
  marker: MarkerShape;
  /** Optional half-lengths of vertical error whiskers, one per point. */
  errors?: number[];
}

export interface Chart {
  title?: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  width?: number;
  height?: number;
}

/** Color-blind-friendly cycle (Okabe-Ito, minus black). */
export const PALETTE: readonly string[] = [
  "#0072b2",
  "#d55e00",
  "#009e73",
  "#cc79a7",
  "#e69f00",
  "#56b4e9",
  "#f0e442",
];

const FONT = "ui-sans-serif, system-ui, sans-serif";

/** Format an axis value with up to six significant digits, no trailing zeros. */
export function formatNumber(value: number): string {
  if (value === 0) {
    return "0";
  }
  if (!Number.isFinite(value)) {
    return String(value);
  }
  const magnitude = Math.abs(value);
  if (magnitude >= 1e6 || magnitude < 1e-4) {
    return value.toExponential(3).replace(/\.?0+e/, "e");
  }
  let text = value.toPrecision(6);
  if (text.includes(".")) {
    text = text.replace(/\.?0+$/, "");
  }
  return text;
}

/** Round coordinates to 2 decimal places so output stays compact and stable. */
function coord(value: number): string {
  const rounded = Math.round(value * 100) / 100;
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/**
 * Pick tick positions covering [lo, hi] at a "nice" step (1/2/5 times a
 * power of ten), aiming for roughly `target` intervals.
 */
export function niceTicks(lo: number, hi: number, target = 5): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const rawStep = (hi - lo) / target;
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = power;
  for (const mult of [1, 2, 5, 10]) {
    step = mult * power;
    if (step >= rawStep) {
      break;
    }
  }
  // walk integer multiples of the step and round away float noise
  // (0.2 is not exactly representable, so 3 * 0.2 would drift otherwise)
  const firstIndex = Math.ceil(lo / step - 1e-9);
  const lastIndex = Math.floor(hi / step + 1e-9);
  const decimals = Math.min(20, Math.max(0, 2 - Math.floor(Math.log10(step))));
  const ticks: number[] = [];
  for (let i = firstIndex; i <= lastIndex; i += 1) {
    ticks.push(Number((i * step).toFixed(decimals)));
  }
  return ticks;
}

interface Extent {
  lo: number;
  hi: number;
}

function padExtent(lo: number, hi: number): Extent {
  if (lo === hi) {
    const pad = lo === 0 ? 1 : Math.abs(lo) * 0.1;
    return { lo: lo - pad, hi: hi + pad };
  }
  const pad = (hi - lo) * 0.05;
  return { lo: lo - pad, hi: hi + pad };
}

function dataExtents(series: Series[]): { x: Extent; y: Extent } {
  let xLo = Infinity;
  let xHi = -Infinity;
  let yLo = Infinity;
  let yHi = -Infinity;
  for (const s of series) {
    s.points.forEach((p, i) => {
      if (!Number.isFinite(p.x) || !Number.isFinite(p.y)) {
        throw new Error(`series "${s.label}": non-finite point (${p.x}, ${p.y})`);
      }
      const err = s.errors ? s.errors[i] : 0;
      xLo = Math.min(xLo, p.x);
      xHi = Math.max(xHi, p.x);
      yLo = Math.min(yLo, p.y - err);
      yHi = Math.max(yHi, p.y + err);
    });
  }
  if (!Number.isFinite(xLo) || !Number.isFinite(yLo)) {
    throw new Error("chart has no points");
  }
  return { x: padExtent(xLo, xHi), y: padExtent(yLo, yHi) };
}

function linearScale(domain: Extent, rangeLo: number, rangeHi: number): (v: number) => number {
  const span = domain.hi - domain.lo;
  return (v: number) => rangeLo + ((v - domain.lo) / span) * (rangeHi - rangeLo);
}

function markerElement(shape: MarkerShape, cx: number, cy: number, color: string): string {
  const r = 3.5;
  if (shape === "circle") {
    return `<circle cx="${coord(cx)}" cy="${coord(cy)}" r="${r}" fill="${color}"/>`;
  }
  if (shape === "square") {
    const x = cx - r;
    const y = cy - r;
    return `<rect x="${coord(x)}" y="${coord(y)}" width="${2 * r}" height="${2 * r}" fill="${color}"/>`;
  }
  return "";
}

/** Serialize a chart to a complete standalone SVG document. */
export function renderChart(chart: Chart): string {
  if (chart.series.length === 0) {
    throw new Error("chart has no series");
  }
  const width = chart.width ?? 720;
  const height = chart.height ?? 480;
  const margin = {
    top: chart.title ? 44 : 20,
    right: 20,
    bottom: 52,
    left: 68,
  };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;

  const { x: xExt, y: yExt } = dataExtents(chart.series);
  const sx = linearScale(xExt, margin.left, margin.left + plotW);
  const sy = linearScale(yExt, margin.top + plotH, margin.top);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="#ffffff"/>`);

  // grid and axis ticks
  const xTicks = niceTicks(xExt.lo, xExt.hi, 6);
  const yTicks = niceTicks(yExt.lo, yExt.hi, 6);
  for (const t of xTicks) {
    const px = sx(t);
    parts.push(
      `<line x1="${coord(px)}" y1="${coord(margin.top)}" x2="${coord(px)}" y2="${coord(margin.top + plotH)}" stroke="#e0e0e0" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${coord(px)}" y="${coord(margin.top + plotH + 18)}" font-family="${FONT}" font-size="12" fill="#333333" text-anchor="middle">${escapeXml(formatNumber(t))}</text>`,
    );
  }
  for (const t of yTicks) {
    const py = sy(t);
    parts.push(
      `<line x1="${coord(margin.left)}" y1="${coord(py)}" x2="${coord(margin.left + plotW)}" y2="${coord(py)}" stroke="#e0e0e0" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${coord(margin.left - 8)}" y="${coord(py + 4)}" font-family="${FONT}" font-size="12" fill="#333333" text-anchor="end">${escapeXml(formatNumber(t))}</text>`,
    );
  }

  // plot frame
  parts.push(
    `<rect x="${coord(margin.left)}" y="${coord(margin.top)}" width="${coord(plotW)}" height="${coord(plotH)}" fill="none" stroke="#333333" stroke-width="1"/>`,
  );

  // series content
  for (const s of chart.series) {
    const ordered = s.points;
    if (s.errors && s.errors.length !== ordered.length) {
      throw new Error(`series "${s.label}": ${s.errors.length} error bars for ${ordered.length} points`);
    }
    if (s.errors) {
      ordered.forEach((p, i) => {
        const err = s.errors![i];
        if (err <= 0) {
          return;
        }
        const px = sx(p.x);
        const top = sy(p.y + err);
        const bot = sy(p.y - err);
        parts.push(
          `<line x1="${coord(px)}" y1="${coord(top)}" x2="${coord(px)}" y2="${coord(bot)}" stroke="${s.color}" stroke-width="1.5" class="errorbar"/>`,
        );
        for (const capY of [top, bot]) {
          parts.push(
            `<line x1="${coord(px - 4)}" y1="${coord(capY)}" x2="${coord(px + 4)}" y2="${coord(capY)}" stroke="${s.color}" stroke-width="1.5"/>`,
          );
        }
      });
    }
    if (s.line && ordered.length > 1) {
      const path = ordered.map((p) => `${coord(sx(p.x))},${coord(sy(p.y))}`).join(" ");
      parts.push(
        `<polyline points="${path}" fill="none" stroke="${s.color}" stroke-width="2" class="series-line"/>`,
      );
    }
    if (s.marker !== "none") {
      for (const p of ordered) {
        parts.push(markerElement(s.marker, sx(p.x), sy(p.y), s.color));
      }
    }
  }

  // legend: swatches stacked in the top-right corner of the plot area
  const legendX = margin.left + plotW - 8;
  let legendY = margin.top + 16;
  for (const s of chart.series) {
    const swatchX = legendX - 150;
    if (s.line) {
      parts.push(
        `<line x1="${coord(swatchX)}" y1="${coord(legendY - 4)}" x2="${coord(swatchX + 22)}" y2="${coord(legendY - 4)}" stroke="${s.color}" stroke-width="2"/>`,
      );
    }
    if (s.marker !== "none") {
      parts.push(markerElement(s.marker, swatchX + 11, legendY - 4, s.color));
    }
    parts.push(
      `<text x="${coord(swatchX + 28)}" y="${coord(legendY)}" font-family="${FONT}" font-size="12" fill="#333333" class="legend-label">${escapeXml(s.label)}</text>`,
    );
    legendY += 18;
  }

  // axis labels and title
  parts.push(
    `<text x="${coord(margin.left + plotW / 2)}" y="${coord(height - 12)}" font-family="${FONT}" font-size="14" fill="#111111" text-anchor="middle">${escapeXml(chart.xLabel)}</text>`,
  );
  parts.push(
    `<text x="18" y="${coord(margin.top + plotH / 2)}" font-family="${FONT}" font-size="14" fill="#111111" text-anchor="middle" transform="rotate(-90 18 ${coord(margin.top + plotH / 2)})">${escapeXml(chart.yLabel)}</text>`,
  );
  if (chart.title) {
    parts.push(
      `<text x="${coord(width / 2)}" y="28" font-family="${FONT}" font-size="16" fill="#111111" text-anchor="middle" font-weight="bold">${escapeXml(chart.title)}</text>`,
    );
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

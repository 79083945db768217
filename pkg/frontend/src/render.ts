/**
 * Turns one run table into one figure.
 *
 * The renderer does no numerical work of its own: it groups rows by the
 * requested keys, picks the columns each figure kind displays, and hands
 * the values to the SVG builder unchanged. The output file is written
 * only after the whole document has been built, so a bad table never
 * leaves a partial or empty image behind.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { DEFAULT_GROUP_BY, FigureKind, FigureSpec } from "./figure.js";
import { COLUMNS, ColumnName, RunRow, TableError, parseTable } from "./schema.js";
import { Chart, PALETTE, Point, Series, renderChart } from "./svg.js";

interface Group {
  label: string;
  rows: RunRow[];
}

/** Group rows by the given column values, preserving first-appearance order. */
export function groupRows(rows: RunRow[], keys: string[]): Group[] {
  if (keys.length === 0) {
    throw new TableError("at least one grouping key is required");
  }
  for (const key of keys) {
    if (!(COLUMNS as readonly string[]).includes(key)) {
      throw new TableError(`unknown grouping key: ${key}`);
    }
  }
  const byLabel = new Map<string, Group>();
  for (const row of rows) {
    const label = keys.map((k) => String(row[k as ColumnName])).join(", ");
    let group = byLabel.get(label);
    if (group === undefined) {
      group = { label, rows: [] };
      byLabel.set(label, group);
    }
    group.rows.push(row);
  }
  return [...byLabel.values()];
}

function sortedBy(rows: RunRow[], column: "p_dbm" | "ao_iterations"): RunRow[] {
  return [...rows].sort((a, b) => a[column] - b[column]);
}

/**
 * Keep only rows this axis can place. Zero-power scenarios carry
 * p_dbm = -inf, which has no position on a linear power axis.
 */
function finiteOn(rows: RunRow[], column: "p_dbm" | "ao_iterations"): RunRow[] {
  return rows.filter((row) => Number.isFinite(row[column]));
}

function requireRows(group: Group, rows: RunRow[], axis: string): RunRow[] {
  if (rows.length === 0) {
    throw new TableError(`group "${group.label}" has no rows with a finite ${axis}`);
  }
  return rows;
}

function sweepSeries(groups: Group[]): Series[] {
  return groups.map((group, i) => {
    const rows = requireRows(group, sortedBy(finiteOn(group.rows, "p_dbm"), "p_dbm"), "p_dbm");
    return {
      label: group.label,
      points: rows.map((r): Point => ({ x: r.p_dbm, y: r.mc_rate_bits })),
      errors: rows.map((r) => r.mc_stderr_bits),
      color: PALETTE[i % PALETTE.length],
      line: true,
      marker: "circle" as const,
    };
  });
}

function accuracySeries(groups: Group[]): Series[] {
  const series: Series[] = [];
  groups.forEach((group, i) => {
    const rows = requireRows(group, sortedBy(finiteOn(group.rows, "p_dbm"), "p_dbm"), "p_dbm");
    const color = PALETTE[i % PALETTE.length];
    // approximation and sampled estimate come from the same rows, so the
    // two series share their x grid by construction
    series.push({
      label: `${group.label} (approx)`,
      points: rows.map((r): Point => ({ x: r.p_dbm, y: r.de_rate_bits })),
      color,
      line: true,
      marker: "none",
    });
    series.push({
      label: `${group.label} (sampled)`,
      points: rows.map((r): Point => ({ x: r.p_dbm, y: r.mc_rate_bits })),
      errors: rows.map((r) => r.mc_stderr_bits),
      color,
      line: false,
      marker: "circle",
    });
  });
  return series;
}

function convergenceSeries(groups: Group[]): Series[] {
  return groups.map((group, i) => {
    const rows = sortedBy(group.rows, "ao_iterations");
    return {
      label: group.label,
      points: rows.map((r): Point => ({ x: r.ao_iterations, y: r.de_rate_bits })),
      color: PALETTE[i % PALETTE.length],
      line: true,
      marker: "square" as const,
    };
  });
}

const AXIS_DEFAULTS: Record<FigureKind, { x: string; y: string }> = {
  sweep: { x: "transmit power (dBm)", y: "sum rate (bits/use)" },
  accuracy: { x: "transmit power (dBm)", y: "sum rate (bits/use)" },
  convergence: { x: "iteration", y: "approximate sum rate (bits/use)" },
};

/** Build the chart for a spec from already-parsed rows. Pure; no I/O. */
export function buildChart(rows: RunRow[], spec: FigureSpec): Chart {
  const keys = spec.groupBy.length > 0 ? spec.groupBy : DEFAULT_GROUP_BY;
  const groups = groupRows(rows, keys);
  let series: Series[];
  switch (spec.kind) {
    case "sweep":
      series = sweepSeries(groups);
      break;
    case "accuracy":
      series = accuracySeries(groups);
      break;
    case "convergence":
      series = convergenceSeries(groups);
      break;
    default:
      throw new TableError(`unknown figure kind: ${String(spec.kind)}`);
  }
  return {
    title: spec.title,
    xLabel: spec.xLabel ?? AXIS_DEFAULTS[spec.kind].x,
    yLabel: spec.yLabel ?? AXIS_DEFAULTS[spec.kind].y,
    series,
  };
}

/** Read the input table, build the figure, and write the output image. */
export function render(spec: FigureSpec): void {
  const text = readFileSync(spec.input, "utf8");
  const rows = parseTable(text);
  const svg = renderChart(buildChart(rows, spec));
  writeFileSync(spec.output, svg, "utf8");
}

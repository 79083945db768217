import { existsSync, mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { FigureSpec } from "../src/figure.js";
import { buildChart, groupRows, render } from "../src/render.js";
import { RunRow, TableError, parseTable } from "../src/schema.js";
import { formatNumber, niceTicks, renderChart } from "../src/svg.js";

const FIXTURES = fileURLToPath(new URL("./fixtures/", import.meta.url));

function loadRows(name: string): RunRow[] {
  return parseTable(readFileSync(FIXTURES + name, "utf8"));
}

function spec(kind: FigureSpec["kind"], input: string, output = "unused.svg"): FigureSpec {
  return { input, kind, output, groupBy: ["scheme", "decoding"] };
}

function tempDir(): string {
  return mkdtempSync(join(tmpdir(), "figures-"));
}

describe("groupRows", () => {
  it("groups the sweep table into four scheme/decoding series", () => {
    const groups = groupRows(loadRows("sweep.csv"), ["scheme", "decoding"]);
    expect(groups.map((g) => g.label)).toEqual([
      "proposed, joint",
      "proposed, independent",
      "baseline, joint",
      "baseline, independent",
    ]);
    for (const g of groups) {
      expect(g.rows).toHaveLength(5);
    }
  });

  it("rejects grouping keys that are not table columns", () => {
    expect(() => groupRows(loadRows("sweep.csv"), ["flavor"])).toThrow(TableError);
    expect(() => groupRows(loadRows("sweep.csv"), [])).toThrow(/grouping key/);
  });
});

describe("buildChart", () => {
  it("sweep: one line-with-markers series per group, sorted by power", () => {
    const chart = buildChart(loadRows("sweep.csv"), spec("sweep", "sweep.csv"));
    expect(chart.series).toHaveLength(4);
    for (const s of chart.series) {
      expect(s.line).toBe(true);
      expect(s.marker).toBe("circle");
      expect(s.points.map((p) => p.x)).toEqual([0, 5, 10, 15, 20]);
      expect(s.errors).toHaveLength(5);
      expect(s.errors!.every((e) => e > 0)).toBe(true);
    }
    expect(chart.xLabel).toBe("transmit power (dBm)");
  });

  it("accuracy: approximation line and sampled markers share the x grid", () => {
    const chart = buildChart(loadRows("sweep.csv"), spec("accuracy", "sweep.csv"));
    expect(chart.series).toHaveLength(8);
    for (let i = 0; i < chart.series.length; i += 2) {
      const approx = chart.series[i];
      const sampled = chart.series[i + 1];
      expect(approx.label.endsWith("(approx)")).toBe(true);
      expect(sampled.label.endsWith("(sampled)")).toBe(true);
      expect(approx.line).toBe(true);
      expect(approx.marker).toBe("none");
      expect(sampled.line).toBe(false);
      expect(sampled.marker).toBe("circle");
      expect(sampled.errors).toBeDefined();
      expect(approx.color).toBe(sampled.color);
      expect(approx.points.map((p) => p.x)).toEqual(sampled.points.map((p) => p.x));
    }
  });

  it("accuracy: approximation tracks the sampled estimate on the fixture", () => {
    // smoke check against gross mix-ups (wrong column, nats vs bits);
    // the fixture is an 8-antenna system where the approximation is a few
    // percent off at high power, so the bar is loose — the producer's own
    // suite validates accuracy tightly at its operating scale
    const chart = buildChart(loadRows("sweep.csv"), spec("accuracy", "sweep.csv"));
    for (let i = 0; i < chart.series.length; i += 2) {
      const approx = chart.series[i];
      const sampled = chart.series[i + 1];
      approx.points.forEach((p, j) => {
        const tol = Math.max(4 * sampled.errors![j], 0.08 * sampled.points[j].y);
        expect(Math.abs(p.y - sampled.points[j].y)).toBeLessThan(tol);
      });
    }
  });

  it("convergence: one series per decoding trace over iterations", () => {
    const chart = buildChart(loadRows("trace_both.csv"), spec("convergence", "trace_both.csv"));
    expect(chart.series).toHaveLength(2);
    expect(chart.series.map((s) => s.label)).toEqual([
      "proposed, joint",
      "proposed, independent",
    ]);
    for (const s of chart.series) {
      expect(s.points.map((p) => p.x)).toEqual([0, 1, 2, 3]);
      // the optimizer never lets the objective fall between iterations
      for (let j = 1; j < s.points.length; j += 1) {
        expect(s.points[j].y).toBeGreaterThanOrEqual(s.points[j - 1].y - 1e-9);
      }
    }
    expect(chart.xLabel).toBe("iteration");
  });

  it("single-trace convergence has one series", () => {
    const chart = buildChart(loadRows("trace_joint.csv"), spec("convergence", "trace_joint.csv"));
    expect(chart.series).toHaveLength(1);
    expect(chart.series[0].marker).toBe("square");
  });

  it("drops zero-power rows that have no position on the power axis", () => {
    const rows = loadRows("sweep.csv").filter((r) => r.scheme === "proposed");
    const zeroPower: RunRow = { ...rows[0], p_dbm: -Infinity, mc_rate_bits: 0 };
    const chart = buildChart([...rows, zeroPower], spec("sweep", "x"));
    const joint = chart.series.find((s) => s.label === "proposed, joint")!;
    expect(joint.points.map((p) => p.x)).toEqual([0, 5, 10, 15, 20]);
  });

  it("errors when a group has only zero-power rows", () => {
    const row: RunRow = { ...loadRows("sweep.csv")[0], p_dbm: -Infinity };
    expect(() => buildChart([row], spec("sweep", "x"))).toThrow(/finite p_dbm/);
  });

  it("honors custom labels, title, and grouping", () => {
    const chart = buildChart(loadRows("sweep.csv"), {
      input: "x",
      kind: "sweep",
      output: "y",
      xLabel: "P (dBm)",
      yLabel: "R (bits)",
      title: "uplink sum rate",
      groupBy: ["decoding"],
    });
    expect(chart.series).toHaveLength(2);
    expect(chart.series.map((s) => s.label)).toEqual(["joint", "independent"]);
    expect(chart.xLabel).toBe("P (dBm)");
    expect(chart.yLabel).toBe("R (bits)");
    expect(chart.title).toBe("uplink sum rate");
  });
});

describe("renderChart", () => {
  it("emits a standalone SVG with legend, lines, and error bars", () => {
    const svg = renderChart(buildChart(loadRows("sweep.csv"), spec("sweep", "sweep.csv")));
    expect(svg.startsWith('<svg xmlns="http://www.w3.org/2000/svg"')).toBe(true);
    expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
    expect(svg.match(/class="legend-label"/g)).toHaveLength(4);
    expect(svg.match(/class="series-line"/g)).toHaveLength(4);
    expect(svg.match(/class="errorbar"/g)!.length).toBeGreaterThan(0);
    expect(svg).toContain("transmit power (dBm)");
  });

  it("rendered accuracy markers sit on the approximation line's x positions", () => {
    const svg = renderChart(buildChart(loadRows("sweep.csv"), spec("accuracy", "sweep.csv")));
    const lineXs = new Map<string, string[]>();
    for (const m of svg.matchAll(/<polyline points="([^"]+)" fill="none" stroke="(#[0-9a-f]{6})"/g)) {
      lineXs.set(m[2], m[1].split(" ").map((pair) => pair.split(",")[0]));
    }
    const markerXs = new Map<string, Set<string>>();
    for (const m of svg.matchAll(/<circle cx="([^"]+)" cy="[^"]+" r="3.5" fill="(#[0-9a-f]{6})"/g)) {
      if (!markerXs.has(m[2])) {
        markerXs.set(m[2], new Set());
      }
      markerXs.get(m[2])!.add(m[1]);
    }
    expect(lineXs.size).toBe(4);
    for (const [color, xs] of lineXs) {
      const markers = markerXs.get(color);
      expect(markers).toBeDefined();
      for (const x of xs) {
        expect(markers!.has(x)).toBe(true);
      }
    }
  });

  it("is deterministic: the same chart serializes identically", () => {
    const rows = loadRows("trace_both.csv");
    const a = renderChart(buildChart(rows, spec("convergence", "t")));
    const b = renderChart(buildChart(rows, spec("convergence", "t")));
    expect(a).toBe(b);
  });

  it("refuses a chart with no series", () => {
    expect(() => renderChart({ xLabel: "x", yLabel: "y", series: [] })).toThrow(/no series/);
  });
});

describe("render (file to file)", () => {
  it("writes the figure for every kind", () => {
    const dir = tempDir();
    const cases: Array<[FigureSpec["kind"], string]> = [
      ["sweep", "sweep.csv"],
      ["accuracy", "sweep.csv"],
      ["convergence", "trace_both.csv"],
    ];
    for (const [kind, table] of cases) {
      const out = join(dir, `${kind}.svg`);
      render({ input: FIXTURES + table, kind, output: out, groupBy: ["scheme", "decoding"] });
      const content = readFileSync(out, "utf8");
      expect(content).toContain("<svg");
      expect(content).toContain("legend-label");
    }
  });

  it("re-rendering produces byte-identical output", () => {
    const dir = tempDir();
    const a = join(dir, "a.svg");
    const b = join(dir, "b.svg");
    for (const out of [a, b]) {
      render({ input: FIXTURES + "sweep.csv", kind: "sweep", output: out, groupBy: ["scheme", "decoding"] });
    }
    expect(readFileSync(a, "utf8")).toBe(readFileSync(b, "utf8"));
  });

  it("an empty table raises and leaves no output file behind", () => {
    const dir = tempDir();
    const out = join(dir, "never.svg");
    expect(() =>
      render({ input: FIXTURES + "empty.csv", kind: "sweep", output: out, groupBy: ["scheme", "decoding"] }),
    ).toThrow(TableError);
    expect(existsSync(out)).toBe(false);
  });
});

describe("svg helpers", () => {
  it("formats axis numbers without trailing zeros", () => {
    expect(formatNumber(0)).toBe("0");
    expect(formatNumber(0.5)).toBe("0.5");
    expect(formatNumber(12.25)).toBe("12.25");
    expect(formatNumber(-3)).toBe("-3");
  });

  it("chooses round tick steps", () => {
    expect(niceTicks(0, 10, 5)).toEqual([0, 2, 4, 6, 8, 10]);
    expect(niceTicks(0, 1, 5)).toEqual([0, 0.2, 0.4, 0.6, 0.8, 1]);
    expect(niceTicks(3, 3)).toEqual([3]);
  });
});

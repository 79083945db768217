import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { COLUMNS, TableError, parseTable } from "../src/schema.js";

const FIXTURES = fileURLToPath(new URL("./fixtures/", import.meta.url));

function fixture(name: string): string {
  return readFileSync(FIXTURES + name, "utf8");
}

describe("parseTable", () => {
  it("parses a real sweep table", () => {
    const rows = parseTable(fixture("sweep.csv"));
    expect(rows).toHaveLength(20);
    const first = rows[0];
    expect(first.scenario_id).toBe("small_cfg");
    expect(first.decoding).toBe("joint");
    expect(first.scheme).toBe("proposed");
    expect(typeof first.p_dbm).toBe("number");
    expect(typeof first.de_rate_bits).toBe("number");
    expect(first.mc_stderr_bits).toBeGreaterThan(0);
    expect(Number.isInteger(first.ao_iterations)).toBe(true);
    // five power levels, power varying slowest
    const powers = [...new Set(rows.map((r) => r.p_dbm))];
    expect(powers).toEqual([0, 5, 10, 15, 20]);
  });

  it("parses a trace table with iteration indices", () => {
    const rows = parseTable(fixture("trace_joint.csv"));
    expect(rows.map((r) => r.ao_iterations)).toEqual([0, 1, 2, 3]);
    expect(rows.every((r) => r.scheme === "proposed")).toBe(true);
  });

  it("accepts -inf power values from zero-power scenarios", () => {
    const header = COLUMNS.join(",");
    const row = "s,joint,proposed,-inf,0,0,0,1,0,7";
    const rows = parseTable(`${header}\n${row}\n`);
    expect(rows[0].p_dbm).toBe(-Infinity);
  });

  it("rejects a table with no data rows", () => {
    expect(() => parseTable(fixture("empty.csv"))).toThrow(TableError);
    expect(() => parseTable(fixture("empty.csv"))).toThrow(/no data rows/);
  });

  it("rejects an entirely empty file", () => {
    expect(() => parseTable("")).toThrow(/no header/);
  });

  it("names the missing column", () => {
    const cols = COLUMNS.filter((c) => c !== "mc_rate_bits");
    const text = `${cols.join(",")}\n${cols.map(() => "1").join(",")}\n`;
    expect(() => parseTable(text)).toThrow(TableError);
    expect(() => parseTable(text)).toThrow(/missing columns: mc_rate_bits/);
  });

  it("rejects unexpected columns", () => {
    const text = `${COLUMNS.join(",")},extra\n`;
    expect(() => parseTable(text)).toThrow(/unexpected columns: extra/);
  });

  it("rejects shuffled column order", () => {
    const shuffled = [...COLUMNS].reverse().join(",");
    const text = `${shuffled}\n`;
    expect(() => parseTable(text)).toThrow(/column order/);
  });

  it("rejects rows with the wrong field count", () => {
    const text = `${COLUMNS.join(",")}\na,joint,proposed,1\n`;
    expect(() => parseTable(text)).toThrow(/row 1 has 4 fields/);
  });

  it("rejects non-numeric values in numeric columns", () => {
    const row = "s,joint,proposed,abc,0,0,0,1,0,7";
    const text = `${COLUMNS.join(",")}\n${row}\n`;
    expect(() => parseTable(text)).toThrow(/column p_dbm: not a number/);
  });
});

/**
 * Run-table schema shared with the optimizer's command-line tools.
 *
 * Every figure consumes the same 10-column CSV; columns are matched by the
 * exact header line so a table from a different producer fails loudly
 * instead of plotting garbage.
 */

export const COLUMNS = [
  "scenario_id",
  "decoding",
  "scheme",
  "p_dbm",
  "de_rate_bits",
  "mc_rate_bits",
  "mc_stderr_bits",
  "ao_iterations",
  "wall_time_s",
  "seed",
] as const;

export type ColumnName = (typeof COLUMNS)[number];

export interface RunRow {
  scenario_id: string;
  decoding: string;
  scheme: string;
  p_dbm: number;
  de_rate_bits: number;
  mc_rate_bits: number;
  mc_stderr_bits: number;
  ao_iterations: number;
  wall_time_s: number;
  seed: number;
}

const NUMERIC: ReadonlySet<ColumnName> = new Set([
  "p_dbm",
  "de_rate_bits",
  "mc_rate_bits",
  "mc_stderr_bits",
  "ao_iterations",
  "wall_time_s",
  "seed",
]);

export class TableError extends Error {}

// the producer formats zero-power scenarios as "-inf", which Number() rejects
function parseNumber(field: string, column: ColumnName, rowIndex: number): number {
  if (field === "inf") return Infinity;
  if (field === "-inf") return -Infinity;
  const value = Number(field);
  if (field.trim() === "" || Number.isNaN(value)) {
    throw new TableError(`row ${rowIndex}, column ${column}: not a number: ${field}`);
  }
  return value;
}

export function parseTable(text: string): RunRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new TableError("table is empty: no header line");
  }
  const header = lines[0].split(",");
  const missing = COLUMNS.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new TableError(`missing columns: ${missing.join(", ")}`);
  }
  const extra = header.filter((c) => !(COLUMNS as readonly string[]).includes(c));
  if (extra.length > 0) {
    throw new TableError(`unexpected columns: ${extra.join(", ")}`);
  }
  if (header.join(",") !== COLUMNS.join(",")) {
    throw new TableError("column order does not match the run-table schema");
  }
  if (lines.length === 1) {
    throw new TableError("table has no data rows");
  }
  return lines.slice(1).map((line, i) => {
    const parts = line.split(",");
    if (parts.length !== COLUMNS.length) {
      throw new TableError(`row ${i + 1} has ${parts.length} fields, expected ${COLUMNS.length}`);
    }
    const row: Record<string, string | number> = {};
    COLUMNS.forEach((name, j) => {
      if (NUMERIC.has(name)) {
        row[name] = parseNumber(parts[j], name, i + 1);
      } else {
        row[name] = parts[j];
      }
    });
    return row as unknown as RunRow;
  });
}

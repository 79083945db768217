/**
 * Command-line entry point.
 *
 * Exit codes follow the optimizer suite's convention:
 *   0  figure written
 *   1  the table failed validation (missing columns, empty, bad values)
 *   2  usage or I/O problem (bad flags, unreadable input, unwritable output)
 */

import { readFileSync, realpathSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { DEFAULT_GROUP_BY, FIGURE_KINDS, FigureSpec, isFigureKind } from "./figure.js";
import { buildChart } from "./render.js";
import { TableError, parseTable } from "./schema.js";
import { renderChart } from "./svg.js";

const USAGE = `usage: render --kind <${FIGURE_KINDS.join("|")}> --in <table.csv> --out <figure.svg>
              [--x-label TEXT] [--y-label TEXT] [--title TEXT] [--group-by COL,COL]

Renders one figure from a run table produced by the optimizer's
command-line tools. Rows are grouped into series by --group-by
(default: ${DEFAULT_GROUP_BY.join(",")}); group values become the legend.`;

function fail(message: string): void {
  process.stderr.write(`error: ${message}\n`);
}

/** Parse argv (excluding node and script) and render; returns the exit code. */
export function run(args: string[]): number {
  let values: Record<string, string | boolean | undefined>;
  let positionals: string[];
  try {
    ({ values, positionals } = parseArgs({
      args,
      options: {
        kind: { type: "string" },
        in: { type: "string" },
        out: { type: "string" },
        "x-label": { type: "string" },
        "y-label": { type: "string" },
        title: { type: "string" },
        "group-by": { type: "string" },
        help: { type: "boolean", short: "h" },
      },
      allowPositionals: true,
    }));
  } catch (err) {
    fail(err instanceof Error ? err.message : String(err));
    process.stderr.write(USAGE + "\n");
    return 2;
  }

  if (values.help === true) {
    process.stdout.write(USAGE + "\n");
    return 0;
  }

  // accept the verb the docs use ("render ...") as an optional first token
  const extras = positionals[0] === "render" ? positionals.slice(1) : positionals;
  if (extras.length > 0) {
    fail(`unexpected argument: ${extras[0]}`);
    process.stderr.write(USAGE + "\n");
    return 2;
  }

  const kind = values.kind as string | undefined;
  const input = values.in as string | undefined;
  const output = values.out as string | undefined;
  if (kind === undefined || input === undefined || output === undefined) {
    fail("--kind, --in, and --out are required");
    process.stderr.write(USAGE + "\n");
    return 2;
  }
  if (!isFigureKind(kind)) {
    fail(`unknown figure kind: ${kind} (expected one of: ${FIGURE_KINDS.join(", ")})`);
    return 2;
  }

  const groupByRaw = values["group-by"] as string | undefined;
  const groupBy =
    groupByRaw === undefined
      ? DEFAULT_GROUP_BY
      : groupByRaw
          .split(",")
          .map((s) => s.trim())
          .filter((s) => s.length > 0);

  const spec: FigureSpec = {
    input,
    kind,
    output,
    xLabel: values["x-label"] as string | undefined,
    yLabel: values["y-label"] as string | undefined,
    title: values.title as string | undefined,
    groupBy,
  };

  let text: string;
  try {
    text = readFileSync(spec.input, "utf8");
  } catch (err) {
    fail(`cannot read ${spec.input}: ${err instanceof Error ? err.message : String(err)}`);
    return 2;
  }

  let svg: string;
  try {
    const rows = parseTable(text);
    svg = renderChart(buildChart(rows, spec));
  } catch (err) {
    if (err instanceof TableError || err instanceof Error) {
      fail(err.message);
      return 1;
    }
    throw err;
  }

  try {
    writeFileSync(spec.output, svg, "utf8");
  } catch (err) {
    fail(`cannot write ${spec.output}: ${err instanceof Error ? err.message : String(err)}`);
    return 2;
  }
  return 0;
}

function invokedDirectly(): boolean {
  const script = process.argv[1];
  if (!script) {
    return false;
  }
  try {
    return import.meta.url === pathToFileURL(realpathSync(script)).href;
  } catch {
    return false;
  }
}

if (invokedDirectly()) {
  process.exit(run(process.argv.slice(2)));
}

/**
 * Figure descriptions.
 *
 * Three kinds, all fed by the same run-table schema:
 *  - "accuracy":    approximate rate (line) vs Monte-Carlo rate (markers
 *                   with stderr whiskers) over transmit power, per group
 *  - "convergence": approximate rate over optimizer iterations, per group
 *  - "sweep":       Monte-Carlo sum-rate over transmit power, per group
 *
 * A group is one (scheme, decoding) combination by default; grouping keys
 * are configurable and become the legend labels.
 */

export const FIGURE_KINDS = ["accuracy", "convergence", "sweep"] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureSpec {
  input: string;
  kind: FigureKind;
  output: string;
  xLabel?: string;
  yLabel?: string;
  title?: string;
  groupBy: string[];
}

export const DEFAULT_GROUP_BY = ["scheme", "decoding"];

export function isFigureKind(value: string): value is FigureKind {
  return (FIGURE_KINDS as readonly string[]).includes(value);
}

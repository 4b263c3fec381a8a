// Per-group box plot of relative percentage differences, rendered as a
// deterministic SVG string: solid orange median, dashed green mean, whiskers
// at 1.5 IQR, outliers as points, y-axis clamped to [-200, 200].

import { RpdRow } from './csv.js';
import { BoxStats, boxStats } from './stats.js';

export interface PlotSpec {
  rows: RpdRow[];
  algoA: string;
  algoB: string;
  groupOrder?: string[];
  title?: string;
}

export interface PlotResult {
  svg: string;
  warnings: string[];
  stats: Map<string, BoxStats | null>;
}

const W_SLOT = 64;
const MARGIN_L = 56;
const MARGIN_R = 16;
const MARGIN_T = 34;
const MARGIN_B = 40;
const PLOT_H = 280;
const Y_MIN = -200;
const Y_MAX = 200;

const MEDIAN_COLOR = '#ff7f0e'; // orange
const MEAN_COLOR = '#2ca02c'; // green, dashed

function fmt(v: number): string {
  return v.toFixed(2);
}

function clampY(v: number): number {
  return Math.max(Y_MIN, Math.min(Y_MAX, v));
}

export function plotRpdBoxes(spec: PlotSpec): PlotResult {
  const pairRows = spec.rows.filter(
    (r) => r.algoA === spec.algoA && r.algoB === spec.algoB,
  );
  const groups = spec.groupOrder ?? dedupe(pairRows.map((r) => r.group));
  const warnings: string[] = [];
  const stats = new Map<string, BoxStats | null>();

  const width = MARGIN_L + groups.length * W_SLOT + MARGIN_R;
  const height = MARGIN_T + PLOT_H + MARGIN_B;
  const yOf = (v: number) =>
    MARGIN_T + ((Y_MAX - clampY(v)) / (Y_MAX - Y_MIN)) * PLOT_H;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="11">`,
  );
  const title = spec.title ?? `RPD of ${spec.algoA} vs ${spec.algoB}`;
  parts.push(`<text x="${width / 2}" y="16" text-anchor="middle">${title}</text>`);

  // axis, gridlines, tick labels
  for (const tick of [-200, -100, 0, 100, 200]) {
    const y = yOf(tick);
    const style = tick === 0 ? 'stroke:#888' : 'stroke:#ddd';
    parts.push(`<line x1="${MARGIN_L}" y1="${fmt(y)}" x2="${width - MARGIN_R}" y2="${fmt(y)}" style="${style}"/>`);
    parts.push(`<text x="${MARGIN_L - 6}" y="${fmt(y + 3)}" text-anchor="end">${tick}</text>`);
  }

  groups.forEach((group, i) => {
    const cx = MARGIN_L + i * W_SLOT + W_SLOT / 2;
    const values = pairRows.filter((r) => r.group === group).map((r) => r.rpd);
    parts.push(
      `<text x="${cx}" y="${height - 14}" text-anchor="middle">${group}</text>`,
    );
    if (values.length === 0) {
      warnings.push(`group ${group}: no data for pair ${spec.algoA},${spec.algoB}`);
      stats.set(group, null);
      parts.push(
        `<rect x="${cx - 18}" y="${fmt(yOf(10))}" width="36" height="${fmt(yOf(-10) - yOf(10))}" ` +
          `fill="none" stroke="#bbb" stroke-dasharray="2,2"/>`,
      );
      return;
    }
    const s = boxStats(values);
    stats.set(group, s);
    const boxTop = yOf(s.q3);
    const boxBot = yOf(s.q1);
    // whiskers with caps
    parts.push(`<line x1="${cx}" y1="${fmt(yOf(s.whiskerHigh))}" x2="${cx}" y2="${fmt(boxTop)}" stroke="#333"/>`);
    parts.push(`<line x1="${cx}" y1="${fmt(boxBot)}" x2="${cx}" y2="${fmt(yOf(s.whiskerLow))}" stroke="#333"/>`);
    parts.push(`<line x1="${cx - 10}" y1="${fmt(yOf(s.whiskerHigh))}" x2="${cx + 10}" y2="${fmt(yOf(s.whiskerHigh))}" stroke="#333"/>`);
    parts.push(`<line x1="${cx - 10}" y1="${fmt(yOf(s.whiskerLow))}" x2="${cx + 10}" y2="${fmt(yOf(s.whiskerLow))}" stroke="#333"/>`);
    // box
    parts.push(
      `<rect x="${cx - 18}" y="${fmt(boxTop)}" width="36" height="${fmt(Math.max(boxBot - boxTop, 0.5))}" ` +
        `fill="#9ecae1" fill-opacity="0.6" stroke="#333"/>`,
    );
    // median (solid orange) and mean (dashed green)
    parts.push(`<line x1="${cx - 18}" y1="${fmt(yOf(s.median))}" x2="${cx + 18}" y2="${fmt(yOf(s.median))}" stroke="${MEDIAN_COLOR}" stroke-width="2"/>`);
    parts.push(`<line x1="${cx - 18}" y1="${fmt(yOf(s.mean))}" x2="${cx + 18}" y2="${fmt(yOf(s.mean))}" stroke="${MEAN_COLOR}" stroke-width="1.5" stroke-dasharray="4,3"/>`);
    for (const o of s.outliers) {
      parts.push(`<circle cx="${cx}" cy="${fmt(yOf(o))}" r="2.5" fill="none" stroke="#333"/>`);
    }
  });

  parts.push('</svg>');
  return { svg: parts.join('\n') + '\n', warnings, stats };
}

function dedupe(items: string[]): string[] {
  const out: string[] = [];
  for (const x of items) if (!out.includes(x)) out.push(x);
  return out;
}

// Completeness tables: one row per group plus the All row, two columns per
// algorithm (percent incomplete, percent timeout-or-inconsistent).

import { AggregateRow, CompletenessRow } from './csv.js';

export interface TableData {
  algorithms: string[];
  groups: string[]; // "All" first when present
  cells: Map<string, { bad: string; toi: string }>; // key `${group}|${algo}`
}

export function buildTable(rows: CompletenessRow[]): TableData {
  const algorithms: string[] = [];
  const groups: string[] = [];
  for (const r of rows) {
    if (!algorithms.includes(r.algorithm)) algorithms.push(r.algorithm);
    if (!groups.includes(r.group)) groups.push(r.group);
  }
  algorithms.sort();
  if (groups.includes('All')) {
    groups.splice(groups.indexOf('All'), 1);
    groups.unshift('All');
  }
  const cells = new Map<string, { bad: string; toi: string }>();
  for (const r of rows) {
    cells.set(`${r.group}|${r.algorithm}`, {
      bad: r.pctIncomplete.toFixed(1),
      toi: r.pctTimeoutOrInconsistent.toFixed(1),
    });
  }
  return { algorithms, groups, cells };
}

export function renderText(data: TableData): string {
  const colw = 16;
  const lines: string[] = [];
  const header = ['group'.padEnd(8)]
    .concat(data.algorithms.map((a) => `${a} (inc/toi)`.padEnd(colw)))
    .join(' ');
  lines.push(header);
  lines.push('-'.repeat(header.length));
  for (const g of data.groups) {
    const cols = [g.padEnd(8)];
    for (const a of data.algorithms) {
      const cell = data.cells.get(`${g}|${a}`);
      cols.push((cell ? `${cell.bad} / ${cell.toi}` : '').padEnd(colw));
    }
    lines.push(cols.join(' '));
  }
  return lines.join('\n') + '\n';
}

export function renderHtml(data: TableData): string {
  const parts: string[] = [];
  parts.push('<table border="1" cellspacing="0" cellpadding="4">');
  parts.push('<thead><tr><th rowspan="2">group</th>');
  for (const a of data.algorithms) parts.push(`<th colspan="2">${a}</th>`);
  parts.push('</tr><tr>');
  for (const _ of data.algorithms) parts.push('<th>% incomplete</th><th>% timeout/inconsistent</th>');
  parts.push('</tr></thead><tbody>');
  for (const g of data.groups) {
    parts.push(`<tr><td>${g}</td>`);
    for (const a of data.algorithms) {
      const cell = data.cells.get(`${g}|${a}`);
      if (cell) parts.push(`<td>${cell.bad}</td><td>${cell.toi}</td>`);
      else parts.push('<td></td><td></td>');
    }
    parts.push('</tr>');
  }
  parts.push('</tbody></table>');
  return parts.join('\n') + '\n';
}

// Recompute the All row from per-example aggregates; used to cross-check the
// harness's own All row.
export function recomputeAll(aggregates: AggregateRow[]): CompletenessRow[] {
  const algorithms = [...new Set(aggregates.map((a) => a.algorithm))].sort();
  return algorithms.map((algo) => {
    const cell = aggregates.filter((a) => a.algorithm === algo);
    const bad = cell.filter((a) => a.classification !== 'AsExpected').length;
    const toi = cell.filter(
      (a) => a.classification === 'Timeout' || a.classification === 'Inconsistent',
    ).length;
    return {
      group: 'All',
      algorithm: algo,
      pctIncomplete: (100 * bad) / cell.length,
      pctTimeoutOrInconsistent: (100 * toi) / cell.length,
    };
  });
}

export function allRowMatches(rows: CompletenessRow[], aggregates: AggregateRow[],
                              tolerance = 0.05): boolean {
  const recomputed = recomputeAll(aggregates);
  for (const want of recomputed) {
    const got = rows.find((r) => r.group === 'All' && r.algorithm === want.algorithm);
    if (!got) return false;
    if (Math.abs(got.pctIncomplete - want.pctIncomplete) > tolerance) return false;
    if (Math.abs(got.pctTimeoutOrInconsistent - want.pctTimeoutOrInconsistent) > tolerance) {
      return false;
    }
  }
  return true;
}

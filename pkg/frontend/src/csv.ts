// Readers for the CSV schemas produced by the verifier's bench harness.

import * as fs from 'fs';

export interface RpdRow {
  example: string;
  group: string;
  algoA: string;
  algoB: string;
  rpd: number;
}

export interface CompletenessRow {
  group: string;
  algorithm: string;
  pctIncomplete: number;
  pctTimeoutOrInconsistent: number;
}

export interface AggregateRow {
  example: string;
  group: string;
  algorithm: string;
  meanMidMs: number;
  classification: string;
}

// Minimal RFC-4180-ish parser; the bench schemas never emit embedded commas,
// but quoted fields are handled for robustness.
export function parseCsv(text: string): string[][] {
  const rows: string[][] = [];
  let row: string[] = [];
  let field = '';
  let inQuotes = false;
  for (let i = 0; i < text.length; i++) {
    const c = text[i];
    if (inQuotes) {
      if (c === '"') {
        if (text[i + 1] === '"') {
          field += '"';
          i++;
        } else {
          inQuotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c === '"') inQuotes = true;
    else if (c === ',') {
      row.push(field);
      field = '';
    } else if (c === '\n') {
      row.push(field);
      field = '';
      rows.push(row);
      row = [];
    } else if (c !== '\r') {
      field += c;
    }
  }
  if (field.length > 0 || row.length > 0) {
    row.push(field);
    rows.push(row);
  }
  return rows;
}

function records(path: string, expectedHeader: string[]): Record<string, string>[] {
  const rows = parseCsv(fs.readFileSync(path, 'utf8'));
  if (rows.length === 0) throw new Error(`${path}: empty CSV`);
  const header = rows[0];
  for (const col of expectedHeader) {
    if (!header.includes(col)) {
      throw new Error(`${path}: missing column ${col} (found: ${header.join(',')})`);
    }
  }
  return rows.slice(1).filter((r) => r.length > 1 || r[0] !== '').map((r) => {
    const rec: Record<string, string> = {};
    header.forEach((h, i) => (rec[h] = r[i] ?? ''));
    return rec;
  });
}

export function readRpdCsv(path: string): RpdRow[] {
  return records(path, ['example', 'group', 'algo_a', 'algo_b', 'rpd']).map((r) => ({
    example: r.example,
    group: r.group,
    algoA: r.algo_a,
    algoB: r.algo_b,
    rpd: Number(r.rpd),
  }));
}

export function readCompletenessCsv(path: string): CompletenessRow[] {
  return records(path, ['group', 'algorithm', 'pct_incomplete', 'pct_timeout_or_inconsistent'])
    .map((r) => ({
      group: r.group,
      algorithm: r.algorithm,
      pctIncomplete: Number(r.pct_incomplete),
      pctTimeoutOrInconsistent: Number(r.pct_timeout_or_inconsistent),
    }));
}

export function readAggregatesCsv(path: string): AggregateRow[] {
  return records(path, ['example', 'group', 'algorithm', 'mean_mid_ms', 'classification'])
    .map((r) => ({
      example: r.example,
      group: r.group,
      algorithm: r.algorithm,
      meanMidMs: Number(r.mean_mid_ms),
      classification: r.classification,
    }));
}

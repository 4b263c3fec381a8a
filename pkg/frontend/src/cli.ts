#!/usr/bin/env node
// Report rendering from bench CSVs:
//   permver-report plot-rpd --csv rpd.csv --pair se-ps,vcg-ta --out fig.svg [--png fig.png] [--groups a,b,c]
//   permver-report render-completeness --csv completeness.csv --out table.html [--format html|text] [--aggregates aggregates.csv]

import * as fs from 'fs';

import { plotRpdBoxes } from './boxplot.js';
import { allRowMatches, buildTable, renderHtml, renderText } from './completeness.js';
import { readAggregatesCsv, readCompletenessCsv, readRpdCsv } from './csv.js';

function parseArgs(argv: string[]): Map<string, string> {
  const out = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    if (!argv[i].startsWith('--') || argv[i + 1] === undefined) {
      throw new Error(`bad arguments near ${argv[i]}`);
    }
    out.set(argv[i].slice(2), argv[i + 1]);
  }
  return out;
}

function need(args: Map<string, string>, key: string): string {
  const v = args.get(key);
  if (v === undefined) throw new Error(`missing --${key}`);
  return v;
}

async function writePng(svg: string, path: string): Promise<void> {
  const { Resvg } = await import('@resvg/resvg-js');
  const png = new Resvg(svg).render().asPng();
  fs.writeFileSync(path, png);
}

async function main(): Promise<number> {
  const [command, ...rest] = process.argv.slice(2);
  if (command === 'plot-rpd') {
    const args = parseArgs(rest);
    const rows = readRpdCsv(need(args, 'csv'));
    const [algoA, algoB] = need(args, 'pair').split(',');
    if (!algoB) throw new Error('--pair expects two comma-separated algorithm names');
    if (!rows.some((r) => r.algoA === algoA && r.algoB === algoB)) {
      throw new Error(`pair ${algoA},${algoB} not present in the CSV`);
    }
    const groupOrder = args.get('groups')?.split(',');
    const { svg, warnings } = plotRpdBoxes({ rows, algoA, algoB, groupOrder });
    for (const w of warnings) console.error(`warning: ${w}`);
    const out = need(args, 'out');
    fs.writeFileSync(out, svg);
    console.log(`wrote ${out}`);
    const png = args.get('png');
    if (png) {
      await writePng(svg, png);
      console.log(`wrote ${png}`);
    }
    return 0;
  }
  if (command === 'render-completeness') {
    const args = parseArgs(rest);
    const rows = readCompletenessCsv(need(args, 'csv'));
    const aggPath = args.get('aggregates');
    if (aggPath) {
      const aggregates = readAggregatesCsv(aggPath);
      if (!allRowMatches(rows, aggregates)) {
        console.error('warning: All row disagrees with a recomputation from aggregates');
      }
    }
    const table = buildTable(rows);
    const format = args.get('format') ?? (need(args, 'out').endsWith('.html') ? 'html' : 'text');
    const text = format === 'html' ? renderHtml(table) : renderText(table);
    fs.writeFileSync(need(args, 'out'), text);
    console.log(`wrote ${need(args, 'out')}`);
    return 0;
  }
  console.error('usage: permver-report plot-rpd|render-completeness --csv ... --out ...');
  return 2;
}

main().then(
  (code) => process.exit(code),
  (err) => {
    console.error(`error: ${err.message ?? err}`);
    process.exit(2);
  },
);

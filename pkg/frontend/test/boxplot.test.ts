import { describe, expect, it } from 'vitest';

import { plotRpdBoxes } from '../src/boxplot.js';
import { RpdRow } from '../src/csv.js';

function rows(group: string, values: number[]): RpdRow[] {
  return values.map((v, i) => ({
    example: `${group}-${i}`,
    group,
    algoA: 'se-ps',
    algoB: 'vcg-ta',
    rpd: v,
  }));
}

describe('rpd box plot', () => {
  it('renders one box per group and is byte-stable', () => {
    const data = [...rows('a', [-50, 0, 25, 80]), ...rows('b', [10, 20, 30])];
    const first = plotRpdBoxes({ rows: data, algoA: 'se-ps', algoB: 'vcg-ta' });
    const second = plotRpdBoxes({ rows: data, algoA: 'se-ps', algoB: 'vcg-ta' });
    expect(first.svg).toBe(second.svg);
    expect(first.warnings).toEqual([]);
    // one filled box rect per group (the empty-group placeholder is dashed)
    const boxes = first.svg.match(/fill="#9ecae1"/g) ?? [];
    expect(boxes.length).toBe(2);
  });

  it('missing groups produce empty boxes with a warning', () => {
    const data = rows('a', [1, 2, 3]);
    const res = plotRpdBoxes({
      rows: data,
      algoA: 'se-ps',
      algoB: 'vcg-ta',
      groupOrder: ['a', 'ghost'],
    });
    expect(res.warnings.length).toBe(1);
    expect(res.warnings[0]).toContain('ghost');
    expect(res.svg).toContain('stroke-dasharray="2,2"');
    expect(res.stats.get('ghost')).toBeNull();
  });

  it('median line is distinct from the dashed mean line', () => {
    const res = plotRpdBoxes({ rows: rows('g', [0, 50, 100]), algoA: 'se-ps', algoB: 'vcg-ta' });
    expect(res.svg).toContain('stroke="#ff7f0e"');
    expect(res.svg).toMatch(/stroke="#2ca02c"[^/]*stroke-dasharray/);
  });

  it('y coordinates are clamped to the [-200, 200] band', () => {
    const res = plotRpdBoxes({ rows: rows('g', [-200, 200]), algoA: 'se-ps', algoB: 'vcg-ta' });
    const ys = [...res.svg.matchAll(/y1="([-0-9.]+)"/g)].map((m) => Number(m[1]));
    for (const y of ys) {
      expect(y).toBeGreaterThanOrEqual(0);
      expect(y).toBeLessThanOrEqual(360);
    }
  });

  it('degenerate group renders a box at the constant value', () => {
    const res = plotRpdBoxes({ rows: rows('g', [42, 42, 42]), algoA: 'se-ps', algoB: 'vcg-ta' });
    const s = res.stats.get('g')!;
    expect(s.median).toBe(42);
    expect(s.mean).toBe(42);
  });
});

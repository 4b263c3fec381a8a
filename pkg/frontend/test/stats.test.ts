import { describe, expect, it } from 'vitest';

import { boxStats, quantile } from '../src/stats.js';

// independent recomputation: same linear-interpolation definition, written
// directly over the order statistics rather than through quantile()
function referenceQuartiles(values: number[]): { q1: number; med: number; q3: number } {
  const s = [...values].sort((a, b) => a - b);
  const interp = (p: number) => {
    const h = p * (s.length - 1);
    const lower = s[Math.floor(h)];
    const upper = s[Math.min(s.length - 1, Math.floor(h) + 1)];
    return lower + (h - Math.floor(h)) * (upper - lower);
  };
  return { q1: interp(0.25), med: interp(0.5), q3: interp(0.75) };
}

function referenceWhiskers(values: number[], q1: number, q3: number) {
  const iqr = q3 - q1;
  const inRange = values.filter((v) => v >= q1 - 1.5 * iqr && v <= q3 + 1.5 * iqr);
  return { low: Math.min(...inRange), high: Math.max(...inRange) };
}

describe('box statistics', () => {
  it('matches an independent recomputation within 1e-9', () => {
    // deterministic pseudo-random data
    let seed = 42;
    const rand = () => {
      seed = (seed * 1103515245 + 12345) % 2147483648;
      return seed / 2147483648;
    };
    for (let trial = 0; trial < 50; trial++) {
      const n = 3 + Math.floor(rand() * 40);
      const values = Array.from({ length: n }, () => (rand() - 0.5) * 400);
      const s = boxStats(values);
      const ref = referenceQuartiles(values);
      const w = referenceWhiskers(values, ref.q1, ref.q3);
      expect(Math.abs(s.q1 - ref.q1)).toBeLessThanOrEqual(1e-9);
      expect(Math.abs(s.median - ref.med)).toBeLessThanOrEqual(1e-9);
      expect(Math.abs(s.q3 - ref.q3)).toBeLessThanOrEqual(1e-9);
      expect(Math.abs(s.whiskerLow - w.low)).toBeLessThanOrEqual(1e-9);
      expect(Math.abs(s.whiskerHigh - w.high)).toBeLessThanOrEqual(1e-9);
      const mean = values.reduce((a, b) => a + b, 0) / values.length;
      expect(Math.abs(s.mean - mean)).toBeLessThanOrEqual(1e-9);
    }
  });

  it('degenerate box: constant data collapses to one line', () => {
    const s = boxStats([7, 7, 7, 7]);
    expect(s.median).toBe(7);
    expect(s.mean).toBe(7);
    expect(s.q1).toBe(7);
    expect(s.q3).toBe(7);
    expect(s.whiskerLow).toBe(7);
    expect(s.whiskerHigh).toBe(7);
    expect(s.outliers).toEqual([]);
  });

  it('symmetric data: median and mean are zero, whiskers cover all points', () => {
    const s = boxStats([-66.6, 0, 66.6]);
    expect(s.median).toBe(0);
    expect(Math.abs(s.mean)).toBeLessThanOrEqual(1e-12);
    expect(s.whiskerLow).toBe(-66.6);
    expect(s.whiskerHigh).toBe(66.6);
    expect(s.outliers).toEqual([]);
  });

  it('quantile endpoints', () => {
    expect(quantile([1, 2, 3, 4], 0)).toBe(1);
    expect(quantile([1, 2, 3, 4], 1)).toBe(4);
    expect(quantile([1, 2, 3, 4], 0.5)).toBe(2.5);
  });
});

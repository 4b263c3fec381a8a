// Box-plot statistics: quartiles by linear interpolation, whiskers at the
// farthest data points within 1.5 interquartile ranges of the box.

export interface BoxStats {
  count: number;
  mean: number;
  median: number;
  q1: number;
  q3: number;
  whiskerLow: number;
  whiskerHigh: number;
  outliers: number[];
}

export function quantile(sorted: number[], p: number): number {
  if (sorted.length === 0) throw new Error('quantile of empty data');
  if (sorted.length === 1) return sorted[0];
  const pos = (sorted.length - 1) * p;
  const lo = Math.floor(pos);
  const hi = Math.ceil(pos);
  if (lo === hi) return sorted[lo];
  return sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo);
}

export function boxStats(values: number[]): BoxStats {
  if (values.length === 0) throw new Error('boxStats of empty data');
  const sorted = [...values].sort((a, b) => a - b);
  const q1 = quantile(sorted, 0.25);
  const median = quantile(sorted, 0.5);
  const q3 = quantile(sorted, 0.75);
  const iqr = q3 - q1;
  const loFence = q1 - 1.5 * iqr;
  const hiFence = q3 + 1.5 * iqr;
  const inside = sorted.filter((v) => v >= loFence && v <= hiFence);
  const whiskerLow = inside.length ? inside[0] : q1;
  const whiskerHigh = inside.length ? inside[inside.length - 1] : q3;
  const outliers = sorted.filter((v) => v < loFence || v > hiFence);
  const mean = sorted.reduce((a, b) => a + b, 0) / sorted.length;
  return { count: sorted.length, mean, median, q1, q3, whiskerLow, whiskerHigh, outliers };
}

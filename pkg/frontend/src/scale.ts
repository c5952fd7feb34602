/** The only model math allowed on the client: pixel-drag conversion. */

export type ValueRange = [number, number];

/**
 * Convert a vertical pixel shift into a value delta by inverse scaling
 * against the variable's value range. Screen y grows downward, so an
 * upward drag (negative deltaPx) is a positive value change.
 */
export function pixelToValue(deltaPx: number, range: ValueRange, chartHeightPx: number): number {
  const [min, max] = range;
  if (chartHeightPx <= 0) throw new RangeError("chart height must be positive");
  if (max <= min) throw new RangeError("range must have max > min");
  const delta = (-deltaPx * (max - min)) / chartHeightPx;
  return delta === 0 ? 0 : delta; // never hand back IEEE negative zero
}

/** Smallest value change one pixel can express on this chart. */
export function valueQuantum(range: ValueRange, chartHeightPx: number): number {
  return (range[1] - range[0]) / chartHeightPx;
}

/**
 * Observed min/max padded +/-1 when degenerate, mirroring the backend
 * rule so drag scales are never zero-width.
 */
export function observedRange(values: (number | null)[]): ValueRange {
  const finite = values.filter((v): v is number => v !== null && Number.isFinite(v));
  if (finite.length === 0) throw new Error("no observed values");
  let min = Math.min(...finite);
  let max = Math.max(...finite);
  if (min === max) {
    min -= 1;
    max += 1;
  }
  return [min, max];
}

/** Dragged values snap to a per-variable decimal precision. */
export function snapValue(value: number, decimals: number): number {
  const factor = 10 ** decimals;
  return Math.round(value * factor) / factor;
}

/** Tonnage-like quantities snap to whole units; indices keep cents. */
export function decimalsFor(variable: string): number {
  return /loading|tonnage|volume|cargo|supply/i.test(variable) ? 0 : 2;
}

/** Linear mapping from a value to a y pixel (top of chart = max). */
export function valueToY(value: number, range: ValueRange, chartHeightPx: number): number {
  const [min, max] = range;
  return ((max - value) / (max - min)) * chartHeightPx;
}

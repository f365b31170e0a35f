/**
 * Concentration view models: one bar per slice with its n-item floor line.
 * Values are the service's, passed through unchanged.
 */

import type { ConcentrationResponse, ConcentrationRow } from './types.js';

export interface BarModel {
  label: string;
  n: number;
  h: number;
  hFloor: number;
  /** Bar length as a fraction of the 10^4 ceiling. */
  extent: number;
  floorExtent: number;
}

export const H_CEILING = 10_000;

export function barLabel(row: ConcentrationRow): string {
  const parts = Object.entries(row.members)
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
    .map(([dim, member]) => `${dim}=${member}`);
  return parts.length ? parts.join(', ') : 'whole portfolio';
}

export function barModels(response: ConcentrationResponse): BarModel[] {
  return response.rows.map((row) => ({
    label: barLabel(row),
    n: row.n,
    h: row.h,
    hFloor: row.h_floor,
    extent: row.h / H_CEILING,
    floorExtent: row.h_floor / H_CEILING,
  }));
}

/** Bars arrive sorted by the service; verify rather than re-sort. */
export function isSortedByH(bars: BarModel[]): boolean {
  return bars.every((bar, i) => i === 0 || (bars[i - 1] as BarModel).h >= bar.h);
}

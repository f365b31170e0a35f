/**
 * Pareto view geometry: cumulative-share curve and draggable threshold
 * markers, as pure data for the SVG layer. Shares come from the service as
 * 6-decimal strings; they are parsed for pixel positions only.
 */

export interface ChartBox {
  width: number;
  height: number;
  padLeft: number;
  padRight: number;
  padTop: number;
  padBottom: number;
}

export const DEFAULT_BOX: ChartBox = {
  width: 720,
  height: 360,
  padLeft: 48,
  padRight: 16,
  padTop: 12,
  padBottom: 28,
};

export function plotWidth(box: ChartBox): number {
  return box.width - box.padLeft - box.padRight;
}

export function plotHeight(box: ChartBox): number {
  return box.height - box.padTop - box.padBottom;
}

/** x pixel of item rank k (1-based) among n items. */
export function xOfRank(k: number, n: number, box: ChartBox): number {
  if (n <= 1) return box.padLeft + plotWidth(box);
  return box.padLeft + ((k - 1) / (n - 1)) * plotWidth(box);
}

/** y pixel of a share in [0, 1]; share 0 is the bottom axis. */
export function yOfShare(share: number, box: ChartBox): number {
  return box.padTop + (1 - share) * plotHeight(box);
}

/** Inverse of `yOfShare`, clamped into [0, 1]; used while dragging markers. */
export function shareOfY(y: number, box: ChartBox): number {
  const raw = 1 - (y - box.padTop) / plotHeight(box);
  return Math.min(1, Math.max(0, raw));
}

/** SVG path for the cumulative curve from the service's share strings. */
export function curvePath(shareStrings: string[], box: ChartBox): string {
  const n = shareStrings.length;
  if (n === 0) return '';
  const points = shareStrings.map((s, i) => {
    const x = xOfRank(i + 1, n, box);
    const y = yOfShare(parseFloat(s), box);
    return `${x.toFixed(2)},${y.toFixed(2)}`;
  });
  const first = points[0] as string;
  return `M${box.padLeft.toFixed(2)},${yOfShare(0, box).toFixed(2)} L${first} L${points.join(' L')}`;
}

export interface MarkerModel {
  name: 't_a' | 't_b' | 't_c';
  value: number;
  y: number;
  label: string;
}

export function markerModels(
  thresholds: { t_a: number; t_b: number; t_c: number },
  box: ChartBox,
): MarkerModel[] {
  return (['t_a', 't_b', 't_c'] as const).map((name) => ({
    name,
    value: thresholds[name],
    y: yOfShare(thresholds[name], box),
    label: `${name} = ${thresholds[name].toFixed(3)}`,
  }));
}

/** Drag a marker to pixel y: the new threshold value, 3-decimal steps. */
export function thresholdFromDrag(y: number, box: ChartBox): number {
  return Math.round(shareOfY(y, box) * 1000) / 1000;
}

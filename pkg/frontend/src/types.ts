/**
 * Wire types shared with the stratos service, plus the dashboard's own state.
 *
 * Fractions arrive as 6-decimal strings and are displayed verbatim; they are
 * parsed only for chart geometry, never re-derived client-side.
 */

export interface Thresholds {
  t_a: number;
  t_b: number;
  t_c: number;
}

export interface PolicyStep {
  h_min: number;
  value: number;
}

export interface ConcentrationPolicy {
  mode: 'override' | 'add';
  steps: PolicyStep[];
}

export interface PassSpec {
  name: string;
  scope: 'all' | 'new' | 'inline';
  group_by: string[];
  thresholds?: Thresholds;
  concentration_policy?: ConcentrationPolicy;
}

/** The config document the CLI accepts verbatim via `stratify --config`. */
export interface StratifyConfigDoc {
  thresholds: Thresholds;
  renormalize: 'actual' | 'nominal';
  new_item_cutoff_months: number;
  a_share_cap: number | null;
  passes: PassSpec[];
}

export interface UploadResponse {
  portfolio_id: string;
  n: number;
  total_value: string;
}

export interface ResultRow {
  item_id: string;
  class: 'A' | 'B' | 'C' | 'D';
  assigned_by: string;
  share: string;
}

export interface StratifyResponse {
  items: ResultRow[];
  summary: {
    a_coverage: string;
    classes: Record<string, { count: number; value: string }>;
    [key: string]: unknown;
  };
}

export interface ImpactRow {
  t_a: string;
  a_count: number;
  a_revenue_share: string;
  entering: string[];
  leaving: string[];
}

export interface SimulateResponse {
  rows: ImpactRow[];
}

export interface ConcentrationRow {
  members: Record<string, string>;
  n: number;
  h: number;
  h_floor: number;
}

export interface ConcentrationResponse {
  rows: ConcentrationRow[];
  mixed_n: boolean;
}

export interface ProductivityResponse {
  s: number[];
  t: number[];
  t0: number;
  p_star: number;
  t_a_star: string;
  residual: number;
  shares: string[];
}

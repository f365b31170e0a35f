/**
 * Session state: the uploaded portfolio handle, the working config, and the
 * latest service responses. All mutation goes through methods that keep the
 * config valid; views subscribe for re-render.
 */

import { defaultConfig, validateConfig, withThreshold } from './config.js';
import type {
  ConcentrationResponse,
  ProductivityResponse,
  SimulateResponse,
  StratifyConfigDoc,
  StratifyResponse,
  Thresholds,
  UploadResponse,
} from './types.js';

export interface SessionSnapshot {
  portfolio: UploadResponse | null;
  config: StratifyConfigDoc;
  stratify: StratifyResponse | null;
  simulate: SimulateResponse | null;
  concentration: ConcentrationResponse | null;
  productivity: ProductivityResponse | null;
  selectedDims: string[];
  error: string | null;
  stale: boolean;
}

type Listener = (state: SessionSnapshot) => void;

export class SessionState {
  private snapshot: SessionSnapshot = {
    portfolio: null,
    config: defaultConfig(),
    stratify: null,
    simulate: null,
    concentration: null,
    productivity: null,
    selectedDims: [],
    error: null,
    stale: false,
  };
  private listeners: Listener[] = [];

  get current(): SessionSnapshot {
    return this.snapshot;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private commit(patch: Partial<SessionSnapshot>): void {
    this.snapshot = { ...this.snapshot, ...patch };
    for (const listener of this.listeners) listener(this.snapshot);
  }

  setPortfolio(portfolio: UploadResponse): void {
    this.commit({
      portfolio,
      stratify: null,
      simulate: null,
      concentration: null,
      productivity: null,
      error: null,
      stale: false,
    });
  }

  /** Replace the working config; rejected (returns the problem) if invalid. */
  setConfig(config: StratifyConfigDoc): string | null {
    const problem = validateConfig(config);
    if (problem) return problem;
    this.commit({ config });
    return null;
  }

  setThreshold(which: keyof Thresholds, value: number): void {
    const next = withThreshold(this.snapshot.config, which, value);
    // withThreshold keeps the triple ordered, so this cannot fail validation
    this.commit({ config: next });
  }

  setSelectedDims(dims: string[]): void {
    this.commit({ selectedDims: dims });
  }

  applyStratify(response: StratifyResponse): void {
    this.commit({ stratify: response, error: null, stale: false });
  }

  applySimulate(response: SimulateResponse): void {
    this.commit({ simulate: response, error: null, stale: false });
  }

  applyConcentration(response: ConcentrationResponse): void {
    this.commit({ concentration: response, error: null, stale: false });
  }

  applyProductivity(response: ProductivityResponse): void {
    this.commit({ productivity: response, error: null, stale: false });
  }

  /** Service failure: keep showing the last data but flag it as stale. */
  reportError(message: string): void {
    this.commit({ error: message, stale: true });
  }
}

/** A count shown in the impact table for the current t_a, straight from the service. */
export function currentACount(state: SessionSnapshot): number | null {
  const rows = state.simulate?.rows;
  if (!rows || rows.length === 0) return null;
  const current = state.config.thresholds.t_a.toFixed(6);
  const match = rows.find((row) => row.t_a === current);
  return (match ?? rows[rows.length - 1])?.a_count ?? null;
}

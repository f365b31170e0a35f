/**
 * Working-config handling: defaults, validation, and export.
 *
 * The dashboard never sends or downloads an invalid document; every edit goes
 * through `validateConfig` first, and the exported JSON is exactly what the
 * service consumed (and what the CLI accepts).
 */

import type { ConcentrationPolicy, StratifyConfigDoc, Thresholds } from './types.js';

export const DEFAULT_THRESHOLDS: Thresholds = { t_a: 0.25, t_b: 0.65, t_c: 0.95 };

export function defaultConfig(): StratifyConfigDoc {
  return {
    thresholds: { ...DEFAULT_THRESHOLDS },
    renormalize: 'actual',
    new_item_cutoff_months: 12,
    a_share_cap: null,
    passes: [{ name: 'unconstrained', scope: 'all', group_by: [] }],
  };
}

export function validateThresholds(t: Thresholds): string | null {
  const { t_a, t_b, t_c } = t;
  for (const [name, v] of Object.entries({ t_a, t_b, t_c })) {
    if (!Number.isFinite(v)) return `${name} is not a number`;
  }
  if (!(0 < t_a && t_a < t_b && t_b < t_c && t_c < 1)) {
    return 'thresholds must satisfy 0 < t_a < t_b < t_c < 1';
  }
  return null;
}

export function validatePolicy(policy: ConcentrationPolicy): string | null {
  if (policy.mode !== 'override' && policy.mode !== 'add') return 'unknown policy mode';
  let prevH = -Infinity;
  let prevV = -Infinity;
  for (const step of policy.steps) {
    if (!Number.isFinite(step.h_min) || !Number.isFinite(step.value)) {
      return 'policy steps must be numeric';
    }
    if (step.h_min <= prevH) return 'policy h_min values must be strictly increasing';
    if (step.value < prevV) return 'policy values must be non-decreasing';
    if (policy.mode === 'override' && step.value <= 0) return 'override values must be positive';
    if (policy.mode === 'add' && step.value < 0) return 'added increments must be nonnegative';
    prevH = step.h_min;
    prevV = step.value;
  }
  return null;
}

/** First problem found, or null when the document is sendable. */
export function validateConfig(config: StratifyConfigDoc): string | null {
  const thresholdProblem = validateThresholds(config.thresholds);
  if (thresholdProblem) return thresholdProblem;
  if (config.renormalize !== 'actual' && config.renormalize !== 'nominal') {
    return 'renormalize must be "actual" or "nominal"';
  }
  if (!Number.isInteger(config.new_item_cutoff_months) || config.new_item_cutoff_months < 0) {
    return 'new_item_cutoff_months must be a nonnegative integer';
  }
  if (config.a_share_cap !== null && !(config.a_share_cap > 0 && config.a_share_cap <= 1)) {
    return 'a_share_cap must be in (0, 1] or null';
  }
  if (config.passes.length === 0) return 'at least one pass is required';
  const names = new Set<string>();
  for (const pass of config.passes) {
    if (!pass.name || pass.name === 'stage-2') return `invalid pass name "${pass.name}"`;
    if (names.has(pass.name)) return `duplicate pass name "${pass.name}"`;
    names.add(pass.name);
    if (!['all', 'new', 'inline'].includes(pass.scope)) return 'unknown pass scope';
    if (pass.thresholds) {
      const problem = validateThresholds(pass.thresholds);
      if (problem) return `pass "${pass.name}": ${problem}`;
    }
    if (pass.concentration_policy) {
      const problem = validatePolicy(pass.concentration_policy);
      if (problem) return `pass "${pass.name}": ${problem}`;
    }
  }
  return null;
}

/** Set one threshold, keeping the triple ordered by nudging it inside its neighbors. */
export function withThreshold(
  config: StratifyConfigDoc,
  which: keyof Thresholds,
  value: number,
): StratifyConfigDoc {
  const GAP = 1e-6;
  const t = { ...config.thresholds };
  t[which] = value;
  if (which === 't_a') t.t_a = clamp(t.t_a, GAP, t.t_b - GAP);
  if (which === 't_b') t.t_b = clamp(t.t_b, t.t_a + GAP, t.t_c - GAP);
  if (which === 't_c') t.t_c = clamp(t.t_c, t.t_b + GAP, 1 - GAP);
  return { ...config, thresholds: t };
}

function clamp(x: number, lo: number, hi: number): number {
  return Math.min(Math.max(x, lo), hi);
}

/**
 * Attach a concentration policy to the hierarchy pass for `dim` (creating the
 * pass if needed), or detach pass and policy when `policy` is null. Returns
 * the problem string instead of a new document if the result would be invalid.
 */
export function withPolicyPass(
  config: StratifyConfigDoc,
  dim: string,
  policy: ConcentrationPolicy | null,
): StratifyConfigDoc | string {
  const passName = `by-${dim}`;
  const passes = config.passes.filter((p) => p.name !== passName);
  if (policy !== null) {
    const problem = validatePolicy(policy);
    if (problem) return problem;
    passes.push({ name: passName, scope: 'all', group_by: [dim], concentration_policy: policy });
  }
  const next = { ...config, passes };
  return validateConfig(next) ?? next;
}

/** Steps sorted and re-validated after an edit; returns the problem if unusable. */
export function withPolicyStep(
  policy: ConcentrationPolicy,
  step: { h_min: number; value: number },
): ConcentrationPolicy | string {
  const steps = [...policy.steps.filter((s) => s.h_min !== step.h_min), step].sort(
    (a, b) => a.h_min - b.h_min,
  );
  const next = { ...policy, steps };
  return validatePolicy(next) ?? next;
}

/** Stable serialization for download and for byte-comparing sessions. */
export function exportConfigJson(config: StratifyConfigDoc): string {
  const problem = validateConfig(config);
  if (problem) throw new Error(`refusing to export invalid config: ${problem}`);
  return JSON.stringify(config, null, 2) + '\n';
}

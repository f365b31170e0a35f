import { describe, expect, it } from 'vitest';

import {
  defaultConfig,
  exportConfigJson,
  validateConfig,
  withPolicyPass,
  withPolicyStep,
  withThreshold,
} from '../src/config.js';

describe('working config', () => {
  it('default document is valid and matches the documented defaults', () => {
    const config = defaultConfig();
    expect(validateConfig(config)).toBeNull();
    expect(config.thresholds).toEqual({ t_a: 0.25, t_b: 0.65, t_c: 0.95 });
    expect(config.renormalize).toBe('actual');
    expect(config.new_item_cutoff_months).toBe(12);
    expect(config.passes).toEqual([{ name: 'unconstrained', scope: 'all', group_by: [] }]);
  });

  it('rejects unordered thresholds', () => {
    const config = defaultConfig();
    config.thresholds = { t_a: 0.7, t_b: 0.65, t_c: 0.95 };
    expect(validateConfig(config)).toMatch(/t_a < t_b/);
  });

  it('rejects duplicate or reserved pass names', () => {
    const config = defaultConfig();
    config.passes.push({ name: 'unconstrained', scope: 'all', group_by: [] });
    expect(validateConfig(config)).toMatch(/duplicate/);
    config.passes = [{ name: 'stage-2', scope: 'all', group_by: [] }];
    expect(validateConfig(config)).toMatch(/invalid pass name/);
  });

  it('rejects bad policies', () => {
    const config = defaultConfig();
    config.passes[0]!.concentration_policy = {
      mode: 'add',
      steps: [
        { h_min: 2500, value: 0.1 },
        { h_min: 2500, value: 0.2 },
      ],
    };
    expect(validateConfig(config)).toMatch(/strictly increasing/);
  });

  it('threshold edits keep the triple ordered', () => {
    let config = defaultConfig();
    config = withThreshold(config, 't_a', 0.9); // above t_b: clamped just below
    expect(config.thresholds.t_a).toBeLessThan(config.thresholds.t_b);
    config = withThreshold(config, 't_c', 0.1); // below t_b: clamped just above
    expect(config.thresholds.t_c).toBeGreaterThan(config.thresholds.t_b);
    expect(validateConfig(config)).toBeNull();
  });

  it('threshold drag to 0.5 is echoed into the exported document', () => {
    const config = withThreshold(defaultConfig(), 't_a', 0.5);
    const parsed = JSON.parse(exportConfigJson(config));
    expect(parsed.thresholds.t_a).toBe(0.5);
  });

  it('export refuses an invalid document', () => {
    const config = defaultConfig();
    config.passes = [];
    expect(() => exportConfigJson(config)).toThrow(/invalid config/);
  });

  it('export round-trips through JSON unchanged', () => {
    const config = defaultConfig();
    const once = exportConfigJson(config);
    const twice = exportConfigJson(JSON.parse(once));
    expect(twice).toBe(once);
    expect(once.endsWith('\n')).toBe(true);
  });
});

describe('policy editing', () => {
  it('attaches a hierarchy pass carrying the policy', () => {
    const next = withPolicyPass(defaultConfig(), 'category', {
      mode: 'add',
      steps: [{ h_min: 2500, value: 0.1 }],
    });
    expect(typeof next).not.toBe('string');
    const config = next as Exclude<typeof next, string>;
    expect(config.passes.map((p) => p.name)).toEqual(['unconstrained', 'by-category']);
    expect(config.passes[1]!.group_by).toEqual(['category']);
    expect(validateConfig(config)).toBeNull();
  });

  it('replaces an existing policy pass and can detach it', () => {
    let config = withPolicyPass(defaultConfig(), 'category', {
      mode: 'add',
      steps: [{ h_min: 2500, value: 0.1 }],
    }) as ReturnType<typeof defaultConfig>;
    config = withPolicyPass(config, 'category', {
      mode: 'override',
      steps: [{ h_min: 800, value: 0.4 }],
    }) as ReturnType<typeof defaultConfig>;
    expect(config.passes.length).toBe(2);
    expect(config.passes[1]!.concentration_policy?.mode).toBe('override');
    const detached = withPolicyPass(config, 'category', null) as ReturnType<typeof defaultConfig>;
    expect(detached.passes.map((p) => p.name)).toEqual(['unconstrained']);
  });

  it('step edits keep the table sorted and reject bad shapes', () => {
    let policy = { mode: 'add' as const, steps: [{ h_min: 5000, value: 0.2 }] };
    const edited = withPolicyStep(policy, { h_min: 2500, value: 0.1 });
    expect(typeof edited).not.toBe('string');
    policy = edited as typeof policy;
    expect(policy.steps.map((s) => s.h_min)).toEqual([2500, 5000]);
    // same h_min replaces rather than duplicates
    const replaced = withPolicyStep(policy, { h_min: 2500, value: 0.15 }) as typeof policy;
    expect(replaced.steps.length).toBe(2);
    expect(replaced.steps[0]!.value).toBe(0.15);
    // a decreasing value table is refused
    expect(withPolicyStep(policy, { h_min: 9000, value: 0.05 })).toMatch(/non-decreasing/);
  });
});

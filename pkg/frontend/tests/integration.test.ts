/**
 * End-to-end against the real service and CLI: upload the ten-item worked
 * portfolio, read the impact table at the default t_a, drag it to 0.5, then
 * export the working config and check the CLI reproduces the dashboard's
 * classification byte-for-byte. Skipped when the python backend is not
 * installed alongside this repo.
 */

import { spawn, spawnSync } from 'node:child_process';
import { mkdtempSync, readFileSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import {
  defaultConfig,
  exportConfigJson,
  withPolicyPass,
  withThreshold,
} from '../src/config.js';
import type { StratifyConfigDoc, StratifyResponse } from '../src/types.js';

const LADDER_CSV =
  'item_id,value\n' +
  [100, 90, 80, 70, 60, 50, 40, 30, 20, 10]
    .map((v, i) => `Item ${i + 1},${v}`)
    .join('\n') +
  '\n';

const PORT = 8899;
const BASE = `http://127.0.0.1:${PORT}`;

function backendAvailable(): boolean {
  const probe = spawnSync('python3', ['-c', 'import stratos'], { timeout: 20000 });
  return probe.status === 0;
}

const hasBackend = backendAvailable();
const maybe = hasBackend ? describe : describe.skip;

maybe('live service round-trip', () => {
  let server: ReturnType<typeof spawn>;
  const client = new ApiClient(BASE);

  beforeAll(async () => {
    server = spawn('python3', ['-m', 'stratos.cli', 'serve', '--port', String(PORT)], {
      stdio: 'ignore',
    });
    const deadline = Date.now() + 30000;
    for (;;) {
      try {
        const resp = await fetch(`${BASE}/v1/portfolios/none/hhi`);
        if (resp.status === 404) return;
      } catch {
        /* not up yet */
      }
      if (Date.now() > deadline) throw new Error('service did not come up');
      await new Promise((r) => setTimeout(r, 250));
    }
  }, 40000);

  afterAll(() => {
    server?.kill();
  });

  it('shows 2 A items at defaults and 4 after dragging t_a to 0.5', async () => {
    const uploaded = await client.upload(LADDER_CSV);
    expect(uploaded.n).toBe(10);
    expect(uploaded.total_value).toBe('550');

    let config = defaultConfig();
    const atDefault = await client.simulate(
      uploaded.portfolio_id,
      [config.thresholds.t_a],
      config.thresholds.t_b,
      config.thresholds.t_c,
      config.thresholds.t_a,
    );
    expect(atDefault.rows[0]!.a_count).toBe(2);

    config = withThreshold(config, 't_a', 0.5); // the settled drag position
    const dragged = await client.simulate(
      uploaded.portfolio_id,
      [config.thresholds.t_a],
      config.thresholds.t_b,
      config.thresholds.t_c,
      0.25,
    );
    expect(dragged.rows[0]!.a_count).toBe(4);
    expect(dragged.rows[0]!.entering).toEqual(['Item 3', 'Item 4']);
  }, 30000);

  it('adding a policy step raises A counts in concentrated slices', async () => {
    // one category holds ~26% in its top item (index ~872); the other is flat
    const csv =
      'item_id,value,category\n' +
      ['top,2600,K']
        .concat(Array.from({ length: 28 }, (_, i) => `k${i},264,K`))
        .concat(Array.from({ length: 40 }, (_, i) => `f${i},100,F`))
        .join('\n') +
      '\n';
    const uploaded = await client.upload(csv);

    const report = await client.concentration(uploaded.portfolio_id, ['category']);
    const kRow = report.rows.find((r) => r.members['category'] === 'K')!;
    expect(kRow.h).toBeGreaterThan(800);

    const withPolicy = withPolicyPass(defaultConfig(), 'category', {
      mode: 'override',
      steps: [{ h_min: 800, value: 0.4 }],
    }) as StratifyConfigDoc;
    const plain = withPolicyPass(defaultConfig(), 'category', {
      mode: 'override',
      steps: [{ h_min: 99999, value: 0.4 }], // unreachable step: policy never fires
    }) as StratifyConfigDoc;

    const countK = (response: StratifyResponse) =>
      response.items.filter(
        (row) => row.class === 'A' && (row.item_id === 'top' || row.item_id.startsWith('k')),
      ).length;
    const before = countK(await client.stratify(uploaded.portfolio_id, plain));
    const after = countK(await client.stratify(uploaded.portfolio_id, withPolicy));
    expect(after).toBeGreaterThan(before);
  }, 30000);

  it('exported config fed to the CLI reproduces the dashboard classification', async () => {
    const uploaded = await client.upload(LADDER_CSV);
    const config = withThreshold(defaultConfig(), 't_a', 0.5);
    const shown: StratifyResponse = await client.stratify(uploaded.portfolio_id, config);

    const dir = mkdtempSync(join(tmpdir(), 'stratos-ui-'));
    const configPath = join(dir, 'exported.json');
    const inputPath = join(dir, 'table1.csv');
    writeFileSync(configPath, exportConfigJson(config));
    writeFileSync(inputPath, LADDER_CSV);

    const run = (out: string) =>
      spawnSync(
        'python3',
        ['-m', 'stratos.cli', 'stratify', '--input', inputPath, '--config', configPath, '--output', out],
        { timeout: 60000 },
      );
    expect(run(join(dir, 'out1.csv')).status).toBe(0);
    expect(run(join(dir, 'out2.csv')).status).toBe(0);

    const out1 = readFileSync(join(dir, 'out1.csv'));
    const out2 = readFileSync(join(dir, 'out2.csv'));
    expect(out1.equals(out2)).toBe(true); // CLI output is byte-stable

    // the CLI rows equal the dashboard's rows field-for-field
    const lines = out1.toString('utf-8').trim().split('\n').slice(1);
    expect(lines.length).toBe(shown.items.length);
    lines.forEach((line, i) => {
      const [itemId, cls, assignedBy, share] = line.split(',');
      const row = shown.items[i]!;
      expect(itemId).toBe(row.item_id);
      expect(cls).toBe(row.class);
      expect(assignedBy).toBe(row.assigned_by);
      expect(share).toBe(row.share);
    });
  }, 60000);
});

if (!hasBackend) {
  describe('live service round-trip (skipped)', () => {
    it('python backend not installed; integration suite skipped', () => {
      expect(true).toBe(true);
    });
  });
}

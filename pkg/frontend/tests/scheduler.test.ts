import { describe, expect, it, vi } from 'vitest';

import { debounce, LatestWins } from '../src/scheduler.js';

describe('debounce', () => {
  it('fires once with the last arguments after the wait', () => {
    vi.useFakeTimers();
    const calls: number[] = [];
    const fn = debounce((x: number) => calls.push(x), 250);
    fn(1);
    fn(2);
    vi.advanceTimersByTime(200);
    fn(3);
    expect(calls).toEqual([]);
    vi.advanceTimersByTime(250);
    expect(calls).toEqual([3]);
    vi.useRealTimers();
  });

  it('fires again for a later burst', () => {
    vi.useFakeTimers();
    const calls: number[] = [];
    const fn = debounce((x: number) => calls.push(x), 100);
    fn(1);
    vi.advanceTimersByTime(150);
    fn(2);
    vi.advanceTimersByTime(150);
    expect(calls).toEqual([1, 2]);
    vi.useRealTimers();
  });
});

describe('latest-wins gate', () => {
  it('drops replies from superseded requests', async () => {
    const gate = new LatestWins<string>();
    const applied: string[] = [];
    let releaseFirst!: (v: string) => void;
    const first = gate.run(
      () => new Promise<string>((resolve) => (releaseFirst = resolve)),
      (v) => applied.push(v),
    );
    const second = gate.run(
      () => Promise.resolve('second'),
      (v) => applied.push(v),
    );
    await second;
    releaseFirst('first');
    await first;
    expect(applied).toEqual(['second']);
  });

  it('routes only the newest error to the handler', async () => {
    const gate = new LatestWins<string>();
    const errors: string[] = [];
    let failFirst!: (e: Error) => void;
    const first = gate.run(
      () => new Promise<string>((_, reject) => (failFirst = reject)),
      () => {},
      (e) => errors.push((e as Error).message),
    );
    await gate.run(
      () => Promise.resolve('ok'),
      () => {},
      (e) => errors.push((e as Error).message),
    );
    failFirst(new Error('stale failure'));
    await first;
    expect(errors).toEqual([]);
  });
});

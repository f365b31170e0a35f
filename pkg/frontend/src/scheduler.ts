/**
 * Request pacing for interactive dragging: a trailing debounce so only
 * settled marker positions issue requests, and a latest-wins gate so at most
 * one simulate response is ever applied out of order.
 */

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
  timers: { set: typeof setTimeout; clear: typeof clearTimeout } = {
    set: setTimeout,
    clear: clearTimeout,
  },
): (...args: A) => void {
  let handle: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (handle !== undefined) timers.clear(handle);
    handle = timers.set(() => {
      handle = undefined;
      fn(...args);
    }, waitMs);
  };
}

/** Runs async tasks; results of superseded tasks are dropped, not applied. */
export class LatestWins<T> {
  private seq = 0;

  async run(task: () => Promise<T>, apply: (result: T) => void, onError?: (err: unknown) => void) {
    const ticket = ++this.seq;
    try {
      const result = await task();
      if (ticket === this.seq) apply(result);
    } catch (err) {
      if (ticket === this.seq && onError) onError(err);
    }
  }

  /** True when no newer task has started since `run` was entered. */
  get inFlightTicket(): number {
    return this.seq;
  }
}

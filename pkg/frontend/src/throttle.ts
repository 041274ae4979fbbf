/**
 * Trailing-edge rate limiter for pose messages.
 *
 * At most `maxPerSecond` sends; bursts beyond that collapse to the most
 * recent value, delivered when the interval reopens — the server always
 * ends up with the latest position, never a stale queue.
 */

export class Throttle<T> {
  private readonly intervalMs: number;
  private lastSent = -Infinity;
  private pending: T | undefined;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly send: (value: T) => void,
    maxPerSecond = 30,
    private readonly now: () => number = () => Date.now(),
  ) {
    this.intervalMs = 1000 / maxPerSecond;
  }

  submit(value: T): void {
    const t = this.now();
    if (t - this.lastSent >= this.intervalMs) {
      this.lastSent = t;
      this.send(value);
      return;
    }
    this.pending = value;
    if (this.timer === null) {
      const wait = this.intervalMs - (t - this.lastSent);
      this.timer = setTimeout(() => this.flush(), wait);
    }
  }

  /** Drop anything queued (e.g. on disconnect — never send stale poses). */
  clear(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.pending = undefined;
  }

  private flush(): void {
    this.timer = null;
    if (this.pending === undefined) return;
    const value = this.pending;
    this.pending = undefined;
    this.lastSent = this.now();
    this.send(value);
  }
}

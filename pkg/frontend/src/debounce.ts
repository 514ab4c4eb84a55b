/** Trailing-edge debounce: rapid calls collapse to one with the last args. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  delayMs: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = undefined;
      fn(...args);
    }, delayMs);
  };
}

/**
 * In-flight guard for async work: at most one job runs at a time, and while
 * one runs only the most recently submitted job is kept for afterwards.
 * Dragging a slider therefore fetches exactly once per settled position.
 */
export class LatestOnlyRunner {
  private running = false;
  private pending: (() => Promise<void>) | null = null;

  submit(job: () => Promise<void>): void {
    if (this.running) {
      this.pending = job;
      return;
    }
    this.running = true;
    void this.drain(job);
  }

  private async drain(job: () => Promise<void>): Promise<void> {
    let current: (() => Promise<void>) | null = job;
    while (current) {
      try {
        await current();
      } catch {
        // The job owns its error reporting; the queue must keep draining.
      }
      current = this.pending;
      this.pending = null;
    }
    this.running = false;
  }

  /** Resolves once no job is running or queued (test hook). */
  async idle(): Promise<void> {
    while (this.running) {
      await new Promise((resolve) => setTimeout(resolve, 1));
    }
  }
}

/**
 * Debounce plus monotone sequence numbers: rapid control changes collapse
 * into one request after the quiet interval, and a response is applied
 * only if no newer response has been applied (last write wins).
 */

export const DEBOUNCE_MS = 250;

export class ProjectionScheduler {
  private pending: ReturnType<typeof setTimeout> | null = null;
  private issued = 0;
  private applied = 0;

  constructor(private readonly delayMs: number = DEBOUNCE_MS) {}

  /** Schedule `fire`; any not-yet-fired earlier schedule is cancelled. */
  request(fire: (seq: number) => void): void {
    if (this.pending !== null) {
      clearTimeout(this.pending);
    }
    this.pending = setTimeout(() => {
      this.pending = null;
      this.issued += 1;
      fire(this.issued);
    }, this.delayMs);
  }

  /** True if the response for `seq` should be rendered. */
  shouldApply(seq: number): boolean {
    if (seq <= this.applied) {
      return false; // stale: a newer response already rendered
    }
    this.applied = seq;
    return true;
  }

  get lastIssued(): number {
    return this.issued;
  }
}

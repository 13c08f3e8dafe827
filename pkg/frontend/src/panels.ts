/**
 * Query panel state: last server response per panel, staleness, and
 * in-flight request bookkeeping.
 *
 * A panel never computes verdicts itself — it displays the server's
 * response body verbatim (renderJson is byte-equal to the HTTP body)
 * next to a structured view parsed for interaction. A response is
 * stale exactly when the graph has been edited after it arrived.
 * At most one in-flight request matters per panel: responses that
 * arrive for a superseded request revision are discarded.
 */

export interface PanelView<T> {
  readonly raw: string | null;
  readonly data: T | null;
  readonly error: string | null;
  readonly stale: boolean;
}

export class QueryPanel<T> {
  private raw_: string | null = null;
  private data_: T | null = null;
  private error_: string | null = null;
  private responseRevision = -1;
  private latestRequest = -1;

  /** Record that a request was sent for the given graph revision. */
  begin(revision: number): number {
    if (revision > this.latestRequest) this.latestRequest = revision;
    return revision;
  }

  /**
   * Accept a response body. Returns false (and changes nothing) when a
   * newer request has been issued since — out-of-order protection.
   */
  resolve(revision: number, rawBody: string, parsed: T): boolean {
    if (revision < this.latestRequest) return false;
    this.raw_ = rawBody;
    this.data_ = parsed;
    this.error_ = null;
    this.responseRevision = revision;
    return true;
  }

  /** Record a server/network failure; shown inline, never dropped. */
  fail(revision: number, message: string): boolean {
    if (revision < this.latestRequest) return false;
    this.error_ = message;
    this.responseRevision = revision;
    return true;
  }

  /** True iff the graph has been edited after this response arrived. */
  isStale(currentRevision: number): boolean {
    return this.raw_ !== null && currentRevision > this.responseRevision;
  }

  /** The displayed JSON: byte-equal to the server's response body. */
  renderJson(): string | null {
    return this.raw_;
  }

  view(currentRevision: number): PanelView<T> {
    return {
      raw: this.raw_,
      data: this.data_,
      error: this.error_,
      stale: this.isStale(currentRevision),
    };
  }
}

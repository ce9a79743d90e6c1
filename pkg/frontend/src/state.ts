/** View state and the request discipline for slider interaction.
 *
 * Dragging a slider may change parameters hundreds of times a second; the
 * gate issues at most one request per `minIntervalMs` (trailing call
 * included), keeps at most one in flight, and drops stale responses by
 * sequence number so the displayed frame always matches the most recent
 * completed request.
 */

export interface ViewState {
  z_s_m: number;
  m: number;
  filter_sigma_m: number;
  ref_correct: boolean;
  enhance_p: number;
  clip_pct: number;
}

export type Transport<P, R> = (params: P, seq: number) => Promise<R>;

export interface GateOptions {
  minIntervalMs?: number;
  now?: () => number;
  schedule?: (fn: () => void, delayMs: number) => unknown;
}

export class RequestGate<P, R> {
  private latest: P | null = null;
  private inFlight = false;
  private lastIssuedAt = -Infinity;
  private issuedSeq = 0;
  private displayedSeq = 0;
  private timerArmed = false;
  private readonly minInterval: number;
  private readonly now: () => number;
  private readonly scheduleFn: (fn: () => void, delayMs: number) => unknown;

  constructor(
    private transport: Transport<P, R>,
    private onResult: (result: R, seq: number) => void,
    private onError: (err: unknown) => void = () => undefined,
    options: GateOptions = {},
  ) {
    this.minInterval = options.minIntervalMs ?? 100;
    this.now = options.now ?? (() => Date.now());
    this.scheduleFn = options.schedule
      ?? ((fn, ms) => setTimeout(fn, ms));
  }

  /** Record the newest parameters and issue a request when allowed. */
  request(params: P): void {
    this.latest = params;
    this.pump();
  }

  private pump(): void {
    if (this.latest === null || this.inFlight) return;
    const wait = this.lastIssuedAt + this.minInterval - this.now();
    if (wait > 0) {
      if (!this.timerArmed) {
        this.timerArmed = true;
        this.scheduleFn(() => {
          this.timerArmed = false;
          this.pump();
        }, wait);
      }
      return;
    }
    const params = this.latest;
    this.latest = null;
    this.inFlight = true;
    this.lastIssuedAt = this.now();
    const seq = ++this.issuedSeq;
    this.transport(params, seq).then(
      (result) => {
        this.inFlight = false;
        if (seq > this.displayedSeq) {
          this.displayedSeq = seq;
          this.onResult(result, seq);
        }
        this.pump();
      },
      (err) => {
        this.inFlight = false;
        this.onError(err);
        this.pump();
      },
    );
  }
}

/** Map a click row in the focus-map pane back to a shear depth. */
export function rowToDepth(rowIndex: number, zsList: number[]): number {
  const i = Math.max(0, Math.min(zsList.length - 1, Math.round(rowIndex)));
  return zsList[i];
}

export function defaultViewState(zMin: number, zMax: number,
                                 lambda0: number): ViewState {
  return {
    z_s_m: 0.5 * (zMin + zMax),
    m: 1,
    filter_sigma_m: 2 * lambda0,
    ref_correct: false,
    enhance_p: 0,
    clip_pct: 99,
  };
}

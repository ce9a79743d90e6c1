import { describe, expect, it } from "vitest";

import { RequestGate, defaultViewState, rowToDepth } from "../src/state.js";

interface Pending<R> {
  params: number;
  seq: number;
  resolve: (r: R) => void;
  reject: (e: unknown) => void;
}

/** Deterministic harness: manual clock, manual timers, manual responses. */
function harness(minIntervalMs = 100) {
  let clock = 0;
  const timers: { at: number; fn: () => void }[] = [];
  const pending: Pending<string>[] = [];
  const displayed: string[] = [];
  const errors: unknown[] = [];
  const gate = new RequestGate<number, string>(
    (params, seq) =>
      new Promise<string>((resolve, reject) => {
        pending.push({ params, seq, resolve, reject });
      }),
    (result) => displayed.push(result),
    (err) => errors.push(err),
    {
      minIntervalMs,
      now: () => clock,
      schedule: (fn, delay) => timers.push({ at: clock + delay, fn }),
    },
  );
  const advance = (ms: number) => {
    clock += ms;
    for (const t of timers.splice(0)) {
      if (t.at <= clock) t.fn();
      else timers.push(t);
    }
  };
  return { gate, pending, displayed, errors, advance };
}

describe("RequestGate", () => {
  it("issues the first request immediately", () => {
    const h = harness();
    h.gate.request(1);
    expect(h.pending.length).toBe(1);
  });

  it("keeps at most one request in flight", () => {
    const h = harness();
    h.gate.request(1);
    h.gate.request(2);
    h.gate.request(3);
    expect(h.pending.length).toBe(1);
  });

  it("rate-limits a drag to the configured interval, last write wins", async () => {
    const h = harness(100);
    for (let i = 0; i < 50; i++) {
      h.gate.request(i);
      h.advance(2); // 500 parameter changes per second
    }
    // settle whatever got issued, letting trailing timers fire
    let issued = 0;
    for (let guard = 0; guard < 10; guard++) {
      for (const p of h.pending.splice(0)) {
        issued += 1;
        p.resolve(`r${p.params}`);
        await Promise.resolve(); // flush the then() microtask
      }
      h.advance(100);
      await Promise.resolve();
    }
    // ~100 ms of drag at a 100 ms interval: far fewer requests than changes
    expect(issued).toBeLessThanOrEqual(3);
    // the final displayed frame corresponds to the final slider value
    expect(h.displayed[h.displayed.length - 1]).toBe("r49");
  });

  it("displays monotonically and always ends on the newest result", async () => {
    const h = harness(0);
    const order: number[] = [];
    for (let i = 1; i <= 5; i++) {
      h.gate.request(i);
      h.advance(1);
      const p = h.pending.shift();
      if (p) {
        order.push(p.seq);
        p.resolve(`r${p.params}`);
        await Promise.resolve();
      }
    }
    h.advance(10);
    for (const p of h.pending.splice(0)) {
      order.push(p.seq);
      p.resolve(`r${p.params}`);
      await Promise.resolve();
    }
    // sequence numbers strictly increase, displays follow issue order, and
    // the last display matches the last requested parameters
    expect(order).toEqual([...order].sort((a, b) => a - b));
    expect(h.displayed[h.displayed.length - 1]).toBe("r5");
  });

  it("reports errors and keeps going", async () => {
    const h = harness(0);
    h.gate.request(1);
    h.pending.shift()!.reject(new Error("boom"));
    await Promise.resolve();
    h.advance(1);
    h.gate.request(2);
    expect(h.pending.length).toBe(1);
    h.pending.shift()!.resolve("ok");
    await Promise.resolve();
    expect(h.errors.length).toBe(1);
    expect(h.displayed).toEqual(["ok"]);
  });

  it("issues the trailing request after the interval", async () => {
    const h = harness(100);
    h.gate.request(1);
    h.pending.shift()!.resolve("a");
    await Promise.resolve();
    h.gate.request(2); // too soon: deferred
    expect(h.pending.length).toBe(0);
    h.advance(100);
    expect(h.pending.length).toBe(1);
    expect(h.pending[0].params).toBe(2);
  });
});

describe("rowToDepth", () => {
  const zs = [0.01, 0.02, 0.03, 0.04];

  it("maps a row index to its depth", () => {
    expect(rowToDepth(2, zs)).toBe(0.03);
  });

  it("rounds to the nearest row and clamps", () => {
    expect(rowToDepth(1.4, zs)).toBe(0.02);
    expect(rowToDepth(-3, zs)).toBe(0.01);
    expect(rowToDepth(99, zs)).toBe(0.04);
  });
});

describe("defaultViewState", () => {
  it("starts mid-range with the default filter scale", () => {
    const s = defaultViewState(0.01, 0.03, 0.0003);
    expect(s.z_s_m).toBeCloseTo(0.02);
    expect(s.filter_sigma_m).toBeCloseTo(0.0006);
    expect(s.m).toBe(1);
    expect(s.enhance_p).toBe(0);
  });
});

import { describe, expect, it } from "vitest";

import { pointerToHand, RateLimiter } from "../src/input";
import type { Viewport } from "../src/viewmodel";

const VP: Viewport = { widthPx: 720, heightPx: 540, pxPerMeter: 60, arenaHalfM: 4 };

describe("pointerToHand", () => {
  it("maps the arena center to the world origin", () => {
    const msg = pointerToHand({ xPx: 360, yPx: 270, tMs: 123.4 }, VP);
    expect(msg).toEqual({ type: "hand", t_ms: 123.4, pos: [0, 0, 0] });
  });

  it("applies the screen-to-world transform", () => {
    const msg = pointerToHand({ xPx: 360 + 60, yPx: 270 - 120, tMs: 0 }, VP);
    expect(msg.pos[0]).toBeCloseTo(1, 12);
    expect(msg.pos[1]).toBeCloseTo(2, 12);
    expect(msg.pos[2]).toBe(0);
  });

  it("clamps positions outside the arena to the boundary", () => {
    // far right of the canvas: x would be 6 m, arena caps it at 4
    const right = pointerToHand({ xPx: 720, yPx: 270, tMs: 0 }, VP);
    expect(right.pos[0]).toBe(4);
    // above the canvas entirely
    const above = pointerToHand({ xPx: 360, yPx: -600, tMs: 0 }, VP);
    expect(above.pos[1]).toBe(4);
    const corner = pointerToHand({ xPx: -100, yPx: 10_000, tMs: 0 }, VP);
    expect(corner.pos[0]).toBe(-4);
    expect(corner.pos[1]).toBe(-4);
  });
});

describe("RateLimiter", () => {
  it("passes at most 80 of 240 evenly spaced events per second", () => {
    const limiter = new RateLimiter(80);
    let sent = 0;
    for (let k = 0; k < 240; k++) {
      if (limiter.accept(k * (1000 / 240))) sent++;
    }
    expect(sent).toBeLessThanOrEqual(80);
    expect(sent).toBeGreaterThanOrEqual(75); // throttled, not starved
  });

  it("passes everything already at or below the limit", () => {
    const limiter = new RateLimiter(80);
    let sent = 0;
    for (let k = 0; k < 40; k++) {
      if (limiter.accept(k * 25)) sent++; // 40 Hz input
    }
    expect(sent).toBe(40);
  });

  it("accepts the first event regardless of timestamp", () => {
    expect(new RateLimiter(80).accept(0)).toBe(true);
  });
});

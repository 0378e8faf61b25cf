/** Pointer-to-hand plumbing: screen transform, arena clamp, rate limit. */

import type { HandMessage } from "./protocol.js";
import { screenToWorld, type Viewport } from "./viewmodel.js";

export interface PointerSample {
  xPx: number;
  yPx: number;
  tMs: number;
}

function clamp(v: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, v));
}

/** World-space hand message for a pointer position, clamped to the arena. */
export function pointerToHand(sample: PointerSample, vp: Viewport): HandMessage {
  const [wx, wy] = screenToWorld(sample.xPx, sample.yPx, vp);
  return {
    type: "hand",
    t_ms: sample.tMs,
    pos: [
      clamp(wx, -vp.arenaHalfM, vp.arenaHalfM),
      clamp(wy, -vp.arenaHalfM, vp.arenaHalfM),
      0,
    ],
  };
}

/** Passes at most maxPerSec events; the rest are dropped, not queued.
 *  Pointer devices fire far above the simulation tick rate, and the server
 *  keeps only the newest hand position per tick anyway.
 */
export class RateLimiter {
  private readonly minIntervalMs: number;
  private lastMs = -Infinity;

  constructor(maxPerSec = 80) {
    this.minIntervalMs = 1000 / maxPerSec;
  }

  accept(tMs: number): boolean {
    if (tMs - this.lastMs < this.minIntervalMs) return false;
    this.lastMs = tMs;
    return true;
  }
}

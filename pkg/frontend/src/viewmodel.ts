/** Pure view model: latest StateMessage + viewport in, drawable scene out.
 *
 * No simulation logic lives here. Every number is derived from the message;
 * the only client-side state is the staleness rule in acceptState.
 */

import {
  LINKS,
  type LinkId,
  type ParamName,
  type StateMessage,
  type TactileFrame,
  type Vec3,
} from "./protocol.js";

export interface Viewport {
  widthPx: number;
  heightPx: number;
  /** World-to-screen scale. */
  pxPerMeter: number;
  /** Hand input is clamped to the square [-arenaHalfM, +arenaHalfM]^2. */
  arenaHalfM: number;
}

export interface ScreenPoint {
  x: number;
  y: number;
}

/** Top-down view: canvas center is the world origin, +x right, +y up. */
export function worldToScreen(p: Vec3, vp: Viewport): ScreenPoint {
  return {
    x: vp.widthPx / 2 + p[0] * vp.pxPerMeter,
    y: vp.heightPx / 2 - p[1] * vp.pxPerMeter,
  };
}

export function screenToWorld(x: number, y: number, vp: Viewport): Vec3 {
  return [
    (x - vp.widthPx / 2) / vp.pxPerMeter,
    (vp.heightPx / 2 - y) / vp.pxPerMeter,
    0,
  ];
}

// -- glove ------------------------------------------------------------

export type FingerLevel = "OFF" | "LOW" | "MID" | "HIGH";

/** Grayscale fills, darker = stronger vibration. Four distinct values. */
export const LEVEL_FILLS: Record<FingerLevel, string> = {
  OFF: "#ffffff",
  LOW: "#b8b8b8",
  MID: "#6e6e6e",
  HIGH: "#1f1f1f",
};

export function fingerLevel(freqHz: number): FingerLevel {
  if (freqHz <= 0) return "OFF";
  if (freqHz < 200) return "LOW";
  if (freqHz < 250) return "MID";
  return "HIGH";
}

export interface GloveFinger {
  freqHz: number;
  level: FingerLevel;
  fill: string;
}

/** Exactly the last received frame, no interpolation; null means silent. */
export function gloveFromFrame(frame: TactileFrame | null): GloveFinger[] {
  const fingers = frame ? frame.fingers : [0, 0, 0, 0, 0];
  return fingers.map((f) => {
    const level = fingerLevel(f);
    return { freqHz: f, level, fill: LEVEL_FILLS[level] };
  });
}

// -- arena ------------------------------------------------------------

export interface DroneMarker {
  /** 1-based vehicle id as shown on screen. */
  id: number;
  x: number;
  y: number;
  goalX: number;
  goalY: number;
  altitudeM: number;
}

export interface LinkLine {
  id: LinkId;
  from: ScreenPoint;
  to: ScreenPoint;
  /** |x_imp| / limit, clamped to [0, 1]. */
  load: number;
  color: string;
}

export interface HandCursor {
  x: number;
  y: number;
  altitudeM: number;
  speedMps: number;
}

export interface StatusStrip {
  tick: number;
  tS: number;
  paused: boolean;
  spreadRatio: number;
  shapeClass: string;
  rateClass: string;
  pattern: string;
}

export interface ViewModel {
  tick: number;
  hand: HandCursor;
  drones: DroneMarker[];
  links: LinkLine[];
  status: StatusStrip;
  glove: GloveFinger[];
  params: Record<ParamName, number>;
}

function norm3(v: Vec3): number {
  return Math.hypot(v[0], v[1], v[2]);
}

function lerpChannel(a: number, b: number, t: number): number {
  return Math.round(a + (b - a) * t);
}

/** Calm gray at zero load, saturated red at the clamp. */
export function linkColor(load: number): string {
  const t = Math.min(1, Math.max(0, load));
  const r = lerpChannel(0x9c, 0xdc, t);
  const g = lerpChannel(0xa3, 0x26, t);
  const b = lerpChannel(0xaf, 0x26, t);
  return `rgb(${r},${g},${b})`;
}

/** (from, to) endpoints of each link as indices into [hand, v1..v4]. */
const LINK_ENDPOINTS: Record<LinkId, [number, number]> = {
  hum1: [0, 1],
  d12: [1, 2],
  d13: [1, 3],
  d24: [2, 4],
  d34: [3, 4],
};

/** Keep the newer of two states; an older tick never replaces a newer one.
 *  Equal ticks pass through so paused heartbeats refresh the view.
 */
export function acceptState(prev: StateMessage | null, next: StateMessage): StateMessage {
  if (prev !== null && next.tick < prev.tick) return prev;
  return next;
}

export function buildViewModel(state: StateMessage, vp: Viewport): ViewModel {
  const handPt = worldToScreen(state.hand.pos, vp);
  const anchors: ScreenPoint[] = [handPt];
  const drones: DroneMarker[] = state.vehicles.map((v, i) => {
    const pt = worldToScreen(v.pos, vp);
    const goal = worldToScreen(v.goal, vp);
    anchors.push(pt);
    return {
      id: i + 1,
      x: pt.x,
      y: pt.y,
      goalX: goal.x,
      goalY: goal.y,
      altitudeM: v.pos[2],
    };
  });
  const limit = state.params.x_imp_limit;
  const links: LinkLine[] = LINKS.map((id) => {
    const [a, b] = LINK_ENDPOINTS[id];
    const load = limit > 0 ? Math.min(1, norm3(state.links[id]) / limit) : 0;
    return {
      id,
      from: anchors[a]!,
      to: anchors[b]!,
      load,
      color: linkColor(load),
    };
  });
  return {
    tick: state.tick,
    hand: {
      x: handPt.x,
      y: handPt.y,
      altitudeM: state.hand.pos[2],
      speedMps: norm3(state.hand.vel),
    },
    drones,
    links,
    status: {
      tick: state.tick,
      tS: state.t_s,
      paused: state.paused,
      spreadRatio: state.spread_ratio,
      shapeClass: state.shape_class,
      rateClass: state.rate_class,
      pattern: state.pattern,
    },
    glove: gloveFromFrame(state.frame),
    params: state.params,
  };
}

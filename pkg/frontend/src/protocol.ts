/** Wire types for the live session socket, mirroring docs/protocol.md.
 *
 * The client never computes simulation state; these types exist so the
 * view layer can trust the shape of what it renders.
 */

export type Vec3 = [number, number, number];

export const LINKS = ["hum1", "d12", "d13", "d24", "d34"] as const;
export type LinkId = (typeof LINKS)[number];

export const PARAM_NAMES = [
  "M_d", "D_d", "K_d", "K_v", "x_imp_limit", "W",
  "L_1", "L_2", "L_3", "L_4",
] as const;
export type ParamName = (typeof PARAM_NAMES)[number];

export interface TactileFrame {
  wave_id: number;
  pattern: string;
  frame_index: number;
  t_start_ms: number;
  duration_ms: number;
  /** Drive frequency in Hz per finger, thumb first; 0 = idle. */
  fingers: number[];
}

export interface StateMessage {
  type: "state";
  tick: number;
  t_s: number;
  paused: boolean;
  hand: { pos: Vec3; vel: Vec3 };
  vehicles: { pos: Vec3; goal: Vec3 }[];
  links: Record<LinkId, Vec3>;
  spread_ratio: number;
  shape_class: string;
  rate_class: string;
  pattern: string;
  frame: TactileFrame | null;
  params: Record<ParamName, number>;
}

export interface TactileMessage extends TactileFrame {
  type: "tactile";
}

export interface ErrorMessage {
  type: "error";
  reason: string;
  param?: string;
}

export type ServerMessage = StateMessage | TactileMessage | ErrorMessage;

export interface HandMessage {
  type: "hand";
  t_ms: number;
  pos: Vec3;
}

export interface CommandMessage {
  type: "command";
  name: "reset" | "pause" | "resume" | "set_param";
  param?: ParamName;
  value?: number;
}

export type ClientMessage = HandMessage | CommandMessage;

function isVec3(v: unknown): v is Vec3 {
  return Array.isArray(v) && v.length === 3 && v.every((n) => typeof n === "number" && Number.isFinite(n));
}

function checkFrame(f: unknown): TactileFrame {
  const o = f as Record<string, unknown>;
  if (
    typeof o !== "object" || o === null ||
    typeof o.wave_id !== "number" ||
    typeof o.pattern !== "string" ||
    typeof o.frame_index !== "number" ||
    typeof o.t_start_ms !== "number" ||
    typeof o.duration_ms !== "number" ||
    !Array.isArray(o.fingers) || o.fingers.length !== 5 ||
    !o.fingers.every((n) => typeof n === "number" && n >= 0)
  ) {
    throw new Error("malformed tactile frame");
  }
  return o as unknown as TactileFrame;
}

/** Parse one server frame; throws on anything that is not a documented message. */
export function parseServerMessage(data: string): ServerMessage {
  let obj: unknown;
  try {
    obj = JSON.parse(data);
  } catch {
    throw new Error("not valid JSON");
  }
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new Error("message must be a JSON object");
  }
  const m = obj as Record<string, unknown>;
  switch (m.type) {
    case "state": {
      if (
        typeof m.tick !== "number" ||
        typeof m.t_s !== "number" ||
        typeof m.paused !== "boolean" ||
        typeof m.hand !== "object" || m.hand === null ||
        !isVec3((m.hand as Record<string, unknown>).pos) ||
        !isVec3((m.hand as Record<string, unknown>).vel) ||
        !Array.isArray(m.vehicles) || m.vehicles.length !== 4 ||
        typeof m.links !== "object" || m.links === null ||
        typeof m.spread_ratio !== "number" ||
        typeof m.shape_class !== "string" ||
        typeof m.rate_class !== "string" ||
        typeof m.pattern !== "string" ||
        typeof m.params !== "object" || m.params === null
      ) {
        throw new Error("malformed state message");
      }
      for (const v of m.vehicles as unknown[]) {
        const o = v as Record<string, unknown>;
        if (typeof o !== "object" || o === null || !isVec3(o.pos) || !isVec3(o.goal)) {
          throw new Error("malformed vehicle entry");
        }
      }
      for (const link of LINKS) {
        if (!isVec3((m.links as Record<string, unknown>)[link])) {
          throw new Error(`missing link ${link}`);
        }
      }
      for (const name of PARAM_NAMES) {
        if (typeof (m.params as Record<string, unknown>)[name] !== "number") {
          throw new Error(`missing param ${name}`);
        }
      }
      if (m.frame !== null && m.frame !== undefined) checkFrame(m.frame);
      return m as unknown as StateMessage;
    }
    case "tactile": {
      checkFrame(m);
      return m as unknown as TactileMessage;
    }
    case "error": {
      if (typeof m.reason !== "string") throw new Error("malformed error message");
      return m as unknown as ErrorMessage;
    }
    default:
      throw new Error(`unknown message type ${String(m.type)}`);
  }
}

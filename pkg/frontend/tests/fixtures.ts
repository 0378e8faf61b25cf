/** Wire fixtures captured verbatim from the reference server encoder. */

import type { StateMessage, TactileFrame } from "../src/protocol";

/** A formation converged on a stationary hand at the origin (800 ticks in). */
export const CONVERGED_JSON =
  '{"type":"state","tick":800,"t_s":10.0,"paused":false,' +
  '"hand":{"pos":[0.0,0.0,0.0],"vel":[0.0,0.0,0.0]},' +
  '"vehicles":[{"pos":[-0.5,0.0,0.0],"goal":[-0.5,0.0,0.0]},' +
  '{"pos":[-1.0,0.5,0.0],"goal":[-1.0,0.5,0.0]},' +
  '{"pos":[-1.0,-0.5,0.0],"goal":[-1.0,-0.5,0.0]},' +
  '{"pos":[-1.5,0.0,0.0],"goal":[-1.5,0.0,0.0]}],' +
  '"links":{"hum1":[0.0,0.0,0.0],"d12":[0.0,0.0,0.0],"d13":[0.0,0.0,0.0],' +
  '"d24":[0.0,0.0,0.0],"d34":[0.0,0.0,0.0]},' +
  '"spread_ratio":1.0,"shape_class":"regular","rate_class":"constant",' +
  '"pattern":"NONE","frame":null,' +
  '"params":{"M_d":1.9,"D_d":12.6,"K_d":21.0,"K_v":-7.0,"x_imp_limit":0.25,' +
  '"W":0.5,"L_1":0.5,"L_2":0.5,"L_3":0.5,"L_4":0.5}}';

/** Third step of the extended-increasing wave: side fingers at 250 Hz. */
export const EI_STEP3_FRAME: TactileFrame = {
  wave_id: 7,
  pattern: "EI",
  frame_index: 2,
  t_start_ms: 2800.0,
  duration_ms: 300,
  fingers: [250, 0, 0, 0, 250],
};

export function convergedState(): StateMessage {
  return JSON.parse(CONVERGED_JSON) as StateMessage;
}

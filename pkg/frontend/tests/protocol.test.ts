import { describe, expect, it } from "vitest";

import { parseServerMessage } from "../src/protocol";
import { CONVERGED_JSON, EI_STEP3_FRAME } from "./fixtures";

describe("parseServerMessage", () => {
  it("parses a reference state message", () => {
    const msg = parseServerMessage(CONVERGED_JSON);
    if (msg.type !== "state") throw new Error("expected state");
    expect(msg.tick).toBe(800);
    expect(msg.vehicles).toHaveLength(4);
    expect(msg.frame).toBeNull();
    expect(msg.params.K_v).toBe(-7.0);
  });

  it("parses a state carrying a tactile frame", () => {
    const obj = JSON.parse(CONVERGED_JSON);
    obj.frame = EI_STEP3_FRAME;
    const msg = parseServerMessage(JSON.stringify(obj));
    if (msg.type !== "state") throw new Error("expected state");
    expect(msg.frame?.fingers).toEqual([250, 0, 0, 0, 250]);
  });

  it("parses tactile and error messages", () => {
    const tactile = parseServerMessage(JSON.stringify({ type: "tactile", ...EI_STEP3_FRAME }));
    expect(tactile.type).toBe("tactile");
    const error = parseServerMessage('{"type":"error","reason":"mass must be > 0","param":"M_d"}');
    if (error.type !== "error") throw new Error("expected error");
    expect(error.param).toBe("M_d");
  });

  it.each([
    "not json at all",
    "[1,2,3]",
    '"just a string"',
    '{"type":"nope"}',
    '{"type":"state","tick":1}',
    '{"type":"tactile","fingers":[1,2,3]}',
    '{"type":"error"}',
  ])("rejects %s", (raw) => {
    expect(() => parseServerMessage(raw)).toThrow();
  });

  it("rejects a state whose link table is incomplete", () => {
    const obj = JSON.parse(CONVERGED_JSON);
    delete obj.links.d34;
    expect(() => parseServerMessage(JSON.stringify(obj))).toThrow(/d34/);
  });

  it("rejects a state with a malformed embedded frame", () => {
    const obj = JSON.parse(CONVERGED_JSON);
    obj.frame = { ...EI_STEP3_FRAME, fingers: [250, 0, 0, 0] };
    expect(() => parseServerMessage(JSON.stringify(obj))).toThrow();
  });
});

"""Live session host: the world loop on a fixed cadence, clients on sockets.

One asyncio task owns the simulation. Network ingress lands in an inbox
drained at tick boundaries (commands in arrival order, newest hand position
wins), egress hands immutable snapshots to per-client sender tasks. A slow
or stalled client only ever loses intermediate state frames; it cannot slow
the loop down.

Wire format: one JSON object per message, UTF-8 text frames, all floats
quantized to 6 significant digits. Schemas live in docs/protocol.md.
"""

from __future__ import annotations

import asyncio
import json
import math
from collections import deque
from dataclasses import dataclass, replace

import websockets

from .errors import ParameterError, ProtocolError
from .formation import LINKS
from .scenario import ScenarioConfig, hand_position
from .tactile import TactileScheduler, frame_payload
from .world import WorldState, spawn_world, world_tick

COMMANDS = ("reset", "pause", "resume", "set_param")

# Wire names for the tunables a client may adjust live. Everything else in
# WorldParams is fixed for the session.
PARAM_NAMES = ("M_d", "D_d", "K_d", "K_v", "x_imp_limit", "W",
               "L_1", "L_2", "L_3", "L_4")


def _q(x: float) -> float:
    return float(f"{x:.6g}")


def _qvec(vec) -> list:
    return [_q(float(v)) for v in vec]


def state_payload(world: WorldState, frame=None, pattern="NONE",
                  paused=False) -> dict:
    """Canonical state snapshot; key order here is the documented wire order.

    `pattern` is the id of the wave owning the current tactile period; it
    outlives the individual frames, so it is carried separately from the
    (possibly absent) sounding frame.
    """
    p = world.params
    return {
        "type": "state",
        "tick": world.tick,
        "t_s": _q(world.time),
        "paused": bool(paused),
        "hand": {"pos": _qvec(world.hand_pos), "vel": _qvec(world.hand_vel)},
        "vehicles": [
            {"pos": _qvec(v.pos), "goal": _qvec(g)}
            for v, g in zip(world.vehicles, world.goals)
        ],
        "links": {link: _qvec(world.corrections[link]) for link in LINKS},
        "spread_ratio": _q(world.metrics.spread_ratio),
        "shape_class": world.metrics.shape_class,
        "rate_class": world.metrics.rate_class,
        "pattern": pattern,
        "frame": frame_payload(frame) if frame is not None else None,
        "params": {
            "M_d": _q(p.impedance.mass),
            "D_d": _q(p.impedance.damping),
            "K_d": _q(p.impedance.stiffness),
            "K_v": _q(p.velocity_gain),
            "x_imp_limit": _q(p.correction_limit),
            "W": _q(p.formation.width),
            "L_1": _q(p.formation.lengths[0]),
            "L_2": _q(p.formation.lengths[1]),
            "L_3": _q(p.formation.lengths[2]),
            "L_4": _q(p.formation.lengths[3]),
        },
    }


def encode_state(world: WorldState, frame=None, pattern="NONE",
                 paused=False) -> str:
    return json.dumps(state_payload(world, frame, pattern, paused),
                      separators=(",", ":"))


def decode_state(data) -> dict:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return json.loads(data)


def encode_tactile(frame) -> str:
    payload = {"type": "tactile"}
    payload.update(frame_payload(frame))
    return json.dumps(payload, separators=(",", ":"))


def encode_error(reason: str, **extra) -> str:
    payload = {"type": "error", "reason": reason}
    payload.update(extra)
    return json.dumps(payload, separators=(",", ":"))


@dataclass(frozen=True)
class InputMessage:
    kind: str                  # "hand" | "reset" | "pause" | "resume" | "set_param"
    t_ms: float = 0.0
    pos: tuple = ()
    param: str = ""
    value: float = 0.0


def _require_number(obj, key):
    v = obj.get(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ProtocolError(f"{key} must be a number")
    if not math.isfinite(v):
        raise ProtocolError(f"{key} must be finite")
    return float(v)


def decode_input(data) -> InputMessage:
    """Parse one client message; malformed input raises, state is untouched."""
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"not valid JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise ProtocolError("message must be a JSON object")
    kind = obj.get("type")
    if kind == "hand":
        t_ms = _require_number(obj, "t_ms")
        pos = obj.get("pos")
        if not (isinstance(pos, list) and len(pos) == 3):
            raise ProtocolError("pos must be a 3-number list")
        vals = []
        for v in pos:
            if isinstance(v, bool) or not isinstance(v, (int, float)) \
                    or not math.isfinite(v):
                raise ProtocolError("pos must be a 3-number list of finite values")
            vals.append(float(v))
        return InputMessage(kind="hand", t_ms=t_ms, pos=tuple(vals))
    if kind == "command":
        name = obj.get("name")
        if name not in COMMANDS:
            raise ProtocolError(f"unknown command {name!r}")
        if name == "set_param":
            param = obj.get("param")
            if param not in PARAM_NAMES:
                raise ProtocolError(f"unknown parameter {param!r}")
            value = _require_number(obj, "value")
            return InputMessage(kind="set_param", param=param, value=value)
        return InputMessage(kind=name)
    raise ProtocolError(f"unknown message type {kind!r}")


def apply_param(params, name: str, value: float):
    """New WorldParams with one tunable changed; validation may reject it."""
    if name == "M_d":
        return replace(params, impedance=replace(params.impedance, mass=value))
    if name == "D_d":
        return replace(params, impedance=replace(params.impedance, damping=value))
    if name == "K_d":
        return replace(params, impedance=replace(params.impedance, stiffness=value))
    if name == "K_v":
        return replace(params, velocity_gain=value)
    if name == "x_imp_limit":
        return replace(params, correction_limit=value)
    if name == "W":
        return replace(params, formation=replace(params.formation, width=value))
    if name.startswith("L_"):
        index = int(name[2:]) - 1
        lengths = list(params.formation.lengths)
        lengths[index] = value
        return replace(params,
                       formation=replace(params.formation, lengths=tuple(lengths)))
    raise ParameterError(f"unknown parameter {name!r}")


class _Client:
    """Outbound side of one connection: a latest-state slot plus a bounded
    frame queue, drained by a dedicated sender task."""

    def __init__(self, conn):
        self.conn = conn
        self.state = None
        self.frames = deque(maxlen=64)
        self.wake = asyncio.Event()

    def offer_state(self, message: str):
        self.state = message
        self.wake.set()

    def offer_frame(self, message: str):
        self.frames.append(message)
        self.wake.set()

    async def sender(self):
        try:
            while True:
                await self.wake.wait()
                self.wake.clear()
                while self.frames:
                    await self.conn.send(self.frames.popleft())
                if self.state is not None:
                    message, self.state = self.state, None
                    await self.conn.send(message)
        except websockets.exceptions.ConnectionClosed:
            pass


class SimServer:
    """Authoritative world loop plus a websocket endpoint."""

    def __init__(self, config: ScenarioConfig, rate_div: int = 2):
        if rate_div < 1:
            raise ParameterError(f"rate_div must be >= 1, got {rate_div}")
        self.config = config
        self.rate_div = rate_div
        self.world = spawn_world(config.world,
                                 hand_position(config.waypoints, 0.0))
        self.scheduler = TactileScheduler()
        self.paused = False
        self._inbox = deque()
        self._clients = set()
        self._hand_holder = None
        self._running = False
        self._slot = 0

    # -- input ---------------------------------------------------------

    def submit(self, client, message: InputMessage):
        """Queue one decoded message; applied at the next tick boundary."""
        if message.kind == "hand":
            if self._hand_holder is None:
                self._hand_holder = client
            if self._hand_holder is not client:
                if client is not None:
                    client.offer_frame(encode_error("hand role is held"))
                return
        self._inbox.append((client, message))

    def _drain_inbox(self):
        hand = None
        while self._inbox:
            client, message = self._inbox.popleft()
            if message.kind == "hand":
                hand = message.pos
            elif message.kind == "reset":
                self._reset()
            elif message.kind == "pause":
                self.paused = True
            elif message.kind == "resume":
                self.paused = False
            elif message.kind == "set_param":
                self._set_param(client, message.param, message.value)
        return hand

    def _reset(self):
        # Fresh world, same tuned parameters, hand role untouched. The tick
        # counter never rewinds, so stream consumers see time continue.
        fresh = spawn_world(self.world.params,
                            hand_position(self.config.waypoints, 0.0))
        self.world = replace(fresh, tick=self.world.tick)

    def _set_param(self, client, name: str, value: float):
        try:
            params = apply_param(self.world.params, name, value)
            self.world = self.world.with_params(params)
        except ParameterError as exc:
            if client is not None:
                client.offer_frame(encode_error(str(exc), param=name))

    # -- the loop ------------------------------------------------------

    def step(self):
        """One tick boundary: drain input, advance (unless paused), fan out."""
        hand = self._drain_inbox()
        if not self.paused:
            self.world = world_tick(self.world, hand)
            due = self.scheduler.advance(self.world.time * 1000.0,
                                         self.world.metrics.shape_class,
                                         self.world.metrics.rate_class)
            for timed in due:
                message = encode_tactile(timed)
                for c in self._clients:
                    c.offer_frame(message)
        self._slot += 1
        if self._slot % self.rate_div == 0:
            message = encode_state(self.world, self.scheduler.current_frame(),
                                   self.scheduler.current_pattern,
                                   paused=self.paused)
            for c in self._clients:
                c.offer_state(message)

    async def _loop(self):
        loop = asyncio.get_running_loop()
        period = self.world.params.period
        deadline = loop.time() + period
        while self._running:
            delay = deadline - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            deadline += period
            self.step()

    # -- network -------------------------------------------------------

    async def _handler(self, conn):
        client = _Client(conn)
        self._clients.add(client)
        sender = asyncio.create_task(client.sender())
        client.offer_state(encode_state(self.world,
                                        self.scheduler.current_frame(),
                                        self.scheduler.current_pattern,
                                        paused=self.paused))
        try:
            async for raw in conn:
                try:
                    message = decode_input(raw)
                except ProtocolError as exc:
                    client.offer_frame(encode_error(str(exc)))
                    continue
                self.submit(client, message)
        finally:
            self._clients.discard(client)
            if self._hand_holder is client:
                self._hand_holder = None
            sender.cancel()

    async def run(self, host="127.0.0.1", port=8765, ready=None):
        self._running = True
        async with websockets.serve(self._handler, host, port) as server:
            if ready is not None and not ready.done():
                bound = server.sockets[0].getsockname()[1]
                ready.set_result(bound)
            await self._loop()

    def stop(self):
        self._running = False


async def serve_scenario(config: ScenarioConfig, port: int = 8765,
                         rate_div: int = 2, host: str = "127.0.0.1",
                         ready=None):
    server = SimServer(config, rate_div=rate_div)
    await server.run(host=host, port=port, ready=ready)

import asyncio
import json

import numpy as np
import pytest
import websockets

from swarmlink.errors import ParameterError, ProtocolError
from swarmlink.formation import LINKS, nominal_layout
from swarmlink.scenario import hand_position, load_scenario
from swarmlink.server import (InputMessage, SimServer, apply_param,
                              decode_input, decode_state, encode_state,
                              state_payload)
from swarmlink.tactile import TimedFrame
from swarmlink.world import spawn_world, world_tick

CRUISE = """
duration_s = 10.0

[[hand.waypoints]]
t_s = 0.0
pos_m = [0.0, 0.0, 0.0]

[[hand.waypoints]]
t_s = 1.0
pos_m = [0.0, 0.0, 0.0]
interp = "hold"

[[hand.waypoints]]
t_s = 4.0
pos_m = [4.5, 0.0, 0.0]
interp = "linear"

[[hand.waypoints]]
t_s = 10.0
pos_m = [4.5, 0.0, 0.0]
interp = "hold"
"""


def _busy_world(ticks=200):
    config = load_scenario(CRUISE)
    world = spawn_world(config.world, hand_position(config.waypoints, 0.0))
    for k in range(1, ticks + 1):
        world = world_tick(world,
                           hand_position(config.waypoints,
                                         k * config.world.period))
    return world


# --- encoding ---


def test_converged_state_has_zero_link_corrections():
    world = spawn_world(load_scenario("").world)
    payload = state_payload(world)
    for link in LINKS:
        assert payload["links"][link] == [0.0, 0.0, 0.0]
    assert payload["type"] == "state"
    assert payload["tick"] == 0
    assert payload["pattern"] == "NONE"
    assert payload["frame"] is None


def test_state_field_order_is_fixed():
    payload = state_payload(spawn_world(load_scenario("").world))
    assert list(payload.keys()) == [
        "type", "tick", "t_s", "paused", "hand", "vehicles", "links",
        "spread_ratio", "shape_class", "rate_class", "pattern", "frame",
        "params",
    ]
    assert list(payload["params"].keys()) == [
        "M_d", "D_d", "K_d", "K_v", "x_imp_limit", "W",
        "L_1", "L_2", "L_3", "L_4",
    ]


def test_encode_decode_round_trip_identity():
    world = _busy_world(200)
    frame = TimedFrame(wave_id=3, pattern="EI", frame_index=0,
                       t_start_ms=4200.0, duration_ms=200,
                       fingers=(0, 150, 0, 150, 0))
    payload = state_payload(world, frame, "EI")
    assert decode_state(encode_state(world, frame, "EI")) == payload


def test_messages_stay_under_the_size_bound():
    config = load_scenario(CRUISE)
    world = spawn_world(config.world, hand_position(config.waypoints, 0.0))
    worst = len(encode_state(world).encode("utf-8"))
    for k in range(1, 481):
        world = world_tick(world,
                           hand_position(config.waypoints,
                                         k * config.world.period))
        if k % 8 == 0:
            worst = max(worst,
                        len(encode_state(world).encode("utf-8")))
    assert worst < 4096


def test_quantization_is_six_significant_digits():
    world = _busy_world(150)
    payload = state_payload(world)
    x = payload["vehicles"][0]["pos"][0]
    assert x == float(f"{x:.6g}")
    assert abs(x - world.vehicles[0].pos[0]) <= abs(x) * 1e-5 + 1e-12


# --- input decoding ---


def test_decode_hand_message():
    message = decode_input('{"type":"hand","t_ms":125.0,"pos":[0.1,0.2,0.3]}')
    assert message == InputMessage(kind="hand", t_ms=125.0,
                                   pos=(0.1, 0.2, 0.3))


def test_decode_commands():
    assert decode_input('{"type":"command","name":"reset"}').kind == "reset"
    assert decode_input('{"type":"command","name":"pause"}').kind == "pause"
    assert decode_input('{"type":"command","name":"resume"}').kind == "resume"
    message = decode_input(
        '{"type":"command","name":"set_param","param":"K_v","value":-7}')
    assert message == InputMessage(kind="set_param", param="K_v", value=-7.0)


@pytest.mark.parametrize("raw", [
    "not json",
    "[1,2,3]",
    '{"type":"dance"}',
    '{"type":"hand","t_ms":1.0,"pos":[1,2]}',
    '{"type":"hand","t_ms":1.0,"pos":[1,2,"x"]}',
    '{"type":"hand","pos":[1,2,3]}',
    '{"type":"hand","t_ms":1.0,"pos":[1,2,1e999]}',
    '{"type":"command","name":"set_param","param":"mass","value":1}',
    '{"type":"command","name":"set_param","param":"K_v","value":"big"}',
])
def test_malformed_input_raises_protocol_error(raw):
    with pytest.raises(ProtocolError):
        decode_input(raw)


def test_out_of_range_value_decodes_but_fails_to_apply():
    message = decode_input(
        '{"type":"command","name":"set_param","param":"M_d","value":-1}')
    assert message.kind == "set_param"
    params = load_scenario("").world
    with pytest.raises(ParameterError):
        apply_param(params, message.param, message.value)


def test_apply_param_covers_every_wire_name():
    params = load_scenario("").world
    assert apply_param(params, "M_d", 2.5).impedance.mass == 2.5
    assert apply_param(params, "D_d", 14.0).impedance.damping == 14.0
    assert apply_param(params, "K_d", 19.6).impedance.stiffness == 19.6
    assert apply_param(params, "K_v", -5.0).velocity_gain == -5.0
    assert apply_param(params, "x_imp_limit", 0.3).correction_limit == 0.3
    assert apply_param(params, "W", 0.6).formation.width == 0.6
    for i in range(1, 5):
        updated = apply_param(params, f"L_{i}", 0.7)
        assert updated.formation.lengths[i - 1] == 0.7
    # untouched fields carry over
    assert apply_param(params, "W", 0.6).impedance.mass == params.impedance.mass


# --- offline stepping ---


def _server(rate_div=2):
    return SimServer(load_scenario(""), rate_div=rate_div)


def test_latest_hand_position_wins():
    server = _server()
    server.submit(None, InputMessage(kind="hand", t_ms=1.0, pos=(0.5, 0, 0)))
    server.submit(None, InputMessage(kind="hand", t_ms=2.0, pos=(0.9, 0, 0)))
    server.step()
    assert server.world.hand_pos == pytest.approx([0.9, 0.0, 0.0])
    assert server.world.tick == 1


def test_pause_freezes_tick_and_resume_continues():
    server = _server()
    server.step()
    server.submit(None, InputMessage(kind="pause"))
    server.step()
    server.step()
    assert server.world.tick == 1
    assert server.paused
    server.submit(None, InputMessage(kind="resume"))
    server.step()
    assert server.world.tick == 2


def test_commands_apply_in_arrival_order():
    server = _server()
    server.submit(None, InputMessage(kind="pause"))
    server.submit(None, InputMessage(kind="resume"))
    server.step()
    assert not server.paused
    assert server.world.tick == 1


def test_reset_restores_state_without_rewinding_tick():
    server = _server()
    for k in range(40):
        server.submit(None, InputMessage(kind="hand", t_ms=float(k),
                                         pos=(0.02 * (k + 1), 0.0, 0.0)))
        server.step()
    moved = max(abs(float(v))
                for link in LINKS for v in server.world.corrections[link])
    assert moved > 1e-4
    tick_before = server.world.tick
    server.submit(None, InputMessage(kind="reset"))
    server.step()
    assert server.world.tick == tick_before + 1
    for link in LINKS:
        assert server.world.corrections[link] == pytest.approx([0, 0, 0])
    layout = nominal_layout(server.world.params.formation, np.zeros(3),
                            server.world.heading)
    for vehicle, home in zip(server.world.vehicles, layout):
        assert vehicle.pos == pytest.approx(home)


def test_set_param_applies_at_tick_boundary():
    server = _server()
    server.submit(None, InputMessage(kind="set_param", param="K_v",
                                     value=-5.0))
    server.step()
    assert server.world.params.velocity_gain == -5.0


def test_invalid_set_param_leaves_state_untouched():
    server = _server()
    before = server.world.params
    server.submit(None, InputMessage(kind="set_param", param="M_d",
                                     value=-1.0))
    server.step()
    assert server.world.params == before
    assert server.world.tick == 1


def test_impedance_retune_keeps_link_states():
    server = _server()
    for k in range(40):
        server.submit(None, InputMessage(kind="hand", t_ms=float(k),
                                         pos=(0.02 * (k + 1), 0.0, 0.0)))
        server.step()
    disp_before = dict(server.world.corrections)
    server.submit(None, InputMessage(kind="set_param", param="K_d",
                                     value=30.0))
    server.submit(None, InputMessage(kind="pause"))
    server.step()
    assert server.world.params.impedance.stiffness == 30.0
    for link in LINKS:
        assert server.world.corrections[link] == pytest.approx(
            disp_before[link])


# --- live socket ---


def _run_live(test_body, rate_div=2):
    async def main():
        server = SimServer(load_scenario(""), rate_div=rate_div)
        ready = asyncio.get_running_loop().create_future()
        task = asyncio.create_task(server.run(host="127.0.0.1", port=0,
                                              ready=ready))
        port = await asyncio.wait_for(ready, timeout=5)
        try:
            await asyncio.wait_for(test_body(server, port), timeout=30)
        finally:
            server.stop()
            await asyncio.wait_for(task, timeout=5)

    asyncio.run(main())


async def _next_message(conn, kind):
    while True:
        obj = json.loads(await conn.recv())
        if obj["type"] == kind:
            return obj


def test_live_client_receives_states():
    async def body(server, port):
        async with websockets.connect(f"ws://127.0.0.1:{port}") as conn:
            first = await _next_message(conn, "state")
            later = await _next_message(conn, "state")
            assert later["tick"] > first["tick"]
            assert later["params"]["K_v"] == -7.0

    _run_live(body)


def test_live_hand_input_reaches_the_world():
    async def body(server, port):
        async with websockets.connect(f"ws://127.0.0.1:{port}") as conn:
            await conn.send('{"type":"hand","t_ms":1.0,"pos":[0.4,0.0,0.0]}')
            for _ in range(80):
                state = await _next_message(conn, "state")
                if state["hand"]["pos"][0] == pytest.approx(0.4):
                    return
            raise AssertionError("hand position never appeared in state")

    _run_live(body)


def test_live_malformed_message_keeps_connection_alive():
    async def body(server, port):
        async with websockets.connect(f"ws://127.0.0.1:{port}") as conn:
            await conn.send("garbage")
            error = await _next_message(conn, "error")
            assert "JSON" in error["reason"]
            await conn.send('{"type":"hand","t_ms":1.0,"pos":[0.2,0.0,0.0]}')
            for _ in range(80):
                state = await _next_message(conn, "state")
                if state["hand"]["pos"][0] == pytest.approx(0.2):
                    return
            raise AssertionError("connection did not survive the bad message")

    _run_live(body)


def test_live_hand_role_is_exclusive_until_release():
    async def body(server, port):
        url = f"ws://127.0.0.1:{port}"
        async with websockets.connect(url) as holder:
            await holder.send('{"type":"hand","t_ms":1.0,"pos":[0.1,0,0]}')
            await _next_message(holder, "state")
            async with websockets.connect(url) as second:
                await second.send('{"type":"hand","t_ms":2.0,"pos":[0.9,0,0]}')
                error = await _next_message(second, "error")
                assert "hand role" in error["reason"]
        # holder disconnected: the role frees up for the next client. The
        # server releases it in its connection teardown, so keep resending
        # until a state frame shows the new hand.
        async with websockets.connect(url) as late:
            for _ in range(80):
                await late.send('{"type":"hand","t_ms":3.0,"pos":[0.3,0.0,0.0]}')
                state = await _next_message(late, "state")
                if state["hand"]["pos"][0] == pytest.approx(0.3):
                    return
            raise AssertionError("role was not released on disconnect")

    _run_live(body)


def test_live_set_param_rejection_and_acceptance():
    async def body(server, port):
        async with websockets.connect(f"ws://127.0.0.1:{port}") as conn:
            await conn.send(
                '{"type":"command","name":"set_param","param":"M_d","value":-1}')
            error = await _next_message(conn, "error")
            assert error["param"] == "M_d"
            await conn.send(
                '{"type":"command","name":"set_param","param":"K_v","value":-5}')
            for _ in range(80):
                state = await _next_message(conn, "state")
                if state["params"]["K_v"] == -5.0:
                    return
            raise AssertionError("accepted parameter never showed up")

    _run_live(body)


def test_live_pause_emits_heartbeats_with_frozen_tick():
    async def body(server, port):
        async with websockets.connect(f"ws://127.0.0.1:{port}") as conn:
            await conn.send('{"type":"command","name":"pause"}')
            ticks = []
            while len(ticks) < 4:
                state = await _next_message(conn, "state")
                if state["paused"]:
                    ticks.append(state["tick"])
            assert len(set(ticks)) == 1
            await conn.send('{"type":"command","name":"resume"}')
            while True:
                state = await _next_message(conn, "state")
                if not state["paused"]:
                    assert state["tick"] >= ticks[0]
                    return

    _run_live(body)


def test_live_cadence_is_close_to_real_time():
    async def body(server, port):
        async with websockets.connect(f"ws://127.0.0.1:{port}") as conn:
            first = await _next_message(conn, "state")
            start = asyncio.get_running_loop().time()
            last = first
            while asyncio.get_running_loop().time() - start < 1.5:
                last = await _next_message(conn, "state")
            elapsed = asyncio.get_running_loop().time() - start
            rate = (last["tick"] - first["tick"]) / elapsed
            assert rate == pytest.approx(80.0, rel=0.05)

    _run_live(body)

"""A complete live round trip, no browser required.

Starts the websocket host in-process, connects a plain client, drags the
virtual hand for a few seconds, and narrates what comes back: decimated
state frames, event-driven tactile frames, parameter retuning, and the
pause heartbeat. This is exactly the traffic the browser UI consumes.

Run:  python3 demos/04_live_session.py [seconds]
"""

import asyncio
import json
import sys

import websockets

from swarmlink import load_scenario
from swarmlink.server import SimServer

DRAG_SPEED = 1.2            # m/s along +X
SECONDS = float(sys.argv[1]) if len(sys.argv) > 1 else 5.0


async def main():
    server = SimServer(load_scenario(""), rate_div=2)
    loop = asyncio.get_running_loop()
    ready = loop.create_future()
    task = asyncio.create_task(server.run(host="127.0.0.1", port=0,
                                          ready=ready))
    port = await ready
    print(f"serving on ws://127.0.0.1:{port} (state at 40 Hz, sim at 80 Hz)")

    states = []
    tactile = []
    async with websockets.connect(f"ws://127.0.0.1:{port}") as conn:

        async def reader():
            async for raw in conn:
                obj = json.loads(raw)
                if obj["type"] == "state":
                    states.append(obj)
                elif obj["type"] == "tactile":
                    fingers = "".join(
                        "H" if v == 250 else "m" if v == 200 else
                        "l" if v == 150 else "." for v in obj["fingers"])
                    tactile.append(obj)
                    print(f"   tactile: {obj['pattern']} step "
                          f"{obj['frame_index'] + 1} [{fingers}] at "
                          f"{obj['t_start_ms']:.0f} ms")
                elif obj["type"] == "error":
                    print(f"   server said no: {obj['reason']}")

        read_task = asyncio.create_task(reader())

        print(f"dragging the hand at {DRAG_SPEED} m/s for {SECONDS:g} s...")
        start = loop.time()
        sends = 0
        while loop.time() - start < SECONDS:
            t = loop.time() - start
            await conn.send(json.dumps({
                "type": "hand", "t_ms": t * 1000.0,
                "pos": [DRAG_SPEED * t, 0.0, 0.0]}))
            sends += 1
            await asyncio.sleep(max(0.0, start + sends / 60.0 - loop.time()))

        print("retuning the human link gain live: K_v -7 -> -4")
        await conn.send(json.dumps({"type": "command", "name": "set_param",
                                    "param": "K_v", "value": -4.0}))
        print("and trying an illegal mass, which must bounce:")
        await conn.send(json.dumps({"type": "command", "name": "set_param",
                                    "param": "M_d", "value": -1.0}))
        await asyncio.sleep(0.3)

        print("pausing; the server keeps heartbeating the same tick:")
        await conn.send(json.dumps({"type": "command", "name": "pause"}))
        await asyncio.sleep(0.3)
        heartbeats = [s["tick"] for s in states[-8:] if s["paused"]]
        print(f"   heartbeat ticks: {sorted(set(heartbeats))}")
        await conn.send(json.dumps({"type": "command", "name": "resume"}))
        await asyncio.sleep(0.2)
        read_task.cancel()

    server.stop()
    await task

    last = states[-1]
    print()
    print(f"received {len(states)} state frames, {len(tactile)} tactile "
          f"frames over {SECONDS:g}+ s")
    print(f"final tick {last['tick']}, K_v now {last['params']['K_v']}, "
          f"M_d still {last['params']['M_d']}")
    print("last known formation, heading axis:")
    for i, vehicle in enumerate(last["vehicles"], start=1):
        print(f"   vehicle {i}: x = {vehicle['pos'][0]:+.3f} m "
              f"(goal {vehicle['goal'][0]:+.3f} m)")
    print(f"   hand:      x = {last['hand']['pos'][0]:+.3f} m")


asyncio.run(main())

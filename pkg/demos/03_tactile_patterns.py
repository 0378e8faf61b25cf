"""Every glove pattern, drawn as a timeline.

Five fingers, three intensity levels, two directions of flow: the six
patterns encode (shape, trend) pairs. This script renders each wave's
frames as ASCII so the flow order and the intensity gradient are visible
at a glance, then runs the scheduler through a shape change to show how
waves never get cut mid-play.

Run:  python3 demos/03_tactile_patterns.py
"""

from swarmlink.tactile import (HIGH, LOW, MID, PATTERNS, TactileScheduler,
                               render_pattern, select_pattern)

GLYPH = {0: ".", LOW: "l", MID: "m", HIGH: "H"}
MEANING = {
    "ED": "extended,  closing   (middle -> sides, fading)",
    "EI": "extended,  stretching(middle -> sides, rising)",
    "EC": "extended,  steady    (middle -> sides, flat)",
    "CD": "contracted, closing  (sides -> middle, rising)",
    "CI": "contracted, opening  (sides -> middle, fading)",
    "CC": "contracted, steady   (sides -> middle, flat)",
}

print("levels: l = 150 Hz   m = 200 Hz   H = 250 Hz   . = off")
print()
for pattern in PATTERNS:
    wave = render_pattern(pattern)
    print(f"{pattern}  {MEANING[pattern]}")
    for finger in range(5):
        row = []
        for frame in wave.frames:
            cells = int(frame.duration_ms // 100)
            row.append(GLYPH[frame.fingers[finger]] * cells)
        line = "".join(row)
        gap = "_" * int(wave.gap_ms // 100)
        print(f"   finger {finger + 1}: {line}{gap}")
    print(f"   active {wave.active_ms} ms + gap {wave.gap_ms} ms "
          f"= period {wave.period_ms} ms")
    print()

print("selection is total over the nine (shape, trend) classes:")
for shape in ("contracted", "regular", "extended"):
    row = [select_pattern(shape, rate)
           for rate in ("decreasing", "constant", "increasing")]
    print(f"   {shape:>10}: {row}")
print()

print("scheduler: a wave in flight always finishes, even if the formation")
print("class flips mid-wave. Flip EI -> NONE at t = 300 ms:")
scheduler = TactileScheduler()
timeline = []
t = 0.0
while t <= 2900.0:
    shape = "extended" if t < 300.0 else "regular"
    rate = "increasing" if t < 300.0 else "constant"
    for frame in scheduler.advance(t, shape, rate):
        timeline.append((t, frame))
    t += 12.5
for now, frame in timeline:
    fingers = "".join(GLYPH[v] for v in frame.fingers)
    print(f"   emitted at {now:6.1f} ms: {frame.pattern} step "
          f"{frame.frame_index + 1} [{fingers}] "
          f"(scheduled for t={frame.t_start_ms:.0f} ms)")
print("   ...then silence: the next period belongs to NONE.")

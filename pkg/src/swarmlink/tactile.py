"""Five-finger vibrotactile encoding of formation shape changes.

A shape/trend pair maps to one of six wave patterns (or silence). Each
wave is three steps sweeping across the hand: extended shapes flow from
the middle finger outward, contracted shapes from the side fingers inward.
The distance trend rides on an intensity gradient across the steps:
rising toward the side fingers when the spread is increasing, falling when
it is decreasing, flat otherwise.

Intensity levels are the three actuator frequencies (150/200/250 Hz);
a step holding only the LOW level lasts 200 ms, any other step 300 ms,
and waves are separated by a 600 ms gap.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError, ParameterError

LOW, MID, HIGH = 150, 200, 250
OFF = 0

GAP_MS = 600
# Silence slot used when the formation is regular: same period as the
# gradient waves (800 ms active + 600 ms gap).
NONE_PERIOD_MS = 1400

PATTERNS = ("CD", "CI", "CC", "ED", "EI", "EC")

SHAPE_CLASSES = ("contracted", "regular", "extended")
RATE_CLASSES = ("decreasing", "constant", "increasing")

# Finger groups per step: extended waves run middle -> sides.
_EXTENDED_STEPS = ((3,), (2, 4), (1, 5))
_CONTRACTED_STEPS = ((1, 5), (2, 4), (3,))


@dataclass(frozen=True)
class TactileFrame:
    """One step of a wave: absolute-in-wave start, duration, 5 finger levels."""

    start_ms: int
    duration_ms: int
    fingers: tuple   # 5 values from {0, 150, 200, 250}, thumb..little


@dataclass(frozen=True)
class PatternWave:
    pattern: str
    frames: tuple
    gap_ms: int = GAP_MS

    @property
    def active_ms(self) -> int:
        if not self.frames:
            return 0
        last = self.frames[-1]
        return last.start_ms + last.duration_ms

    @property
    def period_ms(self) -> int:
        if not self.frames:
            return NONE_PERIOD_MS
        return self.active_ms + self.gap_ms


def select_pattern(shape_class: str, rate_class: str) -> str:
    """Total map from (shape, trend) classes to a pattern id or 'NONE'."""
    if shape_class not in SHAPE_CLASSES:
        raise ParameterError(f"unknown shape class {shape_class!r}")
    if rate_class not in RATE_CLASSES:
        raise ParameterError(f"unknown rate class {rate_class!r}")
    if shape_class == "regular":
        return "NONE"
    shape = "C" if shape_class == "contracted" else "E"
    trend = {"decreasing": "D", "increasing": "I", "constant": "C"}[rate_class]
    return shape + trend


def _step_levels(trend: str):
    """Level for (step holding the middle finger, middle step, side step)."""
    if trend == "I":     # rises toward the side fingers
        return {"middle": LOW, "mid": MID, "side": HIGH}
    if trend == "D":     # falls toward the side fingers
        return {"middle": HIGH, "mid": MID, "side": LOW}
    return {"middle": MID, "mid": MID, "side": MID}


def render_pattern(pattern: str) -> PatternWave:
    """Expand a pattern id into its timed frame sequence.

    'NONE' renders to an empty wave (pure silence for one period).
    """
    if pattern == "NONE":
        return PatternWave(pattern="NONE", frames=())
    if pattern not in PATTERNS:
        raise ParameterError(f"unknown pattern {pattern!r}")
    shape, trend = pattern[0], pattern[1]
    steps = _EXTENDED_STEPS if shape == "E" else _CONTRACTED_STEPS
    levels = _step_levels(trend)

    frames = []
    t = 0
    for group in steps:
        if group == (3,):
            level = levels["middle"]
        elif group == (2, 4):
            level = levels["mid"]
        else:
            level = levels["side"]
        fingers = tuple(level if f in group else OFF for f in range(1, 6))
        duration = 200 if level == LOW else 300
        frames.append(TactileFrame(start_ms=t, duration_ms=duration, fingers=fingers))
        t += duration
    return PatternWave(pattern=pattern, frames=tuple(frames))


@dataclass(frozen=True)
class TimedFrame:
    """A wave frame placed on the session timeline (wire schema fields)."""

    wave_id: int
    pattern: str
    frame_index: int
    t_start_ms: int
    duration_ms: int
    fingers: tuple


def frame_payload(frame: TimedFrame) -> dict:
    """Serialization shared by the live server and any log consumer."""
    return {
        "wave_id": frame.wave_id,
        "pattern": frame.pattern,
        "frame_index": frame.frame_index,
        "t_start_ms": frame.t_start_ms,
        "duration_ms": frame.duration_ms,
        "fingers": list(frame.fingers),
    }


class TactileScheduler:
    """Owns the wave timeline: re-selects at boundaries, never truncates.

    Drive it with a monotone clock (milliseconds) and the latest shape and
    trend classes; it returns the frames that start inside the advanced
    interval. A wave in progress always completes; class changes take
    effect at the next wave boundary.
    """

    def __init__(self):
        self._now_ms = 0.0
        self._boundary_ms = 0
        self._wave_id = -1
        self._current = []          # TimedFrames of the wave in progress
        self._pending = []          # scheduled frames not yet emitted
        self._current_pattern = "NONE"

    @property
    def current_pattern(self) -> str:
        """Pattern owning the current wave period (silence reads 'NONE')."""
        return self._current_pattern

    def current_frame(self, now_ms=None):
        """The frame sounding at `now_ms` (default: the scheduler clock)."""
        t = self._now_ms if now_ms is None else now_ms
        for frame in self._current:
            if frame.t_start_ms <= t < frame.t_start_ms + frame.duration_ms:
                return frame
        return None

    def advance(self, now_ms: float, shape_class: str, rate_class: str):
        """Move the clock forward and return frames whose start was crossed."""
        if now_ms < self._now_ms:
            raise InputError(
                f"scheduler clock went backwards: {now_ms} < {self._now_ms}")
        self._now_ms = now_ms

        while self._boundary_ms <= now_ms:
            pattern = select_pattern(shape_class, rate_class)
            wave = render_pattern(pattern)
            self._wave_id += 1
            self._current_pattern = pattern
            self._current = [
                TimedFrame(
                    wave_id=self._wave_id,
                    pattern=pattern,
                    frame_index=i,
                    t_start_ms=self._boundary_ms + f.start_ms,
                    duration_ms=f.duration_ms,
                    fingers=f.fingers,
                )
                for i, f in enumerate(wave.frames)
            ]
            self._pending.extend(self._current)
            self._boundary_ms += wave.period_ms

        due = [f for f in self._pending if f.t_start_ms <= now_ms]
        self._pending = [f for f in self._pending if f.t_start_ms > now_ms]
        return due

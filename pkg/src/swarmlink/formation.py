"""Rhombic leader-follower geometry around a guiding hand.

Vehicle 1 trails the hand, vehicles 2 and 3 flank behind vehicle 1, and
vehicle 4 closes the rhombus behind the 2-3 midpoint. Each edge of the
graph {hand-1, 1-2, 1-3, 2-4, 3-4} carries an impedance correction that
shifts the downstream goal along the link, which is what lets the shape
stretch and recover as the hand moves.

Goals are computed from the *actual* neighbor positions, not the neighbor
goals, so displacement propagates down the graph with a delay; the lag of
vehicle 4 behind vehicle 1 during fast motion is a direct consequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericError, ParameterError

LINKS = ("hum1", "d12", "d13", "d24", "d34")

# Spread-rate smoothing time constant and the class deadbands.
RATE_TAU_S = 0.25
SHAPE_BAND = 0.10
RATE_BAND = 0.05

VERTICAL = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class FormationConfig:
    """Nominal geometry and heading policy."""

    lengths: tuple = (0.5, 0.5, 0.5, 0.5)   # longitudinal offsets L1..L4, m
    width: float = 0.5                      # lateral half-width W, m
    heading_mode: str = "fixed"             # "fixed" or "velocity"
    heading_axis: tuple = (1.0, 0.0, 0.0)

    def __post_init__(self):
        if len(self.lengths) != 4:
            raise ParameterError(f"lengths must have 4 entries, got {len(self.lengths)}")
        for i, l in enumerate(self.lengths):
            if not (math.isfinite(l) and l > 0.0):
                raise ParameterError(f"lengths[{i}] must be finite and > 0, got {l!r}")
        if not (math.isfinite(self.width) and self.width > 0.0):
            raise ParameterError(f"width must be finite and > 0, got {self.width!r}")
        if self.heading_mode not in ("fixed", "velocity"):
            raise ParameterError(f"heading_mode must be 'fixed' or 'velocity', got {self.heading_mode!r}")
        axis = np.asarray(self.heading_axis, dtype=float)
        if axis.shape != (3,) or not np.all(np.isfinite(axis)) or np.linalg.norm(axis) == 0.0:
            raise ParameterError(f"heading_axis must be a finite non-zero 3-vector, got {self.heading_axis!r}")


@dataclass(frozen=True)
class HandSample:
    """One timestamped hand position."""

    t: float
    pos: np.ndarray


@dataclass(frozen=True)
class VelocityEstimate:
    vel: np.ndarray
    cold: bool          # true until the window holds at least two samples


@dataclass(frozen=True)
class FormationMetrics:
    link_distances: dict        # link id -> m
    spread_ratio: float
    spread_rate: float          # smoothed d(ratio)/dt, 1/s
    shape_class: str            # contracted | regular | extended
    rate_class: str             # decreasing | constant | increasing
    degenerate: bool


def heading_frame(heading):
    """Unit heading and the matching lateral unit (vertical is global +Z)."""
    u = np.asarray(heading, dtype=float)
    n = np.linalg.norm(u)
    if not np.all(np.isfinite(u)) or n == 0.0:
        raise ParameterError(f"heading must be a finite non-zero vector, got {heading!r}")
    u = u / n
    lateral = np.cross(VERTICAL, u)
    ln = np.linalg.norm(lateral)
    if ln < 1e-12:
        raise ParameterError("heading may not be vertical")
    return u, lateral / ln


def nominal_layout(config: FormationConfig, hand_pos, heading) -> np.ndarray:
    """Rest positions of the four vehicles for a given hand pose.

    Used both as the spawn layout and as the regular-shape reference.
    """
    hand = np.asarray(hand_pos, dtype=float)
    u, lat = heading_frame(heading)
    l1, l2, l3, _ = config.lengths
    w = config.width
    p1 = hand - l1 * u
    p2 = p1 - l2 * u + w * lat
    p3 = p1 - l2 * u - w * lat
    p4 = 0.5 * (p2 + p3) - l3 * u
    return np.stack([p1, p2, p3, p4])


def estimate_hand_velocity(samples, window_s: float, v_max: float) -> VelocityEstimate:
    """Least-squares slope of recent hand samples, speed-capped.

    `samples` is an ordered sequence of HandSample with strictly increasing
    timestamps; only the trailing `window_s` seconds are used. Fewer than
    two usable samples yield a zero estimate flagged cold.
    """
    if not (math.isfinite(window_s) and window_s > 0.0):
        raise ParameterError(f"window_s must be finite and > 0, got {window_s!r}")
    if not (math.isfinite(v_max) and v_max > 0.0):
        raise ParameterError(f"v_max must be finite and > 0, got {v_max!r}")
    samples = list(samples)
    for prev, cur in zip(samples, samples[1:]):
        if cur.t <= prev.t:
            raise InputError(f"hand timestamps must strictly increase ({prev.t} then {cur.t})")
    if len(samples) >= 2:
        cutoff = samples[-1].t - window_s
        samples = [s for s in samples if s.t >= cutoff]
    if len(samples) < 2:
        return VelocityEstimate(vel=np.zeros(3), cold=True)

    t = np.array([s.t for s in samples])
    pos = np.stack([np.asarray(s.pos, dtype=float) for s in samples])
    if not np.all(np.isfinite(pos)):
        raise NumericError("hand samples are not finite")
    t_c = t - t.mean()
    denom = float(t_c @ t_c)
    vel = (t_c @ (pos - pos.mean(axis=0))) / denom
    speed = float(np.linalg.norm(vel))
    if speed > v_max:
        vel = vel * (v_max / speed)
    return VelocityEstimate(vel=vel, cold=False)


def compute_goals(hand_pos, positions, corrections, config: FormationConfig, heading) -> np.ndarray:
    """Per-vehicle goal positions from neighbors plus link corrections.

    Each correction displaces the goal of the link's downstream vehicle;
    during motion the corrections all point against the hand velocity, so
    the stretch accumulates station by station away from the hand.
    """
    hand = np.asarray(hand_pos, dtype=float)
    pos = np.asarray(positions, dtype=float)
    if pos.shape != (4, 3):
        raise ParameterError(f"positions must have shape (4, 3), got {pos.shape}")
    missing = [l for l in LINKS if l not in corrections]
    if missing:
        raise ParameterError(f"corrections missing link(s): {missing}")
    cor = {l: np.asarray(corrections[l], dtype=float) for l in LINKS}
    for l, v in cor.items():
        if v.shape != (3,) or not np.all(np.isfinite(v)):
            raise ParameterError(f"correction {l!r} must be a finite 3-vector")
    if not (np.all(np.isfinite(hand)) and np.all(np.isfinite(pos))):
        raise NumericError("hand or vehicle positions are not finite")

    u, lat = heading_frame(heading)
    l1, l2, l3, _ = config.lengths
    w = config.width
    g1 = hand - l1 * u + cor["hum1"]
    g2 = pos[0] - l2 * u + w * lat + cor["d12"]
    g3 = pos[0] - l2 * u - w * lat + cor["d13"]
    g4 = 0.5 * (pos[1] + pos[2]) - l3 * u + 0.5 * (cor["d24"] + cor["d34"])
    return np.stack([g1, g2, g3, g4])


def _nominal_link_distances(config: FormationConfig) -> dict:
    l1, l2, l3, _ = config.lengths
    w = config.width
    return {
        "hum1": l1,
        "d12": math.hypot(l2, w),
        "d13": math.hypot(l2, w),
        "d24": math.hypot(l3, w),
        "d34": math.hypot(l3, w),
    }


def formation_metrics(hand_pos, positions, config: FormationConfig,
                      prev: FormationMetrics = None, dt: float = None) -> FormationMetrics:
    """Shape summary for tactile encoding and telemetry.

    The spread ratio compares mean drone-drone link length against nominal;
    the hand-1 link is deliberately excluded so that a person stepping
    toward or away from a settled formation does not read as a shape
    change. The rate is exponentially smoothed with a 0.25 s time constant
    before classification.
    """
    hand = np.asarray(hand_pos, dtype=float)
    pos = np.asarray(positions, dtype=float)
    if pos.shape != (4, 3):
        raise ParameterError(f"positions must have shape (4, 3), got {pos.shape}")
    dists = {
        "hum1": float(np.linalg.norm(pos[0] - hand)),
        "d12": float(np.linalg.norm(pos[1] - pos[0])),
        "d13": float(np.linalg.norm(pos[2] - pos[0])),
        "d24": float(np.linalg.norm(pos[3] - pos[1])),
        "d34": float(np.linalg.norm(pos[3] - pos[2])),
    }
    nominal = _nominal_link_distances(config)
    drone_links = ("d12", "d13", "d24", "d34")
    mean_actual = sum(dists[l] for l in drone_links) / 4.0
    mean_nominal = sum(nominal[l] for l in drone_links) / 4.0
    ratio = mean_actual / mean_nominal
    degenerate = any(dists[l] == 0.0 for l in drone_links)

    if prev is None or dt is None:
        rate = 0.0
    else:
        if dt <= 0.0 or not math.isfinite(dt):
            raise ParameterError(f"dt must be finite and > 0, got {dt!r}")
        raw = (ratio - prev.spread_ratio) / dt
        alpha = dt / RATE_TAU_S
        rate = prev.spread_rate + alpha * (raw - prev.spread_rate)

    if ratio > 1.0 + SHAPE_BAND:
        shape = "extended"
    elif ratio < 1.0 - SHAPE_BAND:
        shape = "contracted"
    else:
        shape = "regular"
    if rate > RATE_BAND:
        rate_class = "increasing"
    elif rate < -RATE_BAND:
        rate_class = "decreasing"
    else:
        rate_class = "constant"

    return FormationMetrics(link_distances=dists, spread_ratio=ratio,
                            spread_rate=rate, shape_class=shape,
                            rate_class=rate_class, degenerate=degenerate)

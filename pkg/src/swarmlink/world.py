"""Fixed-timestep world loop tying hand input, links, and vehicles together.

Every tick runs the same strict order:

    ingest hand sample -> estimate hand velocity -> interaction force
    -> advance all five links -> clamp corrections -> vehicle goals
    -> PID per vehicle -> integrate vehicles -> shape metrics

Time is kept as an integer tick count; wall time is always tick * period,
so there is no accumulating float drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InputError, ParameterError
from .formation import (
    LINKS,
    FormationConfig,
    FormationMetrics,
    HandSample,
    compute_goals,
    estimate_hand_velocity,
    formation_metrics,
    heading_frame,
    nominal_layout,
)
from .impedance import (
    DiscreteModel,
    ImpedanceParams,
    LinkState,
    build_discrete_model,
    clamp_correction,
    hand_force,
    step_link,
)
from .vehicle import PidGains, VehicleState, pid_step, vehicle_step

# Horizontal speed below which a velocity-derived heading holds its last value.
_HEADING_SPEED_FLOOR = 0.1


@dataclass(frozen=True)
class WorldParams:
    """Everything the tick loop needs, bundled for snapshotting."""

    period: float = 1.0 / 80.0
    impedance: ImpedanceParams = field(default_factory=ImpedanceParams)
    velocity_gain: float = -7.0        # N*s/m, negative opposes hand motion
    correction_limit: float = 0.25     # m
    hand_speed_max: float = 1.5        # m/s cap into the force path
    velocity_window_s: float = 0.2
    formation: FormationConfig = field(default_factory=FormationConfig)
    pid: PidGains = field(default_factory=PidGains)

    def __post_init__(self):
        if not (math.isfinite(self.period) and self.period > 0.0):
            raise ParameterError(f"period must be finite and > 0, got {self.period!r}")
        if not math.isfinite(self.velocity_gain):
            raise ParameterError(f"velocity_gain must be finite, got {self.velocity_gain!r}")
        if not (math.isfinite(self.correction_limit) and self.correction_limit > 0.0):
            raise ParameterError(f"correction_limit must be > 0, got {self.correction_limit!r}")
        if not (math.isfinite(self.hand_speed_max) and self.hand_speed_max > 0.0):
            raise ParameterError(f"hand_speed_max must be > 0, got {self.hand_speed_max!r}")
        if not (math.isfinite(self.velocity_window_s) and self.velocity_window_s > 0.0):
            raise ParameterError(f"velocity_window_s must be > 0, got {self.velocity_window_s!r}")


@dataclass(frozen=True, eq=False)
class WorldState:
    """Immutable snapshot of one tick. Treat every field as read-only."""

    params: WorldParams
    model: DiscreteModel
    tick: int
    hand_history: tuple          # trailing HandSample window
    hand_pos: np.ndarray
    hand_vel: np.ndarray         # capped estimate driving the force path
    hand_cold: bool
    force: np.ndarray
    heading: np.ndarray
    links: dict                  # link id -> LinkState
    raw_disp: dict               # link id -> (3,) unclamped displacement
    corrections: dict            # link id -> (3,) clamped correction
    vehicles: tuple              # 4x VehicleState
    goals: np.ndarray            # (4, 3)
    metrics: FormationMetrics

    @property
    def time(self) -> float:
        return self.tick * self.params.period

    def positions(self) -> np.ndarray:
        return np.stack([v.pos for v in self.vehicles])

    def with_params(self, params: WorldParams) -> "WorldState":
        """Same physical state under new parameters (model rebuilt)."""
        model = build_discrete_model(params.impedance, params.period)
        return replace(self, params=params, model=model)


def spawn_world(params: WorldParams, hand_pos=(0.0, 0.0, 0.0)) -> WorldState:
    """World at rest: vehicles on the nominal layout, links relaxed."""
    hand = np.asarray(hand_pos, dtype=float)
    if hand.shape != (3,) or not np.all(np.isfinite(hand)):
        raise ParameterError(f"hand_pos must be a finite 3-vector, got {hand_pos!r}")
    heading, _ = heading_frame(np.asarray(params.formation.heading_axis, dtype=float))
    model = build_discrete_model(params.impedance, params.period)
    layout = nominal_layout(params.formation, hand, heading)
    vehicles = tuple(VehicleState.at(p) for p in layout)
    links = {l: LinkState.zero() for l in LINKS}
    zeros = {l: np.zeros(3) for l in LINKS}
    metrics = formation_metrics(hand, layout, params.formation)
    # History starts empty: the first tick is always velocity-cold, so a
    # pre-positioned (or teleported) hand exerts no force on tick one.
    return WorldState(
        params=params, model=model, tick=0,
        hand_history=(),
        hand_pos=hand, hand_vel=np.zeros(3), hand_cold=True,
        force=np.zeros(3), heading=heading,
        links=links, raw_disp=zeros, corrections=dict(zeros),
        vehicles=vehicles, goals=layout, metrics=metrics,
    )


def _ingest(world: WorldState, sample, new_time: float):
    """Validate and fold one hand sample into the trailing window.

    Samples are quantized onto the tick clock: whatever arrives during a
    tick is recorded at that tick's end time, which keeps the estimator's
    time base exact regardless of sender clocks.
    """
    if sample is None:
        pos = world.hand_pos
    elif isinstance(sample, HandSample):
        if sample.t < world.time:
            raise InputError(
                f"hand sample time {sample.t} is before world time {world.time}")
        pos = np.asarray(sample.pos, dtype=float)
    else:
        pos = np.asarray(sample, dtype=float)
    if pos.shape != (3,) or not np.all(np.isfinite(pos)):
        raise InputError(f"hand position must be a finite 3-vector, got {pos!r}")
    keep = max(3, int(math.ceil(world.params.velocity_window_s / world.params.period)) + 2)
    history = (world.hand_history + (HandSample(t=new_time, pos=pos),))[-keep:]
    return pos, history


def world_tick(world: WorldState, sample=None) -> WorldState:
    """Advance exactly one period. Raises without touching `world` on bad
    input; `sample` may be a HandSample, a bare position, or None to hold."""
    params = world.params
    dt = params.period
    new_tick = world.tick + 1
    new_time = new_tick * dt

    hand_pos, history = _ingest(world, sample, new_time)
    estimate = estimate_hand_velocity(history, params.velocity_window_s, params.hand_speed_max)
    force = hand_force(estimate.vel, params.velocity_gain)

    links = {l: step_link(world.links[l], world.model, force) for l in LINKS}
    raw_disp = {l: links[l].disp for l in LINKS}
    corrections = {l: clamp_correction(links[l].disp, params.correction_limit) for l in LINKS}

    heading = world.heading
    if params.formation.heading_mode == "velocity" and not estimate.cold:
        horizontal = estimate.vel * np.array([1.0, 1.0, 0.0])
        if np.linalg.norm(horizontal) > _HEADING_SPEED_FLOOR:
            heading, _ = heading_frame(horizontal)

    positions = world.positions()
    goals = compute_goals(hand_pos, positions, corrections, params.formation, heading)

    vehicles = []
    for vehicle, goal in zip(world.vehicles, goals):
        accel, vehicle = pid_step(vehicle, goal, params.pid, dt)
        vehicles.append(vehicle_step(vehicle, accel, dt))
    vehicles = tuple(vehicles)

    metrics = formation_metrics(hand_pos, np.stack([v.pos for v in vehicles]),
                                params.formation, prev=world.metrics, dt=dt)

    return WorldState(
        params=params, model=world.model, tick=new_tick,
        hand_history=history, hand_pos=hand_pos,
        hand_vel=estimate.vel, hand_cold=estimate.cold,
        force=force, heading=heading,
        links=links, raw_disp=raw_disp, corrections=corrections,
        vehicles=vehicles, goals=goals, metrics=metrics,
    )

"""Point-mass vehicle with a saturated PID position loop.

The vehicle model is deliberately simple: commanded acceleration is the
control input, integrated semi-implicitly (velocity first, then position
with the new velocity) at the fixed world rate. The PID runs on position
error with a backward-difference derivative and a per-axis anti-windup
clamp on the integral; the commanded acceleration is limited in norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericError, ParameterError


@dataclass(frozen=True)
class PidGains:
    kp: float = 8.0
    ki: float = 0.4
    kd: float = 5.0
    integrator_limit: float = 0.25   # m*s, per axis
    accel_limit: float = 6.0         # m/s^2, on the vector norm

    def __post_init__(self):
        for name in ("kp", "ki", "kd"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ParameterError(f"{name} must be finite and >= 0, got {v!r}")
        if not (math.isfinite(self.integrator_limit) and self.integrator_limit > 0.0):
            raise ParameterError(f"integrator_limit must be > 0, got {self.integrator_limit!r}")
        if not (math.isfinite(self.accel_limit) and self.accel_limit > 0.0):
            raise ParameterError(f"accel_limit must be > 0, got {self.accel_limit!r}")


@dataclass(frozen=True, eq=False)
class VehicleState:
    pos: np.ndarray
    vel: np.ndarray
    integ: np.ndarray            # accumulated error, m*s
    prev_err: np.ndarray = None  # None until the first controller tick

    @staticmethod
    def at(pos) -> "VehicleState":
        return VehicleState(pos=np.asarray(pos, dtype=float).copy(),
                            vel=np.zeros(3), integ=np.zeros(3))


def pid_step(state: VehicleState, goal, gains: PidGains, dt: float):
    """One controller update; returns (accel_command, state with controller
    memory advanced). The kinematic fields are untouched here."""
    if not (math.isfinite(dt) and dt > 0.0):
        raise ParameterError(f"dt must be finite and > 0, got {dt!r}")
    goal = np.asarray(goal, dtype=float)
    if not (np.all(np.isfinite(goal)) and np.all(np.isfinite(state.pos))):
        raise NumericError("goal or vehicle position is not finite")
    err = goal - state.pos
    integ = np.clip(state.integ + err * dt, -gains.integrator_limit, gains.integrator_limit)
    if state.prev_err is None:
        derr = np.zeros(3)
    else:
        derr = (err - state.prev_err) / dt
    accel = gains.kp * err + gains.ki * integ + gains.kd * derr
    norm = float(np.linalg.norm(accel))
    if norm > gains.accel_limit:
        accel = accel * (gains.accel_limit / norm)
    next_state = VehicleState(pos=state.pos, vel=state.vel, integ=integ, prev_err=err)
    return accel, next_state


def vehicle_step(state: VehicleState, accel, dt: float) -> VehicleState:
    """Semi-implicit Euler: v += a*dt, then p += v*dt with the new v."""
    if not (math.isfinite(dt) and dt > 0.0):
        raise ParameterError(f"dt must be finite and > 0, got {dt!r}")
    accel = np.asarray(accel, dtype=float)
    if not np.all(np.isfinite(accel)):
        raise NumericError(f"accel is not finite: {accel}")
    vel = state.vel + accel * dt
    pos = state.pos + vel * dt
    return VehicleState(pos=pos, vel=vel, integ=state.integ, prev_err=state.prev_err)

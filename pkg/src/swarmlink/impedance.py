"""Virtual mass-spring-damper links with exact zero-order-hold discretization.

Each link couples a leader point to a follower goal through the dynamics

    m * e'' + d * e' + k * e = f

where e is the link's displacement from rest and f is held constant over a
sample period. The one-period state map is the exact matrix exponential of
the companion form, written out per damping regime so every branch is a
closed form (no series evaluation, no dependence on the sample rate being
small).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError, ParameterError

# Relative width of the band around d^2 = 4*m*k treated as critically damped.
_CRITICAL_REL_TOL = 1e-9


@dataclass(frozen=True)
class ImpedanceParams:
    """Virtual body parameters of one link (SI units)."""

    mass: float = 1.9          # kg
    damping: float = 12.6      # N*s/m
    stiffness: float = 21.0    # N/m

    def __post_init__(self):
        for name in ("mass", "damping", "stiffness"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ParameterError(f"{name} must be a finite number, got {value!r}")
        if self.mass <= 0.0:
            raise ParameterError(f"mass must be > 0, got {self.mass}")
        if self.stiffness <= 0.0:
            raise ParameterError(f"stiffness must be > 0, got {self.stiffness}")
        if self.damping < 0.0:
            raise ParameterError(f"damping must be >= 0, got {self.damping}")


def classify_damping(params: ImpedanceParams) -> str:
    """Return 'underdamped', 'critical', or 'overdamped' for these parameters.

    The critical band is |d^2 - 4mk| <= 1e-9 * 4mk so that nearly repeated
    roots are routed to the well-conditioned limit branch.
    """
    disc = params.damping ** 2 - 4.0 * params.mass * params.stiffness
    if abs(disc) <= _CRITICAL_REL_TOL * 4.0 * params.mass * params.stiffness:
        return "critical"
    return "underdamped" if disc < 0.0 else "overdamped"


@dataclass(frozen=True, eq=False)
class DiscreteModel:
    """Exact one-period propagator: s_next = a_d @ s + b_d * f, s = (e, e')."""

    a_d: np.ndarray
    b_d: np.ndarray
    period: float
    a: float            # -d/m
    b: float            # -k/m
    c: float            # 1/m
    lam1: complex
    lam2: complex
    regime: str
    params: ImpedanceParams = field(repr=False, default=None)


def build_discrete_model(params: ImpedanceParams, period: float) -> DiscreteModel:
    """Discretize the link dynamics exactly for one sample period.

    The companion matrix A = [[0, 1], [b, a]] (a = -d/m, b = -k/m) is
    exponentiated in closed form. All three root configurations reduce to
    exp(A*T) = p*I + q*A with scalar (p, q) per regime:

      distinct real roots   p, q from the two exponentials
      complex pair          decaying rotation
      repeated root         exp(l*T) * (I + T*(A - l*I))

    The input column is recovered from b_d = (a_d - I) @ inv(A) @ B, which
    exists because k > 0 keeps A invertible.
    """
    if not (isinstance(period, (int, float)) and math.isfinite(period) and period > 0.0):
        raise ParameterError(f"period must be a finite positive number, got {period!r}")
    m, d, k = params.mass, params.damping, params.stiffness
    a = -d / m
    b = -k / m
    c = 1.0 / m
    t = float(period)
    regime = classify_damping(params)

    if regime == "critical":
        lam = a / 2.0
        e = math.exp(lam * t)
        p = e * (1.0 - lam * t)
        q = e * t
        lam1 = lam2 = complex(lam)
    elif regime == "overdamped":
        root = math.sqrt(a * a + 4.0 * b)
        l1 = (a + root) / 2.0
        l2 = (a - root) / 2.0
        e1 = math.exp(l1 * t)
        e2 = math.exp(l2 * t)
        q = (e1 - e2) / (l1 - l2)
        p = (l1 * e2 - l2 * e1) / (l1 - l2)
        lam1, lam2 = complex(l1), complex(l2)
    else:
        alpha = a / 2.0
        omega = math.sqrt(-(a * a + 4.0 * b)) / 2.0
        e = math.exp(alpha * t)
        q = e * math.sin(omega * t) / omega
        p = e * (math.cos(omega * t) - alpha * math.sin(omega * t) / omega)
        lam1 = complex(alpha, omega)
        lam2 = complex(alpha, -omega)

    a_d = np.array([[p, q], [q * b, p + q * a]])
    # (a_d - I) @ inv(A) @ [0, c] collapses to a first-column expression.
    b_d = np.array([-(a_d[0, 0] - 1.0) / k, -a_d[1, 0] / k])
    a_d.setflags(write=False)
    b_d.setflags(write=False)
    return DiscreteModel(a_d=a_d, b_d=b_d, period=t, a=a, b=b, c=c,
                         lam1=lam1, lam2=lam2, regime=regime, params=params)


def critical_propagator(params: ImpedanceParams, period: float):
    """Repeated-root closed form exp(l*T)*(I + T*(A - l*I)), l = a/2.

    Only meaningful when the parameters are critically damped; kept as an
    independent cross-check of the general branch in that regime.
    """
    m, d, k = params.mass, params.damping, params.stiffness
    a = -d / m
    b = -k / m
    t = float(period)
    lam = a / 2.0
    e = math.exp(lam * t)
    a_mat = np.array([[0.0, 1.0], [b, a]])
    a_d = e * (np.eye(2) + t * (a_mat - lam * np.eye(2)))
    b_d = np.array([-(a_d[0, 0] - 1.0) / k, -a_d[1, 0] / k])
    return a_d, b_d


@dataclass(frozen=True, eq=False)
class LinkState:
    """Per-axis displacement and rate of one link's virtual body."""

    disp: np.ndarray   # (3,) m
    vel: np.ndarray    # (3,) m/s

    @staticmethod
    def zero() -> "LinkState":
        return LinkState(disp=np.zeros(3), vel=np.zeros(3))


def step_link(state: LinkState, model: DiscreteModel, force: np.ndarray) -> LinkState:
    """Advance one link by one sample period under a constant force vector.

    The state is left untouched on error; the returned state is fresh.
    """
    force = np.asarray(force, dtype=float)
    if force.shape != (3,):
        raise ParameterError(f"force must be a 3-vector, got shape {force.shape}")
    if not np.all(np.isfinite(force)):
        raise NumericError(f"force is not finite: {force}")
    if not (np.all(np.isfinite(state.disp)) and np.all(np.isfinite(state.vel))):
        raise NumericError("link state is not finite")
    a_d, b_d = model.a_d, model.b_d
    disp = a_d[0, 0] * state.disp + a_d[0, 1] * state.vel + b_d[0] * force
    vel = a_d[1, 0] * state.disp + a_d[1, 1] * state.vel + b_d[1] * force
    return LinkState(disp=disp, vel=vel)


def hand_force(velocity: np.ndarray, gain: float) -> np.ndarray:
    """Velocity-proportional interaction force f = gain * v (gain in N*s/m)."""
    velocity = np.asarray(velocity, dtype=float)
    if not math.isfinite(gain):
        raise NumericError(f"gain is not finite: {gain!r}")
    if not np.all(np.isfinite(velocity)):
        raise NumericError(f"velocity is not finite: {velocity}")
    return gain * velocity


def clamp_correction(disp: np.ndarray, limit: float) -> np.ndarray:
    """Symmetric per-axis clamp of a link displacement to [-limit, +limit].

    Applied on output only; the integrated link state itself is never
    clamped, so the correction re-grows smoothly after saturation.
    """
    if not (isinstance(limit, (int, float)) and math.isfinite(limit) and limit > 0.0):
        raise ParameterError(f"limit must be a finite positive number, got {limit!r}")
    return np.clip(np.asarray(disp, dtype=float), -limit, limit)

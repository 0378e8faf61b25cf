"""Headless scenario runs: scripted hand motion in, tick-level log out.

A scenario document is TOML with units spelled into the field names. The
hand trajectory is a list of timed waypoints; each waypoint's `interp`
says how to travel from the previous one (hold, linear, or smoothstep).
Runs are strictly deterministic: identical documents produce byte-identical
CSV exports on any platform.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import tomli

from .errors import ParameterError, ScenarioError, SwarmlinkError
from .formation import LINKS, FormationConfig
from .impedance import ImpedanceParams
from .tactile import TactileScheduler
from .vehicle import PidGains
from .world import WorldParams, spawn_world, world_tick

INTERP_MODES = ("hold", "linear", "smoothstep")
EXPORT_FORMATS = ("csv", "structured")


@dataclass(frozen=True)
class Waypoint:
    t_s: float
    pos_m: tuple
    interp: str = "hold"


@dataclass(frozen=True)
class ScenarioConfig:
    world: WorldParams
    duration_s: float
    waypoints: tuple
    out_format: str = "csv"


# Schema: section -> {field -> converter}. Converters raise ValueError on
# type mismatch; range checks live in the parameter dataclasses.
def _num(v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValueError(f"expected a number, got {v!r}")
    if not math.isfinite(v):
        raise ValueError(f"expected a finite number, got {v!r}")
    return float(v)


def _vec3(v):
    if not (isinstance(v, list) and len(v) == 3):
        raise ValueError(f"expected a 3-number list, got {v!r}")
    return tuple(_num(x) for x in v)


def _vec4(v):
    if not (isinstance(v, list) and len(v) == 4):
        raise ValueError(f"expected a 4-number list, got {v!r}")
    return tuple(_num(x) for x in v)


def _token(options):
    def conv(v):
        if v not in options:
            raise ValueError(f"expected one of {options}, got {v!r}")
        return v
    return conv


_SCHEMA = {
    None: {"duration_s": _num, "rate_hz": _num},
    "impedance": {
        "mass_kg": _num,
        "damping_n_s_per_m": _num,
        "stiffness_n_per_m": _num,
    },
    "coupling": {
        "velocity_gain_n_s_per_m": _num,
        "correction_limit_m": _num,
        "hand_speed_max_m_per_s": _num,
        "velocity_window_s": _num,
    },
    "formation": {
        "lengths_m": _vec4,
        "width_m": _num,
        "heading_mode": _token(("fixed", "velocity")),
        "heading_axis": _vec3,
    },
    "pid": {
        "kp": _num,
        "ki": _num,
        "kd": _num,
        "integrator_limit_m_s": _num,
        "accel_limit_m_per_s2": _num,
    },
    "output": {"format": _token(EXPORT_FORMATS)},
}

_WAYPOINT_SCHEMA = {"t_s": _num, "pos_m": _vec3, "interp": _token(INTERP_MODES)}


def _take(doc: dict, section, out: dict):
    """Pop one schema'd section out of the parsed document, validating keys."""
    schema = _SCHEMA[section]
    raw = doc if section is None else doc.pop(section, {})
    if not isinstance(raw, dict):
        raise ScenarioError(f"section must be a table, got {raw!r}", field=section)
    for key, conv in schema.items():
        if key in raw:
            value = raw.pop(key)
            where = key if section is None else f"{section}.{key}"
            try:
                out[key] = conv(value)
            except ValueError as exc:
                raise ScenarioError(str(exc), field=where) from None
    for stray in raw:
        # At the top level the named sections are still present; they are
        # consumed by their own _take passes.
        if section is None and stray in _SCHEMA:
            continue
        where = stray if section is None else f"{section}.{stray}"
        raise ScenarioError("unknown field", field=where)


def load_scenario(text) -> ScenarioConfig:
    """Parse and validate a scenario document; defaults fill every omission."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ScenarioError(f"malformed document: {exc}") from None

    values = {}
    hand = doc.pop("hand", {})
    for section in (None, "impedance", "coupling", "formation", "pid", "output"):
        _take(doc, section, values)

    rate = values.get("rate_hz", 80.0)
    if not (math.isfinite(rate) and rate > 0.0):
        raise ScenarioError(f"rate_hz must be > 0, got {rate}", field="rate_hz")
    duration = values.get("duration_s", 10.0)
    if not (math.isfinite(duration) and duration > 0.0):
        raise ScenarioError(f"duration_s must be > 0, got {duration}", field="duration_s")

    try:
        impedance = ImpedanceParams(
            mass=values.get("mass_kg", 1.9),
            damping=values.get("damping_n_s_per_m", 12.6),
            stiffness=values.get("stiffness_n_per_m", 21.0),
        )
        formation = FormationConfig(
            lengths=values.get("lengths_m", (0.5, 0.5, 0.5, 0.5)),
            width=values.get("width_m", 0.5),
            heading_mode=values.get("heading_mode", "fixed"),
            heading_axis=values.get("heading_axis", (1.0, 0.0, 0.0)),
        )
        pid = PidGains(
            kp=values.get("kp", 8.0),
            ki=values.get("ki", 0.4),
            kd=values.get("kd", 5.0),
            integrator_limit=values.get("integrator_limit_m_s", 0.25),
            accel_limit=values.get("accel_limit_m_per_s2", 6.0),
        )
        world = WorldParams(
            period=1.0 / rate,
            impedance=impedance,
            velocity_gain=values.get("velocity_gain_n_s_per_m", -7.0),
            correction_limit=values.get("correction_limit_m", 0.25),
            hand_speed_max=values.get("hand_speed_max_m_per_s", 1.5),
            velocity_window_s=values.get("velocity_window_s", 0.2),
            formation=formation,
            pid=pid,
        )
    except ParameterError as exc:
        raise ScenarioError(str(exc)) from None

    if not isinstance(hand, dict):
        raise ScenarioError("section must be a table", field="hand")
    raw_points = hand.pop("waypoints", [])
    for stray in hand:
        raise ScenarioError("unknown field", field=f"hand.{stray}")
    waypoints = []
    for i, entry in enumerate(raw_points):
        if not isinstance(entry, dict):
            raise ScenarioError("waypoint must be a table",
                                field=f"hand.waypoints[{i}]")
        fields = {}
        for key, conv in _WAYPOINT_SCHEMA.items():
            if key in entry:
                try:
                    fields[key] = conv(entry.pop(key))
                except ValueError as exc:
                    raise ScenarioError(str(exc),
                                        field=f"hand.waypoints[{i}].{key}") from None
        for stray in entry:
            raise ScenarioError("unknown field", field=f"hand.waypoints[{i}].{stray}")
        if "t_s" not in fields or "pos_m" not in fields:
            raise ScenarioError("waypoint needs t_s and pos_m",
                                field=f"hand.waypoints[{i}]")
        waypoints.append(Waypoint(t_s=fields["t_s"], pos_m=fields["pos_m"],
                                  interp=fields.get("interp", "hold")))
    if not waypoints:
        waypoints = [Waypoint(t_s=0.0, pos_m=(0.0, 0.0, 0.0))]
    for i, (a, b) in enumerate(zip(waypoints, waypoints[1:])):
        if b.t_s <= a.t_s:
            raise ScenarioError(
                f"waypoint times must strictly increase ({a.t_s} then {b.t_s})",
                field=f"hand.waypoints[{i + 1}].t_s")
    if waypoints[-1].t_s > duration:
        raise ScenarioError(
            f"duration_s={duration} is shorter than the last waypoint at t={waypoints[-1].t_s}",
            field="duration_s")

    return ScenarioConfig(world=world, duration_s=duration,
                          waypoints=tuple(waypoints),
                          out_format=values.get("format", "csv"))


def hand_position(waypoints, t: float) -> np.ndarray:
    """Piecewise trajectory evaluation; clamps before/after the list."""
    first, last = waypoints[0], waypoints[-1]
    if t <= first.t_s:
        return np.asarray(first.pos_m, dtype=float)
    if t >= last.t_s:
        return np.asarray(last.pos_m, dtype=float)
    for a, b in zip(waypoints, waypoints[1:]):
        if a.t_s <= t < b.t_s:
            if b.interp == "hold":
                return np.asarray(a.pos_m, dtype=float)
            u = (t - a.t_s) / (b.t_s - a.t_s)
            if b.interp == "smoothstep":
                u = u * u * (3.0 - 2.0 * u)
            pa = np.asarray(a.pos_m, dtype=float)
            pb = np.asarray(b.pos_m, dtype=float)
            return pa + (pb - pa) * u
    return np.asarray(last.pos_m, dtype=float)


@dataclass
class LogTable:
    columns: tuple
    rows: list

    def __eq__(self, other):
        return (isinstance(other, LogTable) and self.columns == other.columns
                and self.rows == other.rows)

    def column(self, name: str) -> list:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


class ScenarioRunError(SwarmlinkError):
    """A tick failed mid-run; carries the partial log and failing tick."""

    def __init__(self, message, tick, partial_log):
        super().__init__(f"tick {tick}: {message}")
        self.tick = tick
        self.partial_log = partial_log


def log_columns() -> tuple:
    cols = ["t_s"]
    cols += ["hand_x_m", "hand_y_m", "hand_z_m"]
    cols += ["hand_vx_m_per_s", "hand_vy_m_per_s", "hand_vz_m_per_s"]
    for link in LINKS:
        cols += [f"raw_{link}_{ax}_m" for ax in "xyz"]
    for link in LINKS:
        cols += [f"imp_{link}_{ax}_m" for ax in "xyz"]
    for i in range(1, 5):
        cols += [f"goal{i}_{ax}_m" for ax in "xyz"]
    for i in range(1, 5):
        cols += [f"pos{i}_{ax}_m" for ax in "xyz"]
    cols += ["spread_ratio", "shape_class", "rate_class", "active_pattern"]
    return tuple(cols)


LOG_COLUMNS = log_columns()


def _log_row(world, pattern: str) -> tuple:
    row = [float(world.time)]
    row += [float(x) for x in world.hand_pos]
    row += [float(x) for x in world.hand_vel]
    for link in LINKS:
        row += [float(x) for x in world.raw_disp[link]]
    for link in LINKS:
        row += [float(x) for x in world.corrections[link]]
    for goal in world.goals:
        row += [float(x) for x in goal]
    for vehicle in world.vehicles:
        row += [float(x) for x in vehicle.pos]
    m = world.metrics
    row += [float(m.spread_ratio), m.shape_class, m.rate_class, pattern]
    return tuple(row)


def run_scenario(config: ScenarioConfig) -> LogTable:
    """Tick the world from spawn to duration; one log row per tick plus t=0."""
    params = config.world
    ticks = int(round(config.duration_s / params.period))
    world = spawn_world(params, hand_position(config.waypoints, 0.0))
    scheduler = TactileScheduler()
    rows = [_log_row(world, scheduler.current_pattern)]
    for k in range(1, ticks + 1):
        t = k * params.period
        try:
            world = world_tick(world, hand_position(config.waypoints, t))
            scheduler.advance(t * 1000.0, world.metrics.shape_class,
                              world.metrics.rate_class)
        except SwarmlinkError as exc:
            raise ScenarioRunError(str(exc), tick=k,
                                   partial_log=LogTable(LOG_COLUMNS, rows)) from exc
        rows.append(_log_row(world, scheduler.current_pattern))
    return LogTable(LOG_COLUMNS, rows)


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def export_log(log: LogTable, fmt: str) -> bytes:
    """Lossless export; CSV for plotting, structured (JSON) for round-trips."""
    if fmt == "csv":
        lines = [",".join(log.columns)]
        for row in log.rows:
            lines.append(",".join(_cell(v) for v in row))
        return ("\n".join(lines) + "\n").encode("utf-8")
    if fmt == "structured":
        payload = {"columns": list(log.columns),
                   "rows": [list(row) for row in log.rows]}
        return json.dumps(payload, separators=(",", ":")).encode("utf-8")
    raise ParameterError(f"unsupported export format {fmt!r}")


def import_log(data: bytes) -> LogTable:
    """Inverse of the structured export."""
    payload = json.loads(data.decode("utf-8"))
    return LogTable(columns=tuple(payload["columns"]),
                    rows=[tuple(row) for row in payload["rows"]])

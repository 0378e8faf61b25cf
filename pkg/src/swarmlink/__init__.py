"""Impedance-linked formation simulator with tactile feedback encoding."""

__version__ = "0.1.0"

from .impedance import (  # noqa: F401
    ImpedanceParams,
    DiscreteModel,
    LinkState,
    build_discrete_model,
    critical_propagator,
    classify_damping,
    step_link,
    hand_force,
    clamp_correction,
)
from .scenario import (  # noqa: F401
    LogTable,
    ScenarioConfig,
    ScenarioRunError,
    export_log,
    import_log,
    load_scenario,
    run_scenario,
)
from .world import WorldParams, WorldState, spawn_world, world_tick  # noqa: F401

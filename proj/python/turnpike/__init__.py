"""Turnpike analysis of finite-dimensional linear-quadratic control problems."""

from turnpike._turnpike import (
    BlowUpError,
    ConfigError,
    NumericalError,
    PreconditionError,
    SystemSpec,
    Trajectory,
    TurnpikeError,
    analyze,
    build_heat,
    build_wave,
    heat_predicate,
    is_c_stabilizable,
    is_controllable,
    is_stabilizable,
    midpoint_rule_defect,
    preset,
    preset_names,
    reproduce,
    solve,
    solve_are,
    solve_cg_oracle,
    solve_fixed_endpoint,
    solve_free_endpoint,
    solve_steady,
    sweep,
    verify_c_turnpike,
    wave_predicate,
    weak_hautus,
)

__all__ = [name for name in dir() if not name.startswith("_")]

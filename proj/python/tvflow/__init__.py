"""Exact total variation flow for step data in one dimension."""

from ._core import (
    BoundaryMode,
    StepFunction,
    TvflowError,
    advance,
    deltas_extinction_time,
    discrete_flow,
    events,
    evolve_deltas,
    evolve_via_tvf,
    extinction_time,
    extrema_count,
    level_cut,
    lp_distance,
    mass,
    relative_error,
    states_at,
    sup_norm,
    total_variation,
    tv_prox,
    verify_rate,
)

__all__ = [
    "BoundaryMode",
    "StepFunction",
    "TvflowError",
    "advance",
    "deltas_extinction_time",
    "discrete_flow",
    "events",
    "evolve_deltas",
    "evolve_via_tvf",
    "extinction_time",
    "extrema_count",
    "level_cut",
    "lp_distance",
    "mass",
    "relative_error",
    "states_at",
    "sup_norm",
    "total_variation",
    "tv_prox",
    "verify_rate",
]

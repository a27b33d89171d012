"""Python bindings for the gtrans Gauss transport library."""

from ._core import (  # noqa: F401
    ConvexBody,
    DensityField,
    DiffRule,
    GtransError,
    RadialProfile,
    SupportField,
    TransportMap,
    ball_density,
    body_density,
    convergence_experiment,
    disk,
    ellipse,
    gaussmap_pushforward,
    isoperimetric_check,
    maxprin_ratio,
    polygon,
    read_hfield,
    run_cli,
    sampling_floor,
    smoothed_polygon,
    sobolev_check,
    solve_2d,
    solve_assignment,
    solve_radial,
    write_hfield,
)

__all__ = [name for name in dir() if not name.startswith("_")]

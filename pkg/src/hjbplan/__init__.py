"""Grid-based optimal-control toolkit for patrol enforcement planning.

Computes expected-profit maps for illegal extraction over a protected area
under two enforcement models (aerial patrols via multi-objective scalarized
Eikonal solves; ground patrols via a randomly-terminated Eikonal solve),
traces optimal trajectories, reports pristine-region statistics, and runs
patrol-placement optimizations.
"""

from .grid import (
    DomainMask,
    Grid2D,
    Problem,
    ScalarField,
    integrate_field,
    normalize_budget,
    sample_bilinear,
)
from .eikonal import (
    EikonalSolution,
    UpwindStencil,
    point_update,
    solve_eikonal,
    solve_eikonal_sweeping,
    solve_transport_pair,
)
from .multiobjective import (
    LambdaSweep,
    ProfitMapA,
    ValueTriplet,
    compute_R,
    pareto_front_at,
    profit_map_a,
    profit_map_a_streaming,
    profit_sharp,
    run_lambda_sweep,
    scalarized_cost,
)
from .termination import (
    ProfitBracketG,
    TerminatedSolution,
    profit_bracket_g,
    profit_bracket_g_streaming,
    run_b_sweep,
    solve_terminated,
)
from .paths import Trajectory, model_g_paths, path_functionals, trace_descent, with_functionals
from .planning import RegionStats, high_value_region, optimize_station, optimize_weights, region_stats
from .scenarios import SCENARIOS, ScenarioSpec, build_problem, scenario_spec
from .gridio import (
    ElevationRaster,
    export_field,
    export_raster,
    load_field,
    load_raster,
    slope_magnitude,
    speed_from_slope,
)

__version__ = "0.1.0"

__all__ = [
    "DomainMask",
    "Grid2D",
    "Problem",
    "ScalarField",
    "integrate_field",
    "normalize_budget",
    "sample_bilinear",
    "EikonalSolution",
    "UpwindStencil",
    "point_update",
    "solve_eikonal",
    "solve_eikonal_sweeping",
    "solve_transport_pair",
    "LambdaSweep",
    "ProfitMapA",
    "ValueTriplet",
    "compute_R",
    "pareto_front_at",
    "profit_map_a",
    "profit_map_a_streaming",
    "profit_sharp",
    "run_lambda_sweep",
    "scalarized_cost",
    "ProfitBracketG",
    "TerminatedSolution",
    "profit_bracket_g",
    "profit_bracket_g_streaming",
    "run_b_sweep",
    "solve_terminated",
    "Trajectory",
    "model_g_paths",
    "path_functionals",
    "trace_descent",
    "with_functionals",
    "RegionStats",
    "high_value_region",
    "optimize_station",
    "optimize_weights",
    "region_stats",
    "SCENARIOS",
    "ScenarioSpec",
    "build_problem",
    "scenario_spec",
    "ElevationRaster",
    "export_field",
    "export_raster",
    "load_field",
    "load_raster",
    "slope_magnitude",
    "speed_from_slope",
]

"""Built-in scenario library: closed-form benchmark problems.

Five unit-square/disk scenarios exercise the full model range (banded patrol
densities, station placement, weight allocation, patrol gaps), and a
synthetic terrain scenario exercises slope-dependent speed with impassable
pockets.  Every scenario normalizes its detection-rate shape to the stated
patrol budget.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .eikonal import solve_eikonal
from .grid import DomainMask, Grid2D, Problem, ScalarField, normalize_budget
from .gridio import ElevationRaster, speed_from_slope


def banded_rate(d: np.ndarray) -> np.ndarray:
    """Detection-rate band peaking at depth 0.3 from the boundary."""
    return 1.0 / (50.0 * (d - 0.3) ** 2 + 0.5)


def two_hill_benefit(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return np.exp(-10.0 * ((X - 0.25) ** 2 + (Y - 0.5) ** 2)) + np.exp(
        -10.0 * ((X - 0.75) ** 2 + (Y - 0.5) ** 2)
    )


def station_gaussian(X, Y, cx, cy):
    return np.exp(-30.0 * ((X - cx) ** 2 + (Y - cy) ** 2))


STATION_SOUTH = (0.5, 0.3)
STATION_NORTH = (0.5, 0.7)

# Patrol-gap scenario: eight stations with different centers and spreads.
# Two staggered arcs screen the east side between the benefit hill and the
# nearest boundary (forcing loaded escape paths to snake through saddles),
# two stations guard the high-benefit boundary midpoints, and one broad
# station taxes the western escapes.
GAP_STATIONS = (
    # (cx, cy, sigma, weight)
    (0.828, 0.347, 0.1092, 1.00),
    (0.900, 0.500, 0.1165, 0.35),
    (0.828, 0.653, 0.1092, 1.00),
    (0.972, 0.340, 0.0952, 1.00),
    (0.972, 0.660, 0.0952, 1.00),
    (0.730, 0.060, 0.1064, 1.30),
    (0.730, 0.940, 0.1064, 1.30),
    (0.250, 0.500, 0.1680, 1.00),
)

# Synthetic terrain: smooth hills plus one sharp spike whose flanks are
# steep enough to be impassable under the slope-speed law.
TERRAIN_BUMPS = (
    # (cx, cy, sigma, height) in length units (meters)
    (1200.0, 1200.0, 500.0, 450.0),
    (2500.0, 3000.0, 600.0, 380.0),
    (3800.0, 1000.0, 500.0, 520.0),
    (3000.0, 2000.0, 400.0, 300.0),
    (4300.0, 3200.0, 700.0, 420.0),
    (800.0, 3200.0, 450.0, 350.0),
    (2000.0, 600.0, 350.0, 280.0),
    (1700.0, 2600.0, 250.0, 1200.0),
)


@dataclass(frozen=True)
class ScenarioSpec:
    """Closed-form definition of one benchmark problem."""

    name: str
    title: str
    domain: str  # 'square' | 'disk' | 'terrain'
    benefit: Callable[[ScenarioSpec, np.ndarray, np.ndarray, np.ndarray], np.ndarray]
    psi_shape: Callable[[ScenarioSpec, np.ndarray, np.ndarray, np.ndarray], np.ndarray]
    E: float
    gamma: float = 1.0
    n_lambda: int = 101
    n_b: int = 101
    p_tilde: float = 0.0
    kappa: float = 1.0
    default_n: int = 501
    station: tuple[float, float] = STATION_SOUTH
    weights: tuple[float, float] = (0.43, 0.57)
    epsilon: float = 0.85

    def with_params(self, **kw) -> ScenarioSpec:
        return replace(self, **kw)


def _b_const2(spec, X, Y, d):
    return np.full_like(X, 2.0)


def _b_two_hills(spec, X, Y, d):
    return two_hill_benefit(X, Y)


def _b_gap(spec, X, Y, d):
    return 3.0 + 7.5 * np.exp(-10.0 * ((X - 0.7) ** 2 + (Y - 0.5) ** 2))


def _b_terrain(spec, X, Y, d):
    # depth-quadratic benefit profile, maximal at the deepest point
    d_m = float(d.max())
    return np.clip(8.0 * d * (2.0 * d_m - d) / d_m, 0.0, None)


def _psi_banded(spec, X, Y, d):
    return banded_rate(d)


def _psi_station(spec, X, Y, d):
    return station_gaussian(X, Y, *spec.station)


def _psi_two_stations(spec, X, Y, d):
    w1, w2 = spec.weights
    return w1 * station_gaussian(X, Y, *STATION_SOUTH) + w2 * station_gaussian(
        X, Y, *STATION_NORTH
    )


def _psi_gaps(spec, X, Y, d):
    out = np.zeros_like(X)
    for cx, cy, sigma, w in GAP_STATIONS:
        out += w * np.exp(-(((X - cx) ** 2 + (Y - cy) ** 2)) / (2.0 * sigma**2))
    return out


def _psi_terrain_band(spec, X, Y, d):
    # trapezoidal depth band: grows from the outer edge at 0.3 d_m, cut at 0.7 d_m
    d_m = float(d.max())
    band = (d > 0.3 * d_m) & (d < 0.7 * d_m)
    return np.where(band, (0.7 * d_m - d) / d_m, 0.0)


def terrain_elevation(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    z = np.zeros_like(X)
    for cx, cy, sigma, h in TERRAIN_BUMPS:
        z += h * np.exp(-(((X - cx) ** 2 + (Y - cy) ** 2)) / (2.0 * sigma**2))
    return z


SCENARIOS: dict[str, ScenarioSpec] = {
    s.name: s
    for s in (
        ScenarioSpec(
            name="example1",
            title="disk domain, constant benefit, banded patrol",
            domain="disk",
            benefit=_b_const2,
            psi_shape=_psi_banded,
            E=2.5,
            n_lambda=1,
            n_b=1,
        ),
        ScenarioSpec(
            name="example2",
            title="two benefit hills, banded patrol on the unit square",
            domain="square",
            benefit=_b_two_hills,
            psi_shape=_psi_banded,
            E=2.0,
        ),
        ScenarioSpec(
            name="example3",
            title="single patrol station placement",
            domain="square",
            benefit=_b_two_hills,
            psi_shape=_psi_station,
            E=2.0,
            default_n=201,
        ),
        ScenarioSpec(
            name="example4",
            title="two-station surveillance allocation",
            domain="square",
            benefit=_b_two_hills,
            psi_shape=_psi_two_stations,
            E=2.0,
            default_n=201,
        ),
        ScenarioSpec(
            name="example5",
            title="patrol gaps around a benefit hill",
            domain="square",
            benefit=_b_gap,
            psi_shape=_psi_gaps,
            E=10.2,
            n_lambda=401,
            n_b=401,
        ),
        ScenarioSpec(
            name="terrain",
            title="synthetic terrain with slope-limited speed",
            domain="terrain",
            benefit=_b_terrain,
            psi_shape=_psi_terrain_band,
            E=3.0e4,
            n_lambda=21,
            n_b=21,
            default_n=501,
        ),
    )
}

TERRAIN_XMAX = 5000.0
TERRAIN_YMAX = 4000.0


def scenario_spec(name: str) -> ScenarioSpec:
    try:
        return SCENARIOS[name]
    except KeyError:
        known = ", ".join(sorted(SCENARIOS))
        raise ValueError(f"unknown scenario {name!r} (known: {known})") from None


def build_problem(
    spec: ScenarioSpec | str,
    n: int | None = None,
    elevation: ElevationRaster | None = None,
) -> Problem:
    """Evaluate a scenario's closed forms on an n x n gridpoint lattice.

    n counts gridpoints per axis (n = 501 means 500 cells).  Terrain
    scenarios keep their native aspect ratio; a user raster overrides the
    synthetic elevation entirely.
    """
    if isinstance(spec, str):
        spec = scenario_spec(spec)
    if spec.domain == "terrain":
        return _build_terrain(spec, n, elevation)
    npts = n or spec.default_n
    if npts < 3:
        raise ValueError("need at least 3 gridpoints per axis")
    grid = Grid2D(npts - 1, npts - 1)
    X, Y = grid.meshgrid()
    if spec.domain == "disk":
        mask = DomainMask.disk(grid, 0.5, 0.5, 0.5)
        d = np.clip(0.5 - np.hypot(X - 0.5, Y - 0.5), 0.0, None)
    elif spec.domain == "square":
        mask = DomainMask.full_interior(grid)
        d = np.minimum(np.minimum(X, 1.0 - X), np.minimum(Y, 1.0 - Y))
    else:
        raise ValueError(f"unknown domain kind {spec.domain!r}")
    return _assemble(spec, grid, mask, X, Y, d, ScalarField.constant(grid, 1.0))


def _build_terrain(spec, n, elevation):
    if elevation is None:
        if n is None:
            nx, ny = 500, 400
        else:
            nx = n - 1
            ny = max(2, int(round(0.8 * nx)))
        grid = Grid2D(nx, ny, xmax=TERRAIN_XMAX, ymax=TERRAIN_YMAX)
        X, Y = grid.meshgrid()
        z = terrain_elevation(X, Y)
        mask = DomainMask.full_interior(grid)
        f_vals = speed_from_slope(z, grid.dx, grid.dy)
    else:
        grid = elevation.to_grid()
        X, Y = grid.meshgrid()
        mask = elevation.domain_mask()
        f_vals = speed_from_slope(elevation)
    f = ScalarField(grid, f_vals)
    ones = ScalarField.constant(grid, 1.0)
    dist = solve_eikonal(grid, mask, ones, ones).u
    d = np.where(np.isfinite(dist.values), dist.values, 0.0)
    return _assemble(spec, grid, mask, X, Y, d, f)


def _assemble(spec, grid, mask, X, Y, d, f):
    B = ScalarField(grid, spec.benefit(spec, X, Y, d))
    shape = ScalarField(grid, spec.psi_shape(spec, X, Y, d))
    psi = normalize_budget(shape, mask, spec.E, spec.gamma)
    K = ScalarField.constant(grid, spec.kappa)
    return Problem(
        grid=grid,
        mask=mask,
        B=B,
        psi=psi,
        f=f,
        K=K,
        p_tilde=spec.p_tilde,
        kappa=spec.kappa,
    )

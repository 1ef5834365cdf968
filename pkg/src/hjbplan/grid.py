"""Uniform Cartesian grid geometry, scalar fields, domain masks, and quadrature.

Everything downstream (Eikonal solvers, profit maps, trajectory tracing)
operates on these types.  Gridpoint (i, j) sits at (i*dx, j*dy); field values
are stored as (Nx+1, Ny+1) float64 arrays indexed [i, j].  All types are
immutable after construction and safe to share across concurrent solves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Grid2D:
    """Uniform rectangular grid over [0, xmax] x [0, ymax] with nx*ny cells."""

    nx: int
    ny: int
    xmax: float = 1.0
    ymax: float = 1.0

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError(f"grid needs at least 2 cells per axis, got {self.nx}x{self.ny}")
        if self.xmax <= 0 or self.ymax <= 0:
            raise ValueError("physical extents must be positive")

    @property
    def dx(self) -> float:
        return self.xmax / self.nx

    @property
    def dy(self) -> float:
        return self.ymax / self.ny

    @property
    def shape(self) -> tuple[int, int]:
        """Gridpoint array shape: (nx+1, ny+1)."""
        return (self.nx + 1, self.ny + 1)

    @property
    def n_points(self) -> int:
        return (self.nx + 1) * (self.ny + 1)

    def x_coords(self) -> np.ndarray:
        return np.linspace(0.0, self.xmax, self.nx + 1)

    def y_coords(self) -> np.ndarray:
        return np.linspace(0.0, self.ymax, self.ny + 1)

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate arrays X, Y of shape (nx+1, ny+1), indexed [i, j]."""
        return np.meshgrid(self.x_coords(), self.y_coords(), indexing="ij")

    def point(self, i: int, j: int) -> tuple[float, float]:
        return (i * self.dx, j * self.dy)


@dataclass(frozen=True)
class ScalarField:
    """One float64 value per gridpoint.

    +inf is allowed as a sentinel for unreachable points (value functions);
    NaN is never allowed.
    """

    grid: Grid2D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, copy=True)
        if v.shape != self.grid.shape:
            raise ValueError(f"field shape {v.shape} does not match grid {self.grid.shape}")
        if np.isnan(v).any():
            raise ValueError("field contains NaN")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, grid: Grid2D, value: float) -> ScalarField:
        return cls(grid, np.full(grid.shape, float(value)))

    @classmethod
    def from_function(cls, grid: Grid2D, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> ScalarField:
        """Evaluate fn(X, Y) on the gridpoint mesh."""
        X, Y = grid.meshgrid()
        return cls(grid, np.broadcast_to(np.asarray(fn(X, Y), dtype=np.float64), grid.shape).copy())

    def with_values(self, values: np.ndarray) -> ScalarField:
        return ScalarField(self.grid, values)


@dataclass(frozen=True)
class DomainMask:
    """Boolean inside-domain indicator per gridpoint.

    Gridpoints on the array border are always outside: the solvers read
    Dirichlet data on every outside point, and interior stencils then never
    leave the array.  The discrete domain boundary is the set of outside
    points adjacent to inside points.
    """

    grid: Grid2D
    inside: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.inside, dtype=bool).copy()
        if m.shape != self.grid.shape:
            raise ValueError(f"mask shape {m.shape} does not match grid {self.grid.shape}")
        m[0, :] = m[-1, :] = False
        m[:, 0] = m[:, -1] = False
        if not m.any():
            raise ValueError("mask has no inside points")
        m.setflags(write=False)
        object.__setattr__(self, "inside", m)

    @classmethod
    def full_interior(cls, grid: Grid2D) -> DomainMask:
        """Every non-border gridpoint is inside (rectangular domain)."""
        m = np.ones(grid.shape, dtype=bool)
        return cls(grid, m)

    @classmethod
    def from_indicator(cls, grid: Grid2D, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> DomainMask:
        """Rasterize an analytic shape by gridpoint-center membership."""
        X, Y = grid.meshgrid()
        return cls(grid, np.asarray(fn(X, Y), dtype=bool))

    @classmethod
    def disk(cls, grid: Grid2D, cx: float, cy: float, radius: float) -> DomainMask:
        return cls.from_indicator(grid, lambda X, Y: (X - cx) ** 2 + (Y - cy) ** 2 < radius**2)

    @property
    def n_inside(self) -> int:
        return int(self.inside.sum())

    def boundary_layer(self) -> np.ndarray:
        """Outside points adjacent (4-neighborhood) to inside points."""
        m = self.inside
        near = np.zeros_like(m)
        near[1:, :] |= m[:-1, :]
        near[:-1, :] |= m[1:, :]
        near[:, 1:] |= m[:, :-1]
        near[:, :-1] |= m[:, 1:]
        return near & ~m


@dataclass(frozen=True)
class Problem:
    """A complete enforcement scenario on one grid.

    B is the extraction benefit, psi the pointwise detection rate, f the
    isotropic speed of motion, K the travel running cost, p_tilde the profit
    threshold below which a site is considered pristine.  kappa mirrors K
    when the running cost is constant (R can then reuse the min-time field).
    """

    grid: Grid2D
    mask: DomainMask
    B: ScalarField
    psi: ScalarField
    f: ScalarField
    K: ScalarField
    p_tilde: float = 0.0
    kappa: float | None = 1.0

    def __post_init__(self):
        ins = self.mask.inside
        if (self.psi.values < 0).any():
            raise ValueError("detection rate psi must be nonnegative")
        if (self.f.values < 0).any():
            raise ValueError("speed f must be nonnegative")
        if (self.B.values < 0).any():
            raise ValueError("benefit B must be nonnegative")
        if (self.K.values[ins] <= 0).any():
            raise ValueError("running cost K must be positive inside the domain")

    @property
    def k_is_constant(self) -> bool:
        ins = self.mask.inside
        kv = self.K.values[ins]
        return bool(np.ptp(kv) == 0.0)


def integrate_field(field: ScalarField, mask: DomainMask, exponent: float = 1.0) -> float:
    """Rectangle-rule integral of field**exponent over inside gridpoints."""
    if exponent < 1.0:
        raise ValueError(f"exponent must be >= 1, got {exponent}")
    v = field.values[mask.inside]
    if exponent != int(exponent) and (v < 0).any():
        raise ValueError("negative field values with non-integer exponent")
    if exponent == 1.0:
        s = v.sum()
    else:
        s = (v**exponent).sum()
    return float(s * field.grid.dx * field.grid.dy)


def normalize_budget(psi_shape: ScalarField, mask: DomainMask, E: float, gamma: float = 1.0) -> ScalarField:
    """Scale a nonnegative shape so that its gamma-power integral equals E.

    Returns mu*psi_shape with mu = (E / integral(shape**gamma))**(1/gamma);
    the result exhausts the patrol budget with equality.
    """
    if E <= 0:
        raise ValueError("budget E must be positive")
    if gamma < 1.0:
        raise ValueError("gamma must be >= 1")
    if (psi_shape.values < 0).any():
        raise ValueError("psi shape must be nonnegative")
    total = integrate_field(psi_shape, mask, gamma)
    if total <= 0.0:
        raise ValueError("psi shape is identically zero inside the domain; no feasible scaling")
    mu = (E / total) ** (1.0 / gamma)
    return psi_shape.with_values(psi_shape.values * mu)


def sample_bilinear(field: ScalarField, x: float, y: float) -> float:
    """Bilinear interpolation of the four surrounding gridpoint values."""
    g = field.grid
    if not (0.0 <= x <= g.xmax and 0.0 <= y <= g.ymax):
        raise ValueError(f"point ({x}, {y}) outside grid box [0,{g.xmax}]x[0,{g.ymax}]")
    i = min(int(x / g.dx), g.nx - 1)
    j = min(int(y / g.dy), g.ny - 1)
    tx = x / g.dx - i
    ty = y / g.dy - j
    v = field.values
    return float(
        (1 - tx) * (1 - ty) * v[i, j]
        + tx * (1 - ty) * v[i + 1, j]
        + (1 - tx) * ty * v[i, j + 1]
        + tx * ty * v[i + 1, j + 1]
    )

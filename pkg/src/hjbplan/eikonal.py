"""Fast-marching Eikonal solver, matched-stencil transport, and sweeping oracle.

Solves f*|grad u| = rhs with u = 0 on every outside gridpoint, via a
Dijkstra-like one-pass marching method.  Gridpoints where the speed drops
below ``f_min`` are treated as impassable obstacles and keep u = +inf; the
right-hand side is floored at ``rhs_floor`` so degenerate running costs (a
detection rate that vanishes off-band) still give a well-defined causal
ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .grid import DomainMask, Grid2D, ScalarField

F_MIN_DEFAULT = 1e-6
RHS_FLOOR_DEFAULT = 1e-12


@dataclass(frozen=True)
class UpwindStencil:
    """Per-axis neighbor choice at one gridpoint: +1 forward, -1 backward, 0 none."""

    dir_x: int
    dir_y: int
    grad_x: float
    grad_y: float


@dataclass(frozen=True)
class EikonalSolution:
    """Value field plus the acceptance bookkeeping of one marching solve."""

    grid: Grid2D
    mask: DomainMask
    u: ScalarField
    order: np.ndarray = field(repr=False)  # flat indices, acceptance sequence
    blocked: np.ndarray = field(repr=False)  # obstacle gridpoints (f < f_min)
    f: ScalarField = field(repr=False)
    rhs: ScalarField = field(repr=False)  # floored rhs actually solved

    def stencil_at(self, i: int, j: int) -> UpwindStencil:
        gx, dirx, gy, diry = _kernels._upwind_gradient(
            self.u.values, i, j, self.grid.dx, self.grid.dy
        )
        return UpwindStencil(int(dirx), int(diry), float(gx), float(gy))

    def max_residual(self) -> float:
        """Largest |f*|grad u| - rhs| over inside, reachable points."""
        return float(
            _kernels.eikonal_residual(
                self.u.values,
                self.mask.inside.astype(np.uint8),
                self.blocked,
                self.f.values,
                self.rhs.values,
                self.grid.dx,
                self.grid.dy,
            )
        )


def point_update(
    ax: float,
    ay: float,
    f_ij: float,
    rhs_ij: float,
    dx: float,
    dy: float,
    rhs_floor: float = RHS_FLOOR_DEFAULT,
) -> float:
    """One-point upwind update from per-axis neighbor values (inf = no neighbor).

    Returns the largest real root of the two-sided quadratic when it respects
    upwindness, otherwise the one-sided update from the smaller neighbor;
    +inf when no axis has a finite neighbor.
    """
    if f_ij <= 0.0:
        raise ValueError("point update needs positive speed")
    c = max(rhs_ij, rhs_floor) / f_ij
    return float(_kernels._local_update(float(ax), float(ay), dx, dy, 0.0, c))


def _prepare(grid, mask, f, rhs, f_min, rhs_floor):
    ins = mask.inside
    fv = f.values
    if (fv < 0).any():
        raise ValueError("speed field must be nonnegative")
    if (rhs.values < 0).any():
        raise ValueError("rhs field must be nonnegative")
    blocked = (ins & (fv < f_min)).astype(np.uint8)
    rhs_f = np.maximum(rhs.values, rhs_floor)
    # beta = rhs/f only matters off obstacles; silence the division there
    with np.errstate(divide="ignore", invalid="ignore"):
        beta = np.where(blocked == 0, rhs_f / np.maximum(fv, 1e-300), 0.0)
    alpha = np.zeros(grid.shape)
    return blocked, rhs_f, alpha, beta


def solve_eikonal(
    grid: Grid2D,
    mask: DomainMask,
    f: ScalarField,
    rhs: ScalarField,
    f_min: float = F_MIN_DEFAULT,
    rhs_floor: float = RHS_FLOOR_DEFAULT,
) -> EikonalSolution:
    """Fast-marching solve of f*|grad u| = rhs, u = 0 outside the domain."""
    blocked, rhs_f, alpha, beta = _prepare(grid, mask, f, rhs, f_min, rhs_floor)
    u, order, n_order, flag = _kernels.fmm_solve(
        mask.inside.astype(np.uint8), blocked, alpha, beta, grid.dx, grid.dy, False
    )
    if flag != 0:
        raise RuntimeError(f"marching solve failed with internal flag {flag}")
    return EikonalSolution(
        grid=grid,
        mask=mask,
        u=ScalarField(grid, u),
        order=order[:n_order],
        blocked=blocked,
        f=f,
        rhs=ScalarField(grid, rhs_f),
    )


def solve_eikonal_sweeping(
    grid: Grid2D,
    mask: DomainMask,
    f: ScalarField,
    rhs: ScalarField,
    tol: float = 1e-13,
    f_min: float = F_MIN_DEFAULT,
    rhs_floor: float = RHS_FLOOR_DEFAULT,
    max_rounds: int = 5000,
) -> EikonalSolution:
    """Gauss-Seidel sweeping solve of the same discrete system (validation oracle).

    Iterates the four diagonal orderings until the largest update falls below
    tol; raises if that never happens within max_rounds.
    """
    blocked, rhs_f, alpha, beta = _prepare(grid, mask, f, rhs, f_min, rhs_floor)
    u, rounds = _kernels.sweep_solve(
        mask.inside.astype(np.uint8), blocked, alpha, beta, grid.dx, grid.dy, tol, max_rounds
    )
    if rounds < 0:
        raise RuntimeError(f"sweeping failed to converge below {tol} in {max_rounds} rounds")
    return EikonalSolution(
        grid=grid,
        mask=mask,
        u=ScalarField(grid, u),
        order=np.empty(0, np.int64),
        blocked=blocked,
        f=f,
        rhs=ScalarField(grid, rhs_f),
    )


def solve_transport_pair(
    eik: EikonalSolution,
    psi: ScalarField,
    K: ScalarField,
    K_lambda: ScalarField,
) -> tuple[ScalarField, ScalarField]:
    """Solve the auxiliary linear system along the stencils of a finished solve.

    v1 accumulates the detection-rate integral and v2 the running-cost
    integral along the paths selected by eik's value field:

        Dx[u]*Dx[v1] + Dy[u]*Dy[v1] = psi * K_lambda / f^2
        Dx[u]*Dx[v2] + Dy[u]*Dy[v2] = K   * K_lambda / f^2

    with v1 = v2 = 0 outside.  Points the solve never reached carry +inf.
    """
    if eik.order.size == 0 and eik.mask.n_inside > 0 and np.isfinite(eik.u.values[eik.mask.inside]).any():
        raise ValueError("transport needs the acceptance order of a marching solve")
    grid = eik.grid
    v1, v2, bad = _kernels.transport_pair(
        eik.u.values,
        eik.order,
        eik.order.size,
        psi.values,
        K.values,
        K_lambda.values,
        eik.f.values,
        grid.dx,
        grid.dy,
    )
    if bad >= 0:
        ny1 = grid.ny + 1
        raise RuntimeError(
            f"degenerate upwind stencil at gridpoint ({bad // ny1}, {bad % ny1}): causality violation"
        )
    unreachable = eik.mask.inside & ~np.isfinite(eik.u.values)
    v1[unreachable] = np.inf
    v2[unreachable] = np.inf
    return ScalarField(grid, v1), ScalarField(grid, v2)

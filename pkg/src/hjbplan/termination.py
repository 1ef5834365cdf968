"""Ground-patrol enforcement model: randomly-terminated Eikonal solves.

A detected perpetrator loses the loot immediately (value b), pays the return
trip R from the detection point, and the trip ends; the expected remaining
cost u from each point therefore solves

    f * |grad u| = K + psi * (b + R - u)

with u = 0 on the boundary.  The value of b enters the right-hand side, so a
uniform b-grid spanning the benefit range brackets the profit between two
adjacent solves.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _kernels
from .eikonal import F_MIN_DEFAULT
from .grid import Problem, ScalarField


@dataclass(frozen=True)
class TerminatedSolution:
    """Expected remaining post-extraction cost for one loot value b."""

    b: float
    u_bar: ScalarField
    problem: Problem = field(repr=False)
    R: ScalarField = field(repr=False)
    blocked: np.ndarray = field(repr=False)

    def max_residual(self) -> float:
        """Largest residual of the discrete equation (squared form)."""
        return float(
            _kernels.terminated_residual(
                self.u_bar.values,
                self.problem.mask.inside.astype(np.uint8),
                self.blocked,
                self.problem.f.values,
                self.problem.psi.values,
                self.problem.K.values,
                self.R.values,
                self.b,
                self.problem.grid.dx,
                self.problem.grid.dy,
            )
        )


@dataclass(frozen=True)
class ProfitBracketG:
    """Pointwise profit bracket [P_g_minus, P_g_plus] from the b-grid sweep."""

    P_g_minus: ScalarField
    P_g_plus: ScalarField
    n_b: int
    b_lo: float
    b_hi: float

    def midpoint(self) -> ScalarField:
        # both bounds are -inf together at unreachable points, so no NaN
        return self.P_g_minus.with_values(0.5 * (self.P_g_minus.values + self.P_g_plus.values))

    def conservative_boundary_set(self, p_tilde: float = 0.0) -> np.ndarray:
        """Points whose bracket straddles the threshold: P- <= p_tilde <= P+."""
        return (self.P_g_minus.values <= p_tilde) & (p_tilde <= self.P_g_plus.values)


def solve_terminated(
    problem: Problem,
    R: ScalarField,
    b: float,
    f_min: float = F_MIN_DEFAULT,
) -> TerminatedSolution:
    """Marching solve of the randomly-terminated equation for loot value b."""
    if b < 0:
        raise ValueError("loot value b must be nonnegative")
    grid = problem.grid
    ins = problem.mask.inside
    fv = problem.f.values
    blocked = ins & (fv < f_min)
    # points the approach solve never reached are unreachable here too
    blocked |= ins & ~np.isfinite(R.values)
    blocked = blocked.astype(np.uint8)
    with np.errstate(divide="ignore", invalid="ignore"):
        fsafe = np.maximum(fv, 1e-300)
        alpha = np.where(blocked == 0, problem.psi.values / fsafe, 0.0)
        beta = np.where(
            blocked == 0,
            (problem.K.values + problem.psi.values * (b + np.where(np.isfinite(R.values), R.values, 0.0)))
            / fsafe,
            0.0,
        )
    u, _, _, flag = _kernels.fmm_solve(
        ins.astype(np.uint8), blocked, alpha, beta, grid.dx, grid.dy, True
    )
    if flag == 2:
        raise RuntimeError("randomly-terminated solve overflowed its heap (internal error)")
    return TerminatedSolution(
        b=float(b), u_bar=ScalarField(grid, u), problem=problem, R=R, blocked=blocked
    )


def b_grid_for(problem: Problem, n_b: int) -> np.ndarray:
    """Uniform loot-value grid spanning the benefit range (a single value
    when the benefit is constant)."""
    if n_b < 1:
        raise ValueError("n_b must be >= 1")
    B = problem.B.values[problem.mask.inside]
    b_lo, b_hi = float(B.min()), float(B.max())
    if b_hi - b_lo <= 1e-12 * max(1.0, abs(b_hi)):
        return np.array([b_lo])
    return np.linspace(b_lo, b_hi, n_b + 1)


def run_b_sweep(
    problem: Problem,
    R: ScalarField,
    n_b: int,
    f_min: float = F_MIN_DEFAULT,
    workers: int = 1,
) -> list[TerminatedSolution]:
    """Solve every loot value on the b-grid, ordered by b."""
    bs = b_grid_for(problem, n_b)
    return list(_sweep(problem, R, bs, f_min, workers))


def _sweep(problem, R, bs, f_min, workers) -> Iterator[TerminatedSolution]:
    def run(item):
        m, b = item
        try:
            return solve_terminated(problem, R, b, f_min)
        except Exception as exc:
            raise RuntimeError(f"b sweep failed at m={m} (b={b:g}): {exc}") from exc

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            yield from pool.map(run, enumerate(bs))
    else:
        for item in enumerate(bs):
            yield run(item)


def profit_bracket_g(
    sweep: Sequence[TerminatedSolution] | Iterable[TerminatedSolution],
    B: ScalarField,
    R: ScalarField,
) -> ProfitBracketG:
    """Bracket the ground-model profit between adjacent b-grid solves.

    A point with B in (b_m, b_m+1] has its exact expected cost between the
    two bracketing solves, so B - u_m+1 - R <= P_g <= B - u_m - R.  The lower
    bound is P_g_minus, the upper P_g_plus; their gap never exceeds the
    benefit span divided by the grid count.
    """
    solutions = list(sweep) if not isinstance(sweep, list) else sweep
    return _bracket_reduce(iter(solutions), len(solutions) - 1, B, R)


def profit_bracket_g_streaming(
    problem: Problem,
    R: ScalarField,
    n_b: int,
    f_min: float = F_MIN_DEFAULT,
    workers: int = 1,
) -> ProfitBracketG:
    """profit_bracket_g without materializing the sweep (constant memory)."""
    bs = b_grid_for(problem, n_b)
    return _bracket_reduce(
        _sweep(problem, R, bs, f_min, workers), len(bs) - 1, problem.B, R
    )


def _bracket_reduce(solutions, n_b, B, R):
    Bv = B.values
    first = next(solutions)
    grid = first.u_bar.grid
    if n_b == 0:
        # degenerate span: single exact solve, bracket collapses
        P = Bv - first.u_bar.values - R.values
        P[~first.problem.mask.inside] = 0.0
        fld = ScalarField(grid, P)
        return ProfitBracketG(fld, fld, 1, first.b, first.b)
    b_vals = [first.b]
    lo = np.full(grid.shape, np.nan)
    hi = np.full(grid.shape, np.nan)
    prev = first
    for cur in solutions:
        b_vals.append(cur.b)
        m = len(b_vals) - 2
        if m == 0:
            sel = (Bv >= prev.b) & (Bv <= cur.b)
        else:
            sel = (Bv > prev.b) & (Bv <= cur.b)
        if sel.any():
            # u_bar grows with b: the upper solve gives the lower profit bound
            lo[sel] = (Bv - cur.u_bar.values - R.values)[sel]
            hi[sel] = (Bv - prev.u_bar.values - R.values)[sel]
        prev = cur
    inside = prev.problem.mask.inside
    if np.isnan(lo[inside]).any():
        raise RuntimeError("benefit values fell outside the b-grid span")
    lo[~inside] = 0.0
    hi[~inside] = 0.0
    return ProfitBracketG(
        ScalarField(grid, lo), ScalarField(grid, hi), n_b, b_vals[0], b_vals[-1]
    )

"""Aerial-patrol enforcement model: scalarized lambda-sweep and profit maps.

A perpetrator returning with loot balances two path integrals: J1 (detection
exposure, the integral of psi along the path) and J2 (travel cost, the
integral of K).  Sweeping the scalarization weight lambda over [0, 1] and
solving one Eikonal problem per weight traces the convex part of the
per-point Pareto front; the expected-profit map then maximizes

    B * exp(-J1) - J2 - R

over the swept weights, with R the pre-extraction approach cost.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .eikonal import F_MIN_DEFAULT, RHS_FLOOR_DEFAULT, solve_eikonal, solve_transport_pair
from .grid import Problem, ScalarField, sample_bilinear


@dataclass(frozen=True)
class ValueTriplet:
    """Scalarized value U plus the criterion-restricted values (V1, V2) at one weight."""

    lam: float
    U: ScalarField
    V1: ScalarField
    V2: ScalarField

    def identity_gap(self) -> float:
        """Max |lam*V1 + (1-lam)*V2 - U| over points where U is finite."""
        u = self.U.values
        fin = np.isfinite(u)
        combo = self.lam * self.V1.values[fin] + (1.0 - self.lam) * self.V2.values[fin]
        return float(np.abs(combo - u[fin]).max())


@dataclass(frozen=True)
class LambdaSweep:
    problem: Problem
    triplets: list[ValueTriplet]

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([t.lam for t in self.triplets])


@dataclass(frozen=True)
class ProfitMapA:
    """Expected-profit map of the aerial model with its argmax bookkeeping."""

    P_a: ScalarField
    argmax_k: np.ndarray = field(repr=False)
    R: ScalarField = field(repr=False)
    lambdas: np.ndarray = field(repr=False)


def scalarized_cost(
    psi: ScalarField, K: ScalarField, lam: float, floor: float = RHS_FLOOR_DEFAULT
) -> ScalarField:
    """Pointwise lam*psi + (1-lam)*K, floored so the solve stays causal."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    vals = lam * psi.values + (1.0 - lam) * K.values
    return psi.with_values(np.maximum(vals, floor))


def lambda_grid(n_lambda: int) -> np.ndarray:
    """The weights k/N for k = 0..N."""
    if n_lambda < 1:
        raise ValueError("n_lambda must be >= 1")
    return np.arange(n_lambda + 1) / n_lambda


def solve_triplet(problem: Problem, lam: float, f_min: float = F_MIN_DEFAULT) -> ValueTriplet:
    """One scalarized Eikonal solve plus its matched transport pair."""
    klam = scalarized_cost(problem.psi, problem.K, lam)
    eik = solve_eikonal(problem.grid, problem.mask, problem.f, klam, f_min)
    v1, v2 = solve_transport_pair(eik, problem.psi, problem.K, klam)
    return ValueTriplet(lam, eik.u, v1, v2)


def _sweep_triplets(problem, lambdas, f_min, workers):
    def run(item):
        k, lam = item
        try:
            return solve_triplet(problem, lam, f_min)
        except Exception as exc:
            raise RuntimeError(f"lambda sweep failed at k={k} (lambda={lam:g}): {exc}") from exc

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            yield from pool.map(run, enumerate(lambdas))
    else:
        for item in enumerate(lambdas):
            yield run(item)


def run_lambda_sweep(
    problem: Problem,
    n_lambda: int,
    f_min: float = F_MIN_DEFAULT,
    workers: int = 1,
) -> LambdaSweep:
    """Solve all weights k/N, k = 0..N, and keep every triplet.

    Holds (N+1) * 3 fields in memory; for large sweeps on fine grids prefer
    profit_map_a_streaming, which reduces triplets as they are produced.
    """
    lambdas = lambda_grid(n_lambda)
    return LambdaSweep(problem, list(_sweep_triplets(problem, lambdas, f_min, workers)))


def compute_R(problem: Problem, f_min: float = F_MIN_DEFAULT) -> ScalarField:
    """Cost of the optimal approach path from the boundary to each point.

    With a constant running cost this is kappa times the min-time field;
    otherwise one Eikonal solve with the full running cost on the right.
    """
    if problem.k_is_constant:
        kappa = float(problem.K.values[problem.mask.inside][0])
        ones = ScalarField.constant(problem.grid, 1.0)
        tau = solve_eikonal(problem.grid, problem.mask, problem.f, ones, f_min).u
        return tau.with_values(tau.values * kappa)
    return solve_eikonal(problem.grid, problem.mask, problem.f, problem.K, f_min).u


def _payoff(B: np.ndarray, triplet: ValueTriplet) -> np.ndarray:
    return B * np.exp(-triplet.V1.values) - triplet.V2.values


def profit_map_a(sweep: LambdaSweep, R: ScalarField) -> ProfitMapA:
    """Per-point maximum of the lambda payoffs minus the approach cost."""
    return _reduce_profit(
        sweep.problem, iter(sweep.triplets), sweep.lambdas, R
    )


def profit_map_a_streaming(
    problem: Problem,
    R: ScalarField,
    n_lambda: int,
    f_min: float = F_MIN_DEFAULT,
    workers: int = 1,
) -> ProfitMapA:
    """profit_map_a without materializing the sweep (constant memory in N)."""
    lambdas = lambda_grid(n_lambda)
    return _reduce_profit(
        problem, _sweep_triplets(problem, lambdas, f_min, workers), lambdas, R
    )


def _reduce_profit(problem, triplets, lambdas, R):
    B = problem.B.values
    best = None
    argmax = None
    for k, t in enumerate(triplets):
        pay = _payoff(B, t)
        if best is None:
            best = pay
            argmax = np.zeros(problem.grid.shape, dtype=np.int32)
        else:
            better = pay > best  # ties keep the smaller k
            np.copyto(best, pay, where=better)
            argmax[better] = k
    P = best - R.values
    P[~problem.mask.inside] = 0.0
    return ProfitMapA(
        P_a=ScalarField(problem.grid, P),
        argmax_k=argmax,
        R=R,
        lambdas=lambdas,
    )


def profit_sharp(
    problem: Problem,
    R: ScalarField,
    n_b: int = 1,
    f_min: float = F_MIN_DEFAULT,
) -> ScalarField:
    """Linearized-detection lower bound on the aerial profit map.

    For loot value b the weight b/(b+1) turns one scalarized solve into the
    value of the linearized problem after scaling by (b+1); the bound is
    B - (B+1)*u - R.  Non-constant benefit fields are handled on a uniform
    b-grid with per-point linear interpolation between bracketing solves.
    """
    if n_b < 1:
        raise ValueError("n_b must be >= 1")
    B = problem.B.values
    ins = problem.mask.inside
    b_lo = float(B[ins].min())
    b_hi = float(B[ins].max())

    def scaled_solve(b):
        lam = b / (b + 1.0)
        klam = scalarized_cost(problem.psi, problem.K, lam)
        u = solve_eikonal(problem.grid, problem.mask, problem.f, klam, f_min).u.values
        return (b + 1.0) * u

    if b_hi - b_lo <= 1e-12 * max(1.0, abs(b_hi)):
        u_sharp = scaled_solve(b_lo)
    else:
        b_grid = np.linspace(b_lo, b_hi, n_b + 1)
        m_idx = np.clip(np.searchsorted(b_grid, B, side="left") - 1, 0, n_b - 1)
        w = (B - b_grid[m_idx]) / (b_grid[m_idx + 1] - b_grid[m_idx])
        w = np.clip(w, 0.0, 1.0)
        u_sharp = np.zeros(problem.grid.shape)
        prev = scaled_solve(b_grid[0])
        for m in range(1, n_b + 1):
            cur = scaled_solve(b_grid[m])
            sel = m_idx == m - 1
            if sel.any():
                with np.errstate(invalid="ignore"):
                    comb = (1.0 - w) * prev + w * cur
                comb[~(np.isfinite(prev) & np.isfinite(cur))] = np.inf
                u_sharp[sel] = comb[sel]
            prev = cur
    P = B - u_sharp - R.values
    P[~ins] = 0.0
    return ScalarField(problem.grid, P)


def sample_curves_streaming(
    problem: Problem,
    n_lambda: int,
    pts: list[tuple[float, float]],
    f_min: float = F_MIN_DEFAULT,
    workers: int = 1,
) -> np.ndarray:
    """(J1, J2) bilinear samples at the given points for every swept weight.

    Returns an array of shape (len(pts), n_lambda+1, 2) without keeping any
    triplet in memory; the per-point payoff curve and Pareto front follow
    from it directly.
    """
    for x0 in pts:
        _require_inside(problem, x0)
    lambdas = lambda_grid(n_lambda)
    out = np.empty((len(pts), lambdas.size, 2))
    for k, t in enumerate(_sweep_triplets(problem, lambdas, f_min, workers)):
        for p, x0 in enumerate(pts):
            out[p, k, 0] = sample_bilinear(t.V1, *x0)
            out[p, k, 1] = sample_bilinear(t.V2, *x0)
    return out


def payoff_curve_at(sweep: LambdaSweep, x0: tuple[float, float]) -> np.ndarray:
    """Rows (lambda, J1, J2, payoff) sampled at x0 for every swept weight."""
    _require_inside(sweep.problem, x0)
    B0 = sample_bilinear(sweep.problem.B, *x0)
    rows = np.empty((len(sweep.triplets), 4))
    for k, t in enumerate(sweep.triplets):
        j1 = sample_bilinear(t.V1, *x0)
        j2 = sample_bilinear(t.V2, *x0)
        rows[k] = (t.lam, j1, j2, B0 * np.exp(-j1) - j2)
    return rows


def pareto_front_at(sweep: LambdaSweep, x0: tuple[float, float]) -> list[tuple[float, float]]:
    """Non-dominated (J1, J2) pairs at x0, J1 ascending.

    A pair dominates another when both components are <= and at least one is
    strictly smaller; exact duplicates collapse to one point.
    """
    rows = payoff_curve_at(sweep, x0)
    pts = sorted({(float(j1), float(j2)) for j1, j2 in rows[:, 1:3]})
    front: list[tuple[float, float]] = []
    best_j2 = np.inf
    for j1, j2 in pts:
        if j2 < best_j2:
            front.append((j1, j2))
            best_j2 = j2
    return front


def _require_inside(problem: Problem, x0: tuple[float, float]) -> None:
    g = problem.grid
    i = int(round(x0[0] / g.dx))
    j = int(round(x0[1] / g.dy))
    if not (0 <= i <= g.nx and 0 <= j <= g.ny) or not problem.mask.inside[i, j]:
        raise ValueError(f"point {x0} is outside the domain")

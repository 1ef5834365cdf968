"""Pristine-region statistics and patrol-placement grid searches."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import DomainMask, ScalarField
from .multiobjective import compute_R, profit_map_a_streaming
from .eikonal import F_MIN_DEFAULT


@dataclass(frozen=True)
class RegionStats:
    """Pristine-area summary of one profit map."""

    pristine_mask: np.ndarray = field(repr=False)
    A_p: float  # pristine gridpoint proportion of the inside set
    V_p: float  # benefit-weighted pristine proportion
    P_max: float  # maximum expected profit over inside points

    def __str__(self) -> str:
        return f"A_p={100 * self.A_p:.2f}% V_p={100 * self.V_p:.2f}% P_max={self.P_max:.4f}"


def region_stats(
    P: ScalarField, B: ScalarField, mask: DomainMask, p_tilde: float = 0.0
) -> RegionStats:
    """Classify gridpoints with profit at most p_tilde as pristine."""
    ins = mask.inside
    pristine = ins & (P.values <= p_tilde)
    total_b = float(B.values[ins].sum())
    return RegionStats(
        pristine_mask=pristine,
        A_p=float(pristine.sum()) / float(ins.sum()),
        V_p=float(B.values[pristine].sum()) / total_b if total_b > 0 else 1.0,
        P_max=float(P.values[ins].max()),
    )


def high_value_region(
    P_a: ScalarField, R: ScalarField, mask: DomainMask, epsilon: float
) -> np.ndarray:
    """Points whose gross payoff P + R reaches (1-epsilon) of its maximum."""
    if not 0.0 <= epsilon < 1.0:
        raise ValueError("epsilon must lie in [0, 1)")
    ins = mask.inside
    with np.errstate(invalid="ignore"):
        gross = P_a.values + R.values
    gross[np.isnan(gross)] = -np.inf  # unreachable: -inf profit, +inf approach
    thr = (1.0 - epsilon) * float(gross[ins].max())
    return ins & (gross >= thr)


def optimize_station(
    base_spec,
    candidates: list[tuple[float, float]],
    n: int = 201,
    n_lambda: int | None = None,
    f_min: float = F_MIN_DEFAULT,
    workers: int = 1,
    tie_tol: float = 0.0,
) -> tuple[list[tuple[float, float]], np.ndarray]:
    """Exhaustive search for the patrol-station location maximizing A_p.

    Every candidate places one normalized Gaussian detection-rate bump and
    runs the full aerial-model pipeline.  All maximizers within tie_tol of
    the best A_p are reported; mirror-symmetric scenarios tie exactly, so the
    default reports exact ties only.  Ties are reported, never broken.
    """
    from .scenarios import build_problem

    a_p = np.empty(len(candidates))
    for idx, station in enumerate(candidates):
        problem = build_problem(base_spec.with_params(station=station), n)
        stats = _model_a_stats(problem, n_lambda or base_spec.n_lambda, f_min, workers)
        a_p[idx] = stats.A_p
    best = a_p.max()
    winners = [candidates[i] for i in range(len(candidates)) if a_p[i] >= best - tie_tol]
    return winners, a_p


def optimize_weights(
    base_spec,
    n_w: int,
    n: int = 201,
    n_lambda: int | None = None,
    f_min: float = F_MIN_DEFAULT,
    workers: int = 1,
    tie_tol: float = 0.0,
) -> tuple[list[tuple[float, float]], np.ndarray]:
    """Grid search over two-station allocation weights (w1, 1-w1)."""
    from .scenarios import build_problem

    if n_w < 1:
        raise ValueError("n_w must be >= 1")
    w1s = np.arange(n_w + 1) / n_w
    a_p = np.empty(n_w + 1)
    for idx, w1 in enumerate(w1s):
        problem = build_problem(base_spec.with_params(weights=(w1, 1.0 - w1)), n)
        stats = _model_a_stats(problem, n_lambda or base_spec.n_lambda, f_min, workers)
        a_p[idx] = stats.A_p
    best = a_p.max()
    winners = [
        (float(w1s[i]), float(1.0 - w1s[i]))
        for i in range(len(w1s))
        if a_p[i] >= best - tie_tol
    ]
    return winners, a_p


def _model_a_stats(problem, n_lambda, f_min, workers) -> RegionStats:
    R = compute_R(problem, f_min)
    pm = profit_map_a_streaming(problem, R, n_lambda, f_min, workers)
    return region_stats(pm.P_a, problem.B, problem.mask, problem.p_tilde)

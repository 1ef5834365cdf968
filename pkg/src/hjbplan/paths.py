"""Gradient-descent trajectory extraction and path functionals.

Optimal trajectories are gradient lines of the value fields, so an explicit
first-order descent with a sub-cell spatial step recovers them to the same
order as the solvers.  Node gradients come from central differences (one
sided next to unreachable points) and are sampled bilinearly along the way.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .grid import DomainMask, Problem, ScalarField

REACHED_BOUNDARY = "reached-boundary"
STALLED = "stalled"
STEP_CAP = "step-cap"

GRAD_EPS = 1e-12


@dataclass(frozen=True)
class Trajectory:
    """Time-parameterized polyline with optional accumulated path integrals."""

    points: np.ndarray  # (n, 2)
    times: np.ndarray  # (n,) cumulative travel time
    terminated: str
    j1: np.ndarray | None = None  # cumulative detection-rate integral
    j2: np.ndarray | None = None  # cumulative running-cost integral

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def total_time(self) -> float:
        return float(self.times[-1])

    def length(self) -> float:
        if len(self) < 2:
            return 0.0
        return float(np.sum(np.hypot(*np.diff(self.points, axis=0).T)))


def _sample(values: np.ndarray, grid, x: float, y: float) -> float:
    """Bilinear sample ignoring zero-weight corners (inf-safe)."""
    i = min(int(x / grid.dx), grid.nx - 1)
    j = min(int(y / grid.dy), grid.ny - 1)
    tx = x / grid.dx - i
    ty = y / grid.dy - j
    out = 0.0
    for wi, ii in ((1.0 - tx, i), (tx, i + 1)):
        for wj, jj in ((1.0 - ty, j), (ty, j + 1)):
            w = wi * wj
            if w > 0.0:
                out += w * values[ii, jj]
    return out


def _cell_touches_outside(mask: DomainMask, x: float, y: float) -> bool:
    g = mask.grid
    i = min(int(x / g.dx), g.nx - 1)
    j = min(int(y / g.dy), g.ny - 1)
    return not mask.inside[i : i + 2, j : j + 2].all()


def trace_descent(
    u: ScalarField,
    f: ScalarField,
    mask: DomainMask,
    x0: tuple[float, float],
    step_factor: float = 0.5,
) -> Trajectory:
    """Steepest-descent path of u from x0 until the domain boundary.

    The spatial step is step_factor*min(dx, dy); time advances by step/f.
    Stops with reason reached-boundary (the current cell touches an outside
    gridpoint), stalled (gradient below 1e-12, e.g. a plateau from the
    right-hand-side floor or an impassable pocket), or step-cap.
    """
    if not 0.0 < step_factor <= 1.0:
        raise ValueError("step_factor must lie in (0, 1]")
    g = u.grid
    x, y = float(x0[0]), float(x0[1])
    if not (0.0 <= x <= g.xmax and 0.0 <= y <= g.ymax):
        raise ValueError(f"start point {x0} outside the grid box")
    i0 = int(round(x / g.dx))
    j0 = int(round(y / g.dy))
    if mask.inside[i0, j0] and not np.isfinite(u.values[i0, j0]):
        raise ValueError(f"start point {x0} is unreachable (infinite value)")

    gx, gy = _kernels.node_gradients(u.values, g.dx, g.dy)
    step = step_factor * min(g.dx, g.dy)
    max_steps = int(10 * (g.nx + g.ny) / step_factor)

    pts = [(x, y)]
    times = [0.0]
    reason = STEP_CAP
    for _ in range(max_steps):
        if _cell_touches_outside(mask, x, y):
            reason = REACHED_BOUNDARY
            break
        sx = _sample(gx, g, x, y)
        sy = _sample(gy, g, x, y)
        norm = np.hypot(sx, sy)
        if norm < GRAD_EPS:
            reason = STALLED
            break
        speed = max(_sample(f.values, g, x, y), 1e-300)
        x = min(max(x - step * sx / norm, 0.0), g.xmax)
        y = min(max(y - step * sy / norm, 0.0), g.ymax)
        pts.append((x, y))
        times.append(times[-1] + step / speed)
    return Trajectory(points=np.array(pts), times=np.array(times), terminated=reason)


def with_functionals(traj: Trajectory, psi: ScalarField, K: ScalarField) -> Trajectory:
    """Attach cumulative J1/J2 arrays (midpoint rule per segment)."""
    n = len(traj)
    j1 = np.zeros(n)
    j2 = np.zeros(n)
    g = psi.grid
    for s in range(1, n):
        mx, my = 0.5 * (traj.points[s - 1] + traj.points[s])
        dt = traj.times[s] - traj.times[s - 1]
        j1[s] = j1[s - 1] + _sample(psi.values, g, mx, my) * dt
        j2[s] = j2[s - 1] + _sample(K.values, g, mx, my) * dt
    return replace(traj, j1=j1, j2=j2)


def path_functionals(
    traj: Trajectory, psi: ScalarField, K: ScalarField
) -> tuple[float, float, float]:
    """Total (J1, J2, detection-free probability exp(-J1)) along the path."""
    t = with_functionals(traj, psi, K)
    return float(t.j1[-1]), float(t.j2[-1]), float(np.exp(-t.j1[-1]))


def model_g_paths(
    problem: Problem,
    terminated,
    u_K: ScalarField,
    x0: tuple[float, float],
    detection_points: list[tuple[float, float]],
    step_factor: float = 0.5,
) -> tuple[Trajectory, list[Trajectory]]:
    """Ground-model path pair: pre-detection descent of the terminated value
    field (a TerminatedSolution or its bare u_bar field), and from each
    detection point a plain cost-optimal escape path.

    Detection points already on the discrete boundary yield single-vertex
    escape paths of zero duration.
    """
    u_bar = getattr(terminated, "u_bar", terminated)
    pre = trace_descent(u_bar, problem.f, problem.mask, x0, step_factor)
    posts = [
        trace_descent(u_K, problem.f, problem.mask, p, step_factor)
        for p in detection_points
    ]
    return pre, posts

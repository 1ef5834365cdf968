"""Contour-map and Pareto-front figure rendering from exported files."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .formats import FieldData, InputError, non_dominated, read_field, read_front, read_trajectories


@dataclass(frozen=True)
class LevelOverlay:
    level: float
    source: str | None = None  # field file to contour; None: the base field
    color: str = "black"
    linestyle: str = "dashed"
    label: str | None = None


@dataclass(frozen=True)
class TrajectoryOverlay:
    source: str
    color: str = "magenta"
    linestyle: str = "solid"


@dataclass(frozen=True)
class FigureSpec:
    """Everything one field figure needs: inputs, overlays, styling, output."""

    field: str
    output: str
    mask: str | None = None
    title: str = ""
    cmap: str = "viridis"
    levels: tuple[LevelOverlay, ...] = ()
    trajectories: tuple[TrajectoryOverlay, ...] = ()

    @classmethod
    def from_json(cls, path) -> "FigureSpec":
        try:
            raw = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise InputError(f"spec file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"bad figure spec {path}: {exc}") from None
        levels = tuple(LevelOverlay(**lv) for lv in raw.pop("levels", []))
        trajs = tuple(TrajectoryOverlay(**tr) for tr in raw.pop("trajectories", []))
        return cls(levels=levels, trajectories=trajs, **raw)


def _masked(base: FieldData, mask_path) -> np.ndarray:
    vals = base.values.astype(float).copy()
    if mask_path:
        mask = read_field(mask_path)
        if mask.values.shape != vals.shape:
            raise InputError("mask grid does not match the field grid")
        vals[mask.values <= 0.5] = np.nan
    vals[~np.isfinite(vals)] = np.nan
    return vals


def render_field_figure(spec: FigureSpec) -> Path:
    """Filled contour map with level-set and trajectory overlays."""
    base = read_field(spec.field)
    vals = _masked(base, spec.mask)
    X, Y = base.mesh()

    fig, ax = plt.subplots(figsize=(6.4, 5.6))
    finite = vals[np.isfinite(vals)]
    if finite.size and np.ptp(finite) > 0:
        cf = ax.contourf(X, Y, vals, levels=24, cmap=spec.cmap)
    else:
        # constant field: a flat pseudocolor, contourf would reject one level
        cf = ax.pcolormesh(X, Y, np.nan_to_num(vals, nan=np.nanmin(vals) if finite.size else 0.0),
                           cmap=spec.cmap, shading="auto")
    fig.colorbar(cf, ax=ax, shrink=0.9)

    for ov in spec.levels:
        src = read_field(ov.source) if ov.source else base
        data = _masked(src, spec.mask)
        ax.contour(X, Y, data, levels=[ov.level], colors=[ov.color],
                   linestyles=ov.linestyle, linewidths=1.6)
        if ov.label:
            ax.plot([], [], color=ov.color, linestyle=ov.linestyle, label=ov.label)

    for tr in spec.trajectories:
        for poly in read_trajectories(tr.source):
            ax.plot(poly[:, 0], poly[:, 1], color=tr.color, linestyle=tr.linestyle,
                    linewidth=1.8)

    if spec.title:
        ax.set_title(spec.title)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal")
    if any(ov.label for ov in spec.levels):
        ax.legend(loc="upper right", fontsize=8)
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=140, bbox_inches="tight")
    plt.close(fig)
    return out


def render_front_figure(front_path, output, title: str = "") -> Path:
    """Two panels: payoff against lambda with the max marked, and the
    non-dominated (J1, J2) scatter."""
    rows = read_front(front_path)
    lam, j1, j2, payoff = rows.T
    best = int(np.argmax(payoff))

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10.5, 4.4))
    if len(lam) > 1:
        ax1.plot(lam, payoff, color="tab:blue", lw=1.2)
    ax1.plot([lam[best]], [payoff[best]], "k*", markersize=12)
    ax1.axhline(payoff[best], color="black", linestyle="dashed", lw=0.9)
    ax1.set_xlabel("lambda")
    ax1.set_ylabel("payoff")
    ax1.set_title("scalarization weight sweep")

    keep = non_dominated(j1, j2)
    ax2.scatter(j1[keep], j2[keep], s=18, c="tab:blue")
    ax2.plot([j1[best]], [j2[best]], "k*", markersize=12)
    ax2.set_xlabel("J1 (detection exposure)")
    ax2.set_ylabel("J2 (travel cost)")
    ax2.set_title("non-dominated front")

    if title:
        fig.suptitle(title)
    out = Path(output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=140, bbox_inches="tight")
    plt.close(fig)
    return out

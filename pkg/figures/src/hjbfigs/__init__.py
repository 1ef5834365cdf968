"""Figure scripts for exported patrol-planning outputs.

Pure readers of the solver's file formats plus matplotlib renderers; nothing
here recomputes solver quantities.
"""

from .formats import FieldData, InputError, non_dominated, read_field, read_front, read_stats, read_trajectories
from .render import FigureSpec, LevelOverlay, TrajectoryOverlay, render_field_figure, render_front_figure

__all__ = [
    "FieldData",
    "InputError",
    "non_dominated",
    "read_field",
    "read_front",
    "read_stats",
    "read_trajectories",
    "FigureSpec",
    "LevelOverlay",
    "TrajectoryOverlay",
    "render_field_figure",
    "render_front_figure",
]

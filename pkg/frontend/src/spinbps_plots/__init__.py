"""Bar-chart rendering for spinbps benchmark CSV files."""

from .plots import PlotSpec, SchemaError, compute_medians, read_rows, render_bars

__version__ = "0.1.0"

__all__ = [
    "PlotSpec",
    "SchemaError",
    "compute_medians",
    "read_rows",
    "render_bars",
]

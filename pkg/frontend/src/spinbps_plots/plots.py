"""Grouped bar charts of per-sampler medians from benchmark CSV files.

The benchmark CSV is the only input contract: '#' comment lines, a header,
one row per (sampler, replicate), and summary rows marked 'median' in the
replicate column.  Summary rows are ignored here; every median is
recomputed from the raw rows, so the chart double-checks the harness
instead of trusting it.  Next to the image the renderer drops a sidecar
JSON with the exact plotted values, which is what tests should assert
against rather than diffing pixels.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from statistics import median

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["PlotSpec", "SchemaError", "read_rows", "compute_medians", "render_bars"]

_REQUIRED_COLUMNS = ("sampler", "replicate")


class SchemaError(ValueError):
    """The CSV lacks a column the plot needs."""


@dataclass
class PlotSpec:
    """What to plot and where to put it.

    ``group_by`` names the columns whose distinct value combinations form
    the bar groups; ``metric`` is the column whose per-sampler median
    becomes the bar height.  ``log_scale`` switches the metric axis to a
    log scale, which suits error metrics spanning decades.
    """

    input_csv: str
    output: str
    group_by: tuple[str, ...] = ("sigma_m", "sigma_r")
    metric: str = "mse_total"
    log_scale: bool = True

    def __post_init__(self):
        self.group_by = tuple(self.group_by)
        if not self.group_by:
            raise ValueError("group_by needs at least one column")
        if not self.metric:
            raise ValueError("metric column name must be non-empty")


def read_rows(path) -> tuple[list[str], list[dict]]:
    """Read a benchmark CSV, skipping '#' comment lines.

    Returns the header columns and the rows as string dicts.
    """
    with open(path, "r", encoding="utf-8", newline="") as handle:
        lines = [line for line in handle if line.strip() and not line.startswith("#")]
    reader = csv.DictReader(lines)
    if reader.fieldnames is None:
        raise SchemaError(f"{path} has no header row")
    return list(reader.fieldnames), list(reader)


def _parse_cell(text: str):
    try:
        return float(text)
    except ValueError:
        return text


def _sort_key(key: tuple):
    return tuple((0, value) if isinstance(value, float) else (1, value) for value in key)


def compute_medians(rows: list[dict], group_by: tuple[str, ...], metric: str) -> list[dict]:
    """Per-group, per-sampler medians of ``metric`` over the raw rows.

    Harness summary rows (replicate == 'median') are dropped, as are rows
    whose metric is missing or NaN.  Groups left with no usable rows are
    skipped with a warning.  Returns one entry per group, ordered by group
    key, each carrying the key columns and a sampler -> median mapping.
    """
    samplers: list[str] = []
    values: dict[tuple, dict[str, list[float]]] = {}
    for row in rows:
        if row["replicate"] == "median":
            continue
        sampler = row["sampler"]
        if sampler not in samplers:
            samplers.append(sampler)
        key = tuple(_parse_cell(row[col]) for col in group_by)
        metric_value = _parse_cell(row[metric])
        group = values.setdefault(key, {})
        if isinstance(metric_value, float) and math.isfinite(metric_value):
            group.setdefault(sampler, []).append(metric_value)

    groups = []
    for key in sorted(values, key=_sort_key):
        per_sampler = values[key]
        if not per_sampler:
            label = ", ".join(f"{col}={val!r}" for col, val in zip(group_by, key))
            warnings.warn(f"group ({label}) has no finite {metric} values, skipping")
            continue
        groups.append(
            {
                "key": dict(zip(group_by, key)),
                "medians": {s: median(per_sampler[s]) for s in samplers if s in per_sampler},
            }
        )
    return groups


def _check_schema(columns: list[str], spec: PlotSpec) -> None:
    needed = list(_REQUIRED_COLUMNS) + list(spec.group_by) + [spec.metric]
    missing = [col for col in needed if col not in columns]
    if missing:
        raise SchemaError(f"{spec.input_csv} is missing columns: {', '.join(missing)}")


def _group_label(key: dict) -> str:
    return "\n".join(f"{col}={value:g}" if isinstance(value, float) else f"{col}={value}" for col, value in key.items())


def render_bars(spec: PlotSpec) -> str:
    """Render the grouped bar chart and its sidecar JSON.

    One bar per sampler per group, height the recomputed median of the
    metric.  Writes the image to ``spec.output`` (format from the file
    extension) and the plotted values to ``spec.output + '.json'``.
    Returns the image path.
    """
    columns, rows = read_rows(spec.input_csv)
    _check_schema(columns, spec)
    groups = compute_medians(rows, spec.group_by, spec.metric)
    if not groups:
        raise ValueError(f"{spec.input_csv} has no rows with finite {spec.metric} values")

    samplers: list[str] = []
    for group in groups:
        for sampler in group["medians"]:
            if sampler not in samplers:
                samplers.append(sampler)

    fig, ax = plt.subplots(figsize=(max(4.0, 2.0 * len(groups)), 4.0))
    width = 0.8 / len(samplers)
    for offset, sampler in enumerate(samplers):
        xs = []
        heights = []
        for pos, group in enumerate(groups):
            if sampler in group["medians"]:
                xs.append(pos + (offset - (len(samplers) - 1) / 2.0) * width)
                heights.append(group["medians"][sampler])
        ax.bar(xs, heights, width=width, label=sampler)
    ax.set_xticks(range(len(groups)))
    ax.set_xticklabels([_group_label(group["key"]) for group in groups])
    ax.set_ylabel(f"median {spec.metric}")
    if spec.log_scale:
        ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(spec.output)
    plt.close(fig)

    sidecar = {
        "metric": spec.metric,
        "group_by": list(spec.group_by),
        "groups": groups,
    }
    with open(spec.output + ".json", "w", encoding="utf-8") as handle:
        json.dump(sidecar, handle, indent=2)
        handle.write("\n")
    return spec.output

"""Benchmark harness: seeded experiments, budget calibration, CSV reporting.

An experiment pits the samplers against one random model instance over a
number of replicates and scores each run's moment estimate against the exact
enumeration (or a supplied reference table).  Budgets come in two flavors:
an explicit per-run event count, which makes output byte-reproducible, or a
CPU-time allowance that is first converted to per-sampler event counts by a
calibration probe, so every sampler spends about the same compute.
"""

from __future__ import annotations

import io
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .augmentation import Augmentation
from .bps import BpsConfig, bps_run
from .hmc import HmcConfig, default_travel_time, hmc_run
from .model import MrfModel, mrf_sample
from .oracle import MomentTable, enumerate_moments, summed_mse

__all__ = [
    "SAMPLERS",
    "CSV_COLUMNS",
    "ExperimentConfig",
    "CalibrationResult",
    "ExperimentResult",
    "calibrate_budget",
    "run_experiment",
    "experiment_to_csv",
    "write_csv",
]

SAMPLERS = ("bps-gaussian", "bps-exponential", "hmc")

CSV_COLUMNS = (
    "sampler",
    "augmentation",
    "d",
    "sigma_m",
    "sigma_r",
    "model_seed",
    "replicate",
    "events",
    "hmc_iterations",
    "cpu_millis",
    "mse_first",
    "mse_second",
    "mse_total",
)

_PROBE_MIN_SECONDS = 0.1
_PROBE_START = {"bps-gaussian": 4096, "bps-exponential": 4096, "hmc": 64}
_PROBE_CEILING = 1 << 26


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one experiment.

    Exactly one of ``budget_events`` (per-run event or iteration count) and
    ``budget_cpu_millis`` (per-run CPU allowance, converted by calibration)
    must be set.  ``reference`` supplies external ground truth moments; when
    absent and ``score`` is on, the oracle enumerates them, which caps the
    feasible dimension.  Set ``score=False`` to skip scoring entirely.
    """

    d: int
    sigma_m: float
    sigma_r: float
    model_seed: int
    replicates: int = 30
    samplers: tuple[str, ...] = SAMPLERS
    budget_events: int | None = None
    budget_cpu_millis: int | None = None
    hmc_travel_time: float | None = None
    include_second_moments: bool = True
    burn_in_fraction: float = 0.1
    run_seed_base: int = 0
    score: bool = True
    reference: MomentTable | None = None

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.d}")
        if self.replicates < 1:
            raise ValueError(f"replicates must be a positive integer, got {self.replicates}")
        self.samplers = tuple(self.samplers)
        if not self.samplers:
            raise ValueError("at least one sampler is required")
        for name in self.samplers:
            if name not in SAMPLERS:
                raise ValueError(f"unknown sampler {name!r}; choose from {SAMPLERS}")
        have_events = self.budget_events is not None
        have_cpu = self.budget_cpu_millis is not None
        if have_events == have_cpu:
            raise ValueError("exactly one of budget_events and budget_cpu_millis must be set")
        if have_events and self.budget_events < 1:
            raise ValueError(f"budget_events must be positive, got {self.budget_events}")
        if have_cpu and self.budget_cpu_millis < 1:
            raise ValueError(f"budget_cpu_millis must be positive, got {self.budget_cpu_millis}")
        if self.hmc_travel_time is not None and not self.hmc_travel_time > 0.0:
            raise ValueError(f"hmc_travel_time must be positive, got {self.hmc_travel_time}")
        if not 0.0 <= self.burn_in_fraction < 1.0:
            raise ValueError(f"burn_in_fraction must lie in [0, 1), got {self.burn_in_fraction}")

    @property
    def travel_time(self) -> float:
        return self.hmc_travel_time if self.hmc_travel_time is not None else default_travel_time(self.d)


@dataclass
class CalibrationResult:
    """Per-sampler event rates measured by the probe and the counts they imply."""

    counts: dict[str, int]
    rates: dict[str, float]
    probe_counts: dict[str, int]
    warnings: list[str] = field(default_factory=list)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    model: MrfModel
    reference: MomentTable | None
    rows: list[dict]
    medians: list[dict]
    calibration: CalibrationResult | None


def _run_one(model, sampler: str, count: int, config: ExperimentConfig, rng):
    """One sampler run; returns (moment table, events executed, hmc iterations)."""
    if sampler == "hmc":
        cfg = HmcConfig(
            travel_time=config.travel_time,
            iterations=count,
            burn_in_fraction=config.burn_in_fraction,
            include_second_moments=config.include_second_moments,
        )
        res = hmc_run(model, cfg, rng)
        return res.moments, res.wall_events, count
    if sampler == "bps-gaussian":
        aug = Augmentation.GAUSSIAN
    elif sampler == "bps-exponential":
        aug = Augmentation.EXPONENTIAL
    else:
        raise ValueError(f"unknown sampler {sampler!r}; choose from {SAMPLERS}")
    cfg = BpsConfig(
        augmentation=aug,
        max_events=count,
        burn_in_fraction=config.burn_in_fraction,
        include_second_moments=config.include_second_moments,
    )
    res = bps_run(model, cfg, rng)
    return res.moments, res.events, 0


def calibrate_budget(config: ExperimentConfig, model=None) -> CalibrationResult:
    """Convert a CPU budget into per-sampler counts by timing short probe runs.

    Each sampler's probe is grown until it takes at least 0.1 s of CPU time,
    then timed twice; the average rate maps the budget to a count.  A large
    spread between the two timings is reported as a warning, not an error.
    Probe sizes and measured rates land in the result for the record.
    """
    if config.budget_cpu_millis is None:
        raise ValueError("calibration requires a CPU budget")
    if model is None:
        model = mrf_sample(config.d, config.sigma_m, config.sigma_r, config.model_seed)
    counts: dict[str, int] = {}
    rates: dict[str, float] = {}
    probes: dict[str, int] = {}
    warnings: list[str] = []
    for idx, sampler in enumerate(config.samplers):
        count = _PROBE_START[sampler]
        while True:
            elapsed = _timed_probe(model, sampler, count, config, seed=[10_000 + idx, 0])
            if elapsed >= _PROBE_MIN_SECONDS:
                break
            if count >= _PROBE_CEILING:
                raise RuntimeError(f"calibration probe for {sampler} never reached a measurable duration")
            growth = max(2.0, 1.2 * _PROBE_MIN_SECONDS / max(elapsed, 1e-9))
            count = min(_PROBE_CEILING, int(count * growth) + 1)
        second = _timed_probe(model, sampler, count, config, seed=[10_000 + idx, 1])
        mean = 0.5 * (elapsed + second)
        spread = abs(elapsed - second) / mean
        if spread > 0.25:
            warnings.append(
                f"{sampler}: probe timings differ by {spread:.0%}, calibration may be noisy"
            )
        rate = count / mean
        counts[sampler] = max(1, int(rate * config.budget_cpu_millis / 1000.0))
        rates[sampler] = rate
        probes[sampler] = count
    return CalibrationResult(counts=counts, rates=rates, probe_counts=probes, warnings=warnings)


def _timed_probe(model, sampler, count, config, seed) -> float:
    rng = np.random.default_rng(seed)
    start = time.process_time()
    _run_one(model, sampler, count, config, rng)
    return time.process_time() - start


def _mse_parts(estimate, exact, include_second: bool) -> tuple[float, float, float]:
    first = summed_mse(estimate, exact, include_second=False)
    if include_second:
        second = summed_mse(estimate, exact, include_second=True) - first
        return first, second, first + second
    return first, math.nan, first


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run every (sampler, replicate) cell of the experiment.

    Replicate r of every sampler runs with seed run_seed_base + r, so results
    are reproducible and replicates are independent.  With an event budget
    the whole experiment is deterministic; with a CPU budget the calibration
    probe decides the counts on the current machine first.
    """
    model = mrf_sample(config.d, config.sigma_m, config.sigma_r, config.model_seed)
    reference = config.reference
    if config.score and reference is None:
        reference = enumerate_moments(model)

    calibration = None
    if config.budget_cpu_millis is not None:
        calibration = calibrate_budget(config, model)
        counts = calibration.counts
        cpu_millis = config.budget_cpu_millis
    else:
        counts = {name: config.budget_events for name in config.samplers}
        cpu_millis = 0

    rows: list[dict] = []
    for sampler in config.samplers:
        aug = "exponential" if sampler == "bps-exponential" else "gaussian"
        for rep in range(config.replicates):
            rng = np.random.default_rng(config.run_seed_base + rep)
            moments, events, hmc_iters = _run_one(model, sampler, counts[sampler], config, rng)
            if config.score:
                mse_first, mse_second, mse_total = _mse_parts(
                    moments, reference, config.include_second_moments
                )
            else:
                mse_first = mse_second = mse_total = math.nan
            rows.append(
                {
                    "sampler": sampler,
                    "augmentation": aug,
                    "d": config.d,
                    "sigma_m": config.sigma_m,
                    "sigma_r": config.sigma_r,
                    "model_seed": config.model_seed,
                    "replicate": rep,
                    "events": events,
                    "hmc_iterations": hmc_iters,
                    "cpu_millis": cpu_millis,
                    "mse_first": mse_first,
                    "mse_second": mse_second,
                    "mse_total": mse_total,
                }
            )

    medians = []
    for sampler in config.samplers:
        group = [row for row in rows if row["sampler"] == sampler]
        median_row = dict(group[0])
        median_row["replicate"] = "median"
        for col in ("events", "hmc_iterations", "cpu_millis", "mse_first", "mse_second", "mse_total"):
            median_row[col] = float(np.median([row[col] for row in group]))
        medians.append(median_row)

    return ExperimentResult(
        config=config,
        model=model,
        reference=reference,
        rows=rows,
        medians=medians,
        calibration=calibration,
    )


def _format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    # 17 significant digits round-trip any double exactly
    return f"{float(value):.17g}"


def experiment_to_csv(result: ExperimentResult) -> str:
    """Render an experiment as CSV text.

    Calibration details ride along as '#' comment lines above the header;
    the body is the header, one row per (sampler, replicate), then one
    median row per sampler with 'median' in the replicate column.
    """
    out = io.StringIO()
    cal = result.calibration
    if cal is not None:
        for sampler in result.config.samplers:
            out.write(
                f"# calibration {sampler}: rate={cal.rates[sampler]:.6g}/s "
                f"probe={cal.probe_counts[sampler]} count={cal.counts[sampler]}\n"
            )
        for note in cal.warnings:
            out.write(f"# calibration-warning {note}\n")
    out.write(",".join(CSV_COLUMNS) + "\n")
    for row in result.rows + result.medians:
        out.write(",".join(_format_cell(row[col]) for col in CSV_COLUMNS) + "\n")
    return out.getvalue()


def write_csv(result: ExperimentResult, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(experiment_to_csv(result))

"""End-to-end acceptance: plot a real benchmark grid and verify the sidecar."""

import csv
import json
import shutil
import subprocess
import sys

import pytest

from spinbps_plots import PlotSpec, render_bars


@pytest.fixture
def report(capfd):
    def _report(line):
        with capfd.disabled():
            print(line, flush=True)

    return _report


def bench_command():
    exe = shutil.which("spinbps")
    if exe is not None:
        return [exe]
    return [sys.executable, "-m", "spinbps.cli"]


def run_bench(out_path, sigma_m):
    cmd = bench_command() + [
        "bench",
        "--d", "3",
        "--sigma-m", str(sigma_m),
        "--sigma-r", "0.5",
        "--model-seed", "1",
        "--replicates", "3",
        "--budget-events", "400",
        "--run-seed", "0",
        "--out", str(out_path),
    ]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr


def manual_median(values):
    ordered = sorted(values)
    n = len(ordered)
    middle = n // 2
    if n % 2:
        return ordered[middle]
    return 0.5 * (ordered[middle - 1] + ordered[middle])


def test_sidecar_matches_recomputed_medians(tmp_path, report):
    low = tmp_path / "low.csv"
    high = tmp_path / "high.csv"
    run_bench(low, 0.2)
    run_bench(high, 2.0)
    merged = tmp_path / "grid.csv"
    low_lines = low.read_text(encoding="utf-8").splitlines()
    high_lines = high.read_text(encoding="utf-8").splitlines()
    merged.write_text("\n".join(low_lines + high_lines[1:]) + "\n", encoding="utf-8")

    out = tmp_path / "bars.png"
    render_bars(PlotSpec(input_csv=str(merged), output=str(out)))
    with open(str(out) + ".json", "r", encoding="utf-8") as handle:
        sidecar = json.load(handle)

    with open(merged, "r", encoding="utf-8") as handle:
        rows = [r for r in csv.DictReader(handle) if r["replicate"] != "median"]

    failures = []
    if len(sidecar["groups"]) != 2:
        failures.append(f"expected 2 groups, got {len(sidecar['groups'])}")
    for group in sidecar["groups"]:
        if len(group["medians"]) != 3:
            failures.append(f"group {group['key']} has {len(group['medians'])} bars, expected 3")
        for sampler, plotted in group["medians"].items():
            values = [
                float(r["mse_total"])
                for r in rows
                if r["sampler"] == sampler
                and float(r["sigma_m"]) == group["key"]["sigma_m"]
                and float(r["sigma_r"]) == group["key"]["sigma_r"]
            ]
            want = manual_median(values)
            if abs(plotted - want) > 1e-12:
                failures.append(f"{group['key']} {sampler}: sidecar {plotted} vs rows {want}")

    detail = "; ".join(failures) if failures else (
        "sidecar medians match raw-row medians to 1e-12, 3 bars in each of 2 groups"
    )
    report(("FAIL" if failures else "PASS") + f" plot-sidecar-check: {detail}")
    assert not failures, detail

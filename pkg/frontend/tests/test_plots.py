import json

import pytest

from spinbps_plots import PlotSpec, SchemaError, compute_medians, read_rows, render_bars
from spinbps_plots.cli import main as cli_main

HEADER = "sampler,replicate,sigma_m,sigma_r,mse_total\n"


def write_csv(tmp_path, body, name="rows.csv"):
    path = tmp_path / name
    path.write_text(HEADER + body, encoding="utf-8")
    return path


def sidecar_of(output):
    with open(str(output) + ".json", "r", encoding="utf-8") as handle:
        return json.load(handle)


def test_single_bar(tmp_path):
    path = write_csv(tmp_path, "hmc,0,0.2,0.5,0.5\n")
    out = tmp_path / "one.png"
    render_bars(PlotSpec(input_csv=str(path), output=str(out)))
    assert out.stat().st_size > 0
    side = sidecar_of(out)
    assert len(side["groups"]) == 1
    assert side["groups"][0]["medians"] == {"hmc": 0.5}
    assert side["groups"][0]["key"] == {"sigma_m": 0.2, "sigma_r": 0.5}


def test_median_of_three_replicates(tmp_path):
    body = "hmc,0,0.2,0.5,0.1\nhmc,1,0.2,0.5,0.9\nhmc,2,0.2,0.5,0.2\n"
    path = write_csv(tmp_path, body)
    out = tmp_path / "three.png"
    render_bars(PlotSpec(input_csv=str(path), output=str(out)))
    assert sidecar_of(out)["groups"][0]["medians"]["hmc"] == 0.2


def test_summary_rows_are_ignored(tmp_path):
    body = "hmc,0,0.2,0.5,0.3\nhmc,1,0.2,0.5,0.7\nhmc,median,0.2,0.5,999.0\n"
    path = write_csv(tmp_path, body)
    out = tmp_path / "summary.png"
    render_bars(PlotSpec(input_csv=str(path), output=str(out)))
    assert sidecar_of(out)["groups"][0]["medians"]["hmc"] == 0.5


def test_comment_lines_are_skipped(tmp_path):
    path = tmp_path / "rows.csv"
    path.write_text("# calibration note\n" + HEADER + "hmc,0,0.2,0.5,0.4\n", encoding="utf-8")
    columns, rows = read_rows(path)
    assert columns[0] == "sampler"
    assert len(rows) == 1


def test_groups_are_ordered_and_split(tmp_path):
    body = (
        "hmc,0,2,0.5,1.0\n"
        "hmc,0,0.2,0.5,0.1\n"
        "bps-gaussian,0,2,0.5,2.0\n"
        "bps-gaussian,0,0.2,0.5,0.2\n"
    )
    path = write_csv(tmp_path, body)
    out = tmp_path / "grid.png"
    render_bars(PlotSpec(input_csv=str(path), output=str(out)))
    groups = sidecar_of(out)["groups"]
    assert [g["key"]["sigma_m"] for g in groups] == [0.2, 2.0]
    assert all(set(g["medians"]) == {"hmc", "bps-gaussian"} for g in groups)


def test_missing_metric_is_a_schema_error(tmp_path):
    path = write_csv(tmp_path, "hmc,0,0.2,0.5,0.5\n")
    spec = PlotSpec(input_csv=str(path), output=str(tmp_path / "x.png"), metric="mse_second")
    with pytest.raises(SchemaError):
        render_bars(spec)


def test_missing_group_column_is_a_schema_error(tmp_path):
    path = write_csv(tmp_path, "hmc,0,0.2,0.5,0.5\n")
    spec = PlotSpec(
        input_csv=str(path), output=str(tmp_path / "x.png"), group_by=("sigma_m", "d")
    )
    with pytest.raises(SchemaError):
        render_bars(spec)


def test_nan_only_group_is_skipped_with_warning(tmp_path):
    body = "hmc,0,0.2,0.5,0.5\nhmc,0,2,0.5,nan\n"
    path = write_csv(tmp_path, body)
    out = tmp_path / "skip.png"
    with pytest.warns(UserWarning, match="no finite"):
        render_bars(PlotSpec(input_csv=str(path), output=str(out)))
    groups = sidecar_of(out)["groups"]
    assert len(groups) == 1
    assert groups[0]["key"]["sigma_m"] == 0.2


def test_all_nan_metric_raises(tmp_path):
    path = write_csv(tmp_path, "hmc,0,0.2,0.5,nan\n")
    with pytest.warns(UserWarning):
        with pytest.raises(ValueError):
            render_bars(PlotSpec(input_csv=str(path), output=str(tmp_path / "x.png")))


def test_rendering_is_deterministic(tmp_path):
    body = "hmc,0,0.2,0.5,0.31\nbps-gaussian,0,0.2,0.5,0.07\n"
    path = write_csv(tmp_path, body)
    first = tmp_path / "a.png"
    second = tmp_path / "b.png"
    render_bars(PlotSpec(input_csv=str(path), output=str(first)))
    render_bars(PlotSpec(input_csv=str(path), output=str(second)))
    a = (tmp_path / "a.png.json").read_bytes()
    b = (tmp_path / "b.png.json").read_bytes()
    assert a == b


def test_compute_medians_handles_even_counts():
    rows = [
        {"sampler": "hmc", "replicate": "0", "sigma_m": "0.2", "mse_total": "0.1"},
        {"sampler": "hmc", "replicate": "1", "sigma_m": "0.2", "mse_total": "0.5"},
    ]
    groups = compute_medians(rows, ("sigma_m",), "mse_total")
    assert groups[0]["medians"]["hmc"] == pytest.approx(0.3, abs=1e-15)


def test_cli_renders(tmp_path):
    path = write_csv(tmp_path, "hmc,0,0.2,0.5,0.5\n")
    out = tmp_path / "cli.svg"
    code = cli_main(["--in", str(path), "--out", str(out), "--linear"])
    assert code == 0
    assert out.exists()
    assert (tmp_path / "cli.svg.json").exists()


def test_cli_reports_schema_error(tmp_path, capsys):
    path = write_csv(tmp_path, "hmc,0,0.2,0.5,0.5\n")
    code = cli_main(["--in", str(path), "--out", str(tmp_path / "x.png"), "--metric", "nope"])
    assert code == 2
    assert "error:" in capsys.readouterr().err

import csv

import pytest

from qdc_figures import FigureError, FigureSpec, render


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def make_spec(tmp_path, **overrides):
    kwargs = dict(
        csv_path="data.csv", x_field="gamma", y_field="throughput",
        panel_field="queue_capacity", series_fields=["mu_pair"],
        output_path="out.png", base_dir=tmp_path,
    )
    kwargs.update(overrides)
    return FigureSpec(**kwargs)


HEADER = ["gamma", "queue_capacity", "mu_pair", "throughput", "throughput_se"]


def grid_rows():
    rows = []
    for k in (10, 15, 20):
        for mu in (1.0, 1.5, 2.0):
            for g in (0.02, 0.06, 0.1):
                for rep in range(2):
                    rows.append([g, k, mu, mu * 3 - g * 10 + 0.01 * rep, 0.05])
    return rows


def test_render_panels_and_series(tmp_path):
    write_csv(tmp_path / "data.csv", HEADER, grid_rows())
    result = render(make_spec(tmp_path))
    assert result.output_path.exists()
    assert result.n_panels == 3
    assert set(result.series_per_panel.values()) == {3}


def test_render_single_row_is_fine(tmp_path):
    write_csv(tmp_path / "data.csv", HEADER, [[0.05, 10, 1.0, 2.5, 0.1]])
    result = render(make_spec(tmp_path))
    assert result.n_panels == 1
    assert result.points == 1


def test_render_missing_column_named(tmp_path):
    write_csv(tmp_path / "data.csv", ["gamma", "mu_pair", "throughput"], [[0.05, 1.0, 2.5]])
    with pytest.raises(FigureError, match="queue_capacity"):
        render(make_spec(tmp_path))


def test_render_empty_csv_rejected(tmp_path):
    write_csv(tmp_path / "data.csv", HEADER, [])
    with pytest.raises(FigureError, match="no data rows"):
        render(make_spec(tmp_path))


def test_render_missing_csv_rejected(tmp_path):
    with pytest.raises(FigureError, match="not found"):
        render(make_spec(tmp_path))


def test_render_blank_metric_rows_skipped(tmp_path):
    rows = [[0.02, 10, 1.0, "", 0.1], [0.06, 10, 1.0, 2.0, 0.1]]
    write_csv(tmp_path / "data.csv", HEADER, rows)
    assert render(make_spec(tmp_path)).points == 1
    write_csv(tmp_path / "void.csv", HEADER, [[0.02, 10, 1.0, "", ""]])
    with pytest.raises(FigureError, match="no plottable"):
        render(make_spec(tmp_path, csv_path="void.csv"))


def test_render_with_error_bars(tmp_path):
    write_csv(tmp_path / "data.csv", HEADER, grid_rows())
    result = render(make_spec(tmp_path, y_error_field="throughput_se",
                              output_path="err.png"))
    assert result.output_path.exists()


def test_render_deterministic_bytes(tmp_path):
    write_csv(tmp_path / "data.csv", HEADER, grid_rows())
    a = render(make_spec(tmp_path, output_path="a.png")).output_path.read_bytes()
    b = render(make_spec(tmp_path, output_path="b.png")).output_path.read_bytes()
    assert a == b


def test_render_does_not_mutate_csv(tmp_path):
    write_csv(tmp_path / "data.csv", HEADER, grid_rows())
    before = (tmp_path / "data.csv").read_bytes()
    render(make_spec(tmp_path))
    assert (tmp_path / "data.csv").read_bytes() == before

import yaml

from qdcsim.cli import main
from qdcsim.config import dump_config
from qdcsim.metrics import CSV_COLUMNS

from conftest import scenario


def write_cfg(tmp_path, cfg, name="cfg.yaml"):
    path = tmp_path / name
    dump_config(cfg, str(path))
    return str(path)


def test_run_writes_csv_and_summary(tmp_path, capsys):
    path = write_cfg(tmp_path, scenario(horizon=40.0, master_seed=2))
    out = tmp_path / "run.csv"
    assert main(["run", path, "--out", str(out)]) == 0
    assert out.exists()
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 2
    captured = capsys.readouterr()
    assert "throughput" in captured.out


def test_sweep_expands_grid(tmp_path):
    cfg = scenario(horizon=20.0, replications=2,
                   sweep={"leaf.capacity": [2, 4, 6]})
    path = write_cfg(tmp_path, cfg)
    out = tmp_path / "sweep.csv"
    assert main(["sweep", path, "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 1 + 3 * 2


def test_cli_overrides(tmp_path):
    cfg = scenario(horizon=500.0, replications=3, master_seed=1)
    path = write_cfg(tmp_path, cfg)
    out = tmp_path / "o.csv"
    assert main(["run", path, "--seed", "9", "--replications", "1",
                 "--horizon", "30", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 2
    row = dict(zip(CSV_COLUMNS, rows[1].split(",")))
    assert row["master_seed"] == "9"
    assert row["horizon"] == "30.0"


def test_validate_passes_on_matched_config(tmp_path, capsys):
    cfg = scenario(lambda_gen=6.0, capacity=4, gamma=0.06, mu_total=3.0,
                   renege_dist="exponential", horizon=20000.0, master_seed=17)
    path = write_cfg(tmp_path, cfg)
    assert main(["validate", path, "--tolerance", "0.05"]) == 0
    assert "pass" in capsys.readouterr().out


def test_validate_refuses_deterministic_reneging(tmp_path, capsys):
    cfg = scenario(lambda_gen=6.0, capacity=4, gamma=0.06, mu_total=3.0,
                   renege_dist="deterministic", horizon=100.0)
    path = write_cfg(tmp_path, cfg)
    assert main(["validate", path]) == 2
    assert "exponential" in capsys.readouterr().err


def test_invalid_config_lists_fields(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text(yaml.safe_dump({
        "topology": {"spines": 0, "leaves": 1, "hosts_per_leaf": 1},
        "physics": {"gamma": -1.0, "f_threshold": 0.7},
        "leaf": {"lambda_gen": 1.0, "capacity": 2},
        "workload": {"mode": "aggregate", "mu_total": 1.0, "p_inter": 0.0},
    }))
    assert main(["run", str(path)]) == 2
    err = capsys.readouterr().err
    assert "hosts_per_leaf" in err and "gamma" in err


def test_preset_listing_and_export(tmp_path, capsys):
    assert main(["preset"]) == 0
    names = capsys.readouterr().out.split()
    assert "fig6-leaf" in names and "fig11-capacity" in names
    assert main(["preset", "fig6-leaf", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "fig6-leaf.yaml").exists()
    # exported preset is directly runnable
    assert main(["run", str(tmp_path / "fig6-leaf.yaml"), "--horizon", "5",
                 "--replications", "1", "--out", str(tmp_path / "x.csv")]) == 0


def test_unknown_preset_fails(capsys):
    assert main(["preset", "not-a-preset"]) == 2
    assert "unknown preset" in capsys.readouterr().err

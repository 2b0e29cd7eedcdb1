import csv
import json

import pytest

from attnscale import cli
from attnscale.config import dumps_config, loads_config, preset
from attnscale.outputs import SAMPLE_COLUMNS, SUMMARY_COLUMNS


def write_config(path, **kw):
    doc = {
        "schema_version": 1, "seed": 11, "d": 16, "n": 32, "m": 40,
        "rules": [{"label": "raw", "rule": "raw_scores"},
                  {"label": "sqrt", "rule": "sqrt_dim"},
                  {"label": "ksum", "rule": "key_length_sum"}],
    }
    doc.update(kw)
    path.write_text(json.dumps(doc))
    return path


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def config_file(tmp_path):
    return write_config(tmp_path / "cfg.json")


def test_simulate_writes_outputs(tmp_path, config_file):
    out = tmp_path / "run"
    assert cli.main(["simulate", "--config", str(config_file), "--out", str(out)]) == 0
    rows = read_rows(out / "samples.csv")
    assert list(rows[0]) == list(SAMPLE_COLUMNS)
    assert len(rows) == 40 * 3
    for row in rows:
        if row["rule_label"] != "raw":
            assert 0 <= float(row["value"]) <= 1
    summary = read_rows(out / "summary.csv")
    assert list(summary[0]) == list(SUMMARY_COLUMNS)
    assert [r["rule_label"] for r in summary] == ["raw", "sqrt", "ksum"]
    assert summary[0]["scale"] == "" and float(summary[1]["scale"]) == 4.0
    assert float(summary[2]["scale"]) == float(summary[2]["k_total"])

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["rng_algorithm"].startswith("philox4x64-10")
    assert manifest["config"]["seed"] == 11
    for path in list(manifest["outputs"].values()) + list(manifest["rule_outputs"].values()):
        assert (tmp_path / "run" / path.split("/")[-1]).exists()
    assert manifest["wall_clock_seconds"] >= 0


def test_simulate_values_round_trip_exactly(tmp_path, config_file):
    from attnscale.simulation import run_experiment

    cli.main(["simulate", "--config", str(config_file), "--out", str(tmp_path)])
    result = run_experiment(loads_config(config_file.read_text()))
    rows = [r for r in read_rows(tmp_path / "samples.csv") if r["rule_label"] == "ksum"]
    assert [float(r["value"]) for r in rows] == list(result.samples["ksum"])


def test_simulate_is_byte_deterministic(tmp_path, config_file):
    cli.main(["simulate", "--config", str(config_file), "--out", str(tmp_path / "a")])
    cli.main(["simulate", "--config", str(config_file), "--out", str(tmp_path / "b")])
    for name in ("samples.csv", "summary.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_simulate_single_key_single_query(tmp_path):
    cfg = write_config(tmp_path / "c.json", m=1, n=1,
                       rules=[{"label": "ksum", "rule": "key_length_sum"}])
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    rows = read_rows(tmp_path / "o" / "samples.csv")
    assert rows == [{"query_index": "0", "rule_label": "ksum", "value": "1.0"}]
    summary = read_rows(tmp_path / "o" / "summary.csv")[0]
    assert summary["count"] == "1" and summary["sd"] == ""


def test_simulate_paper_config_row_count(tmp_path):
    (tmp_path / "f1.json").write_text(dumps_config(preset("figure1")))
    cli.main(["simulate", "--config", str(tmp_path / "f1.json"), "--out", str(tmp_path / "o")])
    assert len(read_rows(tmp_path / "o" / "samples.csv")) == 500 * 3


def test_simulate_bad_config_exit_2(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", d=0)
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "d: must be >= 1" in capsys.readouterr().err
    (tmp_path / "broken.json").write_text("{\n  \"seed\": 1,,\n}")
    assert cli.main(["simulate", "--config", str(tmp_path / "broken.json"), "--out", str(tmp_path)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_simulate_missing_config_exit_3(tmp_path):
    assert cli.main(["simulate", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 3


def test_simulate_unwritable_output_exit_3(tmp_path, config_file):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.main(["simulate", "--config", str(config_file), "--out", str(blocker / "sub")]) == 3


def test_simulate_degenerate_keys_exit_4(tmp_path, monkeypatch):
    import numpy as np

    from attnscale import simulation
    from attnscale.attention import KeySet

    monkeypatch.setattr(simulation, "draw_keys", lambda cfg: KeySet(np.zeros((cfg.n, cfg.d))))
    cfg = write_config(tmp_path / "c.json", rules=[{"label": "k", "rule": "key_length_sum"}])
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 4


def test_no_temp_files_left_behind(tmp_path, config_file):
    cli.main(["simulate", "--config", str(config_file), "--out", str(tmp_path / "o")])
    assert sorted(p.name for p in (tmp_path / "o").iterdir()) == ["manifest.json", "samples.csv", "summary.csv"]


# -- plot ------------------------------------------------------------------------

@pytest.fixture
def samples_file(tmp_path, config_file):
    cli.main(["simulate", "--config", str(config_file), "--out", str(tmp_path / "run")])
    return tmp_path / "run" / "samples.csv"


def panel_count(svg_text):
    return svg_text.count('<g id="axes_')


def test_plot_all_rules(tmp_path, samples_file):
    out = tmp_path / "all.svg"
    assert cli.main(["plot", "--samples", str(samples_file), "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("<?xml")
    assert panel_count(text) == 3
    for label in ("(a) raw", "(b) sqrt", "(c) ksum"):
        assert label in text


def test_plot_filter(tmp_path, samples_file):
    out = tmp_path / "f.svg"
    assert cli.main(["plot", "--samples", str(samples_file), "--out", str(out), "--rules", "ksum"]) == 0
    assert panel_count(out.read_text()) == 1


def test_plot_is_byte_deterministic(tmp_path, samples_file):
    cli.main(["plot", "--samples", str(samples_file), "--out", str(tmp_path / "1.svg")])
    cli.main(["plot", "--samples", str(samples_file), "--out", str(tmp_path / "2.svg")])
    assert (tmp_path / "1.svg").read_bytes() == (tmp_path / "2.svg").read_bytes()


def test_plot_missing_columns_exit_2(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("query_index,value\n0,1.0\n")
    assert cli.main(["plot", "--samples", str(bad), "--out", str(tmp_path / "x.svg")]) == 2


def test_plot_unknown_rule_exit_2(tmp_path, samples_file):
    assert cli.main(["plot", "--samples", str(samples_file), "--out", str(tmp_path / "x.svg"),
                     "--rules", "nope"]) == 2


def test_plot_degenerate_exit_4(tmp_path):
    flat = tmp_path / "flat.csv"
    flat.write_text("query_index,rule_label,value\n0,a,1.0\n1,a,1.0\n")
    assert cli.main(["plot", "--samples", str(flat), "--out", str(tmp_path / "x.svg")]) == 4


def test_plot_missing_file_exit_3(tmp_path):
    assert cli.main(["plot", "--samples", str(tmp_path / "no.csv"), "--out", str(tmp_path / "x.svg")]) == 3


# -- compare ---------------------------------------------------------------------

def test_compare_prints_table(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", d=64, n=16, m=200)
    assert cli.main(["compare", "--config", str(cfg), "--reps", "5"]) == 0
    out = capsys.readouterr().out
    assert "replications: 5" in out
    assert "win rate" in out and "ksum" in out and "sqrt" in out


def test_compare_without_raw_scores_exit_2(tmp_path):
    cfg = write_config(tmp_path / "c.json", rules=[{"label": "a", "rule": "sqrt_dim"},
                                                   {"label": "b", "rule": "unscaled"}])
    assert cli.main(["compare", "--config", str(cfg), "--reps", "2"]) == 2


def test_compare_needs_two_rescalings(tmp_path):
    cfg = write_config(tmp_path / "c.json", rules=[{"label": "r", "rule": "raw_scores"},
                                                   {"label": "b", "rule": "unscaled"}])
    assert cli.main(["compare", "--config", str(cfg), "--reps", "2"]) == 2


def test_compare_duplicate_rule_is_a_coin_flip(tmp_path):
    from attnscale.compare import compare

    cfg = loads_config(write_config(tmp_path / "c.json", rules=[
        {"label": "raw", "rule": "raw_scores"},
        {"label": "a", "rule": "key_length_sum"},
        {"label": "b", "rule": "key_length_sum"},
    ], m=100).read_text())
    report = compare(cfg, replications=40, threads=2)
    assert report.win_rate("a", "b") == 0.5
    assert report.win_rate("a", "b") + report.win_rate("b", "a") == 1.0


def test_compare_thread_count_does_not_change_results(tmp_path, monkeypatch):
    from attnscale.compare import compare

    cfg = loads_config(write_config(tmp_path / "c.json", m=60).read_text())
    serial = compare(cfg, replications=6, threads=1)
    monkeypatch.setenv("ATTNSCALE_THREADS", "3")
    threaded = compare(cfg, replications=6)
    assert (serial.distortion == threaded.distortion).all()
    assert (serial.saturation == threaded.saturation).all()


# -- gen-config ------------------------------------------------------------------

@pytest.mark.parametrize("name", ["figure1", "figure2"])
def test_gen_config_round_trip(tmp_path, name):
    out = tmp_path / f"{name}.json"
    assert cli.main(["gen-config", "--preset", name, "--out", str(out)]) == 0
    assert loads_config(out.read_text()) == preset(name)
    assert json.loads(out.read_text())["schema_version"] == 1


def test_gen_config_unknown_preset_exit_2(tmp_path):
    assert cli.main(["gen-config", "--preset", "figure9", "--out", str(tmp_path / "x.json")]) == 2


def test_usage_error_exit_2():
    assert cli.main(["simulate"]) == 2
    assert cli.main(["frobnicate"]) == 2

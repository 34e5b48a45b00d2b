import json
import math

import pytest

from beamopt import __version__, bounds, figures
from beamopt.channel import SystemConfig
from beamopt.cli import parse_config_file, run
from beamopt.montecarlo import SimulationSpec, simulate_lower_rate

LN2 = math.log(2.0)


def _run_csv(args, tmp_path, name="out.csv"):
    path = tmp_path / name
    code = run(args + ["--output", str(path)])
    assert code == 0
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


def test_bounds_record_round_trip(tmp_path):
    rows = _run_csv(
        ["bounds", "--channel", "miso", "--nt", "10", "--snr-db", "5",
         "--bbar", "1", "--sigma-w2", "0.15"],
        tmp_path,
    )
    assert len(rows) == 1
    rec = rows[0]
    config = SystemConfig(n_t=int(rec["nt"]), snr=10.0 ** (float(rec["snr_db"]) / 10.0))
    cb = bounds.miso_capacity_bounds(
        config, b_bar=float(rec["bbar"]), sigma_w2=float(rec["sigma_w2"])
    )
    assert float(rec["lower"]) == pytest.approx(cb.lower, rel=1e-11)
    assert float(rec["upper"]) == pytest.approx(cb.upper, rel=1e-11)
    assert rec["units"] == "nats"
    assert rec["version"] == __version__


def test_units_conversion_exact(tmp_path):
    base = ["bounds", "--channel", "miso", "--nt", "8", "--snr-db", "5",
            "--bbar", "1", "--sigma-w2", "0.15"]
    nats = _run_csv(base, tmp_path, "nats.csv")[0]
    bits = _run_csv(base + ["--log-base", "2"], tmp_path, "bits.csv")[0]
    assert float(bits["lower"]) == pytest.approx(float(nats["lower"]) / LN2, rel=1e-11)
    assert float(bits["upper"]) == pytest.approx(float(nats["upper"]) / LN2, rel=1e-11)
    assert bits["units"] == "bits"


def test_json_output(tmp_path):
    path = tmp_path / "rec.json"
    code = run(["optimize", "--channel", "mimo", "--nt", "9", "--nrbar", "2",
                "--lbar", "10", "--mu", "1", "--snr-db", "5", "--bound", "lower",
                "--format", "json", "--output", str(path)])
    assert code == 0
    recs = [json.loads(line) for line in path.read_text().strip().splitlines()]
    assert len(recs) == 1
    rec = recs[0]
    total = float(rec["tbar"]) + float(rec["bbar"]) + float(rec["dbar"])
    assert total == pytest.approx(10.0, rel=1e-9)
    # overhead share lands near one fifth of the packet for this setup
    frac = (float(rec["tbar"]) + float(rec["bbar"])) / 10.0
    assert 0.1 < frac < 0.3


def test_simulate_record_reproducible(tmp_path):
    rows = _run_csv(
        ["simulate", "--channel", "miso", "--nt", "4", "--snr-db", "5",
         "--bbar", "1", "--sigma-w2", "0.2", "--trials", "2000", "--seed", "11"],
        tmp_path,
    )
    rec = rows[0]
    est = simulate_lower_rate(
        SystemConfig(n_t=4, snr=10.0 ** 0.5), 0.2, 4,
        SimulationSpec(trials=2000, seed=11),
    )
    assert float(rec["mean"]) == pytest.approx(est.mean, rel=1e-11)
    assert float(rec["std_err"]) == pytest.approx(est.std_err, rel=1e-9)
    parallel = _run_csv(
        ["simulate", "--channel", "miso", "--nt", "4", "--snr-db", "5",
         "--bbar", "1", "--sigma-w2", "0.2", "--trials", "2000", "--seed", "11",
         "--workers", "8"],
        tmp_path, "par.csv",
    )[0]
    assert parallel["mean"] == rec["mean"]
    assert parallel["std_err"] == rec["std_err"]


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# experiment setup\n"
        "channel = miso\n"
        "nt = 6        # array size\n"
        "snr-db = 5\n"
        "bbar = 1\n"
        "sigma-w2 = 0.3\n"
    )
    from_file = _run_csv(["bounds", "--config", str(cfg)], tmp_path, "a.csv")[0]
    overridden = _run_csv(
        ["bounds", "--config", str(cfg), "--sigma-w2", "0.1"], tmp_path, "b.csv"
    )[0]
    assert float(from_file["sigma_w2"]) == 0.3
    assert float(overridden["sigma_w2"]) == 0.1
    assert float(overridden["lower"]) > float(from_file["lower"])


def test_config_file_values_are_validated():
    assert run(["bounds", "--config", "/nonexistent/path.cfg"]) == 2


def test_usage_errors_exit_2(capsys):
    assert run(["bounds", "--channel", "miso", "--snr-db", "5"]) == 2
    assert run(["bounds", "--channel", "mimo", "--nt", "4", "--snr-db", "5"]) == 2


def test_domain_errors_exit_3(capsys):
    # feedback beyond the analytic regime boundary for mimo
    code = run(["bounds", "--channel", "mimo", "--nt", "4", "--nrbar", "2",
                "--snr-db", "5", "--bbar", "3", "--sigma-w2", "0.1"])
    assert code == 3
    err = capsys.readouterr().err
    assert "b_star" in err


def test_unknown_figure_rejected():
    assert run(["figure", "--name", "fig9"]) == 2


def test_parse_config_file_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("this line has no equals\n")
    from beamopt.cli import UsageError

    with pytest.raises(UsageError):
        parse_config_file(str(bad))


def test_figure_presets_golden():
    assert figures.PRESET_PARAMS["fig1"] == {
        "channel": "miso", "snr_db": 5.0, "b_bar": 1.0, "sigma_w2": 0.15,
        "nt_min": 2, "nt_max": 12,
    }
    assert figures.PRESET_PARAMS["fig2"] == {
        "channel": "miso", "nt": 10, "snr_db": 5.0, "mu": 1.0,
    }
    assert figures.PRESET_PARAMS["fig3"] == {
        "channel": "miso", "nt": 6, "snr_db": 5.0, "l_bar": 100.0, "mu": 1.0,
    }
    assert figures.PRESET_PARAMS["fig4"] == {
        "channel": "mimo", "n_r_bar": 2.0, "l_bar": 50.0, "mu": 1.0, "snr_db": 5.0,
    }
    assert figures.PRESET_PARAMS["fig5"] == {
        "channel": "mimo", "n_r_bar": 2.0, "l_bar": 50.0, "mu": 1.0, "snr_db": 5.0,
        "heuristic_t_bar": 1.5, "heuristic_b_bar": 1.0,
    }
    assert figures.PRESET_PARAMS["fig6"] == {
        "channel": "mimo", "nt": 9, "n_r_bar": 2.0, "l_bar": 10.0, "mu": 1.0,
        "snr_db": 5.0,
    }


def test_figure_command_emits_table_and_png(tmp_path):
    path = tmp_path / "fig3.csv"
    code = run(["figure", "--name", "fig3", "--output", str(path)])
    assert code == 0
    lines = path.read_text().strip().splitlines()
    assert lines[0].split(",")[:4] == ["figure", "curve", "x", "y"]
    curves = {line.split(",")[1] for line in lines[1:]}
    assert curves == {"optimized_split", "equal_split", "training_heavy"}
    assert (tmp_path / "fig3.png").stat().st_size > 0
    # optimized split dominates any fixed split pointwise
    by_x = {}
    for line in lines[1:]:
        parts = line.split(",")
        by_x.setdefault(parts[2], {})[parts[1]] = float(parts[3])
    for vals in by_x.values():
        assert vals["optimized_split"] >= vals["equal_split"] - 1e-9
        assert vals["optimized_split"] >= vals["training_heavy"] - 1e-9

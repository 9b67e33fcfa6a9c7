import json
import math

import numpy as np
import pytest

from nearfield_isac import cli
from nearfield_isac import experiments as ex
from nearfield_isac.scenario import PAPER_DEFAULT, ScenarioError, build_channels, load_scenario


def test_paper_default_values(scenario):
    assert scenario.tx_array.num_elements == 256 and scenario.rx_array.num_elements == 256
    assert scenario.tx_array.carrier_freq == 30e9
    assert [(u.angle_deg, u.range_m, u.num_scatterers) for u in scenario.users] == [(0.0, 5.0, 2), (0.0, 15.0, 2)]
    assert (scenario.target.angle_deg, scenario.target.range_m) == (45.0, 5.0)
    assert scenario.gamma_floor == pytest.approx(0.1 * scenario.noise_power * 256)


def test_noise_power_calibration_is_frozen(scenario):
    assert ex.calibrate_noise_power(scenario) == pytest.approx(scenario.noise_power, rel=1e-8)


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        load_scenario("/nonexistent/scenario.json")


def write(tmp_path, data):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(data, indent=1))
    return path


def test_negative_noise_rejected(tmp_path):
    with pytest.raises(ScenarioError, match="noise_power"):
        load_scenario(write(tmp_path, {"noise_power": -1.0}))


def test_unknown_keys_rejected(tmp_path):
    with pytest.raises(ScenarioError, match="unknown"):
        load_scenario(write(tmp_path, {"noise_pwr": 1.0}))
    with pytest.raises(ScenarioError, match="target"):
        load_scenario(write(tmp_path, {"target": {"angle_deg": 10, "range": 3}}))


def test_parse_error_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "rho": 0.5,\n  oops\n}')
    with pytest.raises(ScenarioError, match="line 3"):
        load_scenario(path)


@pytest.mark.parametrize("patch,key", [({"rho": 1.5}, "rho"),
                                       ({"users": [{"angle_deg": 0, "range_m": 0.1}]}, "users[0]"),
                                       ({"tx_array": {"num_elements": 0}}, "tx_array"),
                                       ({"target": {"angle_deg": 95}}, "target")])
def test_invariant_violations_named(tmp_path, patch, key):
    with pytest.raises(ScenarioError, match=key.replace("[", r"\[").replace("]", r"\]")):
        load_scenario(write(tmp_path, patch))


def test_partial_file_uses_defaults(tmp_path, scenario):
    s = load_scenario(write(tmp_path, {"rho": 0.2}))
    assert s.rho == 0.2 and s.users[0].range_m == 5.0


def test_scatterers_do_not_overlap(scenario, nf_channels):
    angles = [math.degrees(p.location.angle) for c in nf_channels for p in c.paths if p.kind == "scatterer"]
    assert len(angles) == 4
    for i in range(4):
        assert 10 <= abs(angles[i]) <= 60
        for j in range(i + 1, 4):
            assert abs(angles[i] - angles[j]) >= 5


def test_build_channels_deterministic(scenario):
    a = build_channels(scenario)
    b = build_channels(scenario)
    assert all(np.array_equal(x.vector, y.vector) for x, y in zip(a, b))
    c = build_channels(scenario.replace(rng_seed=scenario.rng_seed + 1))
    assert not np.array_equal(a[0].vector, c[0].vector)


def test_render_format(scenario):
    table = ex.Table("t", ("x", "flag", "tag"), [(1 / 3, True, "NFBF"), (math.inf, False, "FFBF")])
    text = ex.render(table, scenario)
    lines = text.splitlines()
    assert lines[0] == f"# seed={scenario.rng_seed} scenario={scenario.digest()}"
    assert lines[1] == "x,flag,tag"
    assert lines[2] == "0.333333333,1,NFBF"
    assert lines[3] == "inf,0,FFBF"


@pytest.mark.parametrize("cmd", ["dof", "correlation", "power"])
def test_cli_writes_csv(tmp_path, cmd):
    assert cli.main([cmd, "--out", str(tmp_path)]) == 0
    files = list(tmp_path.glob("*.csv"))
    assert files
    assert files[0].read_text().startswith("# seed=")


def test_cli_seed_override(tmp_path):
    assert cli.main(["power", "--out", str(tmp_path), "--seed", "11"]) == 0
    assert (tmp_path / "power.csv").read_text().startswith("# seed=11 ")


def test_cli_error_categories(tmp_path, capsys):
    assert cli.main(["dof", "--scenario", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == cli.EXIT_SCENARIO
    assert "error[scenario]" in capsys.readouterr().err
    bad = write(tmp_path, {"users": [{"angle_deg": 0, "range_m": 5, "num_scatterers": 0},
                                     {"angle_deg": 0, "range_m": 15, "num_scatterers": 0}]})
    # far-field ZF on two same-angle LoS-only users is singular
    assert cli.main(["power", "--scenario", str(bad), "--out", str(tmp_path)]) == cli.EXIT_NUMERICAL
    assert "error[numerical] power" in capsys.readouterr().err


def test_fig1_runner_marks_rayleigh(scenario):
    (table,) = ex.run_fig1_dof(scenario, [5.0, 1000.0])
    assert table.columns == ("distance_m", "dof", "rayleigh_distance_m", "beyond_rayleigh")
    assert [r[3] for r in table.rows] == [False, True]


def test_music_runner_outputs(scenario):
    spec, est = ex.run_music(scenario, angle_count=61, range_count=24)
    assert spec.columns == ("angle_deg", "range_m", "spectrum_db")
    assert len(spec.rows) == 61 * 25
    assert max(r[2] for r in spec.rows) == pytest.approx(0.0)
    assert len(est.rows) == 1


def test_tradeoff_runner_tables(scenario):
    trade, sinr = ex.run_fig4_tradeoff(scenario, rho_grid=[0.0, 1.0], target_ranges=(5.0,))
    assert trade.columns[:5] == ("rho", "rate_bps_hz", "rcrb_angle_deg", "rcrb_range_m", "model_tag")
    assert len(trade.rows) == 4
    assert {r[4] for r in trade.rows} == {"NFBF", "FFBF"}
    assert len(sinr.rows) == 8
    # rho = 1: no communication power, SINR at the dB floor
    assert all(r[4] == ex.DB_FLOOR for r in sinr.rows if r[0] == 1.0)

import math

import pytest
import yaml

from mmdrone.config import (
    ConfigError,
    parse_distance_sweep,
    parse_face_scene,
    parse_scenario,
    resolve_document,
    shipped_examples,
    snr_grid,
)
from mmdrone.errors import ValidationError
from mmdrone.kinematics import position_at
from mmdrone.phy_mcs import LENS_ANTENNA


def shipped(name):
    return yaml.safe_load(resolve_document(name).read_text())


def write(tmp_path, doc, name="doc.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(doc))
    return path


def test_shipped_examples_listed():
    assert shipped_examples() == ["faces136", "fig5_sweep", "flyby_tracking", "hover_100m"]


def test_hover_100m_matches_experiment():
    sc = parse_scenario("hover_100m")
    assert sc.ground_hw == LENS_ANTENNA and sc.drone_hw == LENS_ANTENNA
    assert (sc.video.width, sc.video.height, sc.video.fps, sc.video.bits_per_pixel) == (3840, 2160, 7.5, 24)
    assert sc.duration_s == 60.0
    assert sc.channel_sample_dt_s == 0.01
    for t in (0.0, 30.0, 60.0):
        assert position_at(sc.trajectory, t)[0] == (0.0, 0.0, 100.0)
    assert sc.link.carrier_freq_hz == 60e9
    assert sc.max_tracking_rate_deg_s == math.inf
    assert (sc.power.rx_idle_w, sc.power.rx_active_w) == (3.8, 17.3)


def test_negative_fps_names_field(tmp_path):
    doc = shipped("hover_100m")
    doc["video"]["fps"] = -1
    with pytest.raises(ValidationError, match=r"VideoProfile\.fps"):
        parse_scenario(write(tmp_path, doc))


def test_unknown_key_is_listed(tmp_path):
    doc = shipped("hover_100m")
    doc["video"]["colour_space"] = "rgb"
    with pytest.raises(ConfigError, match="colour_space"):
        parse_scenario(write(tmp_path, doc))


def test_unknown_top_level_key(tmp_path):
    doc = shipped("hover_100m")
    doc["weather"] = "sunny"
    with pytest.raises(ConfigError, match="weather"):
        parse_scenario(write(tmp_path, doc))


def test_missing_required_key(tmp_path):
    doc = shipped("hover_100m")
    del doc["link"]["tx_power_dbm"]
    with pytest.raises(ConfigError, match=r"link\.tx_power_dbm"):
        parse_scenario(write(tmp_path, doc))


def test_missing_section(tmp_path):
    doc = shipped("hover_100m")
    del doc["power"]
    with pytest.raises(ConfigError, match="power"):
        parse_scenario(write(tmp_path, doc))


def test_wrong_type(tmp_path):
    doc = shipped("hover_100m")
    doc["video"]["width_px"] = "wide"
    with pytest.raises(ConfigError, match="width_px"):
        parse_scenario(write(tmp_path, doc))


def test_yaml_error_has_line(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("name: x\nlink: [1, 2\n")
    with pytest.raises(ConfigError, match=r"bad\.yaml:\d+:\d+"):
        parse_scenario(path)


def test_missing_mcs_file(tmp_path):
    doc = shipped("hover_100m")
    doc["mcs_table"] = "nope.csv"
    with pytest.raises(ConfigError, match="does not exist"):
        parse_scenario(write(tmp_path, doc))


def test_relative_mcs_file(tmp_path):
    (tmp_path / "t.csv").write_text("index,label,min_snr_db,phy_rate_mbps\n12,top,21,4620\n")
    doc = shipped("hover_100m")
    doc["mcs_table"] = "t.csv"
    sc = parse_scenario(write(tmp_path, doc))
    assert len(sc.mcs_table) == 1


def test_radio_profile_override(tmp_path):
    doc = shipped("hover_100m")
    doc["ground_radio"] = {"profile": "array", "max_throughput_bps": 2e9}
    sc = parse_scenario(write(tmp_path, doc))
    assert sc.ground_hw.scan_az_deg == 49.0
    assert sc.ground_hw.max_throughput_bps == 2e9


def test_unknown_radio_profile(tmp_path):
    doc = shipped("hover_100m")
    doc["ground_radio"] = {"profile": "horn"}
    with pytest.raises(ConfigError, match="horn"):
        parse_scenario(write(tmp_path, doc))


def test_dt_override():
    assert parse_scenario("hover_100m", dt=0.005).channel_sample_dt_s == 0.005


def test_wrong_kind_rejected():
    with pytest.raises(ConfigError, match="kind"):
        parse_scenario("faces136")
    with pytest.raises(ConfigError):
        parse_face_scene("hover_100m")


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        parse_scenario("does_not_exist")


def test_fig5_sweep_document():
    sweep = parse_distance_sweep("fig5_sweep")
    assert sweep.gains_dbi == (17.5, 25.4)
    assert 21.0 in snr_grid(sweep.snr_start_db, sweep.snr_stop_db, sweep.snr_step_db)


def test_snr_grid():
    assert snr_grid(21, 21, 1) == [21]
    assert snr_grid(0, 1, 0.25) == [0, 0.25, 0.5, 0.75, 1.0]
    with pytest.raises(ValidationError, match="ascending"):
        snr_grid(25, 20, 1)


def test_face_scene_needs_both_cameras(tmp_path):
    doc = shipped("faces136")
    doc["cameras"] = [c for c in doc["cameras"] if c["label"] != "4K"]
    with pytest.raises(ConfigError, match="4K"):
        parse_face_scene(write(tmp_path, doc))


def test_face_count_expands():
    doc = parse_face_scene("faces136")
    assert len(doc.faces) == 136


def test_explicit_anchors(tmp_path):
    doc = shipped("faces136")
    doc["calibration"] = {"anchors": [{"face_px": 10, "rate": 0.2}, {"face_px": 40, "rate": 0.9}]}
    parsed = parse_face_scene(write(tmp_path, doc))
    assert parsed.calibration.anchors == ((10.0, 0.2), (40.0, 0.9))

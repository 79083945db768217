import json

import pytest

from conftest import make_config
from mimosel import ConfigError, SystemConfig


def test_log_scale_keys_convert_to_linear():
    cfg = make_config()
    assert cfg.noise_power == pytest.approx(1e-15, rel=1e-12)
    assert cfg.power_budgets == pytest.approx([1e-2] * 4, rel=1e-12)
    assert cfg.path_gains == pytest.approx([1e-12] * 4, rel=1e-12)


def test_scalars_broadcast_per_user():
    cfg = make_config()
    assert cfg.ut_antennas == [2, 2, 2, 2]
    assert len(cfg.power_budgets) == cfg.n_users


def test_per_user_lists_pass_through():
    cfg = make_config(n_users=2, ut_antennas=[2, 3], power_dbm=[0.0, 10.0])
    assert cfg.ut_antennas == [2, 3]
    assert cfg.power_budgets == pytest.approx([1e-3, 1e-2], rel=1e-12)


def test_chain_count_must_not_exceed_antennas():
    with pytest.raises(ConfigError):
        make_config(n_chains=33)


def _swap_key(log_key, linear_key, value):
    from conftest import DESK_KEYS

    raw = dict(DESK_KEYS)
    del raw[log_key]
    raw[linear_key] = value
    return raw


def test_invalid_budgets_rejected():
    with pytest.raises(ConfigError):
        SystemConfig.from_dict(_swap_key("path_gain_db", "path_gains", 0.0))
    with pytest.raises(ConfigError):
        SystemConfig.from_dict(_swap_key("power_dbm", "power_budgets", -1.0))
    with pytest.raises(ConfigError):
        SystemConfig.from_dict(_swap_key("noise_dbm", "noise_power", 0.0))


def test_wrong_length_per_user_list_rejected():
    with pytest.raises(ConfigError):
        make_config(ut_antennas=[2, 2])


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError):
        make_config(mystery_knob=1)


def test_missing_required_key_rejected():
    raw = {"n_users": 2}
    with pytest.raises(ConfigError):
        SystemConfig.from_dict(raw)


def test_with_power_dbm_replaces_every_budget():
    cfg = make_config().with_power_dbm(0.0)
    assert cfg.power_budgets == pytest.approx([1e-3] * 4, rel=1e-12)


def test_from_file_round_trip(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(
        json.dumps(
            {
                "n_antennas": 8,
                "n_chains": 3,
                "n_users": 2,
                "ut_antennas": 2,
                "noise_dbm": -120,
                "power_dbm": 10,
                "path_gain_db": -120,
                "rng_seed": 5,
            }
        )
    )
    cfg = SystemConfig.from_file(path)
    assert cfg.n_antennas == 8
    assert cfg.rng_seed == 5


def test_from_file_reports_parse_location(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"n_users": 2,\n  "n_antennas": }')
    with pytest.raises(ConfigError, match="line"):
        SystemConfig.from_file(path)


def test_solver_controls_validated():
    with pytest.raises(ConfigError):
        make_config(fp_tol=0.0)
    with pytest.raises(ConfigError):
        make_config(ao_max_iter=0)


def test_power_unit_conversions_round_trip_at_zero():
    from mimosel.config import dbm_to_watts, watts_to_dbm

    assert dbm_to_watts(float("-inf")) == 0.0
    assert watts_to_dbm(0.0) == float("-inf")
    assert watts_to_dbm(dbm_to_watts(10.0)) == pytest.approx(10.0, abs=1e-12)

import pytest

from deltaqed.config import Config, load_config, resolve
from deltaqed.constants import to_ghz
from deltaqed.errors import ConfigError


def test_defaults_resolve_to_flux_qubit_realisation(realization):
    assert to_ghz(realization.transitions.omega_31) == pytest.approx(20.318, rel=1e-4)
    assert realization.drive.rabi > 0
    assert realization.truncation.n_p_max == 16


def test_load_toml(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text('[emitter]\nsource = "direct"\nw31 = 20\nw21 = 17\ng31 = 0.1\ng21 = 0.05\n[pulse]\npoints = 512\n')
    cfg = load_config(path)
    assert cfg.emitter.w31 == 20.0 and isinstance(cfg.emitter.w31, float)
    assert cfg.pulse.points == 512
    scenario = resolve(cfg)
    assert to_ghz(scenario.rates.gamma_31) == pytest.approx(0.1)


@pytest.mark.parametrize(
    "data,match",
    [
        ({"emitter": {"colour": 1}}, "colour"),
        ({"nosuch": {}}, "nosuch"),
        ({"pulse": {"points": 1.5}}, "integer"),
        ({"pulse": {"width": "wide"}}, "number"),
        ({"emitter": {"source": 3}}, "string"),
        ({"drive": {"mode": "manual"}}, "rabi"),
        ({"emitter": {"source": "direct", "w31": 20, "w21": 17}}, "either"),
        ({"emitter": {"source": "direct", "w31": 20}}, "w21"),
        ({"output": {"format": "xml"}}, "format"),
        ({"sweep": {"direction": "sideways"}}, "direction"),
    ],
)
def test_invalid_config(data, match):
    with pytest.raises(ConfigError, match=match):
        Config.from_dict(data)


def test_bad_circuit_values_become_config_errors():
    with pytest.raises(ConfigError, match="alpha"):
        resolve(Config.from_dict({"circuit": {"alpha": 1.5}}))


def test_manual_drive():
    cfg = Config.from_dict(
        {
            "emitter": {"source": "direct", "w31": 20, "w21": 17, "g31": 0.1, "g21": 0.05},
            "drive": {"mode": "manual", "rabi": 0.02, "detuning": 0.001},
        }
    )
    s = resolve(cfg)
    assert to_ghz(s.drive.rabi) == pytest.approx(0.02)
    assert to_ghz(s.drive.omega) == pytest.approx(3.001)


def test_malformed_toml(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("[emitter\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_round_trip_through_dict():
    cfg = Config.from_dict({"pulse": {"width": 0.01}})
    clean = {k: {kk: vv for kk, vv in v.items() if vv is not None} for k, v in cfg.to_dict().items()}
    assert Config.from_dict(clean) == cfg

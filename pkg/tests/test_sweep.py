import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deltaqed import sweep as sw
from deltaqed.config import Config
from deltaqed.errors import ConfigError

ETA_ONE = {
    "emitter": {"source": "direct", "w31": 20.0, "w21": 17.0, "gamma_total": 0.1, "eta": 1.0},
}


def _spec(kind="spectrum", grid=(19.8, 20.2, 41), data=ETA_ONE):
    return sw.SweepSpec(kind, sw.Grid(*grid), Config.from_dict(data))


def test_lossless_spectrum_peaks_at_one():
    rec = sw.run_sweep(_spec(grid=(19.9, 20.1, 201)))
    nu, tb = rec.column("nu_ghz"), rec.column("abs2_tb")
    k = int(np.argmin(np.abs(nu - 20.0)))
    assert tb[k] == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(rec.column("sum"), 1.0, atol=1e-9)


def test_record_is_deterministic_and_thread_independent(monkeypatch):
    monkeypatch.setenv("DELTAQED_THREADS", "1")
    a = sw.run_sweep(_spec()).to_csv()
    monkeypatch.setenv("DELTAQED_THREADS", "3")
    b = sw.run_sweep(_spec()).to_csv()
    assert a == b


def test_replay_from_inputs_reproduces_record():
    rec = sw.run_sweep(_spec("saturation", (0.01, 1.0, 5), {}))
    loaded = sw.RunRecord(**json.loads(rec.to_json()))
    assert sw.replay(loaded).to_csv() == rec.to_csv()


def test_csv_header_carries_provenance():
    text = sw.run_sweep(_spec()).to_csv()
    header = [line for line in text.splitlines() if line.startswith("#")]
    keys = {line[2:].split(":")[0] for line in header}
    for key in ("constants", "units", "quadrature", "grid", "package", "rates_ghz", "drive_ghz"):
        assert key in keys
    assert "timestamp" not in text


def test_failures_recorded_not_raised():
    # flux > 1 is rejected per point; the rest of the sweep completes
    rec = sw.run_sweep(_spec("flux", (0.98, 1.02, 5), {"circuit": {"n_p_max": 4, "n_m_max": 4}}))
    assert len(rec.rows) + len(rec.failures) == 5
    assert [f["index"] for f in rec.failures] == [3, 4]
    assert rec.too_many_failures


def test_row_count_equals_points_minus_failures():
    rec = sw.run_sweep(_spec())
    assert len(rec.rows) == 41 - len(rec.failures)


@pytest.mark.parametrize("text", ["1:2", "a:b:c", "2:1:5", "0:1:1"])
def test_bad_grid(text):
    with pytest.raises(ConfigError):
        sw.Grid.parse(text)


def test_unknown_kind():
    with pytest.raises(ConfigError):
        sw.SweepSpec("nope", sw.Grid(0, 1, 2))


@settings(max_examples=30, deadline=None)
@given(st.floats(-1.0, 1.0))
def test_golden_section_finds_parabola_peak(x0):
    x, _ = sw.golden_section_max(lambda x: -((x - x0) ** 2), -2.0, 2.0, tol=1e-6)
    assert x == pytest.approx(x0, abs=1e-6)


def test_band_edges_interpolate():
    xs = np.linspace(0, 1, 11)
    ys = 1 - 4 * (xs - 0.5) ** 2
    lo, hi = sw.band_edges(xs, ys, 0.9, 5)
    exact = 0.5 - np.sqrt(0.1 / 4)
    assert lo == pytest.approx(exact, abs=0.01)
    assert hi == pytest.approx(1 - exact, abs=0.01)


def test_bias_window_validation():
    from deltaqed.circuit import CircuitParams

    with pytest.raises(ConfigError):
        sw.find_optimal_bias(CircuitParams(), (0.5, 0.4))


def test_plot_is_deterministic(tmp_path):
    rec = sw.run_sweep(_spec())
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    sw.emit_plot(rec, a)
    sw.emit_plot(rec, b)
    assert a.stat().st_size > 0
    assert a.read_bytes() == b.read_bytes()
    assert "frequency (GHz)" in a.read_text()


def test_pulse_record_plot(tmp_path):
    rec, out = sw.pulse_record(Config.from_dict({**ETA_ONE, "pulse": {"width": 0.01, "points": 512}}))
    path = sw.emit_plot(rec, tmp_path / "pulse.svg")
    text = path.read_text()
    for name in ("input_density", "elastic_density", "inelastic_density"):
        assert name in text
    assert float(rec.provenance["efficiency"]) == out.efficiency


def test_empty_record_cannot_be_plotted(tmp_path):
    rec = sw.RunRecord("spectrum", {}, sw.COLUMNS["spectrum"], [], {})
    with pytest.raises(ValueError):
        sw.emit_plot(rec, tmp_path / "x.svg")

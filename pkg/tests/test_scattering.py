import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deltaqed import scattering as sc
from deltaqed.constants import to_angular
from deltaqed.errors import InfeasibleDriveError

rate = st.floats(0.005, 1.0)
loss_frac = st.floats(0.0, 0.5)
offset = st.floats(-3.0, 3.0)


def _system(g31, g21, l3, l2, delta, rabi):
    rates = sc.EmitterRates(g31, g21, l2 * g21, l3 * g31)
    transitions = sc.Transitions(130.0, 105.0)
    drive = sc.DriveField.from_detuning(transitions, delta, rabi)
    return rates, transitions, drive


def _assert_agree(closed, oracle, rtol=1e-10):
    # amplitudes that vanish exactly are compared against the solution's scale
    amps = ("t_a", "t_b", "lambda_2", "lambda_3")
    scale = max(abs(getattr(oracle, n)) for n in amps)
    for name in amps:
        a, b = getattr(closed, name), getattr(oracle, name)
        assert abs(a - b) <= rtol * max(abs(b), 1e-4 * scale), name


# oracle: the closed forms must agree with a direct solve of the stationary equations


@settings(max_examples=200, deadline=None)
@given(rate, rate, loss_frac, loss_frac, offset, st.floats(0.0, 2.0), offset)
def test_down_closed_form_matches_linear_solve(g31, g21, l3, l2, delta, rabi, x):
    rates, transitions, drive = _system(g31, g21, l3, l2, delta, rabi)
    nu = transitions.omega_31 + x * g31
    closed = sc.scatter_down(nu, rates, transitions, drive)
    oracle = sc.solve_oracle_down(nu, rates, transitions, drive)
    _assert_agree(closed, oracle)


@settings(max_examples=200, deadline=None)
@given(rate, rate, loss_frac, loss_frac, offset, st.floats(0.0, 2.0), offset)
def test_up_closed_form_matches_linear_solve(g31, g21, l3, l2, delta, rabi, x):
    rates, transitions, drive = _system(g31, g21, l3, l2, delta, rabi)
    nu = transitions.omega_21 + x * g21
    closed = sc.scatter_up(nu, rates, transitions, drive)
    oracle = sc.solve_oracle_up(nu, rates, transitions, drive)
    _assert_agree(closed, oracle)


@settings(max_examples=100, deadline=None)
@given(rate, rate, offset, st.floats(0.0, 2.0), offset)
def test_lossless_unitarity(g31, g21, delta, rabi, x):
    rates, transitions, drive = _system(g31, g21, 0, 0, delta, rabi)
    for res in (
        sc.scatter_down(transitions.omega_31 + x, rates, transitions, drive),
        sc.scatter_up(transitions.omega_21 + x, rates, transitions, drive),
    ):
        assert res.abs2_ta + res.abs2_tb == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(rate, rate, loss_frac, loss_frac, offset, st.floats(0.0, 2.0), offset)
def test_loss_only_removes_probability(g31, g21, l3, l2, delta, rabi, x):
    rates, transitions, drive = _system(g31, g21, l3, l2, delta, rabi)
    res = sc.scatter_down(transitions.omega_31 + x * g31, rates, transitions, drive)
    assert res.abs2_ta + res.abs2_tb <= 1 + 1e-12


@settings(max_examples=100, deadline=None)
@given(rate, rate, loss_frac, loss_frac, offset, st.floats(0.0, 2.0), offset)
def test_up_is_mirror_of_down(g31, g21, l3, l2, delta, rabi, x):
    rates, transitions, drive = _system(g31, g21, l3, l2, delta, rabi)
    up = sc.scatter_up(transitions.omega_21 + x, rates, transitions, drive)
    mrates = sc.EmitterRates(rates.gamma_21, rates.gamma_31, rates.loss_3, rates.loss_2)
    mtrans = sc.Transitions(transitions.omega_21 + 200.0, 200.0 - transitions.omega_32 + transitions.omega_21)
    mdrive = sc.DriveField.from_detuning(mtrans, -delta, rabi)
    down = sc.scatter_down(mtrans.omega_31 + x, mrates, mtrans, mdrive)
    assert up.abs2_ta == pytest.approx(down.abs2_tb, abs=1e-12)
    assert up.abs2_tb == pytest.approx(down.abs2_ta, abs=1e-12)


def test_optimal_drive_gives_perfect_resonant_conversion(lossless):
    rates, transitions, drive = lossless
    assert drive.rabi == pytest.approx(np.sqrt(rates.gamma_31 * rates.gamma_21))
    res = sc.scatter_down(transitions.omega_31, rates, transitions, drive)
    assert res.abs2_ta <= 1e-20
    assert res.abs2_tb == pytest.approx(1.0, abs=1e-12)


def test_optimal_up_drive_gives_perfect_resonant_conversion(lossless):
    rates, transitions, _ = lossless
    drive = sc.optimal_drive(rates, transitions, "up")
    res = sc.scatter_up(transitions.omega_21, rates, transitions, drive)
    assert res.abs2_tb <= 1e-20
    assert res.abs2_ta == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("l3,l2", [(0.01, 0.0), (0.0, 0.01), (0.02, 0.005)])
def test_lossy_resonant_efficiency(l3, l2):
    rates = sc.EmitterRates(0.7, 0.25, l2, l3)
    transitions = sc.Transitions(127.0, 107.0)
    for direction, scatter, attr, nu, expected in (
        ("down", sc.scatter_down, "abs2_tb", transitions.omega_31, sc.resonant_efficiency_down(rates)),
        ("up", sc.scatter_up, "abs2_ta", transitions.omega_21, sc.resonant_efficiency_up(rates)),
    ):
        drive = sc.optimal_drive(rates, transitions, direction)
        res = scatter(nu, rates, transitions, drive)
        assert getattr(res, attr) == pytest.approx(expected, rel=1e-12)
        elastic = res.abs2_ta if direction == "down" else res.abs2_tb
        assert elastic <= 1e-20


@pytest.mark.parametrize("eta", [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0])
def test_eta_form_matches_general_closed_form(eta):
    gamma = 0.3
    rates = sc.rates_from_eta(gamma, eta)
    transitions = sc.Transitions(120.0, 100.0)
    drive = sc.optimal_drive(rates, transitions)
    nu = transitions.omega_31 + np.linspace(-3, 3, 601) * gamma
    res = sc.scatter_down(nu, rates, transitions, drive)
    p_a, p_b = sc.lossless_spectra(nu, gamma, eta, transitions.omega_31)
    np.testing.assert_allclose(p_a, res.abs2_ta, atol=1e-13)
    np.testing.assert_allclose(p_b, res.abs2_tb, atol=1e-13)


@pytest.mark.parametrize("eta", [0.1, 0.2, 5.0, 10.0])
def test_eta_inversion_symmetry(eta):
    nu = np.linspace(-5, 5, 2001)
    a1, b1 = sc.lossless_spectra(nu, 1.0, eta)
    a2, b2 = sc.lossless_spectra(nu, 1.0, 1 / eta)
    np.testing.assert_allclose(a1, a2, atol=1e-12, rtol=0)
    np.testing.assert_allclose(b1, b2, atol=1e-12, rtol=0)


def test_lorentzian_limit_for_eta_one():
    # eta = 1: p_b = 1 / (1 + (4x)^4 / 4 ... ) reduces to 1/(1 + 64 x^4)
    x = np.linspace(-2, 2, 401)
    _, p_b = sc.lossless_spectra(x, 1.0, 1.0)
    np.testing.assert_allclose(p_b, 1 / (1 + 64 * x**4), rtol=1e-13)


def test_conversion_band_width_set_by_smaller_rate():
    nu = np.linspace(-2, 2, 4001)
    _, narrow = sc.lossless_spectra(nu, 1.0, 0.1)
    _, wide = sc.lossless_spectra(nu, 1.0, 1.0)
    assert np.sum(narrow > 0.5) < np.sum(wide > 0.5)


def test_undriven_emitter_does_not_convert(lossless):
    rates, transitions, _ = lossless
    drive = sc.DriveField.from_detuning(transitions, 0.0, 0.0)
    res = sc.scatter_down(transitions.omega_31 + np.linspace(-1, 1, 11), rates, transitions, drive)
    assert np.all(res.abs2_tb == 0)
    np.testing.assert_allclose(res.abs2_ta, 1.0, atol=1e-14)


def test_vectorised_matches_scalar(lossless):
    rates, transitions, drive = lossless
    nu = transitions.omega_31 + np.linspace(-1, 1, 7)
    vec = sc.scatter_down(nu, rates, transitions, drive)
    for k, v in enumerate(nu):
        assert sc.scatter_down(v, rates, transitions, drive).t_a == pytest.approx(vec.t_a[k], rel=1e-15)


def test_infeasible_drive_raises():
    rates = sc.EmitterRates(0.1, 0.05, 0.0, 0.2)
    with pytest.raises(InfeasibleDriveError, match="gamma_31"):
        sc.optimal_drive_down(rates)
    with pytest.raises(InfeasibleDriveError, match="gamma_21"):
        sc.optimal_drive_up(sc.EmitterRates(0.1, 0.05, 0.06, 0.0))


@pytest.mark.parametrize(
    "kwargs",
    [dict(gamma_31=0.0, gamma_21=1.0), dict(gamma_31=1.0, gamma_21=-1.0), dict(gamma_31=1, gamma_21=1, loss_2=-0.1)],
)
def test_invalid_rates_rejected(kwargs):
    with pytest.raises(ValueError):
        sc.EmitterRates(**kwargs)


def test_transitions_must_be_ordered():
    with pytest.raises(ValueError):
        sc.Transitions(10.0, 12.0)


def test_ghz_constructors_convert_to_angular():
    rates = sc.EmitterRates.from_ghz(0.1, 0.05)
    assert rates.gamma_31 == pytest.approx(to_angular(0.1))
    assert sc.Transitions.from_ghz(20.0, 17.0).omega_32 == pytest.approx(to_angular(3.0))

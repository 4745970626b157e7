import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deltaqed import lindblad as lb
from deltaqed import scattering as sc
from deltaqed.errors import SingularSystemError


@pytest.fixture(scope="module")
def setup(realization):
    r = realization
    rates = lb.LindbladRates.from_emitter(r.rates, r.gamma_32)
    return r, rates


def _drive(rates, r, x, dp=0.0):
    return lb.ProbeDrive(x * rates.gamma_31, dp, 0.0, r.drive.rabi)


def test_no_probe_leaves_ground_state(setup):
    r, rates = setup
    rho = lb.steady_state(lb.ProbeDrive(0.0, 0.0, 0.0, r.drive.rabi), rates)
    np.testing.assert_allclose(rho.populations, [1, 0, 0], atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.001, 3.0), st.floats(-3.0, 3.0), st.floats(-2.0, 2.0), st.floats(0.0, 3.0))
def test_steady_state_is_a_valid_density_matrix(x, dp, d, w):
    rates = lb.LindbladRates(1.0, 0.05, 0.3, 0.001, 0.002, 0.003)
    drive = lb.ProbeDrive(x, dp, d, w)
    rho = lb.steady_state(drive, rates)  # DensityMatrix3 validates on construction
    assert np.linalg.norm(lb.lindblad_action(drive, rates, rho.rho)) < 1e-10


def test_liouvillian_matches_direct_action():
    rng = np.random.default_rng(7)
    rates = lb.LindbladRates(1.0, 0.2, 0.4, 0.01, 0.02, 0.03)
    drive = lb.ProbeDrive(0.3, 0.1, -0.2, 0.5)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = m @ m.conj().T
    sup = lb.liouvillian(drive, rates)
    np.testing.assert_allclose(sup @ rho.ravel(), lb.lindblad_action(drive, rates, rho).ravel(), atol=1e-13)


def test_liouvillian_preserves_trace():
    rates = lb.LindbladRates(1.0, 0.2, 0.4, 0.01, 0.02, 0.03)
    sup = lb.liouvillian(lb.ProbeDrive(0.3, 0.1, -0.2, 0.5), rates)
    trace_row = np.eye(3).ravel()
    np.testing.assert_allclose(trace_row @ sup, 0, atol=1e-14)


def test_weak_probe_matches_first_order_coherences(setup):
    r, rates = setup
    for dp in np.linspace(-2, 2, 9) * rates.gamma_31:
        drive = lb.ProbeDrive(1e-4 * rates.gamma_31, dp, 0.0, r.drive.rabi)
        rho = lb.steady_state(drive, rates)
        rho21, rho31 = lb.weak_field_coherences(drive, rates)
        assert rho[2, 1] == pytest.approx(rho21, rel=1e-6)
        assert rho[3, 1] == pytest.approx(rho31, rel=1e-6)


@pytest.mark.parametrize("loss", [(0.0, 0.0), (0.001, 0.001), (0.05, 0.02)])
def test_first_order_transmission_equals_closed_forms(loss):
    emitter = sc.EmitterRates(1.0, 0.35, loss[1] * 0.35, loss[0] * 1.0 + 0.04)
    transitions = sc.Transitions(130.0, 110.0)
    drive = sc.optimal_drive(emitter, transitions)
    rates = lb.LindbladRates.from_emitter(emitter, 0.04)
    for dp in np.linspace(-3, 3, 13):
        pd = lb.ProbeDrive(1.0, dp, 0.0, drive.rabi)
        rho21, rho31 = lb.weak_field_coherences(pd, rates)
        rho = np.zeros((3, 3), complex)
        rho[1, 0], rho[2, 0] = rho21, rho31
        t_a, t_b = lb.transmission(pd, rates, rho)
        ref = sc.scatter_down(transitions.omega_31 + dp, emitter, transitions, drive)
        assert abs(t_a) ** 2 == pytest.approx(ref.abs2_ta, rel=1e-10, abs=1e-14)
        assert abs(t_b) ** 2 == pytest.approx(ref.abs2_tb, rel=1e-10, abs=1e-14)


def test_saturation_trends(setup):
    # |T_a|^2 rises throughout; |T_b|^2 falls until rho_21 changes sign
    # (a real zero near Omega_p = 1.77 Gamma_31), then grows again slightly
    r, rates = setup
    grid = np.linspace(0.01, 2, 50) * rates.gamma_31
    rows = lb.saturation_sweep(rates, r.drive.rabi, grid)
    ta = np.array([row[1] for row in rows])
    tb = np.array([row[2] for row in rows])
    assert np.all(np.diff(ta) > 0)
    k = int(np.argmin(tb))
    assert np.all(np.diff(tb[: k + 1]) < 0)
    assert 1.6 < grid[k] / rates.gamma_31 < 1.9
    rho = [lb.steady_state(_drive(rates, r, x), rates)[2, 1].real for x in (1.6, 1.9)]
    assert rho[0] < 0 < rho[1]


def test_half_saturation_value(setup):
    r, rates = setup
    rows = lb.saturation_sweep(rates, r.drive.rabi, [0.5 * rates.gamma_31])
    assert rows[0][2] == pytest.approx(0.372, abs=0.01)


def test_time_evolution_reaches_the_same_steady_state():
    rates = lb.LindbladRates(1.0, 0.05, 0.3, 0.001, 0.002, 0.003)
    drive = lb.ProbeDrive(0.5, 0.2, 0.0, 0.55)
    direct = lb.steady_state(drive, rates)
    evolved = lb.evolve_to_steady_state(drive, rates)
    np.testing.assert_allclose(evolved.rho, direct.rho, atol=1e-9)


def test_photon_numbers():
    assert lb.photon_number(0.5, 1.0) == pytest.approx(np.pi / 8)
    assert lb.control_photon_number(2.0, 1.0) == pytest.approx(2 * np.pi)
    with pytest.raises(ValueError):
        lb.photon_number(1.0, 0.0)


def test_no_relaxation_is_singular():
    with pytest.raises(SingularSystemError):
        lb.steady_state(lb.ProbeDrive(0.1, 0, 0, 0.1), lb.LindbladRates(0.0, 0.0, 0.0))


def test_transmission_needs_probe():
    rates = lb.LindbladRates(1.0, 0.0, 0.3)
    with pytest.raises(ValueError):
        lb.transmission(lb.ProbeDrive(0.0, 0, 0, 0.1), rates, np.eye(3))


@pytest.mark.parametrize(
    "rho",
    [
        np.diag([0.5, 0.5, 0.1]),  # trace
        np.array([[1, 0.1, 0], [0.2, 0, 0], [0, 0, 0]]),  # Hermiticity
        np.diag([1.5, -0.5, 0.0]),  # positivity
    ],
)
def test_density_matrix_validation(rho):
    with pytest.raises(ValueError):
        lb.DensityMatrix3(rho)


def test_loss_smaller_than_gamma32_rejected():
    with pytest.raises(ValueError, match="gamma_32"):
        lb.LindbladRates.from_emitter(sc.EmitterRates(1.0, 0.5, 0.0, 0.01), 0.05)


def test_weak_probe_amplitudes_match_scattering(setup):
    r, rates = setup
    dps = np.linspace(-5, 5, 101) * rates.gamma_31
    ref = sc.scatter_down(r.transitions.omega_31 + dps, r.rates, r.transitions, r.drive)
    for dp, ra, rb in zip(dps, ref.t_a, ref.t_b):
        drive = lb.ProbeDrive(1e-3 * rates.gamma_31, dp, 0.0, r.drive.rabi)
        t_a, t_b = lb.transmission(drive, rates, lb.steady_state(drive, rates))
        assert abs(abs(t_a) - abs(ra)) <= 1e-3
        assert abs(abs(t_b) - abs(rb)) <= 1e-3

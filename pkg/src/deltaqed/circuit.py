"""Three-junction flux qubit capacitively coupled to the end of a transmission line.

The qubit Hamiltonian, in units of ``E_J``::

    H = 2 E_C n_p^2 + 2 E_C / (1 + 2 alpha + 2 beta) n_m^2
        + E_J [2 + alpha - 2 cos(d_p) cos(d_m) - alpha cos(2 d_m + 2 pi f)]

is assembled in the charge basis ``|n_p, n_m>``. Since ``d_p`` and ``d_m`` are
half-sum and half-difference of the junction phases, physical states have
``n_p + n_m`` even; only that sublattice is kept (the odd one is a spurious
copy of the spectrum).
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from deltaqed import constants as const
from deltaqed.errors import ConvergenceError, ZeroMatrixElementError
from deltaqed.scattering import (
    EmitterRates,
    Transitions,
    resonant_efficiency_down,
    resonant_efficiency_up,
)

log = logging.getLogger(__name__)

# |n_ij| below this counts as a symmetry-forbidden transition
CLOSED_CHANNEL = 1e-6


@dataclass(frozen=True)
class CircuitParams:
    """Flux-qubit circuit parameters.

    ``ej_over_h`` is in GHz, ``impedance`` in ohms, ``flux`` is the reduced
    flux ``Phi_ext / Phi_0``.
    """

    alpha: float = 0.7
    beta: float = 0.5
    ej_over_h: float = 150.0
    ej_over_ec: float = 80.0
    impedance: float = 50.0
    flux: float = 0.4845

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta!r}")
        if not self.ej_over_h > 0:
            raise ValueError(f"ej_over_h must be > 0, got {self.ej_over_h!r}")
        if not self.ej_over_ec > 1:
            raise ValueError(f"ej_over_ec must be > 1, got {self.ej_over_ec!r}")
        if not self.impedance > 0:
            raise ValueError(f"impedance must be > 0, got {self.impedance!r}")
        if not 0 <= self.flux <= 1:
            raise ValueError(f"flux must lie in [0, 1], got {self.flux!r}")

    def with_flux(self, flux):
        return CircuitParams(self.alpha, self.beta, self.ej_over_h, self.ej_over_ec, self.impedance, flux)

    @property
    def coupling_ratio(self):
        """``beta / (1 + 2 alpha + 2 beta)``: effective charge per Cooper pair over 2e."""
        return self.beta / (1 + 2 * self.alpha + 2 * self.beta)


@dataclass(frozen=True)
class ChargeTruncation:
    n_p_max: int = 16
    n_m_max: int = 16

    def __post_init__(self):
        # at least 5 charge states per mode
        if self.n_p_max < 2 or self.n_m_max < 2:
            raise ValueError("charge cutoffs must be >= 2 (at least 5 states per mode)")

    def doubled(self):
        return ChargeTruncation(2 * self.n_p_max, 2 * self.n_m_max)


@dataclass(frozen=True)
class QubitSpectrum:
    """Lowest three levels and ``n_m`` matrix elements.

    ``levels`` are angular frequencies (rad/ns) with the ground state at 0;
    ``n_elements[i, j]`` is ``<i+1| n_m |j+1>``.
    """

    flux: float
    levels: np.ndarray
    n_elements: np.ndarray
    residual: float

    @property
    def omega_21(self):
        return self.levels[1]

    @property
    def omega_31(self):
        return self.levels[2]

    @property
    def omega_32(self):
        return self.levels[2] - self.levels[1]

    def abs_n(self, i, j):
        return abs(self.n_elements[i - 1, j - 1])

    def transitions(self):
        return Transitions(self.omega_31, self.omega_21)


@dataclass(frozen=True)
class RealizedRates:
    """Waveguide decay rates (rad/ns) of the three transitions."""

    gamma_31: float
    gamma_21: float
    gamma_32: float

    def emitter_rates(self, intrinsic_3=0.001, intrinsic_2=0.001):
        """Compose scattering rates from intrinsic loss ratios.

        ``loss_3 = intrinsic_3 * Gamma_31 + Gamma_32`` (emission on the 3->2
        line counts as loss for the conversion channel) and
        ``loss_2 = intrinsic_2 * Gamma_21``.
        """
        if intrinsic_3 < 0 or intrinsic_2 < 0:
            raise ValueError("intrinsic loss ratios must be >= 0")
        return EmitterRates(
            gamma_31=self.gamma_31,
            gamma_21=self.gamma_21,
            loss_2=intrinsic_2 * self.gamma_21,
            loss_3=intrinsic_3 * self.gamma_31 + self.gamma_32,
        )


def charge_states(trunc):
    """Charge lattice points ``(n_p, n_m)`` with ``n_p + n_m`` even, row-major."""
    n_p = np.arange(-trunc.n_p_max, trunc.n_p_max + 1)
    n_m = np.arange(-trunc.n_m_max, trunc.n_m_max + 1)
    pp, mm = np.meshgrid(n_p, n_m, indexing="ij")
    keep = (pp + mm) % 2 == 0
    return np.column_stack([pp[keep], mm[keep]])


def build_hamiltonian(params, trunc=ChargeTruncation()):
    """Qubit Hamiltonian in units of ``E_J`` on the even charge sublattice."""
    states = charge_states(trunc)
    index = {(int(p), int(m)): k for k, (p, m) in enumerate(states)}
    ec = 1.0 / params.ej_over_ec
    n_p, n_m = states[:, 0].astype(float), states[:, 1].astype(float)
    dim = len(states)
    ham = np.zeros((dim, dim), dtype=complex)
    ham[np.diag_indices(dim)] = (
        2 * ec * n_p**2
        + 2 * ec / (1 + 2 * params.alpha + 2 * params.beta) * n_m**2
        + (2 + params.alpha)
    )
    # e^{+i 2 pi f} accompanies n_m -> n_m + 2
    phase = np.exp(2j * np.pi * params.flux)
    for k, (p, m) in enumerate(states):
        p, m = int(p), int(m)
        for dp in (1, -1):
            for dm in (1, -1):
                j = index.get((p + dp, m + dm))
                if j is not None:
                    ham[j, k] += -0.5
        j = index.get((p, m + 2))
        if j is not None:
            ham[j, k] += -0.5 * params.alpha * phase
        j = index.get((p, m - 2))
        if j is not None:
            ham[j, k] += -0.5 * params.alpha * np.conj(phase)
    return ham


def _gauge_fix(vecs):
    vecs = vecs.copy()
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        big = col[np.argmax(np.abs(col))]
        vecs[:, k] = col * (abs(big) / big)
    return vecs


def diagonalize(params, trunc=ChargeTruncation(), residual_tol=1e-9):
    """Lowest three eigenpairs of the qubit Hamiltonian.

    Raises
    ------
    ConvergenceError
        If the eigenpair residual ``max ||H v - E v||`` exceeds ``residual_tol``
        (in units of ``E_J``).
    """
    ham = build_hamiltonian(params, trunc)
    try:
        energies, vecs = scipy.linalg.eigh(ham, subset_by_index=[0, 2])
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver failed at f={params.flux}: {exc}") from exc
    residual = float(np.max(np.linalg.norm(ham @ vecs - vecs * energies, axis=0)))
    if not residual <= residual_tol:
        raise ConvergenceError(f"eigenpair residual {residual:.3g} exceeds {residual_tol:g} at f={params.flux}")
    vecs = _gauge_fix(vecs)
    n_m = charge_states(trunc)[:, 1].astype(float)
    n_elements = vecs.conj().T @ (n_m[:, None] * vecs)
    levels = const.to_angular(params.ej_over_h * (energies - energies[0]))
    return QubitSpectrum(float(params.flux), levels, n_elements, residual)


@dataclass(frozen=True)
class ConvergenceCertificate:
    trunc: ChargeTruncation
    rel_change_w21: float
    rel_change_w31: float
    max_change_abs_n: float

    @property
    def passed(self):
        return self.rel_change_w21 < 1e-6 and self.rel_change_w31 < 1e-6 and self.max_change_abs_n < 1e-4


def check_convergence(params, trunc=ChargeTruncation()):
    """Compare the spectrum at ``trunc`` against a doubled truncation."""
    base = diagonalize(params, trunc)
    fine = diagonalize(params, trunc.doubled())
    rel = np.abs(fine.levels[1:] - base.levels[1:]) / fine.levels[1:]
    dn = np.max(np.abs(np.abs(fine.n_elements) - np.abs(base.n_elements)))
    return ConvergenceCertificate(trunc, float(rel[0]), float(rel[1]), float(dn))


def decay_rates(params, spectrum):
    """Spontaneous emission rates into the line (rad/ns).

    ``Gamma_ij = (2/hbar) (2 e beta')^2 Z omega_ij |n_ij|^2`` with
    ``beta' = beta / (1 + 2 alpha + 2 beta)``.
    """
    prefactor = 2.0 / const.HBAR * (2 * const.ELEMENTARY_CHARGE * params.coupling_ratio) ** 2 * params.impedance

    def rate(i, j):
        omega = spectrum.levels[i - 1] - spectrum.levels[j - 1]
        return float(prefactor * omega * spectrum.abs_n(i, j) ** 2)

    return RealizedRates(gamma_31=rate(3, 1), gamma_21=rate(2, 1), gamma_32=rate(3, 2))


def _drive_charge(params, spectrum):
    n32 = spectrum.abs_n(3, 2)
    if n32 < 1e-12:
        raise ZeroMatrixElementError(f"|n_32| = {n32:.3g} at f={spectrum.flux}: drive channel closed")
    return 2 * const.ELEMENTARY_CHARGE * params.coupling_ratio * n32


def rabi_from_voltage(params, spectrum, v_c):
    """Rabi frequency (rad/ns) produced by a drive amplitude ``v_c`` in volts."""
    return _drive_charge(params, spectrum) * v_c / const.HBAR / const.PER_NS


def voltage_for_rabi(params, spectrum, rabi):
    """Drive amplitude in volts giving Rabi frequency ``rabi`` (rad/ns)."""
    return rabi * const.PER_NS * const.HBAR / _drive_charge(params, spectrum)


@dataclass(frozen=True)
class FluxRecord:
    flux: float
    spectrum: QubitSpectrum = None
    rates: RealizedRates = None
    eff_down: float = float("nan")
    eff_up: float = float("nan")
    error: str = None

    @property
    def failed(self):
        return self.error is not None


def flux_point(params, trunc=ChargeTruncation(), intrinsic_3=0.0, intrinsic_2=0.0):
    """Diagonalise and derive rates and resonant efficiencies at ``params.flux``.

    Efficiencies are NaN where a transition is symmetry-forbidden or the
    optimal drive is infeasible.
    """
    spectrum = diagonalize(params, trunc)
    rates = decay_rates(params, spectrum)
    emitter = rates.emitter_rates(intrinsic_3, intrinsic_2)
    return FluxRecord(
        flux=float(params.flux),
        spectrum=spectrum,
        rates=rates,
        eff_down=_efficiency_or_nan(spectrum, emitter.gamma_31, emitter.loss_3, resonant_efficiency_down(emitter)),
        eff_up=_efficiency_or_nan(spectrum, emitter.gamma_21, emitter.loss_2, resonant_efficiency_up(emitter)),
    )


def _efficiency_or_nan(spectrum, gamma, loss, eff):
    # NaN where the conversion channel is closed by symmetry (|n| vanishes) or
    # the reflection-nulling drive does not exist (loss >= gamma)
    if min(spectrum.abs_n(3, 1), spectrum.abs_n(2, 1), spectrum.abs_n(3, 2)) < CLOSED_CHANNEL or loss >= gamma:
        return float("nan")
    return float(eff)


def sweep_flux(params, f_grid, intrinsic_3=0.0, intrinsic_2=0.0, trunc=ChargeTruncation()):
    """One :class:`FluxRecord` per flux value; failed points carry ``error`` instead of aborting."""
    records = []
    for f in f_grid:
        try:
            records.append(flux_point(params.with_flux(float(f)), trunc, intrinsic_3, intrinsic_2))
        except (ConvergenceError, ValueError) as exc:
            log.warning("flux point f=%s failed: %s", f, exc)
            records.append(FluxRecord(flux=float(f), error=str(exc)))
    return records

"""Single-photon scattering off a driven Delta-type emitter at the end of a waveguide.

Down-conversion: an a-mode photon near ``omega_31`` comes in and leaves either
unshifted (amplitude ``t_a``) or red-shifted by the drive frequency into the
b-mode (amplitude ``t_b``). Up-conversion is the mirror process for a b-mode
photon near ``omega_21``.

Every frequency and rate here is angular (rad/ns). The group velocity is set
to 1, so the waveguide couplings are ``V_ij = sqrt(Gamma_ij)`` and the
excitation amplitudes ``lambda_2``, ``lambda_3`` carry that normalisation.
"""

from dataclasses import dataclass

import numpy as np

from deltaqed.constants import to_angular
from deltaqed.errors import InfeasibleDriveError, SingularSystemError

_SQRT_2PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class EmitterRates:
    """Waveguide decay rates and non-waveguide losses of the emitter.

    Parameters
    ----------
    gamma_31, gamma_21 : float
        Decay rates into the waveguide on the 3->1 and 2->1 transitions.
    loss_2, loss_3 : float
        Loss rates of levels 2 and 3 into everything other than their
        conversion channel (environment, pure dephasing, other line modes).
    """

    gamma_31: float
    gamma_21: float
    loss_2: float = 0.0
    loss_3: float = 0.0

    def __post_init__(self):
        for name in ("gamma_31", "gamma_21", "loss_2", "loss_3"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")
        if self.gamma_31 == 0 or self.gamma_21 == 0:
            raise ValueError("gamma_31 and gamma_21 must be > 0: a zero coupling closes the conversion channel")

    @classmethod
    def from_ghz(cls, gamma_31, gamma_21, loss_2=0.0, loss_3=0.0):
        return cls(to_angular(gamma_31), to_angular(gamma_21), to_angular(loss_2), to_angular(loss_3))

    @property
    def lossless(self):
        return self.loss_2 == 0 and self.loss_3 == 0


@dataclass(frozen=True)
class Transitions:
    omega_31: float
    omega_21: float

    def __post_init__(self):
        if not (self.omega_31 > self.omega_21 > 0):
            raise ValueError(f"need omega_31 > omega_21 > 0, got {self.omega_31!r}, {self.omega_21!r}")

    @classmethod
    def from_ghz(cls, omega_31, omega_21):
        return cls(to_angular(omega_31), to_angular(omega_21))

    @property
    def omega_32(self):
        return self.omega_31 - self.omega_21


@dataclass(frozen=True)
class DriveField:
    """Classical control field on the 3<->2 transition (frequency, real Rabi frequency)."""

    omega: float
    rabi: float

    def __post_init__(self):
        if not np.isfinite(self.rabi) or self.rabi < 0:
            raise ValueError(f"rabi must be >= 0, got {self.rabi!r}")

    @classmethod
    def from_ghz(cls, omega, rabi):
        return cls(to_angular(omega), to_angular(rabi))

    @classmethod
    def from_detuning(cls, transitions, delta, rabi):
        """Drive at frequency ``omega_32 + delta``."""
        return cls(transitions.omega_32 + delta, rabi)


@dataclass(frozen=True)
class ScatteringResult:
    """Transmission amplitudes and excitation amplitudes; arrays when ``nu`` is an array.

    For up-conversion ``t_b`` is the elastic and ``t_a`` the converted amplitude.
    """

    t_a: np.ndarray
    t_b: np.ndarray
    lambda_2: np.ndarray
    lambda_3: np.ndarray

    @property
    def abs2_ta(self):
        return np.abs(self.t_a) ** 2

    @property
    def abs2_tb(self):
        return np.abs(self.t_b) ** 2


def detuning(drive, transitions):
    """Control-field detuning from the 3<->2 transition."""
    return drive.omega - (transitions.omega_31 - transitions.omega_21)


def _half_widths(rates):
    return (rates.gamma_31 + rates.loss_3) / 2, (rates.gamma_21 + rates.loss_2) / 2


def scatter_down(nu, rates, transitions, drive):
    """Scattering amplitudes for an a-mode photon of frequency ``nu``.

    The converted photon leaves at ``nu - drive.omega``.
    """
    nu = np.asarray(nu, dtype=float)
    delta = detuning(drive, transitions)
    w3, w2 = _half_widths(rates)
    x = nu - transitions.omega_31
    level_2 = 1j * (x - delta) - w2
    den = (1j * x - w3) * level_2 + drive.rabi**2 / 4
    v31 = np.sqrt(rates.gamma_31)
    t_a = ((1j * x + rates.gamma_31 / 2 - rates.loss_3 / 2) * level_2 + drive.rabi**2 / 4) / den
    t_b = -0.5j * np.sqrt(rates.gamma_21 * rates.gamma_31) * drive.rabi / den
    lambda_2 = -0.5 * v31 * drive.rabi / den / _SQRT_2PI
    lambda_3 = -1j * v31 * level_2 / den / _SQRT_2PI
    return ScatteringResult(t_a, t_b, lambda_2, lambda_3)


def scatter_up(nu, rates, transitions, drive):
    """Scattering amplitudes for a b-mode photon of frequency ``nu``.

    ``t_b`` is elastic, ``t_a`` is the photon up-converted to ``nu + drive.omega``.
    """
    nu = np.asarray(nu, dtype=float)
    delta = detuning(drive, transitions)
    w3, w2 = _half_widths(rates)
    x = nu - transitions.omega_21
    level_3 = 1j * (x + delta) - w3
    den = level_3 * (1j * x - w2) + drive.rabi**2 / 4
    v21 = np.sqrt(rates.gamma_21)
    t_a = -0.5j * np.sqrt(rates.gamma_21 * rates.gamma_31) * drive.rabi / den
    t_b = (level_3 * (1j * x + rates.gamma_21 / 2 - rates.loss_2 / 2) + drive.rabi**2 / 4) / den
    lambda_2 = -1j * v21 * level_3 / den / _SQRT_2PI
    lambda_3 = -0.5 * v21 * drive.rabi / den / _SQRT_2PI
    return ScatteringResult(t_a, t_b, lambda_2, lambda_3)


def _solve4(matrix, rhs):
    if not np.all(np.isfinite(matrix)):
        raise SingularSystemError("non-finite entries in the stationary system")
    cond = np.linalg.cond(matrix)
    if not np.isfinite(cond) or cond > 1e13:
        raise SingularSystemError(f"stationary 4x4 system is singular (condition number {cond:.3g})")
    return np.linalg.solve(matrix, rhs)


def _stationary_system(nu, rates, transitions, drive, direction):
    # Unknowns (T_a, T_b, Lambda_2, Lambda_3); the field at the emitter is the
    # mean of the two sides of the delta-function jump.
    v31, v21 = np.sqrt(rates.gamma_31), np.sqrt(rates.gamma_21)
    c = 1.0 / _SQRT_2PI
    half_rabi = drive.rabi / 2
    if direction == "down":
        e2 = transitions.omega_21 - (nu - drive.omega) - 0.5j * rates.loss_2
        e3 = transitions.omega_31 - nu - 0.5j * rates.loss_3
        rhs = np.array([-1j * c, 0, 0, v31 * c / 2], dtype=complex)
    else:
        e2 = transitions.omega_21 - nu - 0.5j * rates.loss_2
        e3 = transitions.omega_31 - (nu + drive.omega) - 0.5j * rates.loss_3
        rhs = np.array([0, -1j * c, v21 * c / 2, 0], dtype=complex)
    matrix = np.array(
        [
            [-1j * c, 0, 0, -v31],
            [0, -1j * c, -v21, 0],
            [0, -v21 * c / 2, e2, -half_rabi],
            [-v31 * c / 2, 0, -half_rabi, e3],
        ],
        dtype=complex,
    )
    return matrix, rhs


def _solve_oracle(nu, rates, transitions, drive, direction):
    nu_arr = np.atleast_1d(np.asarray(nu, dtype=float))
    out = np.empty((4, nu_arr.size), dtype=complex)
    for k, value in enumerate(nu_arr):
        out[:, k] = _solve4(*_stationary_system(value, rates, transitions, drive, direction))
    if np.ndim(nu) == 0:
        out = out[:, 0]
    return ScatteringResult(*out)


def solve_oracle_down(nu, rates, transitions, drive):
    """Solve the stationary down-conversion equations as a 4x4 linear system.

    Independent of the closed forms in :func:`scatter_down`; used to check them.

    Raises
    ------
    SingularSystemError
        If the system matrix is numerically singular.
    """
    return _solve_oracle(nu, rates, transitions, drive, "down")


def solve_oracle_up(nu, rates, transitions, drive):
    """Up-conversion counterpart of :func:`solve_oracle_down`."""
    return _solve_oracle(nu, rates, transitions, drive, "up")


def optimal_drive_down(rates):
    """Resonant drive and Rabi frequency that null elastic scattering at ``omega_31``.

    Returns ``(delta, rabi)`` with ``delta = 0``.
    """
    radicand = (rates.gamma_31 - rates.loss_3) * (rates.gamma_21 + rates.loss_2)
    if rates.gamma_31 <= rates.loss_3 or radicand <= 0:
        raise InfeasibleDriveError(
            f"down-conversion needs gamma_31 > loss_3 (got {rates.gamma_31!r} <= {rates.loss_3!r})"
        )
    return 0.0, float(np.sqrt(radicand))


def optimal_drive_up(rates):
    radicand = (rates.gamma_31 + rates.loss_3) * (rates.gamma_21 - rates.loss_2)
    if rates.gamma_21 <= rates.loss_2 or radicand <= 0:
        raise InfeasibleDriveError(
            f"up-conversion needs gamma_21 > loss_2 (got {rates.gamma_21!r} <= {rates.loss_2!r})"
        )
    return 0.0, float(np.sqrt(radicand))


def optimal_drive(rates, transitions, direction="down"):
    """Build the optimal :class:`DriveField` for the given direction."""
    delta, rabi = optimal_drive_down(rates) if direction == "down" else optimal_drive_up(rates)
    return DriveField.from_detuning(transitions, delta, rabi)


def resonant_efficiency_down(rates):
    """Converted probability for a resonant monochromatic photon under optimal drive."""
    return (1 - rates.loss_3 / rates.gamma_31) / (1 + rates.loss_2 / rates.gamma_21)


def resonant_efficiency_up(rates):
    return (1 - rates.loss_2 / rates.gamma_21) / (1 + rates.loss_3 / rates.gamma_31)


def lossless_spectra(nu, gamma_total, eta, omega_31=0.0):
    """Elastic and converted probabilities for a lossless emitter under optimal drive.

    Parametrised by the total decay rate ``gamma_total = Gamma_21 + Gamma_31``
    and the ratio ``eta = Gamma_21 / Gamma_31``.

    Returns
    -------
    (p_a, p_b) : tuple of ndarray
    """
    if gamma_total <= 0 or eta <= 0:
        raise ValueError("gamma_total and eta must be positive")
    x = (np.asarray(nu, dtype=float) - omega_31) / gamma_total
    x2 = x * x
    common = (eta**2 - 1) ** 2 * x2 + 4 * (eta + 1) ** 4 * x2 * x2
    den = eta**2 + common
    return common / den, eta**2 / den


def rates_from_eta(gamma_total, eta, loss_2=0.0, loss_3=0.0):
    """Split a total rate into ``(Gamma_31, Gamma_21)`` with ratio ``eta``."""
    return EmitterRates(gamma_total / (1 + eta), eta * gamma_total / (1 + eta), loss_2, loss_3)

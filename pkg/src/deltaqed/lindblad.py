"""Steady state of the driven three-level emitter under a classical probe.

This is the semiclassical route to the transmission coefficients. It is valid
at any probe strength, so it also covers saturation, and in the weak-probe
limit it agrees with the single-photon closed forms.

Relaxation acts as population transfer: ``Gamma_31`` and ``Gamma_21`` feed
level 1 and ``Gamma_32`` feeds level 2. Each coherence ``rho_ij`` decays at
``gamma_ij``. Density matrices are indexed ``rho[i-1, j-1] = <i|rho|j>``. The
Liouvillian acts on the row-major flattening of ``rho``.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from deltaqed.errors import ConvergenceError, SingularSystemError


@dataclass(frozen=True)
class ProbeDrive:
    """Probe (1<->3) and control (2<->3) fields in the rotating frame.

    ``omega_p`` and ``omega`` are Rabi frequencies. ``delta_p`` is the probe
    detuning from ``omega_31`` and ``delta`` is the control detuning from
    ``omega_32``. All four are angular.
    """

    omega_p: float
    delta_p: float
    delta: float
    omega: float

    def __post_init__(self):
        if self.omega_p < 0 or self.omega < 0:
            raise ValueError("Rabi frequencies must be >= 0")


@dataclass(frozen=True)
class LindbladRates:
    gamma_31: float
    gamma_32: float
    gamma_21: float
    dephasing_12: float = 0.0
    dephasing_13: float = 0.0
    dephasing_23: float = 0.0

    def __post_init__(self):
        for name, value in vars(self).items():
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")

    @classmethod
    def from_emitter(cls, rates, gamma_32):
        """Map scattering-picture losses onto pure dephasing.

        The scattering loss ``loss_3`` already contains emission on the 3->2
        line, which is modelled explicitly here, so
        ``dephasing_13 = loss_3 - gamma_32``, ``dephasing_12 = loss_2`` and
        ``dephasing_23`` is their sum.
        """
        extra_3 = rates.loss_3 - gamma_32
        if extra_3 < -1e-12 * max(rates.loss_3, gamma_32, 1.0):
            raise ValueError(f"loss_3 = {rates.loss_3!r} is smaller than gamma_32 = {gamma_32!r}")
        extra_3 = max(extra_3, 0.0)
        return cls(rates.gamma_31, gamma_32, rates.gamma_21, rates.loss_2, extra_3, rates.loss_2 + extra_3)

    @property
    def damping_12(self):
        return self.gamma_21 / 2 + self.dephasing_12 / 2

    @property
    def damping_13(self):
        return (self.gamma_32 + self.gamma_31) / 2 + self.dephasing_13 / 2

    @property
    def damping_23(self):
        return (self.gamma_32 + self.gamma_31 + self.gamma_21) / 2 + self.dephasing_23 / 2


@dataclass(frozen=True)
class DensityMatrix3:
    """Validated 3x3 density matrix; ``residual`` is ``||L[rho]||`` when known."""

    rho: np.ndarray
    residual: float = 0.0

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got shape {rho.shape}")
        herm = np.max(np.abs(rho - rho.conj().T))
        if herm > 1e-12:
            raise ValueError(f"density matrix not Hermitian (deviation {herm:.3g})")
        trace = np.trace(rho)
        if abs(trace - 1) > 1e-12:
            raise ValueError(f"density matrix trace is {trace!r}")
        lowest = np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2))
        if lowest < -1e-10:
            raise ValueError(f"density matrix has negative eigenvalue {lowest:.3g}")
        object.__setattr__(self, "rho", rho)

    def __getitem__(self, ij):
        """1-based element access: ``dm[3, 1]`` is ``<3|rho|1>``."""
        i, j = ij
        return self.rho[i - 1, j - 1]

    @property
    def populations(self):
        return np.real(np.diag(self.rho))


def interaction_hamiltonian(drive):
    """Rotating-frame Hamiltonian divided by hbar (rad/ns)."""
    ham = np.zeros((3, 3), dtype=complex)
    ham[2, 2] = -drive.delta_p
    ham[1, 1] = -(drive.delta_p - drive.delta)
    ham[2, 0] = ham[0, 2] = -drive.omega_p / 2
    ham[2, 1] = ham[1, 2] = -drive.omega / 2
    return ham


def lindblad_action(drive, rates, rho):
    """``d rho / dt`` for the given state."""
    ham = interaction_hamiltonian(drive)
    out = -1j * (ham @ rho - rho @ ham)
    out[0, 0] += rates.gamma_31 * rho[2, 2] + rates.gamma_21 * rho[1, 1]
    out[1, 1] += rates.gamma_32 * rho[2, 2] - rates.gamma_21 * rho[1, 1]
    out[2, 2] -= (rates.gamma_31 + rates.gamma_32) * rho[2, 2]
    out -= _damping_matrix(rates) * rho
    return out


def _damping_matrix(rates):
    g12, g13, g23 = rates.damping_12, rates.damping_13, rates.damping_23
    return np.array([[0, g12, g13], [g12, 0, g23], [g13, g23, 0]], dtype=float)


def liouvillian(drive, rates):
    """9x9 superoperator acting on ``rho.ravel()``."""
    ham = interaction_hamiltonian(drive)
    eye = np.eye(3)
    # vec(A rho B) = (A kron B^T) vec(rho) for row-major vec
    sup = -1j * (np.kron(ham, eye) - np.kron(eye, ham.T))
    sup -= np.diag(_damping_matrix(rates).ravel())
    pop = np.zeros((9, 9))
    k11, k22, k33 = 0, 4, 8
    pop[k11, k33] += rates.gamma_31
    pop[k11, k22] += rates.gamma_21
    pop[k22, k33] += rates.gamma_32
    pop[k22, k22] -= rates.gamma_21
    pop[k33, k33] -= rates.gamma_31 + rates.gamma_32
    return sup + pop


def steady_state(drive, rates, residual_tol=1e-10):
    """Solve ``L[rho] = 0`` with unit trace by direct linear solve.

    The first Liouvillian row (the ``rho_11`` equation, redundant by trace
    conservation) is replaced by the trace condition.

    Raises
    ------
    SingularSystemError
        If the steady state is not unique (e.g. no relaxation at all).
    """
    if rates.gamma_31 + rates.gamma_32 + rates.gamma_21 <= 0:
        raise SingularSystemError("no relaxation: steady state is not unique")
    full = liouvillian(drive, rates)
    system = full.copy()
    system[0, :] = 0
    system[0, [0, 4, 8]] = 1
    rhs = np.zeros(9, dtype=complex)
    rhs[0] = 1
    cond = np.linalg.cond(system)
    if not np.isfinite(cond) or cond > 1e13:
        raise SingularSystemError(f"Liouvillian is singular (condition number {cond:.3g})")
    vec = np.linalg.solve(system, rhs)
    rho = vec.reshape(3, 3)
    rho = (rho + rho.conj().T) / 2
    rho = rho / np.trace(rho).real
    residual = float(np.linalg.norm(full @ rho.ravel()))
    scale = max(rates.gamma_31, rates.gamma_21, rates.gamma_32, drive.omega, drive.omega_p)
    if residual > residual_tol * max(scale, 1.0):
        raise ConvergenceError(f"steady-state residual {residual:.3g} too large")
    return DensityMatrix3(rho, residual)


def evolve_to_steady_state(drive, rates, rho0=None, step=None, max_time=None, rtol=1e-12):
    """Time-step ``rho`` with the exact propagator until it stops changing.

    Debug path only. Converged when the relative change over one
    characteristic time ``1/Gamma_31`` drops below ``rtol``.
    """
    tau = 1.0 / rates.gamma_31
    step = tau if step is None else step
    max_time = 1e5 * tau if max_time is None else max_time
    n_sub = max(1, int(round(tau / step)))
    prop = scipy.linalg.expm(liouvillian(drive, rates) * step)
    vec = np.zeros(9, dtype=complex) if rho0 is None else np.asarray(rho0, dtype=complex).ravel().copy()
    if rho0 is None:
        vec[0] = 1
    t = 0.0
    while t < max_time:
        prev = vec
        for _ in range(n_sub):
            vec = prop @ vec
        t += n_sub * step
        if np.linalg.norm(vec - prev) <= rtol * np.linalg.norm(vec):
            rho = vec.reshape(3, 3)
            return DensityMatrix3((rho + rho.conj().T) / 2 / np.trace(rho).real)
    raise ConvergenceError(f"no steady state after t = {t:.3g} (1/Gamma_31 = {tau:.3g})")


def transmission(drive, rates, rho):
    """Photon-number transmission amplitudes ``(t_a, t_b)`` from the steady coherences."""
    if not drive.omega_p > 0:
        raise ValueError("transmission needs a nonzero probe (omega_p > 0)")
    r = rho.rho if isinstance(rho, DensityMatrix3) else np.asarray(rho)
    t_a = 1 + 2j * rates.gamma_31 * r[2, 0] / drive.omega_p
    t_b = 2j * np.sqrt(rates.gamma_31 * rates.gamma_21) * r[1, 0] / drive.omega_p
    return complex(t_a), complex(t_b)


def weak_field_coherences(drive, rates):
    """First-order-in-probe coherences ``(rho_21, rho_31)``."""
    if not drive.omega_p > 0:
        raise ValueError("weak-field coherences need omega_p > 0")
    level_2 = 1j * (drive.delta_p - drive.delta) - rates.damping_12
    den = level_2 * (1j * drive.delta_p - rates.damping_13) + drive.omega**2 / 4
    rho21 = -0.25 * drive.omega_p * drive.omega / den
    rho31 = -0.5j * drive.omega_p * level_2 / den
    return complex(rho21), complex(rho31)


def saturation_sweep(rates, omega, omega_p_grid, delta_p=0.0, delta=0.0):
    """``(omega_p, |t_a|^2, |t_b|^2)`` rows at fixed detunings, one steady state per probe strength."""
    rows = []
    for omega_p in omega_p_grid:
        drive = ProbeDrive(float(omega_p), delta_p, delta, omega)
        t_a, t_b = transmission(drive, rates, steady_state(drive, rates))
        rows.append((float(omega_p), abs(t_a) ** 2, abs(t_b) ** 2))
    return rows


def photon_number(omega_p, gamma_31):
    """Mean probe photons per interaction time ``2 pi / Gamma_31``."""
    if not gamma_31 > 0:
        raise ValueError("gamma_31 must be > 0")
    return np.pi * omega_p**2 / (2 * gamma_31**2)


def control_photon_number(omega, gamma_32):
    """Control-field photons per ``2 pi / Gamma_32``; classical treatment needs this >> 1."""
    return photon_number(omega, gamma_32)

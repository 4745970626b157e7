"""Finite-bandwidth single-photon pulses through the converter.

A pulse is a spectral amplitude sampled on a uniform grid of angular
frequencies; integrals use trapezoidal weights on that grid. The Gaussian
width ``d`` is an ordinary frequency (GHz) at the I/O boundary, like every
other rate.
"""

import csv
import logging
from dataclasses import dataclass, field

import numpy as np

from deltaqed.constants import to_angular, to_ghz
from deltaqed.scattering import scatter_down, scatter_up

log = logging.getLogger(__name__)

DEFAULT_SPAN = 12.0
DEFAULT_POINTS = 4096
RENORM_WARN = 1e-3


def trapezoid_weights(grid):
    grid = np.asarray(grid, dtype=float)
    h = np.diff(grid)
    w = np.zeros_like(grid)
    w[:-1] += h / 2
    w[1:] += h / 2
    return w


@dataclass(frozen=True)
class SpectralPulse:
    """Normalised single-photon spectral amplitude on a strictly increasing grid.

    ``grid``, ``center`` and ``width`` are angular (rad/ns); ``amplitude`` is
    normalised so that ``sum(weights * |amplitude|**2) == 1``.
    """

    grid: np.ndarray
    amplitude: np.ndarray
    center: float
    width: float
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        amp = np.asarray(self.amplitude, dtype=complex)
        if grid.ndim != 1 or grid.size < 2 or grid.shape != amp.shape:
            raise ValueError("grid and amplitude must be 1-d arrays of equal length >= 2")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("pulse grid must be strictly increasing")
        weights = trapezoid_weights(grid)
        norm = float(np.sum(weights * np.abs(amp) ** 2))
        if abs(norm - 1) > 1e-9:
            raise ValueError(f"pulse is not normalised (norm = {norm!r}); use normalized()")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "amplitude", amp)
        object.__setattr__(self, "weights", weights)

    @property
    def density(self):
        return np.abs(self.amplitude) ** 2

    @classmethod
    def normalized(cls, grid, amplitude, center=None, width=None):
        """Build a pulse, rescaling ``amplitude`` to unit norm.

        Logs a warning when the correction exceeds 1e-3.
        """
        grid = np.asarray(grid, dtype=float)
        amplitude = np.asarray(amplitude, dtype=complex)
        if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
            raise ValueError("pulse grid must be strictly increasing with at least 2 points")
        norm = float(np.sum(trapezoid_weights(grid) * np.abs(amplitude) ** 2))
        if not norm > 0:
            raise ValueError("pulse amplitude is identically zero")
        if abs(norm - 1) > RENORM_WARN:
            log.warning("pulse renormalised: norm was %.6g", norm)
        amplitude = amplitude / np.sqrt(norm)
        density = np.abs(amplitude) ** 2
        if center is None:
            center = float(np.sum(trapezoid_weights(grid) * density * grid))
        if width is None:
            var = float(np.sum(trapezoid_weights(grid) * density * (grid - center) ** 2))
            width = 2 * np.sqrt(var)
        return cls(grid, amplitude, float(center), float(width))


@dataclass(frozen=True)
class ScatteredPulse:
    """Output of a pulse scattering; densities are per rad/ns on their grids.

    ``elastic`` lives on the input grid, ``inelastic`` on ``converted_grid``
    (input grid shifted by minus/plus the drive frequency).
    """

    direction: str
    input: SpectralPulse
    elastic: np.ndarray
    inelastic: np.ndarray
    converted_grid: np.ndarray
    efficiency: float
    elastic_total: float

    @property
    def total(self):
        return self.efficiency + self.elastic_total


def gaussian_pulse(center, width, span=DEFAULT_SPAN, points=DEFAULT_POINTS):
    """Gaussian spectral amplitude ``(2/(pi d^2))**0.25 * exp(-(nu-center)**2 / d**2)``.

    Parameters
    ----------
    center, width : float
        Angular centre frequency and width ``d`` (rad/ns).
    span : float
        Full grid span in units of ``width``; the grid covers ``center +- span*d/2``.
    points : int
        Number of uniform grid points.
    """
    if not width > 0 or not np.isfinite(width):
        raise ValueError(f"pulse width must be > 0, got {width!r}")
    if not span >= 8:
        raise ValueError(f"grid span must be >= 8 widths, got {span!r}")
    if int(points) < 64:
        raise ValueError(f"need at least 64 grid points, got {points!r}")
    grid = center + np.linspace(-span / 2, span / 2, int(points)) * width
    amp = (2 / (np.pi * width**2)) ** 0.25 * np.exp(-((grid - center) ** 2) / width**2)
    return SpectralPulse.normalized(grid, amp, center=center, width=width)


def _convert(pulse, result, direction, drive):
    if direction == "down":
        elastic_amp, converted_amp = result.t_a, result.t_b
        shift = -drive.omega
    else:
        elastic_amp, converted_amp = result.t_b, result.t_a
        shift = drive.omega
    elastic = np.abs(elastic_amp * pulse.amplitude) ** 2
    inelastic = np.abs(converted_amp * pulse.amplitude) ** 2
    return ScatteredPulse(
        direction=direction,
        input=pulse,
        elastic=elastic,
        inelastic=inelastic,
        converted_grid=pulse.grid + shift,
        efficiency=float(np.sum(pulse.weights * inelastic)),
        elastic_total=float(np.sum(pulse.weights * elastic)),
    )


def convert_down(pulse, rates, transitions, drive):
    """Scatter an a-mode pulse; ``efficiency`` is the down-converted probability."""
    return _convert(pulse, scatter_down(pulse.grid, rates, transitions, drive), "down", drive)


def convert_up(pulse, rates, transitions, drive):
    """Scatter a b-mode pulse; ``efficiency`` is the up-converted probability."""
    return _convert(pulse, scatter_up(pulse.grid, rates, transitions, drive), "up", drive)


def efficiency_vs_width(rates, transitions, drive, widths, direction="down", center=None,
                        span=DEFAULT_SPAN, points=DEFAULT_POINTS):
    """Conversion efficiency of Gaussian pulses for each width (angular units).

    The pulse is centred on the resonant transition unless ``center`` is given.
    Returns a list of ``(width, efficiency)`` pairs in input order.
    """
    if center is None:
        center = transitions.omega_31 if direction == "down" else transitions.omega_21
    convert = convert_down if direction == "down" else convert_up
    table = []
    for width in widths:
        if not width > 0:
            raise ValueError(f"widths must be positive, got {width!r}")
        out = convert(gaussian_pulse(center, width, span, points), rates, transitions, drive)
        table.append((float(width), out.efficiency))
    return table


def read_pulse_table(path):
    """Load a pulse from CSV with header ``nu_ghz, re_psi, im_psi``.

    The amplitude is renormalised in angular measure on load.
    """
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(line for line in fh if not line.startswith("#"))]
    if not rows:
        raise ValueError(f"{path}: empty pulse table")
    header = [h.strip() for h in rows[0]]
    if header != ["nu_ghz", "re_psi", "im_psi"]:
        raise ValueError(f"{path}: expected header 'nu_ghz, re_psi, im_psi', got {rows[0]!r}")
    data = np.array([[float(v) for v in row] for row in rows[1:] if row], dtype=float)
    if data.ndim != 2 or data.shape[0] < 2:
        raise ValueError(f"{path}: need at least two data rows")
    return SpectralPulse.normalized(to_angular(data[:, 0]), data[:, 1] + 1j * data[:, 2])


def write_pulse_table(pulse, path):
    """Write a pulse as ``nu_ghz, re_psi, im_psi`` (amplitude per sqrt(GHz))."""
    amp = pulse.amplitude * np.sqrt(to_angular(1.0))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["nu_ghz", "re_psi", "im_psi"])
        for nu, a in zip(to_ghz(pulse.grid), amp):
            writer.writerow([repr(float(nu)), repr(float(a.real)), repr(float(a.imag))])

"""TOML run configuration.

Sections: ``[emitter] [drive] [circuit] [pulse] [sweep] [loss] [output]``.
Frequencies are ordinary GHz, voltages volts, impedance ohms. Unknown
sections or keys are rejected by name.

When ``[emitter]`` gives no rates (``source = "circuit"``, the default) the
emitter is realised from ``[circuit]`` at its flux bias, with the intrinsic
loss ratios of ``[loss]``.
"""

import dataclasses
from dataclasses import dataclass, field, fields

import tomli

from deltaqed import circuit, scattering
from deltaqed.constants import to_angular
from deltaqed.errors import ConfigError


@dataclass
class EmitterSection:
    source: str = "circuit"
    w31: float = None
    w21: float = None
    g31: float = None
    g21: float = None
    g32: float = 0.0
    loss2: float = 0.0
    loss3: float = 0.0
    gamma_total: float = None
    eta: float = None


@dataclass
class DriveSection:
    mode: str = "optimal"
    detuning: float = 0.0
    rabi: float = None
    probe_over_g31: float = 0.01
    probe_detuning: float = 0.0


@dataclass
class CircuitSection:
    alpha: float = 0.7
    beta: float = 0.5
    ej_over_h: float = 150.0
    ej_over_ec: float = 80.0
    impedance: float = 50.0
    flux: float = 0.4845
    n_p_max: int = 16
    n_m_max: int = 16


@dataclass
class LossSection:
    intrinsic_3: float = 0.001
    intrinsic_2: float = 0.001


@dataclass
class PulseSection:
    width: float = 0.005
    span: float = 12.0
    points: int = 4096
    center: float = None
    file: str = None


@dataclass
class SweepSection:
    kind: str = None
    direction: str = "down"
    start: float = None
    stop: float = None
    points: int = None
    threshold: float = 0.9


@dataclass
class OutputSection:
    path: str = None
    format: str = "csv"
    plot: str = None


@dataclass
class Config:
    emitter: EmitterSection = field(default_factory=EmitterSection)
    drive: DriveSection = field(default_factory=DriveSection)
    circuit: CircuitSection = field(default_factory=CircuitSection)
    loss: LossSection = field(default_factory=LossSection)
    pulse: PulseSection = field(default_factory=PulseSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    output: OutputSection = field(default_factory=OutputSection)

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data):
        sections = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for name, body in data.items():
            if name not in sections:
                raise ConfigError(f"unknown config section [{name}]")
            if not isinstance(body, dict):
                raise ConfigError(f"[{name}] must be a table")
            section_cls = sections[name]
            known = {f.name: f for f in fields(section_cls)}
            values = {}
            for key, value in body.items():
                if key not in known:
                    raise ConfigError(f"unknown key '{key}' in [{name}]")
                values[key] = _coerce(name, key, value, known[key].type)
            kwargs[name] = section_cls(**values)
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    def validate(self):
        if self.emitter.source not in ("circuit", "direct"):
            raise ConfigError(f"[emitter] source must be 'circuit' or 'direct', got {self.emitter.source!r}")
        if self.drive.mode not in ("optimal", "manual"):
            raise ConfigError(f"[drive] mode must be 'optimal' or 'manual', got {self.drive.mode!r}")
        if self.drive.mode == "manual" and self.drive.rabi is None:
            raise ConfigError("[drive] mode = 'manual' needs 'rabi'")
        if self.sweep.direction not in ("down", "up"):
            raise ConfigError(f"[sweep] direction must be 'down' or 'up', got {self.sweep.direction!r}")
        if self.output.format not in ("csv", "json"):
            raise ConfigError(f"[output] format must be 'csv' or 'json', got {self.output.format!r}")
        if self.emitter.source == "direct":
            e = self.emitter
            if e.w31 is None or e.w21 is None:
                raise ConfigError("[emitter] source = 'direct' needs w31 and w21")
            has_rates = e.g31 is not None and e.g21 is not None
            has_eta = e.gamma_total is not None and e.eta is not None
            if has_rates == has_eta:
                raise ConfigError("[emitter] give either g31 and g21, or gamma_total and eta")
        return self


def _coerce(section, key, value, kind):
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"[{section}] {key} must be a string, got {value!r}")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"[{section}] {key} must be a number, got {value!r}")
    if kind is int:
        if float(value) != int(value):
            raise ConfigError(f"[{section}] {key} must be an integer, got {value!r}")
        return int(value)
    return float(value)


def load_config(path=None):
    """Read a TOML config; ``None`` gives the default flux-qubit realisation."""
    if path is None:
        return Config().validate()
    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return Config.from_dict(data)


@dataclass(frozen=True)
class Scenario:
    """Everything the compute modules need, in internal (angular) units."""

    rates: scattering.EmitterRates
    transitions: scattering.Transitions
    drive: scattering.DriveField
    gamma_32: float
    circuit_params: circuit.CircuitParams = None
    truncation: circuit.ChargeTruncation = None
    spectrum: circuit.QubitSpectrum = None


def circuit_params(cfg):
    c = cfg.circuit
    try:
        return circuit.CircuitParams(c.alpha, c.beta, c.ej_over_h, c.ej_over_ec, c.impedance, c.flux)
    except ValueError as exc:
        raise ConfigError(f"[circuit] {exc}") from exc


def truncation(cfg):
    try:
        return circuit.ChargeTruncation(cfg.circuit.n_p_max, cfg.circuit.n_m_max)
    except ValueError as exc:
        raise ConfigError(f"[circuit] {exc}") from exc


def resolve(cfg, direction=None):
    """Build a :class:`Scenario` from a config.

    Raises :class:`ConfigError` for inconsistent input; compute failures
    (diagonalisation, infeasible optimal drive) propagate as themselves.
    """
    direction = direction or cfg.sweep.direction
    e = cfg.emitter
    params = trunc = spectrum = None
    try:
        if e.source == "circuit":
            params, trunc = circuit_params(cfg), truncation(cfg)
            spectrum = circuit.diagonalize(params, trunc)
            realized = circuit.decay_rates(params, spectrum)
            rates = realized.emitter_rates(cfg.loss.intrinsic_3, cfg.loss.intrinsic_2)
            transitions = spectrum.transitions()
            gamma_32 = realized.gamma_32
        else:
            transitions = scattering.Transitions.from_ghz(e.w31, e.w21)
            if e.g31 is not None:
                rates = scattering.EmitterRates.from_ghz(e.g31, e.g21, e.loss2, e.loss3)
            else:
                rates = scattering.rates_from_eta(to_angular(e.gamma_total), e.eta, to_angular(e.loss2), to_angular(e.loss3))
            gamma_32 = to_angular(e.g32)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.drive.mode == "optimal":
        drive = scattering.optimal_drive(rates, transitions, direction)
        if cfg.drive.detuning:
            drive = scattering.DriveField(drive.omega + to_angular(cfg.drive.detuning), drive.rabi)
    else:
        try:
            drive = scattering.DriveField.from_detuning(
                transitions, to_angular(cfg.drive.detuning), to_angular(cfg.drive.rabi)
            )
        except ValueError as exc:
            raise ConfigError(f"[drive] {exc}") from exc
    return Scenario(rates, transitions, drive, gamma_32, params, trunc, spectrum)

"""Parameter sweeps, optimal flux-bias search and result records.

A sweep evaluates one kind of quantity on a 1-d grid with everything else
fixed by a :class:`~deltaqed.config.Config`. Points run on a bounded thread
pool (``DELTAQED_THREADS``). Results are collected in grid order, so a record
is bit-for-bit reproducible from its ``inputs`` block.
"""

import csv
import io
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from deltaqed import __version__, circuit, lindblad, plotting, pulse, scattering
from deltaqed.config import Config, circuit_params, resolve, truncation
from deltaqed.constants import CONSTANTS_VERSION, UNIT_CONVENTION, to_angular, to_ghz
from deltaqed.errors import ConfigError, DeltaQEDError

log = logging.getLogger(__name__)

KINDS = ("spectrum", "pulse-width", "flux", "saturation", "steady")

COLUMNS = {
    "spectrum": ["nu_ghz", "re_ta", "im_ta", "abs2_ta", "abs2_tb", "sum"],
    "pulse-width": ["width_ghz", "efficiency", "elastic"],
    "flux": [
        "f", "w21_ghz", "w31_ghz", "w32_ghz", "abs_n21", "abs_n31", "abs_n32",
        "g21_ghz", "g31_ghz", "g32_ghz", "eff_down", "eff_up",
    ],
    "saturation": ["omega_p_over_g31", "abs2_ta", "abs2_tb", "sum"],
    "steady": ["delta_p_ghz", "abs2_ta", "abs2_tb", "sum", "abs2_ta_weak", "abs2_tb_weak"],
    "pulse": ["nu_ghz", "nu_out_ghz", "input_density", "elastic_density", "inelastic_density"],
}

MAX_FAILURE_FRACTION = 0.1


def worker_count():
    raw = os.environ.get("DELTAQED_THREADS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"DELTAQED_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("DELTAQED_THREADS must be >= 1")
    return n


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if int(self.points) < 2:
            raise ConfigError(f"grid needs at least 2 points, got {self.points}")
        if not self.start < self.stop:
            raise ConfigError(f"grid start must be < stop, got {self.start} >= {self.stop}")

    @classmethod
    def parse(cls, text):
        """Parse ``START:STOP:POINTS``."""
        try:
            start, stop, points = text.split(":")
            return cls(float(start), float(stop), int(points))
        except ValueError:
            raise ConfigError(f"grid must look like START:STOP:POINTS, got {text!r}") from None

    def values(self):
        return np.linspace(self.start, self.stop, int(self.points))

    def __str__(self):
        return f"{self.start!r}:{self.stop!r}:{self.points}"


@dataclass
class SweepSpec:
    kind: str
    grid: Grid
    config: Config = field(default_factory=Config)
    direction: str = "down"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown sweep kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.direction not in ("down", "up"):
            raise ConfigError(f"direction must be 'down' or 'up', got {self.direction!r}")

    def to_dict(self):
        return {
            "kind": self.kind,
            "grid": {"start": self.grid.start, "stop": self.grid.stop, "points": int(self.grid.points)},
            "direction": self.direction,
            "config": self.config.to_dict(),
        }

    @classmethod
    def from_dict(cls, data):
        cfg_data = {name: {k: v for k, v in body.items() if v is not None} for name, body in data["config"].items()}
        return cls(data["kind"], Grid(**data["grid"]), Config.from_dict(cfg_data), data["direction"])


@dataclass
class RunRecord:
    kind: str
    inputs: dict
    columns: list
    rows: list
    provenance: dict
    failures: list = field(default_factory=list)

    @property
    def points(self):
        return len(self.rows) + len(self.failures)

    @property
    def failure_fraction(self):
        return len(self.failures) / self.points if self.points else 0.0

    @property
    def too_many_failures(self):
        return self.failure_fraction > MAX_FAILURE_FRACTION

    def column(self, name):
        k = self.columns.index(name)
        return np.array([row[k] for row in self.rows], dtype=float)

    def to_dict(self):
        return {
            "kind": self.kind,
            "provenance": self.provenance,
            "inputs": self.inputs,
            "columns": list(self.columns),
            "rows": [list(row) for row in self.rows],
            "failures": self.failures,
        }

    def to_csv(self):
        buf = io.StringIO()
        for key in sorted(self.provenance):
            buf.write(f"# {key}: {self.provenance[key]}\n")
        for fail in self.failures:
            buf.write(f"# failed: x={fail['x']!r} {fail['error']}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def write(self, path, fmt="csv"):
        text = self.to_csv() if fmt == "csv" else self.to_json()
        with open(path, "w", newline="") as fh:
            fh.write(text)
        return path


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _provenance(kind, cfg, scenario=None, direction="down", grid=None, extra=None):
    prov = {
        "package": f"deltaqed {__version__}",
        "constants": CONSTANTS_VERSION,
        "units": UNIT_CONVENTION,
        "kind": kind,
        "direction": direction,
        "pulse_width": "ordinary frequency d in GHz; |psi|^2 ~ exp(-2 (nu-nu0)^2 / d^2)",
        "quadrature": f"trapezoid, uniform grid, span={cfg.pulse.span!r} d, points={cfg.pulse.points}",
        "emitter_source": cfg.emitter.source,
    }
    if cfg.emitter.source == "circuit":
        prov["truncation"] = f"n_p_max={cfg.circuit.n_p_max}, n_m_max={cfg.circuit.n_m_max}, even n_p+n_m sublattice"
    if grid is not None:
        prov["grid"] = str(grid)
    if scenario is not None:
        r, t, d = scenario.rates, scenario.transitions, scenario.drive
        prov["transitions_ghz"] = f"w31={float(to_ghz(t.omega_31))!r}, w21={float(to_ghz(t.omega_21))!r}"
        prov["rates_ghz"] = (
            f"g31={float(to_ghz(r.gamma_31))!r}, g21={float(to_ghz(r.gamma_21))!r}, g32={float(to_ghz(scenario.gamma_32))!r}, "
            f"loss2={float(to_ghz(r.loss_2))!r}, loss3={float(to_ghz(r.loss_3))!r}"
        )
        prov["drive_ghz"] = (
            f"omega={float(to_ghz(d.omega))!r}, rabi={float(to_ghz(d.rabi))!r}, "
            f"detuning={float(to_ghz(scattering.detuning(d, t)))!r}, mode={cfg.drive.mode}"
        )
    if extra:
        prov.update(extra)
    return prov


def _lindblad_rates(scenario):
    return lindblad.LindbladRates.from_emitter(scenario.rates, scenario.gamma_32)


def _point_function(spec, scenario):
    cfg = spec.config
    kind, direction = spec.kind, spec.direction
    if kind == "spectrum":
        scatter = scattering.scatter_down if direction == "down" else scattering.scatter_up

        def point(x):
            res = scatter(to_angular(x), scenario.rates, scenario.transitions, scenario.drive)
            ta, tb = complex(res.t_a), complex(res.t_b)
            return (x, ta.real, ta.imag, abs(ta) ** 2, abs(tb) ** 2, abs(ta) ** 2 + abs(tb) ** 2)

    elif kind == "pulse-width":
        convert = pulse.convert_down if direction == "down" else pulse.convert_up
        center = _pulse_center(cfg, scenario, direction)

        def point(x):
            p = pulse.gaussian_pulse(center, to_angular(x), cfg.pulse.span, cfg.pulse.points)
            out = convert(p, scenario.rates, scenario.transitions, scenario.drive)
            return (x, out.efficiency, out.elastic_total)

    elif kind == "flux":
        params, trunc = circuit_params(cfg), truncation(cfg)

        def point(x):
            rec = circuit.flux_point(params.with_flux(x), trunc, cfg.loss.intrinsic_3, cfg.loss.intrinsic_2)
            s, g = rec.spectrum, rec.rates
            return (
                x, to_ghz(s.omega_21), to_ghz(s.omega_31), to_ghz(s.omega_32),
                s.abs_n(2, 1), s.abs_n(3, 1), s.abs_n(3, 2),
                to_ghz(g.gamma_21), to_ghz(g.gamma_31), to_ghz(g.gamma_32), rec.eff_down, rec.eff_up,
            )

    elif kind == "saturation":
        lrates = _lindblad_rates(scenario)
        delta = scattering.detuning(scenario.drive, scenario.transitions)
        delta_p = to_angular(cfg.drive.probe_detuning)

        def point(x):
            drive = lindblad.ProbeDrive(x * lrates.gamma_31, delta_p, delta, scenario.drive.rabi)
            rho = lindblad.steady_state(drive, lrates)
            ta, tb = lindblad.transmission(drive, lrates, rho)
            return (x, abs(ta) ** 2, abs(tb) ** 2, abs(ta) ** 2 + abs(tb) ** 2)

    else:  # steady
        lrates = _lindblad_rates(scenario)
        delta = scattering.detuning(scenario.drive, scenario.transitions)
        omega_p = cfg.drive.probe_over_g31 * lrates.gamma_31

        def point(x):
            dp = to_angular(x)
            drive = lindblad.ProbeDrive(omega_p, dp, delta, scenario.drive.rabi)
            rho = lindblad.steady_state(drive, lrates)
            ta, tb = lindblad.transmission(drive, lrates, rho)
            weak = scattering.scatter_down(scenario.transitions.omega_31 + dp, scenario.rates,
                                           scenario.transitions, scenario.drive)
            return (x, abs(ta) ** 2, abs(tb) ** 2, abs(ta) ** 2 + abs(tb) ** 2,
                    float(weak.abs2_ta), float(weak.abs2_tb))

    return point


def _pulse_center(cfg, scenario, direction):
    if cfg.pulse.center is not None:
        return to_angular(cfg.pulse.center)
    t = scenario.transitions
    return t.omega_31 if direction == "down" else t.omega_21


def _guarded(point):
    def run(indexed):
        k, x = indexed
        try:
            return k, x, tuple(float(v) for v in point(float(x))), None
        except (DeltaQEDError, ValueError, np.linalg.LinAlgError) as exc:
            return k, x, None, f"{type(exc).__name__}: {exc}"

    return run


def _run_points(point, xs, workers=None):
    workers = workers or worker_count()
    run = _guarded(point)
    items = list(enumerate(xs))
    if workers == 1:
        results = [run(item) for item in items]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, items))
    results.sort(key=lambda r: r[0])
    rows, failures = [], []
    for k, x, row, err in results:
        if err is None:
            rows.append(row)
        else:
            log.warning("sweep point %d (x=%r) failed: %s", k, float(x), err)
            failures.append({"index": int(k), "x": float(x), "error": err})
    return rows, failures


def run_sweep(spec, workers=None):
    """Evaluate ``spec`` on its grid and return a :class:`RunRecord`.

    Per-point failures are recorded, never raised; configuration problems
    raise :class:`ConfigError`.
    """
    scenario = None if spec.kind == "flux" else resolve(spec.config, spec.direction)
    point = _point_function(spec, scenario)
    rows, failures = _run_points(point, spec.grid.values(), workers)
    return RunRecord(
        kind=spec.kind,
        inputs=spec.to_dict(),
        columns=list(COLUMNS[spec.kind]),
        rows=rows,
        provenance=_provenance(spec.kind, spec.config, scenario, spec.direction, spec.grid),
        failures=failures,
    )


def replay(record, workers=None):
    """Re-run a record from its ``inputs`` block."""
    return run_sweep(SweepSpec.from_dict(record.inputs), workers)


def default_grid(kind, cfg, direction="down"):
    """Grid used when neither the config nor the command line gives one."""
    if kind == "flux":
        return Grid(0.47, 0.53, 121)
    if kind == "saturation":
        return Grid(0.01, 2.0, 50)
    if kind == "pulse-width":
        return Grid(0.001, 0.1, 100)
    scenario = resolve(cfg, direction)
    g = to_ghz(max(scenario.rates.gamma_31, scenario.rates.gamma_21))
    if kind == "steady":
        g31 = to_ghz(scenario.rates.gamma_31)
        return Grid(-3 * g31, 3 * g31, 121)
    t = scenario.transitions
    center = to_ghz(t.omega_31 if direction == "down" else t.omega_21)
    return Grid(center - 5 * g, center + 5 * g, 1001)


def pulse_record(cfg, direction="down", input_pulse=None):
    """Input, elastic and converted spectral densities of one pulse (densities per GHz)."""
    scenario = resolve(cfg, direction)
    if input_pulse is None:
        if cfg.pulse.file:
            input_pulse = pulse.read_pulse_table(cfg.pulse.file)
        else:
            input_pulse = pulse.gaussian_pulse(
                _pulse_center(cfg, scenario, direction), to_angular(cfg.pulse.width), cfg.pulse.span, cfg.pulse.points
            )
    convert = pulse.convert_down if direction == "down" else pulse.convert_up
    out = convert(input_pulse, scenario.rates, scenario.transitions, scenario.drive)
    per_ghz = to_angular(1.0)
    rows = [
        (float(nu), float(nu_out), float(a) * per_ghz, float(b) * per_ghz, float(c) * per_ghz)
        for nu, nu_out, a, b, c in zip(
            to_ghz(input_pulse.grid), to_ghz(out.converted_grid), input_pulse.density, out.elastic, out.inelastic
        )
    ]
    extra = {
        "efficiency": repr(out.efficiency),
        "elastic_total": repr(out.elastic_total),
        "pulse_center_ghz": repr(to_ghz(input_pulse.center)),
        "pulse_width_ghz": repr(to_ghz(input_pulse.width)),
    }
    inputs = {"kind": "pulse", "direction": direction, "config": cfg.to_dict()}
    record = RunRecord("pulse", inputs, list(COLUMNS["pulse"]), rows,
                       _provenance("pulse", cfg, scenario, direction, extra=extra))
    return record, out


@dataclass(frozen=True)
class BiasResult:
    flux: float
    efficiency: float
    band: tuple
    grid: np.ndarray
    efficiencies: np.ndarray
    failures: list


def _efficiency_at(params, trunc, direction, intrinsic_3, intrinsic_2):
    def eff(f):
        rec = circuit.flux_point(params.with_flux(float(f)), trunc, intrinsic_3, intrinsic_2)
        return rec.eff_down if direction == "down" else rec.eff_up

    return eff


def golden_section_max(func, lo, hi, tol=1e-4):
    """Maximise a unimodal ``func`` on ``[lo, hi]`` until the bracket is shorter than ``tol``."""
    inv_phi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - inv_phi * (b - a), a + inv_phi * (b - a)
    fc, fd = func(c), func(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = func(d)
    x = (a + b) / 2
    return x, func(x)


def band_edges(xs, ys, threshold, peak):
    """Threshold crossings around index ``peak``, linearly interpolated between grid points."""
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    lo = peak
    while lo > 0 and ys[lo - 1] > threshold:
        lo -= 1
    hi = peak
    while hi < len(xs) - 1 and ys[hi + 1] > threshold:
        hi += 1

    def cross(i, j):
        return xs[i] + (threshold - ys[i]) * (xs[j] - xs[i]) / (ys[j] - ys[i])

    left = xs[0] if lo == 0 else cross(lo - 1, lo)
    right = xs[-1] if hi == len(xs) - 1 else cross(hi, hi + 1)
    return float(left), float(right)


def find_optimal_bias(params, window, direction="down", intrinsic_3=0.0, intrinsic_2=0.0,
                      step=5e-4, tol=1e-4, threshold=0.9, trunc=circuit.ChargeTruncation(), workers=None):
    """Flux bias maximising the resonant conversion efficiency inside ``window``.

    A grid scan with spacing ``step`` locates the best point, then golden-section
    refinement narrows it to ``tol``. ``band`` is the interval around the optimum
    where the efficiency exceeds ``threshold``.
    """
    lo, hi = window
    if not 0 <= lo < hi <= 1:
        raise ConfigError(f"flux window must satisfy 0 <= lo < hi <= 1, got {window!r}")
    n = int(round((hi - lo) / step)) + 1
    grid = np.linspace(lo, hi, max(n, 3))
    eff = _efficiency_at(params, trunc, direction, intrinsic_3, intrinsic_2)
    rows, failures = _run_points(lambda f: (eff(f),), grid, workers)
    ok = np.array([i for i in range(len(grid)) if i not in {fl["index"] for fl in failures}])
    if ok.size == 0:
        raise DeltaQEDError(f"every flux point in {window!r} failed")
    xs, ys = grid[ok], np.array([r[0] for r in rows])
    if not np.any(np.isfinite(ys)):
        raise DeltaQEDError(f"no flux point in {window!r} supports {direction}-conversion")
    k = int(np.nanargmax(ys))
    a, b = xs[max(k - 1, 0)], xs[min(k + 1, len(xs) - 1)]
    f_star, e_star = golden_section_max(lambda f: np.nan_to_num(eff(f), nan=-np.inf), a, b, tol)
    if ys[k] > e_star:
        f_star, e_star = float(xs[k]), float(ys[k])
    return BiasResult(float(f_star), float(e_star), band_edges(xs, ys, threshold, k), xs, ys, failures)


PLOT_DEFAULTS = {
    "spectrum": ("nu_ghz", ["abs2_ta", "abs2_tb", "sum"], "frequency (GHz)", "probability"),
    "pulse-width": ("width_ghz", ["efficiency"], "pulse width d (GHz)", "conversion efficiency"),
    "flux": ("f", ["eff_down", "eff_up"], "reduced flux f", "resonant efficiency"),
    "saturation": ("omega_p_over_g31", ["abs2_ta", "abs2_tb"], "probe Rabi frequency / Gamma_31", "probability"),
    "steady": ("delta_p_ghz", ["abs2_ta", "abs2_tb", "abs2_ta_weak", "abs2_tb_weak"], "probe detuning (GHz)",
               "probability"),
    "pulse": ("nu_ghz", ["input_density", "elastic_density", "inelastic_density"], "detuning from carrier (GHz)",
              "spectral density (1/GHz)"),
}


def emit_plot(record, path, x=None, ys=None, title=None):
    """Render a record as an SVG line plot (one curve per column in ``ys``)."""
    if not record.rows:
        raise ValueError("cannot plot an empty record")
    dx, dys, xlabel, ylabel = PLOT_DEFAULTS[record.kind]
    x, ys = x or dx, ys or dys
    xv = record.column(x)
    series = []
    if record.kind == "pulse":
        center = float(record.provenance["pulse_center_ghz"])
        out_center = center + (record.column("nu_out_ghz")[0] - record.column("nu_ghz")[0])
        for name in ys:
            base = record.column("nu_out_ghz") - out_center if name == "inelastic_density" else xv - center
            series.append((name, base, record.column(name)))
    else:
        series = [(name, xv, record.column(name)) for name in ys]
    return plotting.line_plot(series, path, title=title or record.kind, xlabel=xlabel, ylabel=ylabel)

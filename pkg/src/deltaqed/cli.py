"""``deltaqed`` command-line entry point.

Every flag has a config-file equivalent; the flag wins on conflict:

========================  ==============================
flag                      config key
========================  ==============================
``--out``                 ``[output] path``
``--format``              ``[output] format``
``--plot``                ``[output] plot``
``--direction``           ``[sweep] direction``
``--grid A:B:N``          ``[sweep] start, stop, points``
``--threshold``           ``[sweep] threshold``
``--width``               ``[pulse] width``
``--flux``                ``[circuit] flux``
``--sweep`` (circuit)     ``[sweep] kind = "flux"``
``--window A:B``          ``[sweep] start, stop`` (bias)
``--omega-p-over-g31``    ``[drive] probe_over_g31``
``--kind`` (sweep)        ``[sweep] kind``
========================  ==============================

Exit codes: 0 success, 1 computational failure (including more than 10% of
sweep points failing), 2 configuration or usage error.
"""

import argparse
import glob
import logging
import os
import sys

from deltaqed import __version__, circuit, sweep
from deltaqed.config import circuit_params, load_config, resolve, truncation
from deltaqed.constants import to_ghz
from deltaqed.errors import ConfigError, DeltaQEDError

log = logging.getLogger("deltaqed")

EXIT_OK, EXIT_COMPUTE, EXIT_CONFIG = 0, 1, 2

REPRODUCE_DIR = os.environ.get(
    "DELTAQED_REPRODUCE_DIR",
    os.path.join(os.path.dirname(__file__), os.pardir, os.pardir, "reproduce"),
)


class _Parser(argparse.ArgumentParser):
    """Usage errors raise instead of exiting so ``main`` owns the exit code."""

    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _common(p, grid=True):
    p.add_argument("--config", metavar="PATH", help="TOML config file")
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    p.add_argument("--direction", choices=("down", "up"), help="conversion direction (default down)")
    p.add_argument("--plot", metavar="PATH", help="also write an SVG line plot")
    if grid:
        p.add_argument("--grid", metavar="START:STOP:POINTS", help="sweep grid (units depend on the command)")


def build_parser():
    parser = _Parser(prog="deltaqed", description="Single-photon frequency conversion with a driven Delta-type emitter.")
    parser.add_argument("--version", action="version", version=f"deltaqed {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")

    p = sub.add_parser("spectrum", help="transmission spectra |T_a|^2, |T_b|^2 over probe frequency (GHz grid)")
    _common(p)

    p = sub.add_parser("pulse", help="Gaussian pulse conversion efficiency and output spectra")
    _common(p, grid=False)
    p.add_argument("--width", type=float, metavar="GHZ", help="Gaussian width d in GHz")

    p = sub.add_parser("circuit", help="flux-qubit levels, matrix elements and rates")
    _common(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--flux", type=float, metavar="F", help="single reduced flux bias")
    mode.add_argument("--sweep", action="store_true", help="sweep the reduced flux over --grid")

    p = sub.add_parser("steady", help="steady-state transmission vs probe detuning (GHz grid)")
    _common(p)
    p.add_argument("--omega-p-over-g31", type=float, metavar="X", help="probe Rabi frequency in units of Gamma_31")

    p = sub.add_parser("saturation", help="resonant transmission vs probe strength (grid in Omega_p/Gamma_31)")
    _common(p)

    p = sub.add_parser("bias", help="optimal flux bias and >threshold efficiency band")
    _common(p, grid=False)
    p.add_argument("--window", metavar="LO:HI", help="flux window searched")
    p.add_argument("--threshold", type=float, metavar="P", help="efficiency threshold for the band (default 0.9)")

    p = sub.add_parser("sweep", help="generic sweep of any kind over --grid")
    _common(p)
    p.add_argument("--kind", choices=sweep.KINDS, help="sweep kind")

    p = sub.add_parser("reproduce", help="list or run the shipped figure configs")
    p.add_argument("name", nargs="?", help="config name (e.g. fig5); omit to list")
    p.add_argument("--out-dir", metavar="DIR", default=".", help="directory for outputs")
    return parser


def _apply_common(cfg, args):
    if getattr(args, "out", None):
        cfg.output.path = args.out
    if getattr(args, "format", None):
        cfg.output.format = args.format
    if getattr(args, "plot", None):
        cfg.output.plot = args.plot
    if getattr(args, "direction", None):
        cfg.sweep.direction = args.direction
    if getattr(args, "grid", None):
        g = sweep.Grid.parse(args.grid)
        cfg.sweep.start, cfg.sweep.stop, cfg.sweep.points = g.start, g.stop, g.points
    return cfg


def _grid(cfg, kind):
    s = cfg.sweep
    if s.start is None and s.stop is None and s.points is None:
        return sweep.default_grid(kind, cfg, s.direction)
    if None in (s.start, s.stop, s.points):
        raise ConfigError("[sweep] needs all of start, stop and points")
    return sweep.Grid(s.start, s.stop, s.points)


def _emit(record, cfg):
    text = record.to_csv() if cfg.output.format == "csv" else record.to_json()
    if cfg.output.path:
        with open(cfg.output.path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if cfg.output.plot:
        sweep.emit_plot(record, cfg.output.plot)
    if record.failures:
        log.warning("%d of %d points failed", len(record.failures), record.points)
    return EXIT_COMPUTE if record.too_many_failures else EXIT_OK


def _run_kind(cfg, kind):
    spec = sweep.SweepSpec(kind, _grid(cfg, kind), cfg, cfg.sweep.direction)
    return _emit(sweep.run_sweep(spec), cfg)


def cmd_spectrum(cfg, args):
    return _run_kind(cfg, "spectrum")


def cmd_steady(cfg, args):
    if args.omega_p_over_g31 is not None:
        cfg.drive.probe_over_g31 = args.omega_p_over_g31
    if not cfg.drive.probe_over_g31 > 0:
        raise ConfigError("[drive] probe_over_g31 must be > 0")
    return _run_kind(cfg, "steady")


def cmd_saturation(cfg, args):
    return _run_kind(cfg, "saturation")


def cmd_sweep(cfg, args):
    if args.kind:
        cfg.sweep.kind = args.kind
    if cfg.sweep.kind is None:
        raise ConfigError("sweep needs --kind or [sweep] kind")
    if cfg.sweep.kind not in sweep.KINDS:
        raise ConfigError(f"unknown sweep kind {cfg.sweep.kind!r}")
    return _run_kind(cfg, cfg.sweep.kind)


def cmd_pulse(cfg, args):
    if args.width is not None:
        cfg.pulse.width = args.width
    if not cfg.pulse.width > 0:
        raise ConfigError("[pulse] width must be > 0")
    record, out = sweep.pulse_record(cfg, cfg.sweep.direction)
    log.info("conversion efficiency %.6f", out.efficiency)
    return _emit(record, cfg)


def cmd_circuit(cfg, args):
    if args.sweep:
        cfg.sweep.kind = "flux"
    if cfg.sweep.kind == "flux" and args.flux is None:
        return _run_kind(cfg, "flux")
    if args.flux is not None:
        cfg.circuit.flux = args.flux
    params, trunc = circuit_params(cfg), truncation(cfg)
    cert = circuit.check_convergence(params, trunc)
    rec = circuit.flux_point(params, trunc, cfg.loss.intrinsic_3, cfg.loss.intrinsic_2)
    s, g = rec.spectrum, rec.rates
    row = (
        params.flux, to_ghz(s.omega_21), to_ghz(s.omega_31), to_ghz(s.omega_32),
        s.abs_n(2, 1), s.abs_n(3, 1), s.abs_n(3, 2),
        to_ghz(g.gamma_21), to_ghz(g.gamma_31), to_ghz(g.gamma_32), rec.eff_down, rec.eff_up,
    )
    scenario = resolve(cfg, cfg.sweep.direction)
    v_c = circuit.voltage_for_rabi(params, s, scenario.drive.rabi)
    extra = {
        "convergence": (
            f"{'passed' if cert.passed else 'FAILED'} (doubled cutoffs: rel dw21={cert.rel_change_w21:.3g}, "
            f"rel dw31={cert.rel_change_w31:.3g}, max d|n|={cert.max_change_abs_n:.3g})"
        ),
        "drive_voltage_v": repr(float(v_c)),
    }
    record = sweep.RunRecord(
        "flux", {"kind": "circuit", "config": cfg.to_dict()}, list(sweep.COLUMNS["flux"]), [tuple(map(float, row))],
        sweep._provenance("circuit", cfg, scenario, cfg.sweep.direction, extra=extra),
    )
    return _emit(record, cfg)


def cmd_bias(cfg, args):
    if args.window:
        try:
            lo, hi = (float(v) for v in args.window.split(":"))
        except ValueError:
            raise ConfigError(f"--window must look like LO:HI, got {args.window!r}") from None
        cfg.sweep.start, cfg.sweep.stop = lo, hi
    if args.threshold is not None:
        cfg.sweep.threshold = args.threshold
    direction = cfg.sweep.direction
    if cfg.sweep.start is None or cfg.sweep.stop is None:
        cfg.sweep.start, cfg.sweep.stop = (0.47, 0.50) if direction == "down" else (0.50, 0.53)
    res = sweep.find_optimal_bias(
        circuit_params(cfg), (cfg.sweep.start, cfg.sweep.stop), direction,
        cfg.loss.intrinsic_3, cfg.loss.intrinsic_2, threshold=cfg.sweep.threshold, trunc=truncation(cfg),
    )
    column = "eff_down" if direction == "down" else "eff_up"
    extra = {
        "optimal_flux": repr(res.flux),
        "optimal_efficiency": repr(res.efficiency),
        "band": f"{res.band[0]!r}:{res.band[1]!r} (efficiency > {cfg.sweep.threshold!r})",
        "search": "grid step 5e-4, golden-section refinement to 1e-4",
    }
    record = sweep.RunRecord(
        "flux", {"kind": "bias", "config": cfg.to_dict()}, ["f", column],
        [(float(f), float(e)) for f, e in zip(res.grid, res.efficiencies)],
        sweep._provenance("bias", cfg, None, direction, extra=extra), res.failures,
    )
    if cfg.output.plot:
        sweep.emit_plot(record, cfg.output.plot, ys=[column])
        cfg.output.plot = None
    return _emit(record, cfg)


def _reproduce_configs():
    return sorted(glob.glob(os.path.join(os.path.abspath(REPRODUCE_DIR), "*.toml")))


def cmd_reproduce(args):
    configs = {os.path.splitext(os.path.basename(p))[0]: p for p in _reproduce_configs()}
    if not args.name:
        for name, path in configs.items():
            cfg = load_config(path)
            print(f"{name}\t{cfg.sweep.kind or 'pulse'}\t{path}")
        return EXIT_OK
    if args.name not in configs:
        raise ConfigError(f"no reproduce config {args.name!r}; available: {', '.join(configs) or 'none'}")
    cfg = load_config(configs[args.name])
    os.makedirs(args.out_dir, exist_ok=True)
    cfg.output.path = os.path.join(args.out_dir, f"{args.name}.{cfg.output.format}")
    cfg.output.plot = os.path.join(args.out_dir, f"{args.name}.svg")
    kind = cfg.sweep.kind
    if kind is None:
        record, _ = sweep.pulse_record(cfg, cfg.sweep.direction)
        status = _emit(record, cfg)
    else:
        status = _run_kind(cfg, kind)
    print(cfg.output.path)
    return status


COMMANDS = {
    "spectrum": cmd_spectrum,
    "pulse": cmd_pulse,
    "circuit": cmd_circuit,
    "steady": cmd_steady,
    "saturation": cmd_saturation,
    "bias": cmd_bias,
    "sweep": cmd_sweep,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG
    try:
        if args.command == "reproduce":
            return cmd_reproduce(args)
        cfg = _apply_common(load_config(args.config), args)
        cfg.validate()
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DeltaQEDError as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def _entry():
    sys.exit(main())


if __name__ == "__main__":
    _entry()

"""Command-line front end.

    trionlambda <command> --config PATH [--out PATH] [--preset qd1|qd2] [--threads N]

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure,
4 I/O failure.
"""
import argparse
import os
import sys

import numpy as np

from . import correlations, sweeps, trion
from .config import COMMAND_BLOCKS, DIMENSIONLESS, ConfigError, grid_values, load_config, to_internal
from .csvio import render_csv
from .errors import FitError, IntegrationError, NoSplittingError, UndefinedNormalizationError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
THREADS_ENV = "TRIONLAMBDA_THREADS"

NUMERICAL_ERRORS = (ArithmeticError, IntegrationError, FitError, NoSplittingError, UndefinedNormalizationError)


def _column(field_name):
    return field_name if field_name in DIMENSIONLESS else f"{field_name}_ghz"


def _to_ghz(field_name, value):
    return value if field_name in DIMENSIONLESS else value / trion.TWO_PI


def _block(config, command):
    name = COMMAND_BLOCKS[command]
    if name == "steady":
        return config.blocks.get(name, {})
    if name not in config.blocks:
        raise ConfigError([f"config has no '{name}' block required by '{command}'"])
    return config.blocks[name]


def cmd_steady(config, block, threads):
    p = config.params()
    rho = trion.steady(p)
    pops = rho.populations
    row = [
        p.gamma_r * (1 - p.branching_b) * pops[trion.T],
        p.gamma_r * p.branching_b * pops[trion.T],
        pops[trion.S], pops[trion.P], pops[trion.T],
    ]
    return ["fluorescence", "auger", "rho_ss", "rho_pp", "rho_tt"], [row], {}


def cmd_sweep(config, block, threads):
    p = config.params()
    axes_ghz = [(ax["field"], grid_values(ax)) for ax in block["axes"]]
    axes = [(name, to_internal(name, vals)) for name, vals in axes_ghz]
    observable = block.get("observable", "fluorescence")
    result = sweeps.sweep(p, axes, observable, threads)
    columns = [_column(name) for name, _ in axes_ghz] + [observable]
    if result.axis2 is None:
        rows = [(a, v) for a, v in zip(axes_ghz[0][1], result.values)]
    else:
        rows = [
            (a, b, result.values[i, j])
            for i, a in enumerate(axes_ghz[0][1])
            for j, b in enumerate(axes_ghz[1][1])
        ]
    meta = {}
    if result.axis2 is None and axes_ghz[0][1].size >= 5:
        m = sweeps.dip_metrics(result)
        meta["dip_depth"] = m.depth
        meta["dip_asymmetry"] = m.asymmetry
        meta["dip_center"] = _to_ghz(axes_ghz[0][0], m.center)
    return columns, rows, meta


def cmd_spectrum(config, block, threads):
    freq_ghz = grid_values(block["frequencies"])
    spec = correlations.emission_spectrum(config.params(), block["channel"], trion.TWO_PI * freq_ghz)
    meta = {"coherent_weight": spec.coherent_weight, "poles_ghz": [w / trion.TWO_PI for w in spec.poles]}
    try:
        meta["splitting_ghz"] = correlations.extract_splitting(spec) / trion.TWO_PI
    except NoSplittingError:
        meta["splitting_ghz"] = None
    return ["frequency_ghz", "spectral_density"], list(zip(freq_ghz, spec.values)), meta


def cmd_g2(config, block, threads):
    delays = grid_values(block["delays"])
    trace = correlations.g2(config.params(), block["channel_a"], block["channel_b"], delays)
    columns = ["delay_ns", "g2"]
    cols = [delays, trace.values]
    sigma = block.get("jitter_sigma", 0.0)
    if sigma > 0:
        columns.append("g2_jitter")
        cols.append(correlations.convolve_jitter(trace, sigma).values)
    return columns, list(zip(*cols)), {}


def cmd_fit_rabi(config, block, threads):
    p = config.params()
    fit = sweeps.fit_rabi_from_power(block["powers"], block["intensities"], p.gamma_r, p.delta1)
    row = [fit.omega_at_unit_power, fit.omega_at_unit_power / trion.TWO_PI, fit.residual_norm, fit.scale,
           fit.fixed_gamma_r / trion.TWO_PI]
    return ["k_rad_per_ns", "k_ghz", "residual_norm", "scale", "gamma_r_ghz"], [row], {}


def cmd_rate_compare(config, block, threads):
    p = config.params()
    name = block["axis"]["field"]
    vals_ghz = grid_values(block["axis"])
    axis = [(name, to_internal(name, vals_ghz))]
    master = sweeps.sweep(p, axis, "fluorescence", threads)
    rate = sweeps.sweep(p, axis, "rate_fluorescence", threads)
    meta = {}
    if vals_ghz.size >= 5:
        for label, res in (("master", master), ("rate", rate)):
            m = sweeps.dip_metrics(res)
            meta[f"{label}_dip"] = {"depth": m.depth, "center": _to_ghz(name, m.center), "asymmetry": m.asymmetry}
    rows = list(zip(vals_ghz, master.values, rate.values))
    return [_column(name), "master_fluorescence", "rate_fluorescence"], rows, meta


COMMANDS = {
    "steady": cmd_steady,
    "sweep": cmd_sweep,
    "spectrum": cmd_spectrum,
    "g2": cmd_g2,
    "fit-rabi": cmd_fit_rabi,
    "rate-compare": cmd_rate_compare,
}


def run(command, config, threads=1):
    """Execute ``command`` for a validated RunConfig and return the CSV text."""
    columns, rows, meta = COMMANDS[command](config, _block(config, command), threads)
    rows = [[float(np.real(v)) for v in row] for row in rows]
    return render_csv(command, config, columns, rows, meta)


def _threads(arg):
    if arg is not None:
        return arg
    env = os.environ.get(THREADS_ENV)
    return int(env) if env else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="trionlambda", description=__doc__.split("\n")[0])
    parser.add_argument("command", choices=sorted(COMMANDS) + ["validate"])
    parser.add_argument("--config", required=True, help="YAML run configuration")
    parser.add_argument("--out", help="output CSV path (default: output.path in the config, else stdout)")
    parser.add_argument("--preset", choices=["qd1", "qd2"])
    parser.add_argument("--threads", type=int, help=f"worker threads for sweeps (env {THREADS_ENV})")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, preset_override=args.preset)
    except ConfigError as exc:
        print("\n".join(exc.violations), file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    if args.command == "validate":
        print(f"{args.config}: valid")
        return EXIT_OK

    try:
        text = run(args.command, config, _threads(args.threads))
    except ConfigError as exc:
        print("\n".join(exc.violations), file=sys.stderr)
        return EXIT_CONFIG
    except NUMERICAL_ERRORS as exc:
        print(f"{args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    out = args.out or config.output_path()
    if not out or out == "-":
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"cannot write {out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

import argparse
import logging
import os
import sys

from .calibration import calibrate
from .config import ExperimentConfig
from .exceptions import CalibrationError, ConfigError
from .harness import (
    decomposition_study,
    homogeneity_report,
    run_experiment,
    run_sweep,
    scan_field,
    sensitivity_compare,
    surface_table,
    turn_study,
)
from .output import ensure_dir, write_json

logger = logging.getLogger(__name__)

usage = """
Usage: rayswim COMMAND [OPTIONS] [KEY=VALUE...]

Commands:

  field scan|homogeneity  Coil field on a grid / uniform-field working spaces
  calibrate               Fit the speed closure; writes calibrated.cfg
  sweep                   Speed and fin amplitude over the B x f grid
  run --plan NAME|FILE    Simulate a trajectory plan (Z, square, nabla or file)
  surface                 Sample the fin surface over one period
  sensitivity             Compare speed steps in frequency and field strength
  turns                   Step-turn study
  decompose               Single against decomposed turn

Options:

  --config PATH   Config file [default: built-in defaults]
  --out DIR       Output directory [default: output.dir]
  --dt MS         Integrator step in milliseconds
  --grid-step MM  Grid spacing for field scans
  -v/--verbose    Log progress

  KEY=VALUE       Config overrides, e.g. drive.b_xy=3

Exit status: 0 on success, 2 on a config error, 3 on a calibration failure.
"""

EXIT_CONFIG = 2
EXIT_CALIBRATION = 3


def _parser():
    options = argparse.ArgumentParser(add_help=False)
    options.add_argument("--config")
    options.add_argument("--out")
    options.add_argument("--dt", type=float)
    options.add_argument("--grid-step", type=float)
    options.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="rayswim",
        usage=usage,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    commands = parser.add_subparsers(dest="command", required=True)
    field = commands.add_parser("field", parents=[options])
    field.add_argument("what", choices=("scan", "homogeneity"))
    run = commands.add_parser("run", parents=[options])
    run.add_argument("--plan", required=True)
    for name in ("calibrate", "sweep", "surface", "sensitivity", "turns", "decompose"):
        commands.add_parser(name, parents=[options])
    for sub in commands.choices.values():
        sub.add_argument("overrides", nargs="*", metavar="KEY=VALUE")
    return parser


def _load(args):
    config = (
        ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    )
    overrides = list(args.overrides)
    if args.dt is not None:
        overrides.append(f"integrator.dt={args.dt / 1000!r}")
    return config.override(overrides)


def _calibrate(config, out):
    result = calibrate(config)
    ensure_dir(out)
    path = os.path.join(out, "calibrated.cfg")
    try:
        with open(path, "w", newline="\n") as f:
            f.write(result.config.serialize())
    except OSError as exc:
        raise ConfigError("output.dir", f"cannot write {path}: {exc.strerror}")
    write_json(
        os.path.join(out, "calibration.json"),
        {
            "parameters": result.parameters,
            "objective": result.objective,
            "passes": result.passes,
            "converged": result.converged,
        },
        result.config,
    )
    print(path)


def rayswim(*argv):
    """Run one command; returns the exit status. Separate from `main` for
    tests."""

    args = _parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = _load(args)
        out = args.out or config["output.dir"]
        if args.command == "field":
            if args.what == "scan":
                scan_field(config, args.grid_step, out)
            else:
                report = homogeneity_report(config, args.grid_step, out)
                print(report.frame.to_string(index=False))
        elif args.command == "calibrate":
            _calibrate(config, out)
        elif args.command == "sweep":
            run_sweep(config, out)
        elif args.command == "run":
            result = run_experiment(config, args.plan, out)
            print(f"{result.plan.name}: max deviation {result.metrics.max_dev:.3f} mm")
        elif args.command == "surface":
            surface_table(config, out)
        elif args.command == "sensitivity":
            sensitivity_compare(config, out)
        elif args.command == "turns":
            turn_study(config, out)
        elif args.command == "decompose":
            print(decomposition_study(config, out).frame.to_string(index=False))
    except ConfigError as exc:
        print(f"rayswim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CalibrationError as exc:
        print(f"rayswim: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION
    return 0


def main():  # pragma: no cover
    sys.exit(rayswim(*sys.argv[1:]))

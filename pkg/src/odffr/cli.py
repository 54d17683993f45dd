"""Command line: ``odffr {analytic,simulate,radio,figures} [options]``.

Exit status is 0 on success, 1 for configuration or I/O problems and 2 when
a run aborts on a bookkeeping invariant.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import experiments
from .errors import ConfigError, ConsistencyError
from .report import (
    BLOCKING_COLUMNS,
    GRANT_COLUMNS,
    OUTAGE_COLUMNS,
    SINR_CDF_COLUMNS,
    UTILIZATION_COLUMNS,
    emit_csv,
)
from .scenario import EQ2_MODES, Scenario, load_scenario

log = logging.getLogger("odffr")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="key = value scenario file (defaults apply otherwise)")
    common.add_argument("--seed", type=int, help="override the scenario seed")
    common.add_argument("--workers", type=int, default=1, help="parallel sweep workers")
    common.add_argument("--out", help="output directory (overrides output_dir)")
    common.add_argument("--eq2-mode", choices=("literal", "weighted"),
                        help="overall blocking formula")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="odffr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analytic", parents=[common], help="queueing analysis only")
    sub.add_parser("simulate", parents=[common], help="discrete-event simulation sweep")
    sub.add_parser("radio", parents=[common], help="SINR distribution and outage")
    sub.add_parser("figures", parents=[common], help="all four result sets")
    return parser


def resolve_scenario(args):
    scenario = load_scenario(args.scenario) if args.scenario else Scenario()
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.out:
        changes["output_dir"] = args.out
    if args.eq2_mode:
        changes["eq2_mode"] = EQ2_MODES[args.eq2_mode]
    return scenario.replace(**changes) if changes else scenario


def run_scenario(scenario, command="figures", workers=1):
    """Run one subcommand and return the list of files written."""
    out = scenario.output_dir
    written = []
    if command in ("analytic", "simulate", "figures"):
        simulate = command == "simulate" or (command == "figures" and scenario.simulate)
        blocking, util, grants = experiments.blocking_and_utilization(scenario, simulate, workers)
        written.append(emit_csv(blocking, BLOCKING_COLUMNS, os.path.join(out, "blocking.csv")))
        written.append(emit_csv(util, UTILIZATION_COLUMNS, os.path.join(out, "utilization.csv")))
        if simulate:
            written.append(emit_csv(grants, GRANT_COLUMNS, os.path.join(out, "grants.csv")))
    if command in ("radio", "figures"):
        cdf, outage = experiments.radio_rows(scenario)
        written.append(emit_csv(cdf, SINR_CDF_COLUMNS, os.path.join(out, "sinr_cdf.csv")))
        written.append(emit_csv(outage, OUTAGE_COLUMNS, os.path.join(out, "outage.csv")))
    return written


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        scenario = resolve_scenario(args)
        for path in run_scenario(scenario, args.command, args.workers):
            log.info("wrote %s", path)
    except ConfigError as exc:
        print(f"odffr: configuration error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"odffr: {exc}", file=sys.stderr)
        return 1
    except ConsistencyError as exc:
        print(f"odffr: invariant violated: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

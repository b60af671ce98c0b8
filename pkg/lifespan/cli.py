#!/usr/bin/env python
# Copyright (C) 2026 python-lifespan developers
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.
"""cli.py

The `lifespan` command. Every subcommand reads a LabPrefs document
(--config), writes CSV files to --out and exits with 0 on success, 1 when
a numerical acceptance assertion fails and 2 on configuration errors.
"""
import argparse
import logging
import os

import numpy as np

from . import __version__
from .bounds import (BOUNDS_HEADER, DISCRETE_HEADER, bounds_report,
                     discrete_checks)
from .exceptions import AcceptanceFailure, ConfigError, LifespanError
from .experiments import emit_report, fit_sweep, run_sweep, sweep_bounds
from .freespace import sandwich_table, sharpness_table
from .geometry import make_box
from .lab_prefs import LabPrefs
from .neumann_kernel import gaussian_bound_constant, kernel_property_sweep
from .solver import SUMMARY_HEADER, solve_fd, solve_volterra
from .tools import write_csv


logger = logging.getLogger(__name__)

KERNEL_TIMES = np.geomspace(1e-3, 10.0, 5)
GAUSSIAN_TIMES = np.geomspace(1e-3, 1.0, 5)
PHI_GRID = np.geomspace(1e-3, 1e3, 7)
SHARPNESS_RHOS = np.geomspace(1e-3, 1.0, 7)
MASS_TOLERANCE = 1e-6
SYMMETRY_TOLERANCE = 1e-10
POSITIVITY_TOLERANCE = -1e-12
GAUSSIAN_DRIFT = 0.02
SHARPNESS_SPAN = 10.0


def _require(condition, message, *args):
    if not condition:
        raise AcceptanceFailure(message % args)


def _check_kernel(evaluator, path):
    rows = kernel_property_sweep(evaluator, KERNEL_TIMES, 5, path)
    points = evaluator.sample_points(5)
    lowest = min(float(np.min(evaluator.value(points[:, None, :],
                                              points[None, :, :], t)))
                 for t in KERNEL_TIMES)
    constant = gaussian_bound_constant(evaluator, GAUSSIAN_TIMES)
    refined = gaussian_bound_constant(
        evaluator.refined(images=2 * evaluator.truncation.images),
        GAUSSIAN_TIMES)
    drift = abs(refined - constant) / constant
    n = evaluator.n
    logger.info("Gaussian bound constant %.6g in %dD (drift %.2e under K "
                "doubling)", constant, n, drift)
    _require(max(r[1] for r in rows) <= MASS_TOLERANCE,
             "Kernel mass error %.3g in %dD", max(r[1] for r in rows), n)
    _require(max(r[2] for r in rows) <= SYMMETRY_TOLERANCE,
             "Kernel symmetry error %.3g in %dD", max(r[2] for r in rows), n)
    _require(lowest >= POSITIVITY_TOLERANCE, "Kernel minimum %.3g in %dD",
             lowest, n)
    _require(drift < GAUSSIAN_DRIFT, "Gaussian constant drift %.3g in %dD",
             drift, n)


def kernel_check(prefs, out, seed):
    """Mass, symmetry, positivity and the Gaussian bound of N.

    Runs on the unit square and the unit cube with the configured
    truncation and writes kernel_2d.csv and kernel_3d.csv.
    """
    for n in (2, 3):
        evaluator = prefs.kernel_evaluator(make_box(n, [1.0] * n))
        _check_kernel(evaluator,
                      os.path.join(out, "kernel_%dd.csv" % n))


def phi_check(prefs, out, seed):
    """phi_n inside its envelopes on the log grid, n = 2 and 3."""
    for n in (2, 3):
        table = sandwich_table(n, PHI_GRID, PHI_GRID,
                               path=os.path.join(out, "sandwich_%d.csv" % n))
        failed = [(entry.T, entry.R) for entry in table if not entry.passed]
        _require(not failed, "phi_%d outside its envelopes at %s", n, failed)


def sharpness(prefs, out, seed):
    """Span of I(rho) over its predicted order, n = 2 and 3."""
    for n in (2, 3):
        rows = sharpness_table(SHARPNESS_RHOS, n, path=os.path.join(
            out, "sharpness_%d.csv" % n))
        ratios = [row[-1] for row in rows]
        span = max(ratios) / min(ratios)
        logger.info("Sharpness n=%d: ratio span %.4g", n, span)
        _require(span <= SHARPNESS_SPAN, "Sharpness span %.3g for n=%d",
                 span, n)


def solve(prefs, out, seed):
    """One solve; writes trace.csv and summary.csv."""
    problem = prefs.problem()
    control = prefs.solve_control(problem.M0)
    if prefs["solver"]["kind"] == "volterra":
        result = solve_volterra(problem, prefs.kernel_evaluator(
            problem.domain), control)
    else:
        result = solve_fd(problem, prefs.grid(problem.domain), control)
    result.to_csv(os.path.join(out, "trace.csv"))
    write_csv(os.path.join(out, "summary.csv"), SUMMARY_HEADER,
              [result.summary_row("solve")])
    if result.estimate is not None:
        print("T* estimate: %s, bracket [%s, %s]" % (
            result.estimate.tstar, result.estimate.bracket[0],
            result.estimate.bracket[1]))
    else:
        print("No blow-up detected (%s at t = %g)" % (result.termination,
                                                       result.t_last))


def bounds(prefs, out, seed):
    """Bounds of the configured problem plus the randomized suite."""
    report = bounds_report(prefs.bounds_config())
    write_csv(os.path.join(out, "bounds.csv"), BOUNDS_HEADER, [report.row()])
    rows = discrete_checks(np.random.default_rng(seed))
    write_csv(os.path.join(out, "discrete.csv"), DISCRETE_HEADER, rows)
    failed = [row[0] for row in rows if row[2]]
    _require(not failed, "Discrete checks failed: %s", ", ".join(failed))


def sweep(prefs, out, seed):
    """Run the configured sweep and emit its report."""
    table = run_sweep(prefs.sweep_config())
    print(table)
    fits = [fit_sweep(table)] if len(table.ok_rows()) >= 4 else []
    emit_report(table, fits, sweep_bounds(table), out)


COMMANDS = {
    "kernel-check": kernel_check,
    "phi-check": phi_check,
    "sharpness": sharpness,
    "solve": solve,
    "bounds": bounds,
    "sweep": sweep,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lifespan",
        description="Blow-up lifespan experiments for the heat equation "
                    "with a radiating boundary patch.")
    parser.add_argument("--version", action="version",
                        version="%(prog)s " + __version__)
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, command in COMMANDS.items():
        sub = subparsers.add_parser(name, help=command.__doc__.splitlines()[0])
        sub.add_argument("--config", help="JSON configuration document.")
        sub.add_argument("--out", default=".", help="Output directory.")
        sub.add_argument("--seed", type=int, default=0,
                         help="Seed of the randomized checks.")
        sub.add_argument("--verbose", "-v", action="store_true",
                         help="Log at DEBUG level.")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s: %(message)s")
    try:
        prefs = LabPrefs(args.config)
        if not os.path.isdir(args.out):
            os.makedirs(args.out)
        COMMANDS[args.command](prefs, args.out, args.seed)
    except ConfigError as error:
        logger.error("Configuration error: %s", error)
        return 2
    except AcceptanceFailure as error:
        logger.error("Acceptance check failed: %s", error)
        return 1
    except LifespanError as error:
        logger.error("%s: %s", error.__class__.__name__, error)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

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
"""experiments.py

Sweeps over M0, |Gamma_1| or q, power-law fits of the measured lifespans,
and the CSV/text reports comparing them with the analytic bounds.
"""
import logging
import math
import multiprocessing
import os
from collections import defaultdict
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from .bounds import (BOUNDS_HEADER, BoundsConfig, bounds_report,
                     calibrate_critical_constant, calibrate_general_constant)
from .exceptions import (InvalidData, LifespanError, PreconditionViolated,
                         SweepFailed)
from .geometry import grid_for_spacing, make_patch
from .neumann_kernel import KernelEvaluator
from .solver import (Problem, SolveControl, solve_fd, solve_volterra)
from .tools import format_float, is_strictly_monotone, write_csv, write_text


logger = logging.getLogger(__name__)

SWEEP_VARIABLES = ("M0", "Gamma1Area", "Q")
SOLVERS = ("fd", "volterra")
SWEEP_HEADER = ("value", "Tstar", "bracket_lo", "bracket_hi", "beta",
                "fit_r2", "upper_bound", "lower_general", "Y",
                "lower_critical", "regime")
FIT_HEADER = ("sweep_id", "slope", "intercept", "r2")
MIN_SWEEP_POINTS = 4


@dataclass(frozen=True)
class SweepConfig(object):
    """One sweep: a variable, its values, and the fixed problem template.

    Attributes:
        variable: "M0", "Gamma1Area" or "Q".
        values: Strictly monotone values, at least 4.
        domain: Domain of every point.
        face: Face carrying the patch, centred on it.
        q, M0, gamma1_area: Template values for the fixed parameters.
        solver: "fd" or "volterra".
        nodes_per_unit: Base grid resolution (nodes per unit length).
        min_patch_nodes: Grid nodes required across the patch; the
            spacing is halved until the patch has them.
        control: SolveControl shared by every point.
        C_general, C_star, C_critical: Bound constants (the first and
            last are replaced when calibrating).
        calibrate: Calibrate the lower-bound constants on the first row.
        workers: Pool size; 1 runs in process.
        sweep_id: Label used in fit.csv and the summary.
    """
    variable: str
    values: tuple
    domain: object
    face: str = "y-"
    q: float = 2.0
    M0: float = 1.0
    gamma1_area: float = 0.5
    solver: str = "fd"
    nodes_per_unit: int = 32
    min_patch_nodes: int = 8
    control: SolveControl = field(default_factory=SolveControl)
    C_general: float = 1.0
    C_star: float = 1.0
    C_critical: float = None
    calibrate: bool = False
    workers: int = 1
    sweep_id: str = None

    def __post_init__(self):
        object.__setattr__(self, "values",
                           tuple(float(v) for v in self.values))
        if self.variable not in SWEEP_VARIABLES:
            raise InvalidData("Unknown sweep variable %r; expected one of "
                              "%s." % (self.variable,
                                       ", ".join(SWEEP_VARIABLES)))
        if self.solver not in SOLVERS:
            raise InvalidData("Unknown solver %r." % self.solver)
        if self.sweep_id is None:
            object.__setattr__(self, "sweep_id", self.variable)

    def validate(self):
        """Check the value list.

        Raises:
            SweepFailed for an empty list.
            InvalidData for short, non-monotone or out-of-range lists.
        """
        if not self.values:
            raise SweepFailed("Sweep %s has no values." % self.sweep_id)
        if len(self.values) < MIN_SWEEP_POINTS:
            raise InvalidData("A sweep needs at least %d values." %
                              MIN_SWEEP_POINTS)
        if not is_strictly_monotone(self.values):
            raise InvalidData("Sweep values must be strictly monotone.")
        if self.variable == "Q" and min(self.values) <= 1:
            raise InvalidData("q values must exceed 1.")
        if self.variable != "Q" and min(self.values) <= 0:
            raise InvalidData("%s values must be positive." % self.variable)
        if self.variable == "Gamma1Area":
            face = self.domain.face(self.face)
            if max(self.values) > face.measure:
                raise InvalidData("Patch area %g exceeds face %s." %
                                  (max(self.values), face.name))

    def point(self, value):
        """(q, M0, |Gamma_1|) of the sweep point at value."""
        params = {"Q": self.q, "M0": self.M0, "Gamma1Area": self.gamma1_area}
        params[self.variable] = value
        return params["Q"], params["M0"], params["Gamma1Area"]

    def abscissa(self, value):
        """Fit abscissa: q - 1 for q sweeps, the value itself otherwise."""
        return value - 1.0 if self.variable == "Q" else value

    def predicted_slope(self):
        """(steepest, flattest) log-log slope the bounds predict."""
        if self.variable == "M0":
            return (-(self.q - 1.0), -(self.q - 1.0))
        if self.variable == "Q":
            return (-1.0, -1.0)
        return (-1.0, -1.0 / (self.domain.n - 1))


def centered_patch(domain, face, area):
    """Interval (n=2) or square (n=3) patch of the given area centred on a
    face.
    """
    face = domain.face(face)
    side = area if domain.n == 2 else math.sqrt(area)
    coords = []
    for d in face.tangential_axes:
        middle = 0.5 * (face.lo[d] + face.hi[d])
        coords.append([middle - 0.5 * side, middle + 0.5 * side])
    return make_patch(domain, face, coords if domain.n == 3 else coords[0])


def patch_grid(domain, patch, nodes_per_unit, min_patch_nodes):
    """Grid with at least min_patch_nodes nodes across the patch."""
    per_unit = int(nodes_per_unit)
    while True:
        grid = grid_for_spacing(domain, 1.0 / per_unit)
        if grid.nodes_across(patch) >= min_patch_nodes:
            return grid
        per_unit *= 2


@dataclass(frozen=True)
class SweepRow(object):
    """Outcome of one sweep point; error is set when the point failed."""
    index: int
    value: float
    tstar: float = None
    bracket_lo: float = None
    bracket_hi: float = None
    beta: float = None
    fit_r2: float = None
    upper_bound: float = None
    lower_general: float = None
    Y: float = None
    lower_critical: float = None
    regime: str = None
    termination: str = None
    error: str = None

    @property
    def ok(self):
        return self.error is None and self.tstar is not None

    def row(self):
        return (self.value, self.tstar, self.bracket_lo, self.bracket_hi,
                self.beta, self.fit_r2, self.upper_bound, self.lower_general,
                self.Y, self.lower_critical, self.regime)

    def bounds_consistent(self, tolerance=0.0):
        """lower_general <= bracket_hi and bracket_lo <= upper + tolerance."""
        if not self.ok:
            return False
        below = self.lower_general is None or (
            self.lower_general <= self.bracket_hi)
        above = self.upper_bound is None or (
            self.bracket_lo <= self.upper_bound + tolerance)
        return below and above


class SweepTable(list):
    """A list of SweepRows kept in sweep order, with helper methods."""

    def __init__(self, rows=(), config=None):
        super(SweepTable, self).__init__(rows)
        self.sort(key=lambda row: row.index)
        self.config = config

    def __str__(self):
        """Fixed-width table of the rows."""
        keys = ("value", "Tstar", "bracket_lo", "bracket_hi", "regime")
        cells = [[format_float(v) for v in (row.value, row.tstar,
                                            row.bracket_lo, row.bracket_hi,
                                            row.regime or row.error)]
                 for row in self]
        lengths = defaultdict(int)
        for line in [list(keys)] + cells:
            for i, text in enumerate(line):
                lengths[i] = max(lengths[i], len(text))
        fmt = "| " + " | ".join("{%d:>%d}" % (i, lengths[i])
                                for i in range(len(keys))) + " |"
        name = self.config.sweep_id if self.config else "Sweep"
        header = fmt.format(*keys)
        bar = len(header) * "-"
        results = ["{} SweepTable".format(name), bar, header, bar]
        results.extend(fmt.format(*line) for line in cells)
        results.append(bar)
        return "\n".join(results)

    def __repr__(self):
        return "SweepTable({})".format(super(SweepTable, self).__repr__())

    def values(self):
        """Return a generator of the swept values."""
        return (row.value for row in self)

    def tstars(self):
        """Return a generator of the measured T* (None for failures)."""
        return (row.tstar for row in self)

    def ok_rows(self):
        return [row for row in self if row.ok]

    def failed_rows(self):
        return [row for row in self if not row.ok]

    def rows(self):
        return [row.row() for row in self]


@dataclass(frozen=True)
class _PointTask(object):
    index: int
    value: float
    config: SweepConfig


def _bounds_config(config, q, M0, patch):
    return BoundsConfig(q, M0, patch.area, config.domain.volume,
                        config.domain.n, C_general=config.C_general,
                        C_star=config.C_star, C_critical=config.C_critical)


def solve_point(config, value):
    """Solve one sweep point; returns (SolveResult, BoundsConfig)."""
    q, M0, area = config.point(value)
    patch = centered_patch(config.domain, config.face, area)
    problem = Problem(config.domain, patch, q, M0)
    if config.solver == "volterra":
        result = solve_volterra(problem, KernelEvaluator(config.domain),
                                config.control)
    else:
        grid = patch_grid(config.domain, patch, config.nodes_per_unit,
                          config.min_patch_nodes)
        result = solve_fd(problem, grid, config.control)
    return result, _bounds_config(config, q, M0, patch)


def _row(index, value, result, bounds):
    report = bounds_report(bounds)
    estimate = result.estimate
    fitted = estimate is not None and estimate.fitted
    return SweepRow(
        index, value,
        tstar=estimate.tstar if fitted else None,
        bracket_lo=estimate.bracket[0] if estimate else result.t_last,
        bracket_hi=estimate.bracket[1] if estimate else None,
        beta=estimate.beta if fitted else None,
        fit_r2=estimate.r2 if fitted else None,
        upper_bound=report.upper, lower_general=report.lower_general,
        Y=report.Y, lower_critical=report.lower_critical,
        regime=report.regime, termination=result.termination,
        error=None if fitted else "no fitted blow-up (%s)" %
        result.termination)


def _run_point(task):
    """Worker body: never raises for library errors."""
    try:
        result, bounds = solve_point(task.config, task.value)
    except LifespanError as error:
        logger.warning("Sweep %s point %s failed: %s",
                       task.config.sweep_id, task.value, error)
        return SweepRow(task.index, task.value,
                        error="%s: %s" % (error.__class__.__name__, error))
    row = _row(task.index, task.value, result, bounds)
    logger.info("Sweep %s point %s: T* = %s", task.config.sweep_id,
                task.value, format_float(row.tstar))
    return row


def _calibrated(config):
    """Calibrate the lower-bound constants on the first sweep value."""
    value = config.values[0]
    result, bounds = solve_point(config, value)
    estimate = result.estimate
    if estimate is None or not estimate.fitted:
        logger.warning("Calibration run at %s did not blow up; keeping the "
                       "default constants", value)
        return config, None
    C_general = calibrate_general_constant(bounds, estimate.tstar)
    C_critical = config.C_critical
    if bounds_report(bounds).lower_critical is not None:
        C_critical = calibrate_critical_constant(bounds, estimate.tstar)
    logger.info("Calibrated C_general = %.6g, C_critical = %s on sweep %s",
                C_general, format_float(C_critical), config.sweep_id)
    calibrated = replace(config, C_general=C_general, C_critical=C_critical,
                         calibrate=False)
    bounds = replace(bounds, C_general=C_general, C_critical=C_critical)
    return calibrated, _row(0, value, result, bounds)


def run_sweep(config):
    """Solve every sweep point and attach its bounds.

    Points run in a process pool when config.workers > 1; rows come back
    in value order either way. A failing point yields a row carrying the
    error.

    Raises:
        SweepFailed if the value list is empty or every point failed.
    """
    config.validate()
    first = None
    if config.calibrate:
        config, first = _calibrated(config)
    tasks = [_PointTask(i, v, config) for i, v in enumerate(config.values)
             if not (first is not None and i == 0)]
    if config.workers > 1:
        with multiprocessing.Pool(config.workers) as pool:
            rows = pool.map(_run_point, tasks)
    else:
        rows = [_run_point(task) for task in tasks]
    if first is not None:
        rows.insert(0, first)
    table = SweepTable(rows, config)
    if not table.ok_rows():
        raise SweepFailed("Every point of sweep %s failed." %
                          config.sweep_id)
    if table.failed_rows():
        logger.warning("%d of %d points of sweep %s failed",
                       len(table.failed_rows()), len(table),
                       config.sweep_id)
    return table


@dataclass(frozen=True)
class FitResult(object):
    """Least squares line through (ln v, ln T*).

    Attributes:
        slope, intercept: ln T* = intercept + slope ln v.
        r2: Coefficient of determination in [0, 1].
        residuals: Per-point residuals in log space.
        sweep_id: Label of the fitted sweep.
        predicted: (steepest, flattest) predicted slope, if known.
    """
    slope: float
    intercept: float
    r2: float
    residuals: tuple
    sweep_id: str = ""
    predicted: tuple = None

    def row(self):
        return (self.sweep_id, self.slope, self.intercept, self.r2)


def fit_power_law(values, tstars, sweep_id="", predicted=None):
    """Fit T* = exp(intercept) v^slope by least squares in log space.

    Raises:
        PreconditionViolated for fewer than 4 pairs.
        InvalidData for non-positive values.
    """
    values = np.asarray(values, dtype=float)
    tstars = np.asarray(tstars, dtype=float)
    if values.shape != tstars.shape or values.size < MIN_SWEEP_POINTS:
        raise PreconditionViolated("A power-law fit needs at least %d "
                                   "pairs." % MIN_SWEEP_POINTS)
    if np.any(values <= 0) or np.any(tstars <= 0):
        raise InvalidData("Power-law fits need positive values.")
    x, y = np.log(values), np.log(tstars)
    fit = stats.linregress(x, y)
    residuals = y - (fit.intercept + fit.slope * x)
    r2 = min(max(float(fit.rvalue) ** 2, 0.0), 1.0)
    return FitResult(float(fit.slope), float(fit.intercept), r2,
                     tuple(float(r) for r in residuals), sweep_id, predicted)


def fit_sweep(table):
    """fit_power_law over the successful rows of a SweepTable."""
    config = table.config
    rows = table.ok_rows()
    return fit_power_law([config.abscissa(row.value) for row in rows],
                         [row.tstar for row in rows], config.sweep_id,
                         config.predicted_slope())


def _format_prediction(predicted):
    if predicted is None:
        return "NA"
    steep, flat = predicted
    if steep == flat:
        return "%.4g" % steep
    return "between %.4g and %.4g" % (steep, flat)


def summary_text(table, fits, bounds_rows=()):
    """Plain-text comparison of fitted and predicted slopes."""
    lines = ["Lifespan sweep summary", ""]
    for fit in fits:
        lines.append("sweep %s: fitted slope %.4f (R^2 %.4f), predicted "
                     "slope %s" % (fit.sweep_id, fit.slope, fit.r2,
                                   _format_prediction(fit.predicted)))
    lines.append("")
    lines.append("%d rows, %d failed" % (len(table),
                                         len(table.failed_rows())))
    inconsistent = [row.value for row in table.ok_rows()
                    if not row.bounds_consistent()]
    if inconsistent:
        lines.append("rows outside the bounds: %s" %
                     ", ".join(format_float(v) for v in inconsistent))
    if bounds_rows:
        lines.append("%d bounds rows in bounds.csv" % len(bounds_rows))
    lines.append("")
    lines.append(str(table))
    return "\n".join(lines) + "\n"


def emit_report(table, fits, bounds_rows, path):
    """Write sweep.csv, fit.csv, bounds.csv and summary.txt under path.

    Args:
        table: SweepTable (nonempty).
        fits: Sequence of FitResult.
        bounds_rows: Sequence of BoundsReport.
        path: Output directory, created if needed.

    Returns:
        List of written file paths.

    Raises:
        PreconditionViolated for an empty table; ReportError on IO
        failure.
    """
    if not table:
        raise PreconditionViolated("Cannot report an empty sweep.")
    written = [
        write_csv(os.path.join(path, "sweep.csv"), SWEEP_HEADER,
                  table.rows()),
        write_csv(os.path.join(path, "fit.csv"), FIT_HEADER,
                  [fit.row() for fit in fits]),
        write_csv(os.path.join(path, "bounds.csv"), BOUNDS_HEADER,
                  [report.row() for report in bounds_rows]),
        write_text(os.path.join(path, "summary.txt"),
                   summary_text(table, fits, bounds_rows))]
    logger.info("Report written to %s", path)
    return written


def sweep_bounds(table):
    """BoundsReport of every row of a sweep (solver-free)."""
    config = table.config
    reports = []
    for value in table.values():
        q, M0, area = config.point(value)
        patch = centered_patch(config.domain, config.face, area)
        reports.append(bounds_report(_bounds_config(config, q, M0, patch)))
    return reports


@dataclass(frozen=True)
class RefinementCheck(object):
    """T* at M_stop and at M_stop / 2, with the fit's standard error."""
    tstar: float
    tstar_half: float
    stderr: float
    shift: float
    tolerance: float

    @property
    def consistent(self):
        return self.shift <= self.tolerance


def threshold_refinement_check(problem, grid, control=None, rtol=0.01):
    """Re-solve with M_stop halved and compare the T* estimates.

    The shift is accepted up to max(3 stderr, rtol T*).
    """
    control = control or SolveControl()
    full = solve_fd(problem, grid, control)
    level = control.stop_level(problem.M0)
    half = solve_fd(problem, grid, replace(control, m_stop=0.5 * level))
    for result in (full, half):
        if result.estimate is None or not result.estimate.fitted:
            raise PreconditionViolated("Threshold refinement needs two "
                                       "fitted blow-ups.")
    tstar = full.estimate.tstar
    stderr = full.estimate.stderr
    shift = abs(tstar - half.estimate.tstar)
    check = RefinementCheck(tstar, half.estimate.tstar, stderr, shift,
                            max(3.0 * stderr, rtol * tstar))
    logger.info("Threshold refinement: T* %.6g vs %.6g (stderr %.2g)",
                tstar, half.estimate.tstar, stderr)
    return check


@dataclass(frozen=True)
class ConvergenceCheck(object):
    """T* on successively halved grids and the increments between them."""
    nodes_per_unit: tuple
    tstars: tuple

    @property
    def increments(self):
        return tuple(abs(b - a) for a, b in zip(self.tstars,
                                                self.tstars[1:]))

    @property
    def ratios(self):
        """Successive increment ratios (about 4 for second order)."""
        inc = self.increments
        return tuple(a / b for a, b in zip(inc, inc[1:]) if b > 0)

    @property
    def last_increment(self):
        return self.increments[-1] if self.increments else 0.0


def grid_convergence_check(problem, nodes_per_unit=(16, 32, 64),
                           control=None):
    """Estimate T* with the FD solver on each resolution."""
    tstars = []
    for per_unit in nodes_per_unit:
        grid = grid_for_spacing(problem.domain, 1.0 / per_unit)
        result = solve_fd(problem, grid, control)
        if result.estimate is None or not result.estimate.fitted:
            raise PreconditionViolated("Grid %d did not reach a fitted "
                                       "blow-up." % per_unit)
        tstars.append(result.estimate.tstar)
    return ConvergenceCheck(tuple(nodes_per_unit), tuple(tstars))

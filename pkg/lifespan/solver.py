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
"""solver.py

Two independent solvers for

    u_t = Laplace(u) in Omega,  du/dn = u^q on Gamma_1,  du/dn = 0 on
    Gamma_2,  du/dn = u^q / 2 on the interface,  u(., 0) = u0,

plus blow-up time estimation and growth-rate diagnostics.

solve_fd is an explicit finite-difference stepper on node grids (boxes and
the L-shape) in finite-volume form, with the boundary flux entering the
balance of every boundary node whose dual cell touches Gamma_1. solve_volterra
marches the boundary values on Gamma_1 through the representation formula
(boxes only).
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, stats

from .exceptions import (InvalidData, InvalidGeometry,
                         NumericalBlowupArtifact, StepRejected,
                         StiffnessFailure)
from .geometry import GAMMA_1, INTERFACE, grid_for_spacing, surface_nodes
from .neumann_kernel import PatchKernel, RepFormulaInput, initial_term
from .tools import write_csv


logger = logging.getLogger(__name__)

TRACE_HEADER = ("t", "dt", "M", "boundary_max", "mass")
SUMMARY_HEADER = ("run_id", "q", "M0", "gamma1_area", "Tstar", "bracket_lo",
                  "bracket_hi", "beta", "fit_r2", "termination")
UNFITTED_TAIL = "UnfittedTail"
BLOWUP = "blowup"
T_END = "t_end"
MAX_STEPS = "max_steps"


@dataclass(frozen=True)
class Problem(object):
    """One instance of the radiation problem.

    Attributes:
        domain: Domain.
        patch: BoundaryPatch (Gamma_1).
        q: Exponent > 1.
        u0: Constant, callable of (N, n) points, or grid-shaped samples.
        M0: max u0; computed for constants and callables when omitted.
        allow_zero: Accept u0 identically 0 (for validation runs).
    """
    domain: object
    patch: object
    q: float
    u0: object = 1.0
    M0: float = None
    allow_zero: bool = False

    def __post_init__(self):
        if not self.q > 1:
            raise InvalidData("q must exceed 1, got %r." % self.q)
        if self.M0 is None:
            object.__setattr__(self, "M0", self._maximum())
        if self.M0 < 0:
            raise InvalidData("u0 must be nonnegative.")
        if self.M0 == 0 and not self.allow_zero:
            raise InvalidData("u0 must not vanish identically.")

    @property
    def is_constant(self):
        return np.ndim(self.u0) == 0 and not callable(self.u0)

    def _maximum(self):
        if self.is_constant:
            return float(self.u0)
        if callable(self.u0):
            grid = grid_for_spacing(self.domain,
                                    min(self.domain.extents) / 64.0)
            return float(np.max(self.sample(grid)))
        return float(np.max(self.u0))

    def sample(self, grid):
        """u0 on the grid nodes (zero on inactive nodes)."""
        if self.is_constant:
            values = np.full(grid.shape, float(self.u0))
        elif callable(self.u0):
            values = np.asarray(self.u0(grid.points()),
                                dtype=float).reshape(grid.shape)
        else:
            values = np.asarray(self.u0, dtype=float)
            if values.shape != grid.shape:
                raise InvalidData("u0 samples have shape %s, grid is %s." %
                                  (values.shape, grid.shape))
        values = np.where(grid.mask, values, 0.0)
        if np.any(values < 0):
            raise InvalidData("u0 must be nonnegative.")
        return values

    def sample_points(self, points):
        points = np.atleast_2d(points)
        if self.is_constant:
            return np.full(len(points), float(self.u0))
        if callable(self.u0):
            return np.asarray(self.u0(points), dtype=float)
        raise InvalidData("Grid samples of u0 cannot be evaluated at "
                          "arbitrary points.")


@dataclass(frozen=True)
class SolveControl(object):
    """Stopping and stepping controls shared by both solvers.

    Attributes:
        m_stop: Blow-up threshold; None means 1e4 M0.
        safety: Stability safety factor in (0, 1).
        max_steps: Maximum number of steps.
        dt_floor: Smallest admissible step.
        output_every: Record every this many steps (and at 1% growth).
        t_end: Stop at this time instead (comparison windows).
        flux_off: Replace u^q by 0 on all of the boundary.
        snapshot_times: Store the full field at these exact times.
        volterra_dt: Base step of the Volterra marcher.
        volterra_cells: Patch cells per tangential axis (Volterra).
        volterra_regrow: Accepted Volterra steps after which a halved step
            is doubled again, up to volterra_dt.
    """
    m_stop: float = None
    safety: float = 0.9
    max_steps: int = 2000000
    dt_floor: float = 1e-14
    output_every: int = 50
    t_end: float = None
    flux_off: bool = False
    snapshot_times: tuple = ()
    volterra_dt: float = 2e-3
    volterra_cells: int = 32
    volterra_regrow: int = 4

    def __post_init__(self):
        if not 0.0 < self.safety < 1.0:
            raise InvalidData("Safety factor must lie in (0, 1).")
        if min(self.max_steps, self.output_every,
               self.volterra_regrow) < 1:
            raise InvalidData("Step counts must be positive.")

    def stop_level(self, M0):
        if self.m_stop is None:
            return 1e4 * M0 if M0 > 0 else math.inf
        level = self.m_stop
        if M0 > 0 and not level > 10.0 * M0:
            raise InvalidData("M_stop = %g must exceed 10 M0 = %g." %
                              (level, 10.0 * M0))
        return level


@dataclass(frozen=True)
class BlowupEstimate(object):
    """Tail fit of M(t) ~ c (T* - t)^(-beta).

    Attributes:
        tstar: Point estimate (None when the fit failed).
        bracket: (last computed time, T* + standard error); for an
            unfitted tail the upper end is t_last + M/M'.
        beta: Fitted exponent.
        r2: R^2 of the log residuals.
        stderr: Standard error of T*.
        flag: "ok" or "UnfittedTail".
    """
    tstar: float
    bracket: tuple
    beta: float
    r2: float
    stderr: float
    flag: str = "ok"

    @property
    def fitted(self):
        return self.flag == "ok"


@dataclass
class SolveResult(object):
    """Trace of one solve.

    Attributes:
        problem: The Problem solved.
        solver: "fd" or "volterra".
        times, dts: Recorded times and the step taken to reach each.
        maxima: Running maximum M(t).
        boundary_max: max over the patch nodes at each record.
        mass: int u dx (None for the Volterra solver).
        boundary_trace: (records, nodes) values on the patch nodes.
        patch_cells: SurfaceQuadrature of those nodes' cells.
        termination: "blowup", "t_end" or "max_steps".
        estimate: BlowupEstimate when the threshold was reached.
        snapshots: Fields stored at the requested times.
        steps: Steps taken.
        grid: Grid used (FD).
        m_stop: Threshold in force.
    """
    problem: Problem
    solver: str
    times: np.ndarray
    dts: np.ndarray
    maxima: np.ndarray
    boundary_max: np.ndarray
    mass: np.ndarray
    boundary_trace: np.ndarray
    patch_cells: object
    termination: str
    estimate: BlowupEstimate = None
    snapshots: dict = field(default_factory=dict)
    steps: int = 0
    grid: object = None
    m_stop: float = None

    @property
    def t_last(self):
        return float(self.times[-1])

    def maximum_at(self, t):
        """M(t) by linear interpolation of the trace."""
        return np.interp(t, self.times, self.maxima)

    def trace_rows(self):
        mass = self.mass if self.mass is not None else [None] * len(self.times)
        return list(zip(self.times, self.dts, self.maxima, self.boundary_max,
                        mass))

    def to_csv(self, path):
        """Write the trace (t, dt, M, boundary_max, mass)."""
        return write_csv(path, TRACE_HEADER, self.trace_rows())

    def summary_row(self, run_id):
        estimate = self.estimate
        tstar = beta = r2 = None
        lo, hi = self.t_last, None
        if estimate is not None:
            tstar, beta, r2 = estimate.tstar, estimate.beta, estimate.r2
            lo, hi = estimate.bracket
        return (run_id, self.problem.q, self.problem.M0,
                self.problem.patch.area, tstar, lo, hi, beta, r2,
                self.termination)

    def rep_input(self, grid=None):
        """RepFormulaInput carrying this run's boundary history."""
        grid = grid or self.grid
        if grid is None or self.patch_cells is None:
            raise InvalidData("This result carries no grid or patch cells.")
        times = np.asarray(self.times, dtype=float)
        keep = np.append(True, np.diff(times) > 0)
        return RepFormulaInput(grid, self.problem.sample(grid),
                               self.problem.patch, self.patch_cells,
                               times[keep],
                               np.maximum(self.boundary_trace[keep], 0.0),
                               self.problem.q)


def stable_dt(spacing, n, q, level, safety):
    """safety * min(h^2 / 2n, h / (2 q M^(q-1)))."""
    h = min(spacing)
    diffusive = h * h / (2.0 * n)
    if level <= 0:
        return safety * diffusive
    return safety * min(diffusive, h / (2.0 * q * level ** (q - 1.0)))


class _FDStencil(object):
    """Node Laplacian in finite-volume form plus boundary fluxes.

    Each edge carries the share of inside cells around it and each node
    its dual-cell share, so sum(volume * laplacian) vanishes without flux.
    On boxes this is the ghost-node stencil u_ghost = u_inner + 2 h g.
    """

    def __init__(self, grid, patch, flux_off):
        self.mask = grid.mask
        self.spacing = grid.spacing
        share = grid.cell_volumes() / math.prod(grid.spacing)
        self.inverse_share = np.where(
            share > 0, 1.0 / np.where(share > 0, share, 1.0), 0.0)
        self.edges = [grid.edge_weights(axis) for axis in range(grid.n)]
        self.flux = []
        if not flux_off:
            for (axis, _), weight in grid.flux_weights(patch).items():
                if np.any(weight):
                    self.flux.append(2.0 * weight / grid.spacing[axis])

    def laplacian(self, u, power):
        total = np.zeros_like(u)
        for axis, edges in enumerate(self.edges):
            ahead = [slice(None)] * u.ndim
            behind = [slice(None)] * u.ndim
            ahead[axis] = slice(1, None)
            behind[axis] = slice(None, -1)
            ahead, behind = tuple(ahead), tuple(behind)
            flow = np.zeros_like(u)
            flow[behind] = u[ahead] - u[behind]
            flow *= edges / self.spacing[axis] ** 2
            total += flow
            total[ahead] -= flow[behind]
        total *= self.inverse_share
        for weight in self.flux:
            total += weight * power
        return np.where(self.mask, total, 0.0)


def _fd_patch_nodes(grid, patch):
    if patch.shape == "rect":
        return grid.patch_nodes(patch)
    labels = grid.classify_boundary(patch)
    return np.nonzero((labels == GAMMA_1) | (labels == INTERFACE)), None


def solve_fd(problem, grid, control=None):
    """Explicit finite-volume steps with the radiation flux on Gamma_1.

    Raises:
        InvalidGeometry if the grid puts fewer than 4 nodes across the
            patch.
        StiffnessFailure if the adaptive step drops below dt_floor.
        NumericalBlowupArtifact on NaN or overflow.
    """
    control = control or SolveControl()
    if grid.nodes_across(problem.patch) < 4:
        raise InvalidGeometry("The grid resolves the patch by fewer than 4 "
                              "nodes.")
    q = problem.q
    u = problem.sample(grid)
    M0 = float(u.max())
    m_stop = control.stop_level(M0)
    volumes = grid.cell_volumes()
    stencil = _FDStencil(grid, problem.patch, control.flux_off)
    indices, cells = _fd_patch_nodes(grid, problem.patch)
    snapshots_due = sorted(float(s) for s in control.snapshot_times)
    snapshots = {}

    times, dts, maxima, bmax, mass, trace = [], [], [], [], [], []

    def record(t, dt, level):
        boundary = u[indices]
        times.append(t)
        dts.append(dt)
        maxima.append(level)
        bmax.append(float(boundary.max()) if boundary.size else 0.0)
        mass.append(float(np.sum(volumes * u)))
        trace.append(boundary.copy())

    t = 0.0
    level = M0
    record(t, 0.0, level)
    while snapshots_due and snapshots_due[0] <= 0.0:
        snapshots[snapshots_due.pop(0)] = u.copy()
    last_recorded = level
    termination = MAX_STEPS
    step = 0
    with np.errstate(over="raise", invalid="raise"):
        while step < control.max_steps:
            dt = stable_dt(grid.spacing, grid.n, q, level, control.safety)
            if dt < control.dt_floor:
                raise StiffnessFailure("dt = %g fell below the floor %g at "
                                       "t = %g." % (dt, control.dt_floor, t),
                                       time=t, step=step)
            if control.t_end is not None:
                dt = min(dt, control.t_end - t)
            if snapshots_due:
                dt = min(dt, snapshots_due[0] - t)
            try:
                u = u + dt * stencil.laplacian(u, u ** q)
            except FloatingPointError:
                raise NumericalBlowupArtifact(
                    "Overflow in the discrete solution at t = %g." % t,
                    time=t, step=step)
            t += dt
            step += 1
            current = float(u.max())
            if not math.isfinite(current):
                raise NumericalBlowupArtifact(
                    "Non-finite solution at t = %g." % t, time=t, step=step)
            level = max(level, current)
            if snapshots_due and t >= snapshots_due[0] - 1e-15:
                snapshots[snapshots_due.pop(0)] = u.copy()
            stop = None
            if level >= m_stop:
                stop = BLOWUP
            elif control.t_end is not None and t >= control.t_end - 1e-15:
                stop = T_END
            if (stop or step % control.output_every == 0 or
                    level > 1.01 * last_recorded):
                record(t, dt, level)
                last_recorded = level
            if stop:
                termination = stop
                break
        else:
            if times[-1] != t:
                record(t, dt, level)
    if termination == MAX_STEPS:
        logger.warning("FD solve stopped after %d steps at t = %g (M = %g)",
                       step, t, level)
    result = SolveResult(
        problem, "fd", np.array(times), np.array(dts), np.array(maxima),
        np.array(bmax), np.array(mass), np.array(trace), cells, termination,
        snapshots=snapshots, steps=step, grid=grid, m_stop=m_stop)
    if termination == BLOWUP:
        result.estimate = estimate_blowup_time(result.times, result.maxima,
                                               m_stop)
    logger.info("FD solve: %s at t = %.6g after %d steps (M = %.4g)",
                termination, t, step, level)
    return result


def regrow_step(dt, accepted, control):
    """Return (dt, accepted) after an accepted Volterra step.

    Once `accepted` reaches control.volterra_regrow a step below
    volterra_dt is doubled (capped at volterra_dt) and the count restarts.
    """
    if dt < control.volterra_dt and accepted >= control.volterra_regrow:
        logger.debug("Volterra step regrown from %g", dt)
        return min(2.0 * dt, control.volterra_dt), 0
    return dt, accepted


def solve_volterra(problem, evaluator, control=None, grid=None):
    """March u on patch cells through the representation formula.

    Each step predicts with the lagged source u^q at the new time, then
    makes one correction pass. A correction that moves the solution by more
    than half its size rejects the step, which is retried at half the
    step; StepRejected is raised once the step would fall below dt_floor.
    A halved step grows back through regrow_step.

    Args:
        evaluator: KernelEvaluator of the problem's box.
        control: SolveControl; volterra_dt and volterra_cells apply.
        grid: Grid carrying non-constant u0.
    """
    control = control or SolveControl()
    patch = problem.patch
    if not problem.domain.is_box:
        raise InvalidGeometry("The Volterra solver needs a box domain.")
    cells = surface_nodes(patch, control.volterra_cells, "midpoint")
    targets = cells.points
    kernel = PatchKernel(evaluator, patch, targets, cells)
    if problem.is_constant:
        grid = grid or grid_for_spacing(problem.domain,
                                        min(problem.domain.extents) / 4.0)
    elif grid is None:
        raise InvalidData("Non-constant u0 needs a grid for the Volterra "
                          "solver.")
    u0_grid = problem.sample(grid)
    q = problem.q
    M0 = problem.M0
    m_stop = control.stop_level(M0)

    times = [0.0]
    values = [problem.sample_points(targets)]
    sources = [np.zeros(len(cells)) if control.flux_off else values[0] ** q]
    maxima = [M0]
    dts = [0.0]
    dt = control.volterra_dt
    accepted = 0
    termination = MAX_STEPS
    step = 0
    while step < control.max_steps:
        if control.t_end is not None:
            dt = min(dt, control.t_end - times[-1])
        t_new = times[-1] + dt
        free = initial_term(evaluator, targets, u0_grid, grid, t_new)
        if not control.flux_off:
            for k in range(len(times) - 1):
                start, end = kernel.weights(t_new - times[k + 1],
                                            t_new - times[k])
                free = free + start @ sources[k] + end @ sources[k + 1]
            start, end = kernel.weights(0.0, t_new - times[-1])
            free = free + start @ sources[-1]
            predicted = free + end @ sources[-1]
            corrected = free + end @ np.maximum(predicted, 0.0) ** q
            scale = max(float(np.max(np.abs(predicted))), 1e-300)
            update = float(np.max(np.abs(corrected - predicted))) / scale
            if update > 0.5:
                dt *= 0.5
                accepted = 0
                logger.warning("Volterra step at t = %g rejected (update "
                               "%.3g); halving to %g", times[-1], update, dt)
                if dt < control.dt_floor:
                    raise StepRejected("Fixed-point correction not "
                                       "contractive at t = %g." % times[-1],
                                       time=times[-1], step=step)
                continue
        else:
            corrected = free
        if not np.all(np.isfinite(corrected)):
            raise NumericalBlowupArtifact("Non-finite boundary values at "
                                          "t = %g." % t_new, time=t_new,
                                          step=step)
        step += 1
        times.append(t_new)
        dts.append(dt)
        dt, accepted = regrow_step(dt, accepted + 1, control)
        values.append(corrected)
        sources.append(np.zeros(len(cells)) if control.flux_off
                       else np.maximum(corrected, 0.0) ** q)
        maxima.append(max(maxima[-1], float(corrected.max())))
        if maxima[-1] >= m_stop:
            termination = BLOWUP
            break
        if control.t_end is not None and t_new >= control.t_end - 1e-15:
            termination = T_END
            break
    trace = np.array(values)
    result = SolveResult(
        problem, "volterra", np.array(times), np.array(dts), np.array(maxima),
        trace.max(axis=1), None, trace, cells, termination, steps=step,
        grid=grid, m_stop=m_stop)
    if termination == BLOWUP:
        result.estimate = estimate_blowup_time(result.times, result.maxima,
                                               m_stop)
    logger.info("Volterra solve: %s at t = %.6g after %d steps, %d cached "
                "weight pairs", termination, times[-1], step, len(kernel))
    return result


def _power_law(t, log_c, beta, tstar):
    return log_c - beta * np.log(tstar - t)


def _unfitted(t_last, times, maxima):
    # Residual time M / M' from the last two records.
    slope = (maxima[-1] - maxima[-2]) / max(times[-1] - times[-2], 1e-300)
    residual = maxima[-1] / slope if slope > 0 else np.inf
    logger.warning("Blow-up tail could not be fitted; bracket [%g, %g]",
                   t_last, t_last + residual)
    return BlowupEstimate(None, (t_last, t_last + residual), None, None, None,
                          UNFITTED_TAIL)


def estimate_blowup_time(times, maxima, m_stop=None):
    """Fit M(t) ~ c (T* - t)^(-beta) on the tail M >= M_stop / 100.

    The starting guess comes from the log-derivative: 1 / (d ln M / dt)
    is linear in t with slope -1/beta and root T*.

    Returns:
        BlowupEstimate; flag "UnfittedTail" when the fit fails.
    """
    times = np.asarray(times, dtype=float)
    maxima = np.asarray(maxima, dtype=float)
    keep = np.append(True, np.diff(times) > 0)
    times, maxima = times[keep], maxima[keep]
    m_stop = float(maxima.max()) if m_stop is None else m_stop
    t_last = float(times[-1])
    tail = maxima >= m_stop / 100.0
    if np.count_nonzero(tail) < 5:
        return _unfitted(t_last, times, maxima)
    t = times[tail]
    log_m = np.log(maxima[tail])
    rate = np.diff(log_m) / np.diff(t)
    usable = rate > 0
    try:
        if np.count_nonzero(usable) < 3:
            raise ValueError("flat tail")
        mids = 0.5 * (t[1:] + t[:-1])
        fit = stats.linregress(mids[usable], 1.0 / rate[usable])
        beta0 = -1.0 / fit.slope if fit.slope < 0 else 1.0
        tstar0 = fit.intercept * beta0
        gap = max(t_last - t[0], 1e-12)
        floor = t_last + 1e-12 * max(1.0, t_last)
        if not tstar0 > floor + 1e-6 * gap:
            tstar0 = floor + 1e-3 * gap
        log_c0 = float(np.mean(log_m + beta0 * np.log(tstar0 - t)))
        params, cov = optimize.curve_fit(
            _power_law, t, log_m, p0=(log_c0, min(max(beta0, 1e-2), 49.0),
                                      tstar0),
            bounds=((-np.inf, 1e-3, floor),
                    (np.inf, 50.0, np.inf)),
            maxfev=20000)
    except (RuntimeError, ValueError, optimize.OptimizeWarning) as error:
        logger.debug("Tail fit failed: %s", error)
        return _unfitted(t_last, times, maxima)
    log_c, beta, tstar = (float(p) for p in params)
    stderr = float(np.sqrt(max(cov[2, 2], 0.0))) if np.all(
        np.isfinite(cov)) else 0.0
    residuals = log_m - _power_law(t, *params)
    total = np.sum((log_m - log_m.mean()) ** 2)
    r2 = float(1.0 - np.sum(residuals ** 2) / total) if total > 0 else 1.0
    r2 = min(max(r2, 0.0), 1.0)
    logger.debug("Tail fit: T* = %.8g +/- %.2g, beta = %.4g, R^2 = %.6f",
                 tstar, stderr, beta, r2)
    return BlowupEstimate(tstar, (t_last, tstar + stderr), beta, r2, stderr)


@dataclass(frozen=True)
class GrowthTable(object):
    """Rows (T, t, left side, predicted order, ratio) and their sup."""
    rows: tuple
    constant: float
    alpha: object


def growth_order(patch_area, n, t, alpha):
    """|Gamma_1|^alpha t^([1-(n-1)alpha]/2), or the critical factor."""
    if alpha == "critical":
        if n == 2:
            return patch_area * math.log1p(1.0 / patch_area)
        return patch_area ** (1.0 / (n - 1))
    return patch_area ** alpha * t ** (0.5 * (1.0 - (n - 1) * alpha))


def growth_rate_check(trace, patch, alpha, samples=20, lags=None):
    """Empirical constant of (M(T+t) - M(T)) / M^q(T+t) <= C order.

    Args:
        trace: SolveResult.
        patch: The run's patch.
        alpha: Exponent in [0, 1/(n-1)], or "critical".
        samples: Number of base times T.
        lags: Offsets t < 1; defaults to a log grid on [1e-3, 0.5].
    """
    n = patch.n
    if alpha != "critical" and not 0.0 <= alpha <= 1.0 / (n - 1) + 1e-15:
        raise InvalidData("alpha must lie in [0, 1/(n-1)].")
    times = np.asarray(trace.times, dtype=float)
    maxima = np.asarray(trace.maxima, dtype=float)
    q = trace.problem.q
    lags = np.geomspace(1e-3, 0.5, 12) if lags is None else lags
    bases = np.linspace(times[0], times[-1], samples, endpoint=False)
    rows = []
    for base in bases:
        for lag in lags:
            if not 0 < lag < 1 or base + lag > times[-1]:
                continue
            start = np.interp(base, times, maxima)
            end = np.interp(base + lag, times, maxima)
            left = (end - start) / end ** q
            order = growth_order(patch.area, n, lag, alpha)
            rows.append((float(base), float(lag), float(left), order,
                         float(left / order)))
    constant = max((row[-1] for row in rows), default=0.0)
    return GrowthTable(tuple(rows), constant, alpha)

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
"""python-lifespan

Numerical lab for the lifespan of the heat equation with a nonlinear
radiation condition du/dn = u^q on a patch Gamma_1 of the boundary.

"import lifespan" to import all public classes and functions.

Public package contents include:
    bounds: Closed-form upper and lower lifespan bounds, the discrete
        schedules behind them, and constant calibration.
    experiments: Sweeps over M0, |Gamma_1| and q, power-law fits and
        CSV/text reports.
    exceptions: python-lifespan custom exceptions.
    freespace: Free-space heat kernel, the radial model integral phi_n and
        its envelopes, boundary-time integrals over patches.
    geometry: Boxes, the L-shape, boundary patches, surface quadratures
        and node grids.
    lab_prefs: Class for loading a run configuration from a JSON file.
    neumann_kernel: Neumann heat kernel of a box and the representation
        formula.
    solver: Finite-difference and Volterra solvers, blow-up time
        estimation and growth-rate diagnostics.

Private package contents include:
    cli: The `lifespan` command.
    tools: Assorted functions for common tasks used throughout the
        package.
"""
__version__ = "1.0.0"

from .exceptions import *
from .geometry import (
    Domain,
    DomainKind,
    BoundaryPatch,
    Grid,
    SurfaceQuadrature,
    flat_ball,
    grid_for_spacing,
    make_box,
    make_disk_patch,
    make_grid,
    make_lshape,
    make_patch,
    surface_nodes,
)
from .freespace import (
    QuadratureControl,
    boundary_time_integral,
    phi,
    phi_n,
    phi_n_radial,
    phi_n_sandwich,
    sharpness_ratio,
    surface_integral,
)
from .neumann_kernel import (
    KernelEvaluator,
    PatchKernel,
    RepFormulaInput,
    Truncation,
    initial_term,
    kernel_box,
    make_rep_input,
    rep_formula_eval,
)
from .solver import (
    BlowupEstimate,
    Problem,
    SolveControl,
    SolveResult,
    estimate_blowup_time,
    growth_rate_check,
    solve_fd,
    solve_volterra,
)
from .bounds import (
    BoundsConfig,
    bounds_report,
    critical_schedule,
    doubling_schedule,
    e_q,
    g_root,
    lower_bound_critical,
    lower_bound_general,
    series_lower_bound,
    upper_bound,
)
from .experiments import (
    FitResult,
    SweepConfig,
    SweepTable,
    emit_report,
    fit_power_law,
    run_sweep,
    threshold_refinement_check,
)
from .lab_prefs import LabPrefs

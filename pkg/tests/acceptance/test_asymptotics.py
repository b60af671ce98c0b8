import math

import numpy as np
import pytest

from lifespan import SolveControl, SweepConfig, grid_for_spacing, run_sweep
from lifespan import growth_rate_check, solve_fd, threshold_refinement_check
from lifespan.bounds import gamma_factor
from lifespan.experiments import (centered_patch, fit_sweep,
                                  grid_convergence_check, patch_grid)
from lifespan.solver import Problem


pytestmark = pytest.mark.slow


def assert_below_upper_bound(table, tolerance=0.05):
    for row in table:
        assert row.tstar <= row.upper_bound * (1.0 + tolerance)


class TestInitialDataSweep(object):

    @pytest.mark.parametrize("q", [2.0, 1.5])
    def test_slope_in_initial_maximum(self, square, q):
        config = SweepConfig("M0", [0.25, 0.5, 1.0, 2.0, 4.0], square, q=q,
                             nodes_per_unit=32, calibrate=True)
        table = run_sweep(config)
        assert len(table.ok_rows()) == 5
        tstars = list(table.tstars())
        assert all(a > b for a, b in zip(tstars, tstars[1:]))
        assert_below_upper_bound(table)
        for row in table:
            assert row.lower_general <= row.bracket_hi * (1.0 + 1e-9)
        fit = fit_sweep(table)
        # Uniform heating gives -(q - 1); a boundary layer steepens it
        # towards -2(q - 1) as M0 grows.
        assert -2.3 * (q - 1.0) <= fit.slope <= -0.85 * (q - 1.0)
        assert fit.r2 > 0.95


class TestPatchSweep(object):

    @pytest.fixture(scope="class")
    def table(self, square):
        config = SweepConfig("Gamma1Area", [0.5, 0.25, 0.125, 0.0625], square,
                             nodes_per_unit=16, min_patch_nodes=5)
        return run_sweep(config)

    def test_lifespan_grows_as_patch_shrinks(self, table):
        assert len(table.ok_rows()) == 4
        tstars = list(table.tstars())
        assert all(a < b for a, b in zip(tstars, tstars[1:]))
        assert_below_upper_bound(table)

    def test_slope(self, table):
        fit = fit_sweep(table)
        assert -1.2 <= fit.slope <= -0.6

    def test_critical_order(self, table):
        # T* (q - 1) Y is the constant the critical lower bound needs.
        implied = [row.tstar * gamma_factor(row.value, 2) for row in table]
        assert max(implied) / min(implied) <= 5.0


class TestSelfConsistency(object):

    def test_threshold_refinement(self, baseline_problem, square):
        grid = grid_for_spacing(square, 1.0 / 32)
        check = threshold_refinement_check(baseline_problem, grid)
        assert check.consistent

    def test_grid_convergence(self, baseline_problem):
        check = grid_convergence_check(baseline_problem, (16, 32, 64))
        assert check.increments[1] < check.increments[0]
        assert check.last_increment / check.tstars[-1] < 0.05

    def test_upper_bound_on_baseline(self, baseline_fd):
        assert baseline_fd.estimate.tstar <= 2.0 * 1.05


class TestGrowthRate(object):

    @pytest.mark.parametrize("area", [0.5, 0.25, 0.125])
    def test_critical_constant_is_finite(self, square, area):
        patch = centered_patch(square, "y-", area)
        problem = Problem(square, patch, 2.0, 1.0)
        grid = patch_grid(square, patch, 16, 8)
        result = solve_fd(problem, grid, SolveControl(output_every=20))
        table = growth_rate_check(result, patch, "critical")
        assert table.rows
        assert 0.0 < table.constant < math.inf
        assert np.isfinite([row[2] for row in table.rows]).all()

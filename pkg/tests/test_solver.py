import math

import numpy as np
import pytest

from lifespan import (InvalidData, InvalidGeometry, Problem, SolveControl,
                      StiffnessFailure, estimate_blowup_time,
                      grid_for_spacing, growth_rate_check, make_grid,
                      solve_fd, solve_volterra)
from lifespan.solver import (BLOWUP, SUMMARY_HEADER, T_END, UNFITTED_TAIL,
                             growth_order, regrow_step, stable_dt)


def bump(points):
    points = np.atleast_2d(points)
    return 1.0 + np.exp(-np.sum((points - 0.3) ** 2, axis=-1) / 0.02)


@pytest.fixture
def fine_grid(unit_square):  # type: (Domain) -> Grid
    return grid_for_spacing(unit_square, 1.0 / 16)


class TestProblem(object):

    def test_q_above_one(self, unit_square, bottom_patch):
        with pytest.raises(InvalidData):
            Problem(unit_square, bottom_patch, 1.0)

    def test_zero_data(self, unit_square, bottom_patch):
        with pytest.raises(InvalidData):
            Problem(unit_square, bottom_patch, 2.0, 0.0)
        problem = Problem(unit_square, bottom_patch, 2.0, 0.0,
                          allow_zero=True)
        assert problem.M0 == 0.0

    def test_callable_maximum(self, unit_square, bottom_patch):
        problem = Problem(unit_square, bottom_patch, 2.0, bump)
        assert 1.9 < problem.M0 <= 2.0
        assert not problem.is_constant

    def test_grid_samples_shape(self, unit_square, bottom_patch, fine_grid):
        problem = Problem(unit_square, bottom_patch, 2.0, np.ones((3, 3)))
        with pytest.raises(InvalidData):
            problem.sample(fine_grid)


class TestSolveControl(object):

    def test_stop_level(self):
        control = SolveControl()
        assert control.stop_level(1.0) == pytest.approx(1e4)
        assert control.stop_level(0.0) == math.inf
        with pytest.raises(InvalidData):
            SolveControl(m_stop=5.0).stop_level(1.0)

    def test_safety_factor(self):
        with pytest.raises(InvalidData):
            SolveControl(safety=1.0)

    def test_stable_dt(self):
        assert stable_dt((0.1, 0.1), 2, 2.0, 1.0, 1.0) == pytest.approx(
            0.0025)
        assert stable_dt((0.1, 0.1), 2, 2.0, 100.0, 1.0) == pytest.approx(
            2.5e-4)


class TestSolveFD(object):

    def test_constant_data_without_flux(self, baseline, fine_grid):
        control = SolveControl(t_end=0.05, flux_off=True)
        result = solve_fd(baseline, fine_grid, control)
        assert result.termination == T_END
        assert result.t_last == pytest.approx(0.05)
        assert np.all(result.maxima == 1.0)
        assert result.estimate is None

    def test_mass_conserved_without_flux(self, unit_square, bottom_patch,
                                         fine_grid):
        problem = Problem(unit_square, bottom_patch, 2.0, bump)
        control = SolveControl(t_end=0.05, flux_off=True,
                               snapshot_times=(0.01, 0.03))
        result = solve_fd(problem, fine_grid, control)
        assert result.mass[-1] == pytest.approx(result.mass[0], rel=1e-10)
        early, late = result.snapshots[0.01], result.snapshots[0.03]
        assert late.max() <= early.max() <= problem.M0

    def test_mass_conserved_on_lshape(self, lshape, lshape_patch):
        grid = grid_for_spacing(lshape, 1.0 / 16)
        problem = Problem(lshape, lshape_patch, 2.0, bump)
        control = SolveControl(t_end=0.05, flux_off=True)
        result = solve_fd(problem, grid, control)
        assert result.termination == T_END
        assert result.mass[-1] == pytest.approx(result.mass[0], rel=1e-10)

    def test_baseline_blows_up(self, baseline, fine_grid):
        result = solve_fd(baseline, fine_grid)
        assert result.termination == BLOWUP
        assert result.maxima[-1] >= 1e4
        estimate = result.estimate
        assert estimate.fitted
        assert 0.0 < estimate.tstar <= 2.1
        assert estimate.bracket[0] == result.t_last
        assert result.t_last <= estimate.tstar
        assert np.all(np.diff(result.maxima) >= 0)

    def test_flux_raises_the_solution(self, baseline, fine_grid):
        control = SolveControl(t_end=0.05)
        result = solve_fd(baseline, fine_grid, control)
        assert result.maxima[-1] > 1.0
        assert result.mass[-1] > result.mass[0]

    def test_step_floor(self, baseline, fine_grid):
        with pytest.raises(StiffnessFailure) as error:
            solve_fd(baseline, fine_grid, SolveControl(dt_floor=1.0))
        assert error.value.step == 0

    def test_patch_must_be_resolved(self, baseline, unit_square):
        with pytest.raises(InvalidGeometry):
            solve_fd(baseline, make_grid(unit_square, [5, 5]))

    def test_snapshots(self, baseline, fine_grid):
        control = SolveControl(t_end=0.02, snapshot_times=(0.0, 0.01))
        result = solve_fd(baseline, fine_grid, control)
        assert set(result.snapshots) == {0.0, 0.01}
        assert result.snapshots[0.0].shape == fine_grid.shape

    def test_outputs(self, baseline, fine_grid, tmpdir):
        result = solve_fd(baseline, fine_grid, SolveControl(t_end=0.01))
        path = str(tmpdir.join("trace.csv"))
        result.to_csv(path)
        with open(path) as handle:
            assert handle.readline().strip() == "t,dt,M,boundary_max,mass"
        row = result.summary_row("run-1")
        assert len(row) == len(SUMMARY_HEADER)
        assert row[-1] == T_END
        rep = result.rep_input()
        assert rep.times[0] == 0.0
        assert rep.boundary.shape == (len(rep.times), len(rep.cells))


class TestEstimate(object):

    def test_simple_pole(self):
        times = np.linspace(0.0, 0.999, 1000)
        estimate = estimate_blowup_time(times, 1.0 / (1.0 - times))
        assert estimate.fitted
        assert estimate.tstar == pytest.approx(1.0, abs=1e-4)
        assert estimate.beta == pytest.approx(1.0, abs=1e-2)
        assert estimate.r2 > 0.999

    def test_square_root_pole(self):
        times = 0.5 - 0.5 * np.geomspace(1.0, 1e-6, 100)
        maxima = 2.0 * (0.5 - times) ** -0.5
        estimate = estimate_blowup_time(times, maxima)
        assert estimate.tstar == pytest.approx(0.5, abs=1e-4)
        assert estimate.beta == pytest.approx(0.5, abs=1e-2)

    def test_short_tail(self):
        estimate = estimate_blowup_time(np.linspace(0.0, 1.0, 3),
                                        [1.0, 2.0, 4.0])
        assert estimate.flag == UNFITTED_TAIL
        assert not estimate.fitted
        assert estimate.tstar is None
        assert estimate.bracket == pytest.approx((1.0, 2.0))


class TestGrowthRate(object):

    def test_alpha_range(self, baseline, fine_grid, bottom_patch):
        result = solve_fd(baseline, fine_grid, SolveControl(t_end=0.01))
        with pytest.raises(InvalidData):
            growth_rate_check(result, bottom_patch, 2.0)

    @pytest.mark.parametrize("alpha", [0.0, 0.5, "critical"])
    def test_constant_is_finite(self, baseline, fine_grid, bottom_patch,
                                alpha):
        result = solve_fd(baseline, fine_grid, SolveControl(t_end=0.3))
        table = growth_rate_check(result, bottom_patch, alpha)
        assert table.rows
        assert 0.0 < table.constant < math.inf

    def test_critical_order(self):
        assert growth_order(0.25, 2, 0.1, "critical") == pytest.approx(
            0.25 * math.log(5.0))
        assert growth_order(0.25, 3, 0.1, "critical") == pytest.approx(0.5)
        assert growth_order(0.25, 2, 0.04, 0.0) == pytest.approx(0.2)


class TestSolveVolterra(object):

    def test_constant_data_without_flux(self, baseline, evaluator):
        control = SolveControl(t_end=0.01, flux_off=True, volterra_cells=8)
        result = solve_volterra(baseline, evaluator, control)
        assert result.termination == T_END
        assert np.allclose(result.boundary_trace, 1.0, atol=1e-8)
        assert result.mass is None

    def test_needs_a_box(self, lshape, lshape_patch, evaluator):
        problem = Problem(lshape, lshape_patch, 2.0, 1.0)
        with pytest.raises(InvalidGeometry):
            solve_volterra(problem, evaluator)

    def test_grid_samples_need_a_grid(self, unit_square, bottom_patch,
                                      evaluator):
        problem = Problem(unit_square, bottom_patch, 2.0, bump)
        with pytest.raises(InvalidData):
            solve_volterra(problem, evaluator,
                           SolveControl(volterra_cells=8))

    def test_flux_raises_the_solution(self, baseline, evaluator):
        control = SolveControl(t_end=0.02, volterra_cells=8)
        result = solve_volterra(baseline, evaluator, control)
        assert result.termination == T_END
        assert result.boundary_max[-1] > 1.0
        assert np.all(np.diff(result.boundary_max) >= -1e-10)
        assert result.solver == "volterra"
        assert result.dts[1:].max() <= control.volterra_dt


class TestRegrowStep(object):

    @pytest.fixture
    def control(self):  # type: () -> SolveControl
        return SolveControl(volterra_dt=1e-2, volterra_regrow=3)

    def test_waits_for_accepted_steps(self, control):
        assert regrow_step(2.5e-3, 2, control) == (2.5e-3, 2)
        assert regrow_step(2.5e-3, 3, control) == (5e-3, 0)

    def test_capped_at_base_step(self, control):
        assert regrow_step(8e-3, 3, control) == (1e-2, 0)
        assert regrow_step(1e-2, 10, control) == (1e-2, 10)

    def test_returns_to_base_after_halvings(self, control):
        dt, accepted = 1e-2 / 8.0, 0
        history = []
        for _ in range(9):
            dt, accepted = regrow_step(dt, accepted + 1, control)
            history.append(dt)
        assert history[2] == pytest.approx(2.5e-3)
        assert history[5] == pytest.approx(5e-3)
        assert history[-1] == 1e-2

    def test_needs_a_positive_count(self):
        with pytest.raises(InvalidData):
            SolveControl(volterra_regrow=0)

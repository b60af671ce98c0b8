import os
from dataclasses import replace

import numpy as np
import pytest

from lifespan import (FitResult, InvalidData, PreconditionViolated,
                      SolveControl, SweepConfig, SweepFailed, SweepTable,
                      emit_report, fit_power_law, run_sweep)
from lifespan.experiments import (SweepRow, centered_patch, fit_sweep,
                                  patch_grid, summary_text, sweep_bounds)


@pytest.fixture
def m0_config(unit_square):  # type: (Domain) -> SweepConfig
    return SweepConfig("M0", [1.0, 2.0, 4.0, 8.0], unit_square,
                       nodes_per_unit=16)


@pytest.fixture
def manual_table(m0_config):  # type: (SweepConfig) -> SweepTable
    rows = [SweepRow(index, value, tstar=tstar, bracket_lo=0.99 * tstar,
                     bracket_hi=1.01 * tstar, lower_general=0.01,
                     upper_bound=2.0 / value, regime="not-applicable")
            for index, value, tstar in ((2, 4.0, 0.2), (0, 1.0, 0.8),
                                        (3, 8.0, 0.1), (1, 2.0, 0.4))]
    return SweepTable(rows, m0_config)


class TestSweepConfig(object):

    def test_unknown_variable(self, unit_square):
        with pytest.raises(InvalidData):
            SweepConfig("Area", [1.0, 2.0, 3.0, 4.0], unit_square)

    def test_unknown_solver(self, unit_square):
        with pytest.raises(InvalidData):
            SweepConfig("M0", [1.0, 2.0, 3.0, 4.0], unit_square,
                        solver="spectral")

    def test_empty_values(self, unit_square):
        with pytest.raises(SweepFailed):
            SweepConfig("M0", [], unit_square).validate()

    @pytest.mark.parametrize("variable,values", [
        ("M0", [1.0, 2.0, 3.0]),
        ("M0", [1.0, 3.0, 2.0, 4.0]),
        ("M0", [0.0, 1.0, 2.0, 3.0]),
        ("Q", [1.0, 1.5, 2.0, 2.5]),
        ("Gamma1Area", [0.25, 0.5, 1.0, 2.0])])
    def test_invalid_values(self, unit_square, variable, values):
        with pytest.raises(InvalidData):
            SweepConfig(variable, values, unit_square).validate()

    def test_point(self, unit_square):
        config = SweepConfig("Q", [1.5, 2.0, 2.5, 3.0], unit_square)
        assert config.point(3.0) == (3.0, 1.0, 0.5)
        assert config.abscissa(3.0) == 2.0
        assert config.sweep_id == "Q"

    def test_predicted_slope(self, unit_square, unit_cube):
        assert SweepConfig("M0", [1, 2, 3, 4], unit_square,
                           q=3.0).predicted_slope() == (-2.0, -2.0)
        area = SweepConfig("Gamma1Area", [0.1, 0.2, 0.3, 0.4], unit_cube,
                           face="z-")
        assert area.predicted_slope() == (-1.0, -0.5)


class TestPatches(object):

    def test_centered_patch(self, unit_square, unit_cube):
        assert centered_patch(unit_square, "y-", 0.1).area == \
            pytest.approx(0.1)
        patch = centered_patch(unit_cube, "z-", 0.25)
        assert patch.area == pytest.approx(0.25)
        assert patch.center == pytest.approx((0.5, 0.5, 0.0))

    def test_patch_grid_resolves_small_patch(self, unit_square):
        patch = centered_patch(unit_square, "y-", 0.1)
        grid = patch_grid(unit_square, patch, 8, 8)
        assert grid.nodes_across(patch) >= 8


class TestFit(object):

    def test_exact_power_law(self):
        values = np.geomspace(0.01, 1.0, 6)
        fit = fit_power_law(values, 1.0 / values)
        assert fit.slope == pytest.approx(-1.0)
        assert fit.r2 == pytest.approx(1.0)
        assert max(abs(r) for r in fit.residuals) < 1e-10

    def test_noisy_power_law(self):
        rng = np.random.default_rng(3)
        values = np.geomspace(0.01, 1.0, 8)
        tstars = 3.0 * values ** -0.5 * (1.0 + 0.01 * rng.standard_normal(8))
        fit = fit_power_law(values, tstars)
        assert fit.slope == pytest.approx(-0.5, abs=0.05)
        assert fit.intercept == pytest.approx(np.log(3.0), abs=0.05)

    def test_logarithmic_correction_flattens_slope(self):
        values = np.geomspace(1e-3, 1e-1, 8)
        fit = fit_power_law(values, 1.0 / (values * np.log(1.0 / values)))
        assert -1.0 < fit.slope < -0.5

    def test_needs_four_pairs(self):
        with pytest.raises(PreconditionViolated):
            fit_power_law([1.0, 2.0, 3.0], [1.0, 0.5, 0.3])

    def test_needs_positive_values(self):
        with pytest.raises(InvalidData):
            fit_power_law([1.0, 2.0, 3.0, 4.0], [1.0, 0.5, 0.0, 0.2])

    def test_row(self):
        fit = FitResult(-1.0, 0.5, 0.99, (), "M0")
        assert fit.row() == ("M0", -1.0, 0.5, 0.99)


class TestSweepTable(object):

    def test_rows_are_sorted(self, manual_table):
        assert list(manual_table.values()) == [1.0, 2.0, 4.0, 8.0]
        assert list(manual_table.tstars()) == [0.8, 0.4, 0.2, 0.1]
        assert len(manual_table.ok_rows()) == 4

    def test_str(self, manual_table):
        text = str(manual_table)
        assert text.startswith("M0 SweepTable")
        assert "Tstar" in text
        assert len(text.splitlines()) == 9

    def test_bounds_consistent(self):
        row = SweepRow(0, 1.0, tstar=1.0, bracket_lo=0.9, bracket_hi=1.1,
                       lower_general=0.5, upper_bound=2.0)
        assert row.bounds_consistent()
        assert not SweepRow(0, 1.0, tstar=1.0, bracket_lo=0.9,
                            bracket_hi=1.1,
                            lower_general=1.5).bounds_consistent()
        assert not SweepRow(0, 1.0, error="failed").bounds_consistent()

    def test_fit_sweep(self, manual_table):
        fit = fit_sweep(manual_table)
        assert fit.slope == pytest.approx(-1.0)
        assert fit.predicted == (-1.0, -1.0)

    def test_sweep_bounds(self, manual_table):
        reports = sweep_bounds(manual_table)
        assert [report.M0 for report in reports] == [1.0, 2.0, 4.0, 8.0]
        assert reports[0].upper == pytest.approx(2.0)


class TestReport(object):

    def test_emit_report(self, manual_table, tmpdir):
        fits = [fit_sweep(manual_table)]
        path = str(tmpdir.join("report"))
        written = emit_report(manual_table, fits,
                              sweep_bounds(manual_table), path)
        assert sorted(os.path.basename(p) for p in written) == [
            "bounds.csv", "fit.csv", "summary.txt", "sweep.csv"]
        with open(os.path.join(path, "sweep.csv")) as handle:
            lines = handle.read().splitlines()
        assert lines[0].startswith("value,Tstar,bracket_lo")
        assert len(lines) == 5
        with open(os.path.join(path, "summary.txt")) as handle:
            assert "fitted slope -1.0000" in handle.read()

    def test_empty_table(self, m0_config, tmpdir):
        with pytest.raises(PreconditionViolated):
            emit_report(SweepTable([], m0_config), [], [], str(tmpdir))

    def test_summary_lists_inconsistent_rows(self, manual_table):
        manual_table.append(SweepRow(4, 16.0, tstar=5.0, bracket_lo=5.0,
                                     bracket_hi=5.1, upper_bound=0.125))
        assert "rows outside the bounds: 16.0" in summary_text(
            manual_table, [])


class TestRunSweep(object):

    def test_m0_sweep(self, m0_config):
        table = run_sweep(m0_config)
        assert len(table) == 4
        assert all(row.ok for row in table)
        tstars = list(table.tstars())
        assert all(a > b for a, b in zip(tstars, tstars[1:]))
        fit = fit_sweep(table)
        assert fit.slope < 0
        assert fit.r2 > 0.9

    def test_every_point_failing(self, m0_config):
        config = replace(m0_config, control=SolveControl(t_end=1e-3))
        with pytest.raises(SweepFailed):
            run_sweep(config)

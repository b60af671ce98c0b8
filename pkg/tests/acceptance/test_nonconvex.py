import pytest

from lifespan import (BoundsConfig, Problem, SolveControl, grid_for_spacing,
                      lower_bound_general, make_lshape, make_patch, solve_fd,
                      upper_bound)
from lifespan.bounds import calibrate_general_constant, upper_bound_constant
from lifespan.solver import BLOWUP


pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def lshape():  # type: () -> Domain
    return make_lshape([1.0, 1.0], 0.5)


@pytest.fixture(scope="module")
def corner_patch(lshape):  # type: (Domain) -> BoundaryPatch
    """[0.5, 0.75] on the inner edge y = 0.5, touching the inner corner."""
    return make_patch(lshape, "inner-y", [0.5, 0.75])


@pytest.fixture(scope="module")
def runs(lshape, corner_patch):  # type: (...) -> dict
    grid = grid_for_spacing(lshape, 1.0 / 32)
    control = SolveControl(output_every=20)
    return {M0: solve_fd(Problem(lshape, corner_patch, 2.0, M0), grid,
                         control)
            for M0 in (1.0, 2.0)}


def bounds_config(lshape, patch, M0, C_general=1.0):
    return BoundsConfig(q=2.0, M0=M0, gamma1_area=patch.area,
                        omega_volume=lshape.volume, n=2, C_general=C_general)


class TestLShape(object):

    def test_blows_up_in_finite_time(self, runs):
        for result in runs.values():
            assert result.termination == BLOWUP
            assert result.estimate is not None and result.estimate.fitted
            assert result.estimate.tstar > 0
        assert runs[2.0].estimate.tstar < runs[1.0].estimate.tstar

    def test_below_the_upper_bound(self, lshape, corner_patch, runs):
        for M0, result in runs.items():
            bound = upper_bound_constant(2.0, M0, corner_patch.area,
                                         lshape.volume)
            assert result.estimate.bracket[0] <= 1.05 * bound
        grid = runs[1.0].grid
        assert upper_bound(2.0, corner_patch.area,
                           runs[1.0].problem.sample(grid),
                           grid.cell_volumes()) == pytest.approx(
            upper_bound_constant(2.0, 1.0, corner_patch.area, lshape.volume),
            rel=1e-9)

    def test_calibrated_general_lower_bound(self, lshape, corner_patch,
                                            runs):
        # The constant is fixed on the M0 = 1 run and reused at M0 = 2.
        measured = runs[1.0].estimate.tstar
        C = calibrate_general_constant(
            bounds_config(lshape, corner_patch, 1.0), measured)
        calibrated = bounds_config(lshape, corner_patch, 1.0, C)
        assert lower_bound_general(calibrated) == pytest.approx(measured)
        config = bounds_config(lshape, corner_patch, 2.0, C)
        assert runs[2.0].estimate.tstar >= lower_bound_general(config)

import pytest

from lifespan import (KernelEvaluator, Problem, SolveControl,
                      grid_for_spacing, make_box, make_patch, solve_fd)


@pytest.fixture(scope="session")
def square():  # type: () -> Domain
    return make_box(2, [1.0, 1.0])


@pytest.fixture(scope="session")
def square_evaluator(square):  # type: (Domain) -> KernelEvaluator
    return KernelEvaluator(square)


@pytest.fixture(scope="session")
def baseline_problem(square):  # type: (Domain) -> Problem
    patch = make_patch(square, "bottom", [0.25, 0.75])
    return Problem(square, patch, 2.0, 1.0)


@pytest.fixture(scope="session")
def baseline_fd(baseline_problem, square):  # type: (...) -> SolveResult
    """Baseline run to the blow-up threshold at h = 1/64."""
    grid = grid_for_spacing(square, 1.0 / 64)
    return solve_fd(baseline_problem, grid, SolveControl(output_every=20))

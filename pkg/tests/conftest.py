import json

import pytest

from lifespan import (KernelEvaluator, LabPrefs, Problem, make_box,
                      make_lshape, make_patch)


LAB_PREFS = {
    "domain": {"kind": "box", "n": 2, "extents": [1.0, 1.0]},
    "patch": {"face": "bottom", "lo": 0.25, "hi": 0.75},
    "problem": {"q": 2.0, "u0": 1.0},
    "solver": {"kind": "fd", "nodes_per_unit": 16, "t_end": 0.01,
               "output_every": 10},
    "bounds": {"C_general": 1.0, "C_star": 1.0},
    "sweep": {"variable": "M0", "values": [1.0, 2.0, 4.0, 8.0]},
}


@pytest.fixture
def unit_square():  # type: () -> Domain
    return make_box(2, [1.0, 1.0])


@pytest.fixture
def unit_cube():  # type: () -> Domain
    return make_box(3, [1.0, 1.0, 1.0])


@pytest.fixture
def lshape():  # type: () -> Domain
    return make_lshape([1.0, 1.0], 0.5)


@pytest.fixture
def bottom_patch(unit_square):  # type: (Domain) -> BoundaryPatch
    return make_patch(unit_square, "bottom", [0.25, 0.75])


@pytest.fixture
def cube_patch(unit_cube):  # type: (Domain) -> BoundaryPatch
    return make_patch(unit_cube, "z-", [[0.25, 0.75], [0.25, 0.75]])


@pytest.fixture
def lshape_patch(lshape):  # type: (Domain) -> BoundaryPatch
    return make_patch(lshape, "y-", [0.25, 0.75])


@pytest.fixture
def evaluator(unit_square):  # type: (Domain) -> KernelEvaluator
    return KernelEvaluator(unit_square)


@pytest.fixture
def cube_evaluator(unit_cube):  # type: (Domain) -> KernelEvaluator
    return KernelEvaluator(unit_cube)


@pytest.fixture
def baseline(unit_square, bottom_patch):  # type: (...) -> Problem
    return Problem(unit_square, bottom_patch, 2.0, 1.0)


@pytest.fixture
def lab_prefs_dict():  # type: () -> dict
    return json.loads(json.dumps(LAB_PREFS))


@pytest.fixture
def lab_prefs_file(tmpdir, lab_prefs_dict):  # type: (...) -> str
    path = tmpdir.join("lifespan.json")
    path.write(json.dumps(lab_prefs_dict))
    return str(path)


@pytest.fixture
def lab_prefs(lab_prefs_file):  # type: (str) -> LabPrefs
    return LabPrefs(lab_prefs_file)

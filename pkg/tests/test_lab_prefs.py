import json

import pytest
from jsonschema import Draft202012Validator

from lifespan import ConfigError, DomainKind, LabPrefs
from lifespan.lab_prefs import SCHEMA, Profile


def prefs_from(document):
    return LabPrefs(document=document)


class TestLabPrefs(object):

    def test_defaults_describe_baseline(self):
        prefs = LabPrefs()
        problem = prefs.problem()
        assert problem.q == 2.0
        assert problem.M0 == 1.0
        assert problem.domain.kind == DomainKind.BOX2D
        assert problem.patch.area == pytest.approx(0.5)
        assert prefs["solver"]["kind"] == "fd"

    def test_file(self, lab_prefs):
        assert lab_prefs["solver"]["nodes_per_unit"] == 16
        assert lab_prefs["solver"]["t_end"] == 0.01
        assert lab_prefs.grid().shape == (17, 17)
        assert "lifespan.json" in repr(lab_prefs)

    @pytest.mark.parametrize("document", [
        {"extra": {}},
        {"solver": {"speed": 1}},
        {"problem": {"q": "two"}},
        {"problem": {"q": True}},
        {"solver": {"nodes_per_unit": 16.5}},
        {"sweep": {"values": [1.0, "2"]}},
        {"domain": []},
        {"domain": {"n": 4}},
        {"solver": {"kind": "implicit"}},
        {"solver": {"images": 0}},
        {"patch": {"radius": -1.0}},
        {"patch": {"lo": "a"}},
        []])
    def test_schema(self, document):
        with pytest.raises(ConfigError):
            prefs_from(document)

    def test_schema_document_is_valid(self):
        Draft202012Validator.check_schema(SCHEMA)

    def test_error_names_location(self):
        with pytest.raises(ConfigError) as error:
            prefs_from({"solver": {"nodes_per_unit": "many"}})
        assert "solver.nodes_per_unit" in str(error.value)

    def test_integral_floats_become_ints(self):
        prefs = prefs_from({"solver": {"nodes_per_unit": 16.0,
                                       "modes": 8.0}})
        assert prefs["solver"]["nodes_per_unit"] == 16
        assert isinstance(prefs["solver"]["nodes_per_unit"], int)
        assert isinstance(prefs["solver"]["modes"], int)
        assert prefs["solver"]["t_end"] is None

    def test_missing_file(self, tmpdir):
        with pytest.raises(ConfigError):
            LabPrefs(str(tmpdir.join("missing.json")))

    def test_malformed_file(self, tmpdir):
        path = tmpdir.join("broken.json")
        path.write("{\"domain\": ")
        with pytest.raises(ConfigError):
            LabPrefs(str(path))

    def test_patch_off_face(self):
        prefs = prefs_from({"patch": {"lo": 0.5, "hi": 1.5}})
        with pytest.raises(ConfigError):
            prefs.patch()

    def test_extents_must_match_dimension(self):
        prefs = prefs_from({"domain": {"n": 3, "extents": [1.0, 1.0]}})
        with pytest.raises(ConfigError):
            prefs.domain()

    def test_unknown_domain_kind(self):
        with pytest.raises(ConfigError):
            prefs_from({"domain": {"kind": "annulus"}}).domain()

    def test_three_dimensional_scalar_patch(self):
        prefs = prefs_from({"domain": {"n": 3}, "patch": {"face": "z-"}})
        assert prefs.patch().area == pytest.approx(0.25)

    def test_disk_patch(self):
        prefs = prefs_from({"domain": {"n": 3},
                            "patch": {"face": "z-", "center": [0.5, 0.5],
                                      "radius": 0.25}})
        assert prefs.patch().shape == "disk"

    def test_lshape(self):
        prefs = prefs_from({"domain": {"kind": "lshape"},
                            "patch": {"face": "y-"}})
        assert prefs.domain().volume == pytest.approx(0.75)
        assert prefs.problem().patch.area == pytest.approx(0.5)

    def test_profile(self):
        profile = {"amplitude": 0.1, "center": [0.5, 0.5], "width": 0.2,
                   "floor": 1.0}
        problem = prefs_from({"problem": {"u0_profile": profile}}).problem()
        assert isinstance(problem.u0, Profile)
        assert problem.M0 == pytest.approx(1.1, rel=1e-6)

    @pytest.mark.parametrize("profile", [
        {"height": 1.0},
        {"amplitude": 1.0, "center": [0.5, 0.5]},
        {"amplitude": 1.0, "center": [0.5, 0.5], "width": 0.0}])
    def test_profile_keys(self, profile):
        with pytest.raises(ConfigError):
            prefs_from({"problem": {"u0_profile": profile}})

    def test_solve_control(self, lab_prefs):
        control = lab_prefs.solve_control(M0=2.0)
        assert control.stop_level(2.0) == pytest.approx(2e4)
        assert control.t_end == 0.01
        assert lab_prefs.solve_control().m_stop is None

    def test_kernel_evaluator(self):
        prefs = prefs_from({"solver": {"images": 9}})
        assert prefs.kernel_evaluator().truncation.images == 9

    def test_bounds_config(self, lab_prefs):
        config = lab_prefs.bounds_config()
        assert config.gamma1_area == pytest.approx(0.5)
        assert config.omega_volume == pytest.approx(1.0)
        assert config.C_general == 1.0

    def test_sweep_config(self, lab_prefs):
        config = lab_prefs.sweep_config()
        assert config.variable == "M0"
        assert config.values == (1.0, 2.0, 4.0, 8.0)
        assert config.face == "y-"
        assert config.nodes_per_unit == 16
        assert config.solver == "fd"
        assert config.sweep_id == "M0"

    def test_sweep_config_errors(self, lab_prefs_dict):
        lab_prefs_dict["sweep"]["variable"] = "Width"
        with pytest.raises(ConfigError) as error:
            LabPrefs(document=json.loads(json.dumps(lab_prefs_dict)))
        assert "sweep.variable" in str(error.value)

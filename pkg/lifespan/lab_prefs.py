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
"""lab_prefs.py

Class for reading a python-lifespan run configuration from a JSON
document and turning its sections into library objects.
"""
import copy
import json
import logging
import numbers
import os

import numpy as np
from jsonschema import Draft202012Validator

from .bounds import BoundsConfig
from .exceptions import ConfigError, LifespanError
from .experiments import SweepConfig
from .geometry import (grid_for_spacing, make_box, make_disk_patch,
                       make_lshape, make_patch)
from .neumann_kernel import KernelEvaluator, Truncation
from .solver import Problem, SolveControl


logger = logging.getLogger(__name__)


def _value(kind, default=None, nullable=False, **extra):
    schema = dict(extra, type=[kind, "null"] if nullable else kind)
    schema["default"] = default
    return schema


def _numbers(default=None, nullable=False):
    return _value("array", default, nullable, items={"type": "number"})


def _section(**properties):
    return {"type": "object", "properties": properties,
            "additionalProperties": False, "default": {}}


NUMBER_OR_LIST = {"anyOf": [{"type": "number"}, _numbers()]}

PROFILE = {
    "type": ["object", "null"],
    "properties": {
        "amplitude": {"type": "number"},
        "center": {"type": "array", "items": {"type": "number"}},
        "width": {"type": "number", "exclusiveMinimum": 0},
        "floor": {"type": "number"},
    },
    "required": ["amplitude", "center", "width"],
    "additionalProperties": False,
    "default": None,
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "domain": _section(
            kind=_value("string", "box", enum=["box", "lshape"]),
            n=_value("integer", 2, enum=[2, 3]),
            extents=_numbers(nullable=True),
            arms=_numbers([1.0, 1.0]),
            thickness=_value("number", 0.5),
        ),
        "patch": _section(
            face=_value("string", "bottom"),
            lo=dict(NUMBER_OR_LIST, default=0.25),
            hi=dict(NUMBER_OR_LIST, default=0.75),
            center=_numbers(nullable=True),
            radius=_value("number", nullable=True, exclusiveMinimum=0),
        ),
        "problem": _section(
            q=_value("number", 2.0),
            u0=_value("number", 1.0),
            u0_profile=PROFILE,
            M0=_value("number", nullable=True),
        ),
        "solver": _section(
            kind=_value("string", "fd", enum=["fd", "volterra"]),
            nodes_per_unit=_value("integer", 32, minimum=1),
            safety=_value("number", 0.9),
            max_steps=_value("integer", 2000000, minimum=1),
            dt_floor=_value("number", 1e-14),
            m_stop_factor=_value("number", 1e4),
            output_every=_value("integer", 50, minimum=1),
            t_end=_value("number", nullable=True),
            volterra_dt=_value("number", 2e-3),
            volterra_cells=_value("integer", 32, minimum=1),
            volterra_regrow=_value("integer", 4, minimum=1),
            images=_value("integer", 6, minimum=1),
            modes=_value("integer", nullable=True, minimum=1),
        ),
        "bounds": _section(
            C_general=_value("number", 1.0),
            C_star=_value("number", 1.0),
            C_critical=_value("number", nullable=True),
            Y0=_value("number", nullable=True),
        ),
        "sweep": _section(
            variable=_value("string", "M0",
                            enum=["M0", "Gamma1Area", "Q"]),
            values=_numbers([0.25, 0.5, 1.0, 2.0, 4.0]),
            solver=_value("string", nullable=True,
                          enum=["fd", "volterra", None]),
            min_patch_nodes=_value("integer", 8, minimum=1),
            workers=_value("integer", 1, minimum=1),
            calibrate=_value("boolean", False),
            sweep_id=_value("string", nullable=True),
        ),
    },
}

VALIDATOR = Draft202012Validator(SCHEMA)


def _location(error):
    return ".".join(str(part) for part in error.absolute_path) or "document"


def _fill(schema, given):
    """Copy of given with the schema defaults of missing keys."""
    values = {}
    for key, entry in schema["properties"].items():
        kind = entry.get("type")
        if kind == "object":
            values[key] = _fill(entry, given.get(key, {}))
        elif key not in given:
            values[key] = copy.deepcopy(entry.get("default"))
        elif given[key] is not None and kind in ("integer",
                                                 ["integer", "null"]):
            # JSON Schema accepts 16.0 as an integer.
            values[key] = int(given[key])
        else:
            values[key] = copy.deepcopy(given[key])
    return values


def validate(document):
    """Check a configuration document against SCHEMA and fill defaults.

    Returns:
        A new dict holding every section with every key.

    Raises:
        ConfigError naming the first offending location on unknown
        sections or keys, type mismatches and out-of-range values.
    """
    errors = sorted(VALIDATOR.iter_errors(document),
                    key=lambda error: [str(part)
                                       for part in error.absolute_path])
    if errors:
        raise ConfigError("Configuration error at %s: %s" %
                          (_location(errors[0]), errors[0].message))
    return _fill(SCHEMA, document)


class Profile(object):
    """u0(x) = floor + amplitude exp(-|x - center|^2 / width^2)."""

    def __init__(self, amplitude, center, width, floor=0.0):
        self.amplitude = float(amplitude)
        self.center = np.asarray(center, dtype=float)
        self.width = float(width)
        self.floor = float(floor)

    def __call__(self, points):
        points = np.atleast_2d(points)
        distance = np.sum((points - self.center) ** 2, axis=1)
        return self.floor + self.amplitude * np.exp(-distance /
                                                    self.width ** 2)

    def __repr__(self):
        return "Profile(%g, %s, %g, %g)" % (
            self.amplitude, self.center.tolist(), self.width, self.floor)


class LabPrefs(object):
    """Run configuration of python-lifespan.

    By default (no file) the baseline run is described: unit square,
    Gamma_1 = [0.25, 0.75] on the bottom edge, q = 2 and u0 = 1.

    The document is a JSON object with the sections:

        - **domain**: kind ("box" or "lshape"), n, extents, arms,
          thickness.
        - **patch**: face, lo, hi (numbers for n = 2, lists for n = 3) or
          center and radius for a disk.
        - **problem**: q, u0 (constant), u0_profile (object with
          amplitude, center, width and optionally floor), M0.
        - **solver**: kind ("fd" or "volterra"), nodes_per_unit, safety,
          max_steps, dt_floor, m_stop_factor, output_every, t_end,
          volterra_dt, volterra_cells, volterra_regrow, images, modes.
        - **bounds**: C_general, C_star, C_critical, Y0.
        - **sweep**: variable ("M0", "Gamma1Area" or "Q"), values, solver,
          min_patch_nodes, workers, calibrate, sweep_id.

    Unknown keys are an error.
    """

    def __init__(self, config_file=None, document=None):
        """Create a preferences object.

        Args:
            config_file: Path to a UTF-8 JSON document.
            document: Already parsed document (used when no file is
                given).

        Raises:
            ConfigError if the file cannot be read or parsed, or does not
            follow the schema.
        """
        self.config_file = config_file
        if config_file is not None:
            document = self._read(config_file)
        self.prefs = validate(document if document is not None else {})

    @staticmethod
    def _read(path):
        path = os.path.expanduser(path)
        try:
            with open(path, encoding="utf-8") as handle:
                return json.load(handle)
        except (IOError, OSError) as error:
            raise ConfigError("Cannot read configuration %s: %s" %
                              (path, error))
        except ValueError as error:
            raise ConfigError("Malformed configuration %s: %s" %
                              (path, error))

    def __getitem__(self, section):
        return self.prefs[section]

    def _build(self, builder, *args):
        try:
            return builder(*args)
        except ConfigError:
            raise
        except (LifespanError, TypeError, ValueError) as error:
            raise ConfigError("Invalid configuration (%s): %s" %
                              (builder.__name__.strip("_"), error))

    def domain(self):
        return self._build(self._domain)

    def _domain(self):
        section = self["domain"]
        if section["kind"] == "lshape":
            return make_lshape(section["arms"], section["thickness"])
        extents = section["extents"] or [1.0] * section["n"]
        if len(extents) != section["n"]:
            raise ConfigError("domain.extents needs %d entries." %
                              section["n"])
        return make_box(section["n"], extents)

    def patch(self, domain=None):
        return self._build(self._patch, domain or self.domain())

    def _patch(self, domain):
        section = self["patch"]
        if section["radius"] is not None:
            return make_disk_patch(domain, section["face"], section["center"],
                                   section["radius"])
        lo, hi = section["lo"], section["hi"]
        if domain.n == 2:
            return make_patch(domain, section["face"], [lo, hi])
        if isinstance(lo, numbers.Real):
            lo, hi = [lo, lo], [hi, hi]
        return make_patch(domain, section["face"],
                          [[a, b] for a, b in zip(lo, hi)])

    def problem(self, domain=None, patch=None):
        domain = domain or self.domain()
        patch = patch or self.patch(domain)
        return self._build(self._problem, domain, patch)

    def _problem(self, domain, patch):
        section = self["problem"]
        u0 = section["u0"]
        profile = section["u0_profile"]
        if profile is not None:
            u0 = Profile(**profile)
        return Problem(domain, patch, section["q"], u0, M0=section["M0"])

    def grid(self, domain=None):
        domain = domain or self.domain()
        return self._build(grid_for_spacing, domain,
                           1.0 / self["solver"]["nodes_per_unit"])

    def solve_control(self, M0=None):
        section = self["solver"]
        m_stop = None
        if M0 is not None and section["m_stop_factor"] is not None:
            m_stop = section["m_stop_factor"] * M0
        return self._build(
            SolveControl, m_stop, section["safety"], section["max_steps"],
            section["dt_floor"], section["output_every"], section["t_end"],
            False, (), section["volterra_dt"], section["volterra_cells"],
            section["volterra_regrow"])

    def kernel_evaluator(self, domain=None):
        section = self["solver"]
        domain = domain or self.domain()
        return self._build(
            lambda: KernelEvaluator(domain, Truncation(section["images"],
                                                       section["modes"])))

    def bounds_config(self, problem=None):
        problem = problem or self.problem()
        section = self["bounds"]
        return self._build(
            BoundsConfig, problem.q, problem.M0, problem.patch.area,
            problem.domain.volume, problem.domain.n, section["C_general"],
            section["C_star"], section["Y0"], section["C_critical"])

    def sweep_config(self):
        sweep = self["sweep"]
        problem = self.problem()
        bounds = self["bounds"]
        solver = sweep["solver"] or self["solver"]["kind"]
        return self._build(
            SweepConfig, sweep["variable"], sweep["values"], problem.domain,
            problem.patch.face.name, problem.q, problem.M0,
            problem.patch.area, solver, self["solver"]["nodes_per_unit"],
            sweep["min_patch_nodes"], self.solve_control(), bounds["C_general"],
            bounds["C_star"], bounds["C_critical"], sweep["calibrate"],
            sweep["workers"], sweep["sweep_id"])

    def __repr__(self):
        return "LabPrefs(%r)" % (self.config_file,)

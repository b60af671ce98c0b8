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
"""exceptions.py

Custom Exceptions for python-lifespan.
"""


class LifespanError(Exception):
    """Base python-lifespan exception class."""
    pass


class InvalidGeometry(LifespanError, ValueError):
    """Domain, patch or grid description is degenerate or inconsistent."""
    pass


class InvalidTime(LifespanError, ValueError):
    """A kernel was asked for a non-positive time."""
    pass


class InvalidData(LifespanError, ValueError):
    """Input samples are unusable (non-positive where logs are taken, etc)."""
    pass


class PreconditionViolated(LifespanError, ValueError):
    """An operation's stated precondition does not hold."""
    pass


class QuadratureFailure(LifespanError):

    def __init__(self, *args, **kwargs):
        self.achieved_error = kwargs.pop("achieved_error", None)
        self.value = kwargs.pop("value", None)
        super(QuadratureFailure, self).__init__(*args, **kwargs)


class SolverError(LifespanError):

    def __init__(self, *args, **kwargs):
        self.time = kwargs.pop("time", None)
        self.step = kwargs.pop("step", None)
        super(SolverError, self).__init__(*args, **kwargs)


class StiffnessFailure(SolverError):
    """Adaptive time step fell below the configured floor."""
    pass


class NumericalBlowupArtifact(SolverError):
    """NaN or overflow in the discrete solution (not a detected blow-up)."""
    pass


class StepRejected(SolverError):
    """Fixed-point correction was not contractive, even after halving."""
    pass


class NoRoot(LifespanError):
    """g(lambda) = y has no solution with lambda > m."""

    def __init__(self, *args, **kwargs):
        self.y = kwargs.pop("y", None)
        self.y_max = kwargs.pop("y_max", None)
        super(NoRoot, self).__init__(*args, **kwargs)


class ScheduleEmpty(LifespanError):
    """The critical schedule stops before its first step."""

    def __init__(self, *args, **kwargs):
        self.schedule = kwargs.pop("schedule", None)
        super(ScheduleEmpty, self).__init__(*args, **kwargs)


class SweepFailed(LifespanError):
    """Every point of a sweep failed, or the sweep was empty."""
    pass


class ReportError(LifespanError):
    """Report files could not be written."""
    pass


class ConfigError(LifespanError):
    """Configuration document is missing, malformed, or off-schema."""
    pass


class AcceptanceFailure(LifespanError):
    """A numerical acceptance assertion did not hold."""
    pass

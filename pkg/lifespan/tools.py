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
"""tools.py

Helper functions for python-lifespan.
"""
import csv
import functools
import logging
import math
import os
import warnings

import numpy as np
from scipy import integrate

from .exceptions import QuadratureFailure, ReportError


logger = logging.getLogger(__name__)

NA = "NA"


def format_float(value):
    """Return the shortest round-trip decimal form of a float.

    None (a missing value, e.g. an inapplicable bound) renders as "NA".
    """
    if value is None:
        return NA
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return repr(float(value))


def log_power(base, exponent):
    """base ** exponent evaluated as exp(exponent * ln(base))."""
    return math.exp(exponent * math.log(base))


def is_strictly_monotone(values):
    """Return True if values strictly increase or strictly decrease."""
    diffs = np.diff(np.asarray(values, dtype=float))
    return bool(diffs.size) and (bool(np.all(diffs > 0)) or
                                 bool(np.all(diffs < 0)))


@functools.lru_cache(maxsize=None)
def gauss_legendre(count):
    """Cached Gauss-Legendre nodes and weights on [-1, 1]."""
    nodes, weights = np.polynomial.legendre.leggauss(count)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def adaptive_quad(func, lower, upper, epsabs, epsrel, limit, points=None):
    """Integrate with QUADPACK, raising instead of warning on failure.

    Args:
        func: Scalar integrand.
        lower, upper: Finite lower limit; upper may be np.inf.
        epsabs, epsrel: Requested tolerances.
        limit: Maximum number of subintervals.
        points: Optional interior breakpoints (kinks, peaks).

    Returns:
        (value, abserr) as from scipy.integrate.quad.

    Raises:
        QuadratureFailure if QUADPACK gave up short of the tolerance.
    """
    kwargs = {"epsabs": epsabs, "epsrel": epsrel, "limit": limit}
    if points is not None and np.isfinite(upper):
        inside = sorted(set(p for p in points if lower < p < upper))
        if inside:
            kwargs["points"] = inside
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, abserr = integrate.quad(func, lower, upper, **kwargs)
    requested = max(epsabs, epsrel * abs(value))
    if caught and abserr > requested:
        raise QuadratureFailure(
            "Quadrature on [%g, %g] stopped at error %.3g > %.3g: %s" %
            (lower, upper, abserr, requested, caught[0].message),
            achieved_error=abserr, value=value)
    return value, abserr


def write_csv(path, header, rows):
    """Write rows under a header line, formatting floats round-trip.

    Raises:
        ReportError on any IO failure.
    """
    try:
        directory = os.path.dirname(os.path.abspath(path))
        if not os.path.isdir(directory):
            os.makedirs(directory)
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_float(value) for value in row])
    except (IOError, OSError) as error:
        raise ReportError("Could not write %s: %s" % (path, error))
    logger.debug("Wrote %d rows to %s", len(rows), path)
    return path


def write_text(path, text):
    """Write a UTF-8 text file, raising ReportError on failure."""
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    except (IOError, OSError) as error:
        raise ReportError("Could not write %s: %s" % (path, error))
    return path

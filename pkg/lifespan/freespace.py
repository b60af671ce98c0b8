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
"""freespace.py

The free-space heat kernel Phi, the radial model integral phi_n(T, R)
with its two-region evaluation and explicit sandwich envelopes, and
boundary-time integrals of Phi over a flat patch.

The radial integral is

    phi_n(T, R) = int_0^T int_0^R r^(n-2) t^(-n/2) exp(-r^2 / 4t) dr dt,

split along the parabola t = r^2 into region I (r < sqrt(t)) and region
II (r > sqrt(t)). After the substitutions r = v sqrt(t) in region I and
y = r^2 / t in region II both pieces have bounded integrands:

    I  = int_0^sqrt(T) 2 F(min(1, R/s)) ds,  F(a) = int_0^a v^(n-2) e^(-v^2/4) dv
    II = int_0^R G(max(1, r^2/T)) dr,        G(a) = int_a^inf y^(n/2-2) e^(-y/4) dy
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .exceptions import InvalidData, InvalidGeometry, InvalidTime
from .geometry import flat_ball, make_patch
from .tools import adaptive_quad, write_csv


logger = logging.getLogger(__name__)

SUPPORTED_DIMENSIONS = (2, 3, 4)
# exp(-x) below this many e-folds is treated as zero.
DECAY_CUTOFF = 750.0
SANDWICH_HEADER = ("n", "T", "R", "phi_n", "lower", "upper", "pass")
SHARPNESS_HEADER = ("n", "rho", "integral", "predicted_order", "ratio")


@dataclass(frozen=True)
class PhiParams(object):
    """Dimension of the free-space kernel."""
    n: int

    def __post_init__(self):
        if self.n not in SUPPORTED_DIMENSIONS:
            raise InvalidData("Phi is supported for n in %s, not %r." %
                              (SUPPORTED_DIMENSIONS, self.n))


@dataclass(frozen=True)
class QuadratureControl(object):
    """Tolerances for the adaptive quadratures.

    Attributes:
        epsabs, epsrel: Requested absolute and relative error.
        limit: Maximum number of subintervals per 1-D quadrature.
        substitution: Integrate time in s = sqrt(t) (bounded integrand).
    """
    epsabs: float = 1e-10
    epsrel: float = 1e-8
    limit: int = 200
    substitution: bool = True

    def __post_init__(self):
        if not (self.epsabs > 0 and self.epsrel > 0):
            raise InvalidData("Quadrature tolerances must be positive.")
        if self.limit < 16:
            raise InvalidData("Quadrature needs at least 16 subdivisions.")

    def inner(self):
        """Tighter control for integrals nested inside another quadrature."""
        return QuadratureControl(self.epsabs * 1e-2, self.epsrel * 1e-2,
                                 self.limit, self.substitution)


DEFAULT_CONTROL = QuadratureControl()


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise InvalidTime("Heat kernels need t > 0, got %s." % (t,))
    return t


def phi(x, t, n=None):
    """Free-space heat kernel (4 pi t)^(-n/2) exp(-|x|^2 / 4t).

    Args:
        x: Point(s), array of shape (..., n).
        t: Time(s) > 0, broadcastable against x[..., 0].
        n: Dimension; defaults to x.shape[-1].

    Raises:
        InvalidTime if any t <= 0.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[-1] if n is None else n
    t = _check_time(t)
    r2 = np.sum(x * x, axis=-1)
    value = np.exp(-r2 / (4.0 * t)) / (4.0 * np.pi * t) ** (0.5 * n)
    return float(value) if np.ndim(value) == 0 else value


def phi_radial(r, t, n):
    """Phi as a function of the distance r = |x|."""
    r = np.asarray(r, dtype=float)
    t = _check_time(t)
    value = np.exp(-r * r / (4.0 * t)) / (4.0 * np.pi * t) ** (0.5 * n)
    return float(value) if np.ndim(value) == 0 else value


def phi_1d(z, t):
    """One-dimensional heat kernel; no time check (hot path)."""
    return np.exp(-z * z / (4.0 * t)) / np.sqrt(4.0 * np.pi * t)


def _cone_integral(a, n, control):
    """F(a) = int_0^a v^(n-2) exp(-v^2/4) dv."""
    value, _ = adaptive_quad(
        lambda v: v ** (n - 2) * math.exp(-0.25 * v * v), 0.0, a,
        control.epsabs, control.epsrel, control.limit)
    return value


def _tail_integral(a, n, control):
    """G(a) = int_a^inf y^(n/2-2) exp(-y/4) dy."""
    if 0.25 * a > DECAY_CUTOFF:
        return 0.0
    value, _ = adaptive_quad(
        lambda y: y ** (0.5 * n - 2.0) * math.exp(-0.25 * y), a, np.inf,
        control.epsabs, control.epsrel, control.limit)
    return value


def _validate_radial(T, R, n):
    PhiParams(n)
    if not (T > 0 and R > 0):
        raise InvalidData("phi_n needs T > 0 and R > 0, got T=%r R=%r." %
                          (T, R))


def phi_n(T, R, n, control=None, full_output=False):
    """Radial model integral phi_n(T, R) by region-split quadrature.

    Region I is integrated in s = sqrt(t); its stretch s > R is mapped to
    s = R e^u so the slowly decaying tail has a bounded, flat integrand.
    Region II is integrated in v = r / sqrt(T) and truncated where the
    Gaussian tail underflows.

    Args:
        T, R: Positive time and radius.
        n: Dimension (2, 3 or 4).
        control: QuadratureControl; defaults to abs 1e-10, rel 1e-8.
        full_output: Also return the accumulated error estimate.

    Returns:
        The value, or (value, error) with full_output.

    Raises:
        QuadratureFailure if any piece misses its tolerance.
    """
    _validate_radial(T, R, n)
    control = control or DEFAULT_CONTROL
    inner = control.inner()
    root_t = math.sqrt(T)
    near = min(root_t, R)
    error = 0.0

    # Pieces with constant integrand: r < sqrt(t) <= R and t < r^2 <= T.
    value = near * (2.0 * _cone_integral(1.0, n, inner) +
                    _tail_integral(1.0, n, inner))

    if root_t > R:
        stretch = math.log(root_t / R)
        piece, err = adaptive_quad(
            lambda u: 2.0 * R * math.exp(u) *
            _cone_integral(math.exp(-u), n, inner),
            0.0, stretch, control.epsabs, control.epsrel, control.limit)
        value += piece
        error += err
    elif R > root_t:
        upper = min(R / root_t, math.sqrt(4.0 * DECAY_CUTOFF))
        if upper > 1.0:
            piece, err = adaptive_quad(
                lambda v: root_t * _tail_integral(v * v, n, inner),
                1.0, upper, control.epsabs, control.epsrel, control.limit)
            value += piece
            error += err
    logger.debug("phi_%d(T=%g, R=%g) = %.12g (+/- %.2g)", n, T, R, value,
                 error)
    if full_output:
        return value, error
    return value


def _time_integrated_radial(r, T, n):
    """int_0^T r^(n-2) t^(-n/2) exp(-r^2/4t) dt in closed form."""
    x = r * r / (4.0 * T)
    if n == 2:
        return special.exp1(x)
    order = 0.5 * n - 1.0
    return 4.0 ** order * special.gamma(order) * special.gammaincc(order, x)


def phi_n_radial(T, R, n, control=None):
    """phi_n(T, R) via the closed-form time integral, as an oracle.

    The time integral of the integrand is 4^(n/2-1) Gamma(n/2-1, r^2/4T)
    (the exponential integral E_1 for n = 2); one radial quadrature is
    left.
    """
    _validate_radial(T, R, n)
    control = control or DEFAULT_CONTROL
    upper = min(R, math.sqrt(4.0 * T * DECAY_CUTOFF))
    value, _ = adaptive_quad(
        lambda r: _time_integrated_radial(r, T, n), 0.0, upper,
        control.epsabs, control.epsrel, control.limit,
        points=[math.sqrt(T)])
    return value


def radial_tail_constant(n):
    """int_1^inf y^(n/2-2) exp(-y/4) dy, the exact h_2 / R constant."""
    PhiParams(n)
    if n == 2:
        return float(special.exp1(0.25))
    order = 0.5 * n - 1.0
    return float(4.0 ** order * special.gamma(order) *
                 special.gammaincc(order, 0.25))


def gaussian_moment_constant(n):
    """int_0^inf y^((n-3)/2) exp(-y/4) dy = 2^(n-1) Gamma((n-1)/2).

    Bounds the region II piece by this constant times sqrt(T).
    """
    return 2.0 ** (n - 1) * math.gamma(0.5 * (n - 1))


def region_one_integral(T, n):
    """int_0^T int_0^sqrt(t) r^(n-2) t^(-n/2) dr dt = 2 sqrt(T) / (n-1)."""
    return 2.0 * math.sqrt(T) / (n - 1)


def h1_unweighted(T, R, n):
    """int_0^R int_{r^2}^T r^(n-2) t^(-n/2) dt dr, for T >= R^2.

    2R/(n-2) [1 - (R^2/T)^(n/2-1) / (n-1)] for n >= 3 and
    R [ln(T/R^2) + 2] for n = 2.
    """
    if T < R * R:
        raise InvalidData("h1 is defined for T >= R^2 only.")
    if n == 2:
        return R * (math.log(T / (R * R)) + 2.0)
    ratio = (R * R / T) ** (0.5 * n - 1.0)
    return 2.0 * R / (n - 2) * (1.0 - ratio / (n - 1))


@dataclass(frozen=True)
class Sandwich(object):
    """Explicit envelopes around a quadrature value of phi_n.

    Attributes:
        lower, upper: Envelope values.
        value: Quadrature value.
        passed: lower <= value <= upper.
        large_time: True in the T >= R^2 case.
        region_one_lower: The region I part of the lower envelope.
    """
    n: int
    T: float
    R: float
    lower: float
    upper: float
    value: float
    passed: bool
    large_time: bool
    region_one_lower: float

    def row(self):
        return (self.n, self.T, self.R, self.value, self.lower, self.upper,
                self.passed)


def sandwich_bounds(T, R, n):
    """Envelope (lower, upper, region I lower, case flag) for phi_n(T, R).

    Region I is bracketed by e^(-1/4) <= exp(-r^2/4t) <= 1. Region II is
    at least G(1) min(sqrt(T), R); it equals G(1) R when T >= R^2 and is
    at most 2^(n-1) Gamma((n-1)/2) sqrt(T) otherwise.
    """
    _validate_radial(T, R, n)
    damping = math.exp(-0.25)
    tail = radial_tail_constant(n)
    if T < R * R:
        root_t = math.sqrt(T)
        core = region_one_integral(T, n)
        lower = damping * core + tail * root_t
        upper = core + gaussian_moment_constant(n) * root_t
        return lower, upper, damping * core, False
    if n == 2:
        core = h1_unweighted(T, R, n)
        return (damping * core + tail * R, core + tail * R,
                damping * core, True)
    core_lower = 2.0 * R / (n - 1)
    core_upper = 2.0 * R / (n - 2)
    return (damping * core_lower + tail * R, core_upper + tail * R,
            damping * core_lower, True)


def phi_n_sandwich(T, R, n, control=None):
    """Evaluate phi_n and check it against the explicit envelopes."""
    lower, upper, core_lower, large_time = sandwich_bounds(T, R, n)
    value = phi_n(T, R, n, control)
    passed = bool(lower <= value <= upper)
    if not passed:
        logger.warning("phi_%d(T=%g, R=%g) = %g outside [%g, %g]", n, T, R,
                       value, lower, upper)
    return Sandwich(n, float(T), float(R), lower, upper, value, passed,
                    large_time, core_lower)


def sandwich_constants(n):
    """(C1, C2) with C1 <= phi_n / scale <= C2 for every T, R > 0.

    For n >= 3 the scale is min(sqrt(T), R). For n = 2 it is sqrt(T) when
    T < R^2 and R [1 + ln(T/R^2)] otherwise.
    """
    PhiParams(n)
    damping = math.exp(-0.25)
    if n == 2:
        return damping, 2.0 + 2.0 * math.sqrt(math.pi)
    tail = radial_tail_constant(n)
    small = 2.0 / (n - 1) + gaussian_moment_constant(n)
    large = 2.0 / (n - 2) + tail
    return 2.0 * damping / (n - 1), max(small, large)


def normalized_phi_n(T, R, n, value=None):
    """phi_n divided by the scale that `sandwich_constants` refers to."""
    value = phi_n(T, R, n) if value is None else value
    if n == 2 and T >= R * R:
        return value / (R * (1.0 + math.log(T / (R * R))))
    return value / min(math.sqrt(T), R)


def sandwich_table(n, times, radii, control=None, path=None):
    """Sandwich rows over a (T, R) grid, optionally written as CSV."""
    table = [phi_n_sandwich(T, R, n, control) for T in times for R in radii]
    if path:
        write_csv(path, SANDWICH_HEADER, [entry.row() for entry in table])
    return table


def _erf_window(x, a, b, s):
    """(1/2)[erf((b-x)/2s) - erf((a-x)/2s)], the 1-D Gaussian mass in [a,b]."""
    return 0.5 * (special.erf((b - x) / (2.0 * s)) -
                  special.erf((a - x) / (2.0 * s)))


def surface_integral(x, patch, t):
    """int_{patch} Phi(x - y, t) dS(y) in closed form (rectangular patch).

    The patch is flat, so the integral factors into the normal Gaussian
    times erf windows along each tangential axis.
    """
    if patch.shape != "rect":
        raise InvalidGeometry("Closed-form surface integrals need a "
                              "rectangular patch.")
    t = float(_check_time(t))
    x = np.asarray(x, dtype=float)
    s = math.sqrt(t)
    value = phi_1d(x[..., patch.face.axis] - patch.face.level, t)
    for d in patch.tangential_axes:
        value = value * _erf_window(x[..., d], patch.lo[d], patch.hi[d], s)
    return value


def _rect_time_integral(x, patch, T_end, control):
    # s = sqrt(t): dt = 2s ds cancels the (4 pi t)^(-1/2) normal factor.
    normal = x[patch.face.axis] - patch.face.level
    breaks = [0.5 * abs(normal)]
    for d in patch.tangential_axes:
        breaks.extend([0.5 * abs(x[d] - patch.lo[d]),
                       0.5 * abs(x[d] - patch.hi[d])])

    def integrand(s):
        value = math.exp(-normal * normal / (4.0 * s * s)) / math.sqrt(math.pi)
        for d in patch.tangential_axes:
            value *= _erf_window(x[d], patch.lo[d], patch.hi[d], s)
        return value

    if control.substitution:
        return adaptive_quad(integrand, 0.0, math.sqrt(T_end), control.epsabs,
                             control.epsrel, control.limit, points=breaks)
    return adaptive_quad(lambda t: float(surface_integral(x, patch, t))
                         if t > 0 else 0.0, 0.0, T_end, control.epsabs,
                         control.epsrel, control.limit)


def _newton_time_integral(r, T_end):
    """int_0^T Phi dt in 3-D: erfc(r / 2 sqrt(T)) / (4 pi r)."""
    return special.erfc(r / (2.0 * math.sqrt(T_end))) / (4.0 * math.pi * r)


def _disk_time_integral(x, patch, T_end, control):
    """Polar quadrature about the projection of x onto the disk's plane."""
    first, second = patch.tangential_axes
    center = np.asarray(patch.center)
    offset = np.array([x[first] - center[first], x[second] - center[second]])
    normal = x[patch.face.axis] - patch.face.level
    radius = patch.radius
    if np.hypot(*offset) > radius * (1.0 + 1e-12):
        raise InvalidGeometry("Disk time integrals need x above the disk.")
    inner = control.inner()

    def reach(theta):
        # Distance from the projected point to the circle along theta.
        along = offset[0] * math.cos(theta) + offset[1] * math.sin(theta)
        return -along + math.sqrt(max(along * along - offset.dot(offset) +
                                      radius * radius, 0.0))

    def radial(theta):
        def ring(s):
            dist = math.hypot(s, normal)
            if dist == 0.0:
                return special.erfc(0.0) / (4.0 * math.pi)
            return s * _newton_time_integral(dist, T_end)
        value, _ = adaptive_quad(ring, 0.0, reach(theta), inner.epsabs,
                                 inner.epsrel, inner.limit)
        return value

    return adaptive_quad(radial, 0.0, 2.0 * math.pi, control.epsabs,
                         control.epsrel, control.limit)


def boundary_time_integral(x, patch, T_end, control=None, full_output=False):
    """int_0^T_end int_{patch} Phi(x - y, t) dS(y) dt.

    Rectangular patches integrate the closed-form surface integral in
    s = sqrt(t), where the integrand stays bounded even for x on the
    patch. Disk patches (n = 3) integrate the time-integrated kernel
    erfc(r / 2 sqrt(T)) / (4 pi r) in polar coordinates about x, so x must
    project into the closed disk.
    """
    if not T_end > 0:
        raise InvalidTime("T_end must be positive.")
    control = control or DEFAULT_CONTROL
    x = np.asarray(x, dtype=float)
    if patch.shape == "disk":
        value, error = _disk_time_integral(x, patch, T_end, control)
    else:
        value, error = _rect_time_integral(x, patch, T_end, control)
    if full_output:
        return value, error
    return value


def boundary_surface_bound(domain, points, times):
    """sup of t^(1/2) int_{boundary} Phi(x - y, t) dS(y) over a sample."""
    faces = [make_patch(domain, face, [[face.lo[d], face.hi[d]]
                                       for d in face.tangential_axes])
             for face in domain.faces()]
    points = np.atleast_2d(points)
    best = 0.0
    for t in times:
        total = sum(surface_integral(points, face, t) for face in faces)
        best = max(best, float(np.max(math.sqrt(t) * total)))
    return best


def boundary_time_constant(points, patch, times, alpha, control=None):
    """Empirical C in int_0^t int_{patch} Phi <= C |patch|^alpha t^beta.

    beta = [1 - (n-1) alpha] / 2, alpha in [0, 1/(n-1)].
    """
    n = patch.n
    if not 0.0 <= alpha <= 1.0 / (n - 1) + 1e-15:
        raise InvalidData("alpha must lie in [0, 1/(n-1)].")
    exponent = 0.5 * (1.0 - (n - 1) * alpha)
    scale = patch.area ** alpha
    best = 0.0
    for x in np.atleast_2d(points):
        for t in times:
            value = boundary_time_integral(x, patch, t, control)
            best = max(best, value / (scale * t ** exponent))
    return best


def predicted_order(rho, n):
    """Sharp order of the boundary-time integral over the flat ball."""
    if n == 2:
        return rho * math.log1p(1.0 / rho)
    return rho


def sharpness_integral(rho, n, offset=None, control=None):
    """I(rho) = int_0^2 int_{flat ball} Phi(x - y, t) dS dt at x.

    Args:
        offset: Tangential offset of x from the ball centre (|offset| <=
            rho); None for the centre.
    """
    patch = flat_ball(rho, n)
    x = np.asarray(patch.center, dtype=float)
    if offset is not None:
        offset = np.atleast_1d(np.asarray(offset, dtype=float))
        for value, d in zip(offset, patch.tangential_axes):
            x[d] += value
    return boundary_time_integral(x, patch, 2.0, control)


def sharpness_ratio(rho, n, control=None):
    """I(rho) divided by its predicted order (rho, or rho ln(1 + 1/rho))."""
    if n not in (2, 3):
        raise InvalidData("The sharpness experiment runs in n = 2 or 3.")
    return sharpness_integral(rho, n, control=control) / predicted_order(rho, n)


def sharpness_table(rhos, n, control=None, path=None):
    """Rows (n, rho, integral, predicted_order, ratio) over a rho grid."""
    rows = []
    for rho in rhos:
        integral = sharpness_integral(rho, n, control=control)
        order = predicted_order(rho, n)
        rows.append((n, rho, integral, order, integral / order))
        logger.debug("Sharpness n=%d rho=%g ratio=%g", n, rho, rows[-1][-1])
    if path:
        write_csv(path, SHARPNESS_HEADER, rows)
    return rows


def reduction_constant(n, centered=True):
    """c with I(rho) >= c phi_n(2, rho).

    At the centre the identity is exact with |S^(n-2)| (4 pi)^(-n/2). For
    other points of the closed ball a cone of half-angle pi/3 around the
    direction towards the centre stays inside the ball, keeping 1/2 (n=2)
    or 1/3 (n=3) of the centred value.
    """
    sphere = 2.0 if n == 2 else 2.0 * math.pi
    constant = sphere / (4.0 * math.pi) ** (0.5 * n)
    if centered:
        return constant
    return constant * (0.5 if n == 2 else 1.0 / 3.0)


def reduction_check(rho, n, offset=None, control=None):
    """Return (I, c phi_n(2, rho), holds) for the reduction inequality."""
    integral = sharpness_integral(rho, n, offset, control)
    bound = reduction_constant(n, centered=offset is None) * phi_n(2.0, rho, n)
    holds = integral >= bound * (1.0 - 1e-7)
    return integral, bound, holds

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
"""bounds.py

Closed-form lifespan bounds and the discrete constructions behind them.

The lower bounds carry abstract constants (C for the general bound, C*
of the critical growth inequality, the threshold Y0). They are plain
config fields here and can be calibrated against a measured blow-up time.
Everything that can over- or underflow for extreme q is evaluated in
log-space.
"""
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import (AcceptanceFailure, InvalidData, NoRoot,
                         PreconditionViolated, ScheduleEmpty)
from .tools import log_power


logger = logging.getLogger(__name__)

BOUNDS_HEADER = ("q", "M0", "gamma1_area", "n", "upper", "lower_general",
                 "Y", "lower_critical", "C_used", "Cstar_used")
ROOT_RTOL = 1e-15


@dataclass(frozen=True)
class BoundsConfig(object):
    """Inputs of the bound formulas.

    Attributes:
        q: Exponent > 1.
        M0: max u0 > 0.
        gamma1_area: |Gamma_1| > 0.
        omega_volume: |Omega| > 0.
        n: Dimension.
        C_general: Constant of the general lower bound.
        C_star: Constant of the critical growth inequality.
        Y0: Regime threshold proxy; None means 1/(36 C_star).
        C_critical: Constant of the critical lower bound; None means the
            1/(40 C_star) that holds whenever Y <= 1/(36 C_star q).
        min_u0: min u0 >= 0; None means constant data (min = M0).
    """
    q: float
    M0: float
    gamma1_area: float
    omega_volume: float
    n: int
    C_general: float = 1.0
    C_star: float = 1.0
    Y0: float = None
    C_critical: float = None
    min_u0: float = None

    def __post_init__(self):
        if not self.q > 1:
            raise InvalidData("q must exceed 1, got %r." % self.q)
        if not (self.M0 > 0 and self.gamma1_area > 0 and
                self.omega_volume > 0):
            raise InvalidData("M0, |Gamma_1| and |Omega| must be positive.")
        if self.n not in (2, 3):
            raise InvalidData("Bounds are available for n = 2 or 3.")
        if not (self.C_general > 0 and self.C_star > 0):
            raise InvalidData("Bound constants must be positive.")
        if self.min_u0 is not None and not 0 <= self.min_u0 <= self.M0:
            raise InvalidData("min u0 must lie in [0, M0].")

    @property
    def threshold(self):
        """Y0 / q, the largest Y for which the critical bound applies."""
        return self.y0 / self.q

    @property
    def y0(self):
        return self.Y0 if self.Y0 is not None else 1.0 / (36.0 * self.C_star)

    @property
    def critical_constant(self):
        if self.C_critical is not None:
            return self.C_critical
        return 1.0 / (40.0 * self.C_star)

    @property
    def data_minimum(self):
        return self.M0 if self.min_u0 is None else self.min_u0


def upper_bound(q, gamma1_area, u0, cell_volumes):
    """(1 / ((q-1) |Gamma_1|)) int_Omega u0^(1-q) dx by grid quadrature.

    Args:
        u0: Samples (or a constant).
        cell_volumes: Matching quadrature weights (or |Omega| for a
            constant).

    Raises:
        PreconditionViolated if u0 vanishes anywhere it carries weight.
    """
    u0, volumes = np.broadcast_arrays(np.asarray(u0, dtype=float),
                                      np.asarray(cell_volumes, dtype=float))
    weighted = volumes > 0
    if np.any(u0[weighted] <= 0):
        raise PreconditionViolated("The upper bound needs min u0 > 0.")
    integral = float(np.sum(volumes[weighted] * u0[weighted] ** (1.0 - q)))
    return integral / ((q - 1.0) * gamma1_area)


def upper_bound_constant(q, M0, gamma1_area, omega_volume):
    """Upper bound for constant data: |Omega| M0^(1-q) / ((q-1) |Gamma_1|)."""
    return (omega_volume * log_power(M0, 1.0 - q) /
            ((q - 1.0) * gamma1_area))


def _general_exponent(config):
    # ln[(2 M0)^(-4(q-1)) |Gamma_1|^(-2/(n-1))]
    return (-4.0 * (config.q - 1.0) * math.log(2.0 * config.M0) -
            2.0 / (config.n - 1) * math.log(config.gamma1_area))


def lower_bound_general(config):
    """C/(q-1) ln(1 + (2 M0)^(-4(q-1)) |Gamma_1|^(-2/(n-1)))."""
    log_term = float(np.logaddexp(0.0, _general_exponent(config)))
    return config.C_general / (config.q - 1.0) * log_term


def gamma_factor(gamma1_area, n):
    """|Gamma_1|^(1/(n-1)) for n >= 3, |Gamma_1| ln(1 + 1/|Gamma_1|) for 2."""
    if n == 2:
        return gamma1_area * math.log1p(1.0 / gamma1_area)
    return gamma1_area ** (1.0 / (n - 1))


def y_quantity(config):
    """Y = M0^(q-1) times the critical |Gamma_1| factor."""
    return (log_power(config.M0, config.q - 1.0) *
            gamma_factor(config.gamma1_area, config.n))


def delta_one(config):
    """delta_1 = 2 C* times the critical |Gamma_1| factor."""
    return 2.0 * config.C_star * gamma_factor(config.gamma1_area, config.n)


@dataclass(frozen=True)
class RegimeNotApplicable(object):
    """Y is above the threshold Y0/q: the critical bound says nothing."""
    Y: float
    threshold: float

    def __bool__(self):
        return False


def lower_bound_critical(config):
    """Return (Y, C/((q-1) Y)) or (Y, RegimeNotApplicable)."""
    Y = y_quantity(config)
    if Y > config.threshold:
        logger.debug("Y=%g above threshold %g", Y, config.threshold)
        return Y, RegimeNotApplicable(Y, config.threshold)
    return Y, config.critical_constant / ((config.q - 1.0) * Y)


def lower_bound_critical_explicit(config):
    """(1 / (10(q-1))) (1 / (2 C* Y) - 9q), valid for every Y."""
    Y = y_quantity(config)
    return (1.0 / (2.0 * config.C_star * Y) - 9.0 * config.q) / \
        (10.0 * (config.q - 1.0))


@dataclass(frozen=True)
class SeriesResult(object):
    sum: float
    bound: float
    holds: bool
    saturated: int


def _series_sum(lam, log_a):
    """sum_{k>=1} min(1, lam^k A) with A = exp(log_a), and K0."""
    log_lam = math.log(lam)
    # K0 = #{k >= 1 : lam^k A >= 1}
    saturated = max(0, int(math.floor(log_a / -log_lam)))
    while log_a + (saturated + 1) * log_lam >= 0.0:
        saturated += 1
    while saturated > 0 and log_a + saturated * log_lam < 0.0:
        saturated -= 1
    tail = math.exp(log_a + (saturated + 1) * log_lam) / (1.0 - lam)
    return saturated + tail, saturated


def series_lower_bound(lam, A):
    """Sum of min(1, lam^k A) against ln(1 + lam A) / (2 ln(1/lam)).

    The sum is exact: K0 saturated terms plus a geometric tail.
    """
    if not 0.0 < lam < 1.0:
        raise InvalidData("lambda must lie in (0, 1).")
    if not A > 0:
        raise InvalidData("A must be positive.")
    total, saturated = _series_sum(lam, math.log(A))
    bound = math.log1p(lam * A) / (2.0 * math.log(1.0 / lam))
    return SeriesResult(total, bound, bool(total >= bound), saturated)


def e_q(q):
    """E_q = (q-1)^(q-1) / q^q."""
    if not q > 1:
        raise InvalidData("E_q needs q > 1.")
    return math.exp((q - 1.0) * math.log(q - 1.0) - q * math.log(q))


def e_q_sandwich(q):
    """(1/(3q), E_q, min(1/q, 1/((q-1)e)))."""
    return (1.0 / (3.0 * q), e_q(q),
            min(1.0 / q, 1.0 / ((q - 1.0) * math.e)))


def g_value(lam, q, m):
    """g(lambda) = (lambda - m) / lambda^q."""
    return (lam - m) / lam ** q


def g_root(q, m, y):
    """The unique lambda in (m, qm/(q-1)] with g(lambda) = y.

    Works with nu = lambda/m - 1, which solves nu / (1+nu)^q = y m^(q-1);
    the left side increases on (0, 1/(q-1)], so bisection (geometric
    while the bracket spans decades) always converges.

    Raises:
        NoRoot if y > m^(1-q) E_q.
    """
    if not (q > 1 and m > 0 and y > 0):
        raise InvalidData("g_root needs q > 1, m > 0 and y > 0.")
    target = y * log_power(m, q - 1.0)
    peak = e_q(q)
    if target > peak * (1.0 + 1e-12):
        raise NoRoot("g(lambda) = %g has no root beyond m = %g (max %g)." %
                     (y, m, peak / m ** (q - 1.0)), y=y,
                     y_max=peak / m ** (q - 1.0))
    top = 1.0 / (q - 1.0)
    if target >= peak:
        return m * (1.0 + top)

    def shape(nu):
        return nu / math.exp(q * math.log1p(nu))

    lo, hi = min(target, top), top
    for _ in range(400):
        if hi - lo <= ROOT_RTOL * hi:
            break
        mid = math.sqrt(lo * hi) if hi > 4.0 * lo else 0.5 * (lo + hi)
        if shape(mid) < target:
            lo = mid
        else:
            hi = mid
    return m * (1.0 + 0.5 * (lo + hi))


@dataclass(frozen=True)
class ScheduleResult(object):
    """Output of a discrete schedule.

    Attributes:
        levels: M_k, k = 0..L.
        x: x_k = M_k^(q-1) delta_1 (critical schedule).
        steps: L.
        first_large: L0, the first k with x_k > min(1/2, E_q) (None when
            x_0 is already above).
        step_bound: (1/(10(q-1))) (1/x_0 - 9q), which L exceeds.
        gaps: Lower bounds of t_k (doubling schedule).
    """
    levels: tuple
    x: tuple = ()
    steps: int = 0
    first_large: int = None
    step_bound: float = None
    gaps: tuple = ()

    @property
    def bound_holds(self):
        return self.step_bound is None or self.steps > self.step_bound

    def recurrence_residual(self, q):
        """max |x_{k-1} - x_k (1 - x_k)^(q-1)| / x_{k-1} along the output."""
        x = np.asarray(self.x)
        if len(x) < 2:
            return 0.0
        predicted = x[1:] * (1.0 - x[1:]) ** (q - 1.0)
        return float(np.max(np.abs(x[:-1] - predicted) / x[:-1]))


def critical_schedule(q, M0, delta1, max_steps=10 ** 6):
    """M_k with (M_k - M_{k-1}) / M_k^q = delta_1 while x_{k-1} <= E_q.

    Raises:
        ScheduleEmpty if M0^(q-1) delta_1 > E_q already; the exception
            carries the L = 0 result.
        AcceptanceFailure if the construction does not stop.
    """
    peak = e_q(q)
    x0 = log_power(M0, q - 1.0) * delta1
    step_bound = (1.0 / x0 - 9.0 * q) / (10.0 * (q - 1.0))
    if x0 > peak:
        empty = ScheduleResult((M0,), (x0,), 0, None, step_bound)
        raise ScheduleEmpty("x_0 = %g exceeds E_q = %g." % (x0, peak),
                            schedule=empty)
    levels = [M0]
    xs = [x0]
    large = min(0.5, peak)
    first_large = None
    while xs[-1] <= peak:
        if len(levels) > max_steps:
            raise AcceptanceFailure("Critical schedule did not stop after "
                                    "%d steps." % max_steps)
        level = g_root(q, levels[-1], delta1)
        levels.append(level)
        xs.append(log_power(level, q - 1.0) * delta1)
        if first_large is None and x0 <= large and xs[-1] > large:
            first_large = len(levels) - 1
    result = ScheduleResult(tuple(levels), tuple(xs), len(levels) - 1,
                            first_large, step_bound)
    logger.debug("Critical schedule: L=%d, L0=%s, bound %g", result.steps,
                 first_large, step_bound)
    return result


@dataclass(frozen=True)
class DoublingResult(object):
    """Doubling schedule M_k = 2^k M0 and its series lower bound.

    Attributes:
        sum: sum_k min(1, C (2^k M0)^(-4(q-1)) |Gamma_1|^(-2/(n-1))).
        series_bound: min(C, 1) ln(1 + lam A) / (8 (q-1) ln 2).
        implied_constant: The general-bound constant the series delivers.
        lower_general: lower_bound_general at that constant.
        holds: sum >= lower_general.
        schedule: ScheduleResult with the first gaps.
    """
    sum: float
    series_bound: float
    implied_constant: float
    lower_general: float
    holds: bool
    schedule: ScheduleResult = field(repr=False)


def doubling_schedule(config, terms=None):
    """Sum the gap lower bounds of the doubling schedule.

    With lam = 2^(-4(q-1)) and A = M0^(-4(q-1)) |Gamma_1|^(-2/(n-1)) the
    k-th gap is at least min(1, C lam^k A); the series inequality turns the sum
    into the general lower bound.
    """
    q = config.q
    lam = math.exp(-4.0 * (q - 1.0) * math.log(2.0))
    log_a = (-4.0 * (q - 1.0) * math.log(config.M0) -
             2.0 / (config.n - 1) * math.log(config.gamma1_area))
    scaled = log_a + math.log(config.C_general)
    total, saturated = _series_sum(lam, scaled)
    implied = min(config.C_general, 1.0) / (8.0 * math.log(2.0))
    series_bound = (min(config.C_general, 1.0) *
                    float(np.logaddexp(0.0, log_a + math.log(lam))) /
                    (8.0 * (q - 1.0) * math.log(2.0)))
    general = lower_bound_general(replace(config, C_general=implied))
    count = terms if terms is not None else saturated + 20
    gaps = tuple(min(1.0, math.exp(scaled + k * math.log(lam)))
                 for k in range(1, count + 1))
    levels = tuple(2.0 ** k * config.M0 for k in range(count + 1))
    schedule = ScheduleResult(levels, steps=count, gaps=gaps)
    return DoublingResult(total, series_bound, implied, general,
                          bool(total >= general * (1.0 - 1e-12)), schedule)


def calibrate_general_constant(config, measured_tstar):
    """C_general making the general bound equal a measured T*."""
    log_term = float(np.logaddexp(0.0, _general_exponent(config)))
    return measured_tstar * (config.q - 1.0) / log_term


def calibrate_critical_constant(config, measured_tstar):
    """C_critical making C/((q-1) Y) equal a measured T*."""
    return measured_tstar * (config.q - 1.0) * y_quantity(config)


@dataclass(frozen=True)
class BoundsReport(object):
    """Every bound for one configuration, with the constants used."""
    q: float
    M0: float
    gamma1_area: float
    n: int
    upper: float
    lower_general: float
    Y: float
    lower_critical: float
    regime: str
    C_used: float
    Cstar_used: float
    Y0_used: float

    def row(self):
        return (self.q, self.M0, self.gamma1_area, self.n, self.upper,
                self.lower_general, self.Y, self.lower_critical, self.C_used,
                self.Cstar_used)


def bounds_report(config):
    """Upper bound, both lower bounds, Y and the regime flag."""
    minimum = config.data_minimum
    upper = None
    if minimum > 0:
        upper = upper_bound_constant(config.q, minimum, config.gamma1_area,
                                     config.omega_volume)
    Y, critical = lower_bound_critical(config)
    applicable = not isinstance(critical, RegimeNotApplicable)
    return BoundsReport(
        config.q, config.M0, config.gamma1_area, config.n, upper,
        lower_bound_general(config), Y, critical if applicable else None,
        "critical" if applicable else "not-applicable", config.C_general,
        config.C_star, config.y0)


DISCRETE_HEADER = ("check", "samples", "failures", "worst")


def discrete_checks(rng, samples=1000, schedules=100):
    """Randomized checks of the discrete constructions.

    Args:
        rng: numpy Generator.
        samples: Draws for the E_q sandwich, the series inequality and g_root.
        schedules: Draws for the critical and doubling schedules.

    Returns:
        Rows (check, samples, failures, worst) where worst is the largest
        violation or residual seen.
    """
    rows = []

    # q in (1, 100]
    qs = 1.0 + 99.0 * (1.0 - rng.random(samples))
    worst, failures = 0.0, 0
    for q in qs:
        low, value, high = e_q_sandwich(q)
        excess = max(low - value, value - high, 0.0)
        worst = max(worst, excess)
        failures += excess > 0
    rows.append(("e_q_sandwich", samples, failures, worst))

    worst, failures = 0.0, 0
    for lam, log_a in zip(rng.uniform(0.01, 0.99, samples),
                          rng.uniform(-8.0, 14.0, samples)):
        result = series_lower_bound(lam, math.exp(log_a))
        worst = max(worst, result.bound - result.sum)
        failures += not result.holds
    rows.append(("series_lower_bound", samples, failures, worst))

    worst, failures = 0.0, 0
    for q, log_m, frac in zip(rng.uniform(1.1, 5.0, samples),
                              rng.uniform(-2.0, 2.0, samples),
                              10.0 ** rng.uniform(-3.0, 0.0, samples)):
        m = 10.0 ** log_m
        y = frac * e_q(q) / m ** (q - 1.0)
        lam = g_root(q, m, y)
        residual = abs(g_value(lam, q, m) - y) / y
        worst = max(worst, residual)
        failures += residual > 1e-10
        try:
            g_root(q, m, rng.uniform(1.01, 3.0) * e_q(q) / m ** (q - 1.0))
        except NoRoot:
            pass
        else:
            failures += 1
    rows.append(("g_root", samples, failures, worst))

    worst, failures = 0.0, 0
    for q, M0, frac in zip(rng.uniform(1.1, 5.0, schedules),
                           10.0 ** rng.uniform(-1.0, 1.0, schedules),
                           rng.uniform(0.01, 0.99, schedules)):
        # delta_1 is chosen so that x_0 = M0^(q-1) delta_1 lies below E_q.
        x0 = max(frac * e_q(q), 0.01)
        result = critical_schedule(q, M0, x0 / log_power(M0, q - 1.0))
        residual = result.recurrence_residual(q)
        worst = max(worst, residual)
        failures += (not result.bound_holds) or residual > 1e-10
    rows.append(("critical_schedule", schedules, failures, worst))

    worst, failures = 0.0, 0
    for q, M0, area, C, n in zip(rng.uniform(1.05, 4.0, schedules),
                                 10.0 ** rng.uniform(-1.0, 1.0, schedules),
                                 10.0 ** rng.uniform(-4.0, 0.0, schedules),
                                 10.0 ** rng.uniform(-1.0, 1.0, schedules),
                                 rng.integers(2, 4, schedules)):
        config = BoundsConfig(q=q, M0=M0, gamma1_area=area, omega_volume=1.0,
                              n=int(n), C_general=C)
        result = doubling_schedule(config)
        worst = max(worst, result.lower_general - result.sum)
        failures += not result.holds
    rows.append(("doubling_schedule", schedules, failures, worst))

    for row in rows:
        logger.debug("Discrete check %s: %d/%d failed (worst %.3g)",
                     row[0], row[2], row[1], row[3])
    return rows

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
"""neumann_kernel.py

Neumann heat kernel N(x, y, t) of a box and the representation formula

    u(x, t) = int_Omega N(x, y, t) u0(y) dy
              + int_0^t int_Gamma1 N(x, y, t - tau) u^q(y, tau) dS dtau.

On a box the kernel is a product of 1-D kernels. Each 1-D kernel is an
image sum for t <= t_switch and a cosine expansion beyond; both branches
also integrate exactly over an interval, which is how cells of the
initial data and of the patch are handled.

Classes:
    AxisKernel
    KernelEvaluator
    PatchKernel
    RepFormulaInput
    Truncation
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .exceptions import InvalidData, InvalidGeometry, InvalidTime
from .freespace import DEFAULT_CONTROL, phi_1d
from .geometry import surface_nodes
from .tools import adaptive_quad, gauss_legendre, write_csv


logger = logging.getLogger(__name__)

PROPERTY_HEADER = ("t", "mass_error", "symmetry_error", "gaussian_ratio")
# Weight of the first dropped eigenmode at t_switch.
MODE_TOLERANCE = 1e-14


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise InvalidTime("The Neumann kernel needs t > 0.")
    return t


@dataclass(frozen=True)
class Truncation(object):
    """Truncation of the two kernel representations.

    Attributes:
        images: Image count K per side (2K + 1 shifts per family).
        modes: Eigenmode count M; None picks the smallest M whose first
            dropped mode weighs below 1e-14 at t_switch.
        switch_scale: t_switch = switch_scale * L^2 / pi^2 per axis.
    """
    images: int = 6
    modes: int = None
    switch_scale: float = 1.0

    def __post_init__(self):
        if self.images < 1 or (self.modes is not None and self.modes < 1):
            raise InvalidData("Kernel truncation needs K, M >= 1.")
        if not self.switch_scale > 0:
            raise InvalidData("t_switch must be positive.")

    def mode_count(self):
        if self.modes is not None:
            return self.modes
        # exp(-(M+1)^2 switch_scale) < tolerance.
        needed = math.sqrt(-math.log(MODE_TOLERANCE) / self.switch_scale)
        return max(1, int(math.ceil(needed)) - 1)


@dataclass(frozen=True)
class AxisKernel(object):
    """1-D Neumann heat kernel on [0, length]."""
    length: float
    images: int = 6
    modes: int = 5
    switch: float = None

    def __post_init__(self):
        if self.switch is None:
            object.__setattr__(self, "switch", self.length ** 2 / np.pi ** 2)

    @property
    def shifts(self):
        return 2.0 * self.length * np.arange(-self.images, self.images + 1)

    @property
    def frequencies(self):
        return np.arange(1, self.modes + 1) * np.pi / self.length

    def _images(self, x, y, t):
        shifts = self.shifts
        x, y, t = x[..., None], y[..., None], t[..., None]
        return np.sum(phi_1d(x - y - shifts, t) + phi_1d(x + y - shifts, t),
                      axis=-1)

    def _modes(self, x, y, t):
        freq = self.frequencies
        x, y, t = x[..., None], y[..., None], t[..., None]
        terms = (np.exp(-freq ** 2 * t) * np.cos(freq * x) *
                 np.cos(freq * y))
        return (1.0 + 2.0 * np.sum(terms, axis=-1)) / self.length

    def value(self, x, y, t, branch=None):
        """N_1(x, y, t); branch forces "images" or "modes"."""
        x, y, t = np.broadcast_arrays(np.asarray(x, dtype=float),
                                      np.asarray(y, dtype=float),
                                      _check_time(t))
        if branch == "images":
            return self._images(x, y, t)
        if branch == "modes":
            return self._modes(x, y, t)
        small = t <= self.switch
        out = np.empty(x.shape)
        out[small] = self._images(x[small], y[small], t[small])
        out[~small] = self._modes(x[~small], y[~small], t[~small])
        return out

    def _interval_images(self, x, a, b, t):
        shifts = self.shifts
        x, a, b = x[..., None], a[..., None], b[..., None]
        scale = 2.0 * np.sqrt(t)[..., None]
        direct = (special.erf((x - shifts - a) / scale) -
                  special.erf((x - shifts - b) / scale))
        mirror = (special.erf((x + b - shifts) / scale) -
                  special.erf((x + a - shifts) / scale))
        return 0.5 * np.sum(direct + mirror, axis=-1)

    def _interval_modes(self, x, a, b, t):
        freq = self.frequencies
        x, a, b, t = x[..., None], a[..., None], b[..., None], t[..., None]
        terms = (np.exp(-freq ** 2 * t) * np.cos(freq * x) *
                 (np.sin(freq * b) - np.sin(freq * a)) / freq)
        return ((b[..., 0] - a[..., 0]) + 2.0 * np.sum(terms, axis=-1)) / \
            self.length

    def interval(self, x, a, b, t):
        """int_a^b N_1(x, y, t) dy, exact in either branch."""
        x, a, b, t = np.broadcast_arrays(np.asarray(x, dtype=float),
                                         np.asarray(a, dtype=float),
                                         np.asarray(b, dtype=float),
                                         _check_time(t))
        small = t <= self.switch
        out = np.empty(x.shape)
        out[small] = self._interval_images(x[small], a[small], b[small],
                                           t[small])
        out[~small] = self._interval_modes(x[~small], a[~small], b[~small],
                                           t[~small])
        return out

    def gaussian_ratio(self, x, y, t):
        """N_1(x, y, t) / Phi_1(x - y, 2t) without under/overflow.

        Every image lies at least as far from x as y does, so in the image
        branch each term is sqrt(2) exp(-z^2/4t + (x-y)^2/8t) <= sqrt(2).
        """
        x, y, t = np.broadcast_arrays(np.asarray(x, dtype=float),
                                      np.asarray(y, dtype=float),
                                      _check_time(t))
        small = t <= self.switch
        out = np.empty(x.shape)
        xs, ys, ts = x[small][..., None], y[small][..., None], \
            t[small][..., None]
        gap = (xs - ys) ** 2 / (8.0 * ts)
        shifts = self.shifts
        exponents = np.concatenate([-(xs - ys - shifts) ** 2 / (4.0 * ts),
                                    -(xs + ys - shifts) ** 2 / (4.0 * ts)],
                                   axis=-1)
        out[small] = np.sqrt(2.0) * np.sum(np.exp(exponents + gap), axis=-1)
        big = ~small
        out[big] = (self._modes(x[big], y[big], t[big]) /
                    phi_1d(x[big] - y[big], 2.0 * t[big]))
        return out


def kernel_1d(x, y, t, length, truncation=None, branch=None):
    """1-D Neumann heat kernel on [0, length].

    Raises:
        InvalidTime if t <= 0.
    """
    truncation = truncation or Truncation()
    axis = AxisKernel(float(length), truncation.images,
                      truncation.mode_count(),
                      truncation.switch_scale * length ** 2 / np.pi ** 2)
    return axis.value(x, y, t, branch)


@dataclass(frozen=True)
class KernelEvaluator(object):
    """Neumann heat kernel of a box as a product of 1-D kernels."""
    domain: object
    truncation: Truncation = field(default_factory=Truncation)

    def __post_init__(self):
        if not self.domain.is_box:
            raise InvalidGeometry("The Neumann kernel is available on boxes "
                                  "only, not %s." % self.domain.kind.value)

    @property
    def n(self):
        return self.domain.n

    @property
    def axes(self):
        trunc = self.truncation
        return tuple(
            AxisKernel(length, trunc.images, trunc.mode_count(),
                       trunc.switch_scale * length ** 2 / np.pi ** 2)
            for length in self.domain.extents)

    def refined(self, images=None, modes=None):
        """Same evaluator with a different truncation."""
        trunc = self.truncation
        return KernelEvaluator(self.domain, Truncation(
            images or trunc.images, modes or trunc.modes, trunc.switch_scale))

    def value(self, x, y, t, branch=None):
        """N(x, y, t) for points of shape (..., n)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        result = 1.0
        for d, axis in enumerate(self.axes):
            result = result * axis.value(x[..., d], y[..., d], t, branch)
        return result

    __call__ = value

    def mass(self, x, t):
        """int_Omega N(x, y, t) dy for points x of shape (..., n)."""
        x = np.asarray(x, dtype=float)
        result = 1.0
        for d, axis in enumerate(self.axes):
            result = result * axis.interval(x[..., d], 0.0, axis.length, t)
        return result

    def gaussian_ratio(self, x, y, t):
        """N(x, y, t) / Phi(x - y, 2t)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        result = 1.0
        for d, axis in enumerate(self.axes):
            result = result * axis.gaussian_ratio(x[..., d], y[..., d], t)
        return result

    def sample_points(self, resolution):
        """Tensor grid of points including faces and corners."""
        axes = [np.linspace(0.0, extent, resolution)
                for extent in self.domain.extents]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def kernel_box(x, y, t, domain, truncation=None):
    """N(x, y, t) on a box domain."""
    return KernelEvaluator(domain, truncation or Truncation()).value(x, y, t)


def branch_agreement(evaluator, resolution=10):
    """max |images - modes| at t_switch over a resolution^2 (x, y) sample."""
    worst = 0.0
    for axis in evaluator.axes:
        grid = np.linspace(0.0, axis.length, resolution)
        xx, yy = np.meshgrid(grid, grid, indexing="ij")
        gap = np.abs(axis.value(xx, yy, axis.switch, "images") -
                     axis.value(xx, yy, axis.switch, "modes"))
        worst = max(worst, float(gap.max()))
    return worst


def gaussian_bound_constant(evaluator, times, resolution=5):
    """Empirical sup of N(x, y, t) / Phi(x - y, 2t) over a sample.

    Args:
        times: Sample times, all in (0, 1].
        resolution: Points per axis of the (x, y) tensor sample.
    """
    times = np.asarray(times, dtype=float)
    if np.any(times > 1.0) or np.any(~(times > 0)):
        raise InvalidTime("The Gaussian bound is sampled for t in (0, 1].")
    points = evaluator.sample_points(resolution)
    x = points[:, None, :]
    y = points[None, :, :]
    best = 0.0
    for t in times:
        best = max(best, float(np.max(evaluator.gaussian_ratio(x, y, t))))
    return best


def kernel_property_sweep(evaluator, times, resolution=5, path=None):
    """Rows (t, mass_error, symmetry_error, gaussian_ratio) over times.

    The Gaussian ratio is only meaningful for t <= 1 and is None beyond.
    """
    points = evaluator.sample_points(resolution)
    x = points[:, None, :]
    y = points[None, :, :]
    rows = []
    for t in times:
        mass_error = float(np.max(np.abs(evaluator.mass(points, t) - 1.0)))
        forward = evaluator.value(x, y, t)
        symmetry = float(np.max(np.abs(forward - evaluator.value(y, x, t))))
        ratio = (float(np.max(evaluator.gaussian_ratio(x, y, t)))
                 if t <= 1.0 else None)
        rows.append((float(t), mass_error, symmetry, ratio))
        logger.debug("Kernel at t=%g: mass %.2e symmetry %.2e", t,
                     mass_error, symmetry)
    if path:
        write_csv(path, PROPERTY_HEADER, rows)
    return rows


def normal_derivative_residual(evaluator, y, t, h):
    """Largest one-sided normal difference of N(., y, t) on the faces.

    The normal derivative is taken with the second-order one-sided stencil
    (-3N(0) + 4N(h) - N(2h)) / 2h, not a centred difference: N is even
    about every face, so a centred difference vanishes identically. The
    residual is therefore O(h^3) rather than zero.
    """
    y = np.asarray(y, dtype=float)
    worst = 0.0
    resolution = 5
    for axis, extent in enumerate(evaluator.domain.extents):
        others = [np.linspace(0.0, e, resolution)
                  for d, e in enumerate(evaluator.domain.extents)
                  if d != axis]
        mesh = np.meshgrid(*others, indexing="ij")
        base = np.zeros((mesh[0].size, evaluator.n))
        k = 0
        for d in range(evaluator.n):
            if d != axis:
                base[:, d] = mesh[k].ravel()
                k += 1
        for level, inward in ((0.0, 1.0), (extent, -1.0)):
            stencil = []
            for step in (0.0, h, 2.0 * h):
                points = base.copy()
                points[:, axis] = level + inward * step
                stencil.append(evaluator.value(points, y, t))
            diff = (-3.0 * stencil[0] + 4.0 * stencil[1] - stencil[2]) / \
                (2.0 * h)
            worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def _dual_cells(grid, axis):
    coords = grid.axis_coords(axis)
    half = 0.5 * grid.spacing[axis]
    return (np.maximum(coords - half, 0.0),
            np.minimum(coords + half, grid.domain.extents[axis]))


def initial_term(evaluator, points, u0, grid, t):
    """int_Omega N(x, y, t) u0(y) dy with u0 constant on dual cells.

    Cell integrals are exact, so constant data is reproduced up to the
    kernel truncation.

    Args:
        points: (P, n) evaluation points.
        u0: Grid-shaped samples or a scalar.
        grid: Grid over the same box.
        t: Time > 0.
    """
    if not grid.domain.is_box:
        raise InvalidGeometry("The initial term needs a box grid.")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    u0 = np.broadcast_to(np.asarray(u0, dtype=float), grid.shape)
    factors = []
    for d, axis in enumerate(evaluator.axes):
        lo, hi = _dual_cells(grid, d)
        factors.append(axis.interval(points[:, d, None], lo[None, :],
                                     hi[None, :], t))
    letters = "abc"[:evaluator.n]
    subscripts = ",".join("p" + letter for letter in letters)
    return np.einsum("%s,%s->p" % (subscripts, letters), *factors, u0,
                     optimize=True)


class PatchKernel(object):
    """Cell-integrated kernel between target points and patch cells.

    K_ij(sigma) = N_normal(x_i, face, sigma) * prod_d int_{cell_j} N_d dy.

    Time integration over an interval of the history uses Gauss-Legendre
    nodes in s = sqrt(sigma), which absorbs the sigma^(-1/2) singularity
    of targets on the patch, with hat-function weights in tau. Weight
    pairs depend only on the interval (sigma_lo, sigma_hi) and are cached,
    so uniform meshes only ever build one pair per lag.
    """

    def __init__(self, evaluator, patch, targets, cells, gauss_points=8):
        if patch.shape != "rect":
            raise InvalidGeometry("Patch kernels need a rectangular patch.")
        self.evaluator = evaluator
        self.patch = patch
        self.targets = np.atleast_2d(np.asarray(targets, dtype=float))
        self.cells = cells
        self.gauss_points = gauss_points
        self._cache = {}
        self._normal_axis = evaluator.axes[patch.face.axis]
        self._normal_x, self._normal_inverse = np.unique(
            self.targets[:, patch.face.axis], return_inverse=True)
        self._tangential = []
        for d in patch.tangential_axes:
            xs, x_inv = np.unique(self.targets[:, d], return_inverse=True)
            bounds = np.stack([cells.cell_lo[:, d], cells.cell_hi[:, d]],
                              axis=1)
            cell_bounds, c_inv = np.unique(bounds, axis=0,
                                           return_inverse=True)
            self._tangential.append((evaluator.axes[d], xs, x_inv.ravel(),
                                     cell_bounds, c_inv.ravel()))

    def __len__(self):
        return len(self._cache)

    @property
    def shape(self):
        return len(self.targets), len(self.cells)

    def matrix(self, sigma):
        """K(sigma), shape (targets, cells)."""
        normal = self._normal_axis.value(self._normal_x, self.patch.face.level,
                                         sigma)[self._normal_inverse]
        result = normal[:, None]
        for axis, xs, x_inv, bounds, c_inv in self._tangential:
            small = axis.interval(xs[:, None], bounds[None, :, 0],
                                  bounds[None, :, 1], sigma)
            result = result * small[x_inv][:, c_inv]
        return result

    def _panels(self, sigma_lo, sigma_hi):
        s_lo, s_hi = math.sqrt(sigma_lo), math.sqrt(sigma_hi)
        if sigma_lo > 0.0:
            return [(s_lo, s_hi)]
        # Graded panels towards s = 0 where the cell windows sharpen.
        edges = [0.0] + [s_hi * 0.5 ** k for k in range(3, -1, -1)]
        return list(zip(edges[:-1], edges[1:]))

    def weights(self, sigma_lo, sigma_hi):
        """Matrices (A, B) for one history interval.

        The interval is tau in [t - sigma_hi, t - sigma_lo]; A weights the
        source at its start and B at its end.
        """
        key = (float("%.12e" % sigma_lo), float("%.12e" % sigma_hi))
        if key in self._cache:
            return self._cache[key]
        nodes, gauss_weights = gauss_legendre(self.gauss_points)
        start = np.zeros(self.shape)
        end = np.zeros(self.shape)
        width = sigma_hi - sigma_lo
        for s_lo, s_hi in self._panels(sigma_lo, sigma_hi):
            half = 0.5 * (s_hi - s_lo)
            for node, weight in zip(nodes, gauss_weights):
                s = s_lo + half * (node + 1.0)
                sigma = s * s
                theta = (sigma_hi - sigma) / width
                kernel = self.matrix(sigma) * (2.0 * s * half * weight)
                start += kernel * (1.0 - theta)
                end += kernel * theta
        self._cache[key] = (start, end)
        if len(self._cache) % 500 == 0:
            logger.debug("Patch kernel cache holds %d weight pairs",
                         len(self._cache))
        return start, end

    def history(self, t, times, source):
        """int_0^t int_patch N(x, y, t - tau) f(y, tau) dS dtau.

        Args:
            t: Evaluation time, at most times[-1].
            times: Strictly increasing mesh starting at 0.
            source: (len(times), cells) samples of f, linear in tau.
        """
        times = np.asarray(times, dtype=float)
        source = np.asarray(source, dtype=float)
        if t > times[-1] * (1.0 + 1e-12):
            raise InvalidTime("t=%g lies beyond the history mesh." % t)
        inside = times < t
        taus = np.append(times[inside], t)
        values = np.vstack([source[inside],
                            [np.interp(t, times, column)
                             for column in source.T]])
        total = np.zeros(len(self.targets))
        for k in range(len(taus) - 1):
            start, end = self.weights(t - taus[k + 1], t - taus[k])
            total += start @ values[k] + end @ values[k + 1]
        return total


@dataclass(frozen=True)
class RepFormulaInput(object):
    """Data of the representation formula.

    Attributes:
        grid: Box grid carrying u0.
        u0: Initial data, grid-shaped samples or a scalar.
        patch: Rectangular Gamma_1.
        cells: SurfaceQuadrature of patch cells (cell bounds required).
        times: History mesh, strictly increasing from 0.
        boundary: (len(times), len(cells)) samples of u on the cells, or
            None for a zero flux term.
        q: Exponent > 1.
    """
    grid: object
    u0: object
    patch: object
    cells: object
    times: np.ndarray
    boundary: np.ndarray
    q: float

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if times.size == 0 or times[0] != 0.0 or np.any(np.diff(times) <= 0):
            raise InvalidData("History mesh must increase strictly from 0.")
        if self.boundary is not None:
            boundary = np.asarray(self.boundary, dtype=float)
            if boundary.shape != (len(times), len(self.cells)):
                raise InvalidData("Boundary history shape %s does not match "
                                  "(%d, %d)." % (boundary.shape, len(times),
                                                 len(self.cells)))
            if np.any(boundary < 0):
                raise InvalidData("Boundary history must be nonnegative.")
        if not self.q > 1:
            raise InvalidData("q must exceed 1.")


def make_rep_input(grid, u0, patch, times, boundary, q, resolution=None):
    """RepFormulaInput with one patch cell per boundary grid cell."""
    if resolution is None:
        resolution = max(2, grid.nodes_across(patch) - 1)
    cells = surface_nodes(patch, resolution, "midpoint")
    return RepFormulaInput(grid, u0, patch, cells, np.asarray(times, float),
                           None if boundary is None else np.asarray(boundary),
                           q)


def rep_formula_eval(x, t, rep_input, evaluator, kernel=None):
    """Predicted u(x, t) from the representation formula.

    Valid for x inside Omega and on its boundary alike. A PatchKernel
    built for the same targets may be passed to reuse cached weights.
    """
    points = np.atleast_2d(np.asarray(x, dtype=float))
    value = initial_term(evaluator, points, rep_input.u0, rep_input.grid, t)
    if rep_input.boundary is None:
        return value
    if kernel is None:
        kernel = PatchKernel(evaluator, rep_input.patch, points,
                             rep_input.cells)
    source = np.asarray(rep_input.boundary, dtype=float) ** rep_input.q
    return value + kernel.history(t, rep_input.times, source)


def restart_input(rep_input, T, evaluator):
    """Restart the formula at time T: u(., T) becomes the initial data."""
    grid = rep_input.grid
    state = rep_formula_eval(grid.points(), T, rep_input, evaluator)
    times = np.asarray(rep_input.times, dtype=float)
    later = times > T
    shifted = np.append(0.0, times[later] - T)
    boundary = None
    if rep_input.boundary is not None:
        history = np.asarray(rep_input.boundary, dtype=float)
        first = [np.interp(T, times, column) for column in history.T]
        boundary = np.vstack([first, history[later]])
    return RepFormulaInput(grid, state.reshape(grid.shape), rep_input.patch,
                           rep_input.cells, shifted, boundary, rep_input.q)


def initial_recovery_errors(evaluator, x, u0, grid, exponents=range(3, 11)):
    """|int N(x, y, t) u0 dy - u0(x)| along t = 2^-j.

    Args:
        u0: Callable of (..., n) points.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    samples = u0(grid.points()).reshape(grid.shape)
    exact = u0(x)
    return [(2.0 ** -j, float(np.max(np.abs(
        initial_term(evaluator, x, samples, grid, 2.0 ** -j) - exact))))
        for j in exponents]


def boundary_time_kernel_integral(evaluator, x, patch, sigma_lo, sigma_hi,
                                  control=None):
    """int_{sigma_lo}^{sigma_hi} int_patch N(x, y, sigma) dS dsigma.

    Integrated in s = sqrt(sigma) with exact patch integrals in space.
    """
    control = control or DEFAULT_CONTROL
    x = np.asarray(x, dtype=float)
    axes = evaluator.axes

    def integrand(s):
        sigma = s * s
        value = axes[patch.face.axis].value(x[patch.face.axis],
                                            patch.face.level, sigma)
        for d in patch.tangential_axes:
            value = value * axes[d].interval(x[d], patch.lo[d], patch.hi[d],
                                             sigma)
        return 2.0 * s * float(value)

    value, _ = adaptive_quad(integrand, math.sqrt(sigma_lo),
                             math.sqrt(sigma_hi), control.epsabs,
                             control.epsrel, control.limit)
    return value


def shifted_integral_gaps(evaluator, x, patch, t, epsilons, control=None):
    """Gap between the eps-shifted and full boundary-time kernel integrals.

    Returns:
        List of (eps, gap, gap / sqrt(eps)) rows.
    """
    rows = []
    for eps in epsilons:
        gap = boundary_time_kernel_integral(evaluator, x, patch, 0.0,
                                            min(eps, t), control)
        rows.append((eps, gap, gap / math.sqrt(eps)))
    return rows

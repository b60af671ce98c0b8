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
"""geometry.py

Computational domains, the radiating patch Gamma_1 on a flat face, grids
with boundary-node classification, and surface quadrature nodes.

Only axis-aligned boxes (n = 2, 3) and the 2-D L-shape are supported, and
patches are always flat: an interval (n = 2), a rectangle or a disk
(n = 3) lying on a single face.
"""
import enum
import functools
import itertools
import logging
import math
import re
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidGeometry
from .tools import gauss_legendre


logger = logging.getLogger(__name__)

AXES = "xyz"
FACE_ALIASES = {"left": "x-", "right": "x+", "bottom": "y-", "top": "y+"}
# Relative tolerance for "lies on" tests.
TOL = 1e-9

# Boundary node labels.
NOT_BOUNDARY = 0
GAMMA_1 = 1
GAMMA_2 = 2
INTERFACE = 3


class DomainKind(enum.Enum):
    BOX2D = "Box2D"
    BOX3D = "Box3D"
    LSHAPE2D = "LShape2D"

    @property
    def dimension(self):
        return 3 if self is DomainKind.BOX3D else 2


@dataclass(frozen=True)
class Face(object):
    """A flat piece of the boundary.

    Attributes:
        name: Face id, e.g. "x-", "z+", or "inner-y" on the L-shape.
        axis: Index of the normal axis.
        outward: +1 or -1, sign of the exterior normal along axis.
        lo, hi: Corners of the face (lo[axis] == hi[axis] == level).
    """
    name: str
    axis: int
    outward: int
    lo: tuple
    hi: tuple

    @property
    def level(self):
        return self.lo[self.axis]

    @property
    def tangential_axes(self):
        return tuple(d for d in range(len(self.lo)) if d != self.axis)

    @property
    def measure(self):
        return math.prod(self.hi[d] - self.lo[d] for d in self.tangential_axes)

    def contains(self, points, tol):
        """Boolean mask of points lying on the closed face."""
        points = np.atleast_2d(points)
        inside = np.abs(points[:, self.axis] - self.level) <= tol
        for d in self.tangential_axes:
            inside &= points[:, d] >= self.lo[d] - tol
            inside &= points[:, d] <= self.hi[d] + tol
        return inside

    def interior_contains(self, points, tol):
        """Mask of points on the face but off its relative boundary."""
        points = np.atleast_2d(points)
        inside = np.abs(points[:, self.axis] - self.level) <= tol
        for d in self.tangential_axes:
            inside &= points[:, d] > self.lo[d] + tol
            inside &= points[:, d] < self.hi[d] - tol
        return inside


@dataclass(frozen=True)
class Domain(object):
    """Geometry of Omega.

    Attributes:
        kind: DomainKind.
        extents: Per-axis lengths. For the L-shape these are the arm
            lengths, i.e. the bounding box of the L.
        thickness: L-shape arm thickness (None for boxes).
    """
    kind: DomainKind
    extents: tuple
    thickness: float = None

    def __post_init__(self):
        if len(self.extents) != self.kind.dimension:
            raise InvalidGeometry(
                "%s needs %d extents, got %d." %
                (self.kind.value, self.kind.dimension, len(self.extents)))
        if any(not extent > 0 for extent in self.extents):
            raise InvalidGeometry(
                "All extents must be strictly positive: %s" % (self.extents,))
        if self.kind is DomainKind.LSHAPE2D:
            if self.thickness is None or not self.thickness > 0:
                raise InvalidGeometry("L-shape needs a positive thickness.")
            if any(self.thickness >= arm for arm in self.extents):
                raise InvalidGeometry(
                    "Thickness %g must be below each arm length %s." %
                    (self.thickness, self.extents))

    @property
    def n(self):
        return self.kind.dimension

    @property
    def is_box(self):
        return self.kind is not DomainKind.LSHAPE2D

    @property
    def volume(self):
        """|Omega|, computed analytically."""
        box = math.prod(self.extents)
        if self.is_box:
            return box
        arm_x, arm_y = self.extents
        width = self.thickness
        return box - (arm_x - width) * (arm_y - width)

    @functools.cached_property
    def _faces(self):
        if self.is_box:
            return _box_faces(self.extents)
        return _lshape_faces(self.extents, self.thickness)

    def faces(self):
        """Tuple of all flat faces of the boundary."""
        return self._faces

    def face(self, name):
        """Look up a face by id, alias ("bottom") or plane ("z=0").

        Raises:
            InvalidGeometry if no such face exists.
        """
        key = FACE_ALIASES.get(name, name)
        match = re.match(r"^([xyz])\s*=\s*([-+0-9.eE]+)$", key)
        for face in self._faces:
            if face.name == key:
                return face
            if match and AXES[face.axis] == match.group(1):
                if abs(face.level - float(match.group(2))) <= TOL:
                    return face
        raise InvalidGeometry("No face %r on %s." % (name, self.kind.value))

    @property
    def boundary_measure(self):
        return sum(face.measure for face in self._faces)

    @property
    def length_scale(self):
        return max(self.extents)

    def contains(self, points, tol=None):
        """Mask of points in the closure of Omega."""
        tol = TOL * self.length_scale if tol is None else tol
        points = np.atleast_2d(points)
        inside = np.ones(len(points), dtype=bool)
        for d, extent in enumerate(self.extents):
            inside &= (points[:, d] >= -tol) & (points[:, d] <= extent + tol)
        if not self.is_box:
            width = self.thickness
            inside &= ((points[:, 0] <= width + tol) |
                       (points[:, 1] <= width + tol))
        return inside


def _box_faces(extents):
    faces = []
    n = len(extents)
    for axis in range(n):
        for outward in (-1, 1):
            level = 0.0 if outward < 0 else float(extents[axis])
            lo = [0.0] * n
            hi = [float(e) for e in extents]
            lo[axis] = hi[axis] = level
            name = "%s%s" % (AXES[axis], "-" if outward < 0 else "+")
            faces.append(Face(name, axis, outward, tuple(lo), tuple(hi)))
    return tuple(faces)


def _lshape_faces(arms, width):
    arm_x, arm_y = (float(a) for a in arms)
    width = float(width)
    return (
        Face("x-", 0, -1, (0.0, 0.0), (0.0, arm_y)),
        Face("y-", 1, -1, (0.0, 0.0), (arm_x, 0.0)),
        Face("x+", 0, 1, (arm_x, 0.0), (arm_x, width)),
        Face("y+", 1, 1, (0.0, arm_y), (width, arm_y)),
        Face("inner-x", 0, 1, (width, width), (width, arm_y)),
        Face("inner-y", 1, 1, (width, width), (arm_x, width)),
    )


def make_box(n, extents):
    """Axis-aligned box [0, L_1] x ... x [0, L_n].

    Raises:
        InvalidGeometry for n outside {2, 3} or a non-positive extent.
    """
    kinds = {2: DomainKind.BOX2D, 3: DomainKind.BOX3D}
    if n not in kinds:
        raise InvalidGeometry("Boxes exist for n = 2 or 3 only, not %r." % n)
    return Domain(kinds[n], tuple(float(e) for e in extents))


def make_lshape(arms, thickness):
    """L-shaped domain: [0, a]x[0, b] minus the corner (w, a]x(w, b].

    Args:
        arms: (a, b), the arm lengths along x and y.
        thickness: w, the arm thickness.
    """
    return Domain(DomainKind.LSHAPE2D, tuple(float(a) for a in arms),
                  float(thickness))


@dataclass(frozen=True)
class BoundaryPatch(object):
    """Gamma_1: a flat rectangle (interval for n = 2) or disk on a face.

    Attributes:
        domain: Owning Domain.
        face: Face carrying the patch.
        lo, hi: Bounding box corners (full n-tuples, fixed normal coord).
        shape: "rect" or "disk".
        radius: Disk radius (disk patches only).
    """
    domain: Domain
    face: Face
    lo: tuple
    hi: tuple
    shape: str = "rect"
    radius: float = None

    @property
    def n(self):
        return self.domain.n

    @property
    def tangential_axes(self):
        return self.face.tangential_axes

    @property
    def center(self):
        return tuple(0.5 * (a + b) for a, b in zip(self.lo, self.hi))

    @property
    def area(self):
        """|Gamma_1|: length in 2-D, area in 3-D."""
        if self.shape == "disk":
            return math.pi * self.radius ** 2
        return math.prod(self.hi[d] - self.lo[d] for d in self.tangential_axes)

    @property
    def complement_area(self):
        """|Gamma_2| = total boundary measure minus |Gamma_1|."""
        return self.domain.boundary_measure - self.area

    def contains(self, points, tol=None):
        """Mask of points on the closed patch."""
        tol = TOL * self.domain.length_scale if tol is None else tol
        points = np.atleast_2d(points)
        on_plane = np.abs(points[:, self.face.axis] - self.face.level) <= tol
        if self.shape == "disk":
            offsets = points - np.asarray(self.center)
            offsets[:, self.face.axis] = 0.0
            return on_plane & (np.linalg.norm(offsets, axis=1) <=
                               self.radius + tol)
        inside = on_plane
        for d in self.tangential_axes:
            inside &= points[:, d] >= self.lo[d] - tol
            inside &= points[:, d] <= self.hi[d] + tol
        return inside

    def on_relative_boundary(self, points, tol=None):
        """Mask of points on the patch's edge (within its face plane)."""
        tol = TOL * self.domain.length_scale if tol is None else tol
        points = np.atleast_2d(points)
        closed = self.contains(points, tol)
        if self.shape == "disk":
            offsets = points - np.asarray(self.center)
            offsets[:, self.face.axis] = 0.0
            radial = np.linalg.norm(offsets, axis=1)
            return closed & (np.abs(radial - self.radius) <= tol)
        edge = np.zeros(len(points), dtype=bool)
        for d in self.tangential_axes:
            edge |= np.abs(points[:, d] - self.lo[d]) <= tol
            edge |= np.abs(points[:, d] - self.hi[d]) <= tol
        return closed & edge

    def interface_mask(self, points, tol=None):
        """Mask of points on the interface between Gamma_1 and Gamma_2.

        That is the relative boundary of the patch where it runs through
        the interior of its face. Where the patch reaches the face's own
        edge its boundary points keep the patch's full flux.
        """
        tol = TOL * self.domain.length_scale if tol is None else tol
        return (self.on_relative_boundary(points, tol) &
                self.face.interior_contains(points, tol))


def _patch_bounds(domain, face, coords):
    """Turn tangential coordinates into full n-tuples, validating them."""
    coords = np.asarray(coords, dtype=float)
    axes = face.tangential_axes
    if coords.ndim == 1:
        coords = coords.reshape(1, 2)
    if coords.shape != (len(axes), 2):
        raise InvalidGeometry(
            "Face %s needs %d tangential intervals, got %s." %
            (face.name, len(axes), coords.tolist()))
    lo = list(face.lo)
    hi = list(face.hi)
    tol = TOL * domain.length_scale
    for (a, b), d in zip(coords, axes):
        if not b > a:
            raise InvalidGeometry("Empty patch interval [%g, %g]." % (a, b))
        if a < face.lo[d] - tol or b > face.hi[d] + tol:
            raise InvalidGeometry(
                "Patch [%g, %g] leaves face %s ([%g, %g] on axis %s)." %
                (a, b, face.name, face.lo[d], face.hi[d], AXES[d]))
        lo[d] = max(float(a), face.lo[d])
        hi[d] = min(float(b), face.hi[d])
    return tuple(lo), tuple(hi)


def make_patch(domain, face, coords):
    """Rectangular (interval) patch on one face.

    Args:
        domain: Domain.
        face: Face id, alias or plane ("bottom", "z=0", "x-").
        coords: [a, b] for n = 2, [[a1, b1], [a2, b2]] for n = 3, in
            increasing order of the tangential axes.

    Raises:
        InvalidGeometry if the coordinates leave the face.
    """
    face = domain.face(face) if isinstance(face, str) else face
    lo, hi = _patch_bounds(domain, face, coords)
    patch = BoundaryPatch(domain, face, lo, hi)
    logger.debug("Patch on %s: %s-%s, area %g", face.name, lo, hi, patch.area)
    return patch


def make_disk_patch(domain, face, center, radius):
    """Flat disk patch on a face of a 3-D domain.

    Args:
        center: Tangential coordinates of the disk center.
        radius: Disk radius.
    """
    face = domain.face(face) if isinstance(face, str) else face
    if domain.n != 3:
        raise InvalidGeometry("Disk patches need n = 3.")
    if not radius > 0:
        raise InvalidGeometry("Disk radius must be positive.")
    coords = [[c - radius, c + radius] for c in center]
    lo, hi = _patch_bounds(domain, face, coords)
    return BoundaryPatch(domain, face, lo, hi, shape="disk",
                         radius=float(radius))


def flat_ball(rho, n):
    """The flat ball of radius rho centred on the bottom face of a box.

    The host box is large enough that the ball sits well inside the face;
    free-space computations only use the patch's position and shape.
    """
    if not 0 < rho <= 1:
        raise InvalidGeometry("Flat ball radius must lie in (0, 1].")
    side = 4.0
    domain = make_box(n, [side] * n)
    mid = 0.5 * side
    if n == 2:
        return make_patch(domain, "y-", [mid - rho, mid + rho])
    return make_disk_patch(domain, "z-", [mid, mid], rho)


@dataclass(frozen=True)
class SurfaceQuadrature(object):
    """Nodes and weights on a patch.

    Attributes:
        points: (P, n) node coordinates.
        weights: (P,) surface weights; they sum to the patch area.
        cell_lo, cell_hi: (P, n) bounds of the cell each node represents
            (None for disk patches).
    """
    points: np.ndarray
    weights: np.ndarray
    cell_lo: np.ndarray = None
    cell_hi: np.ndarray = None

    def __len__(self):
        return len(self.weights)

    def integrate(self, values):
        """Quadrature of nodal values (array or callable of points)."""
        if callable(values):
            values = values(self.points)
        return float(np.dot(self.weights, values))


def _axis_cells(lo, hi, resolution, rule):
    """1-D nodes and cell bounds on [lo, hi]."""
    if rule == "midpoint":
        edges = np.linspace(lo, hi, resolution + 1)
        return 0.5 * (edges[:-1] + edges[1:]), edges[:-1], edges[1:]
    if rule == "trapezoid":
        nodes = np.linspace(lo, hi, resolution)
        half = 0.5 * (hi - lo) / (resolution - 1)
        return (nodes, np.maximum(nodes - half, lo),
                np.minimum(nodes + half, hi))
    raise ValueError("Unknown rule %r." % rule)


def surface_nodes(patch, resolution, rule="midpoint"):
    """Composite quadrature nodes realising dS on the patch.

    Rectangles use a tensor midpoint or trapezoid rule with `resolution`
    cells (nodes) per tangential axis; disks use Gauss-Legendre in the
    radius times a uniform angle rule, exact for the area.

    Raises:
        ValueError if resolution < 2.
    """
    if resolution < 2:
        raise ValueError("Surface quadrature needs resolution >= 2.")
    n = patch.n
    if patch.shape == "disk":
        return _disk_nodes(patch, resolution)
    per_axis = [_axis_cells(patch.lo[d], patch.hi[d], resolution, rule)
                for d in patch.tangential_axes]
    nodes = np.meshgrid(*[axis[0] for axis in per_axis], indexing="ij")
    lows = np.meshgrid(*[axis[1] for axis in per_axis], indexing="ij")
    highs = np.meshgrid(*[axis[2] for axis in per_axis], indexing="ij")
    count = nodes[0].size
    points = np.full((count, n), patch.face.level)
    cell_lo = points.copy()
    cell_hi = points.copy()
    for k, d in enumerate(patch.tangential_axes):
        points[:, d] = nodes[k].ravel()
        cell_lo[:, d] = lows[k].ravel()
        cell_hi[:, d] = highs[k].ravel()
    tangential = list(patch.tangential_axes)
    weights = np.prod(cell_hi[:, tangential] - cell_lo[:, tangential], axis=1)
    return SurfaceQuadrature(points, weights, cell_lo, cell_hi)


def _disk_nodes(patch, resolution):
    radial, radial_weights = gauss_legendre(resolution)
    radius = patch.radius
    radii = 0.5 * radius * (radial + 1.0)
    radial_weights = 0.5 * radius * radial_weights * radii
    angles = 2.0 * np.pi * np.arange(2 * resolution) / (2 * resolution)
    angle_weight = 2.0 * np.pi / (2 * resolution)
    rr, aa = np.meshgrid(radii, angles, indexing="ij")
    ww = np.repeat(radial_weights, len(angles)) * angle_weight
    first, second = patch.tangential_axes
    points = np.tile(np.asarray(patch.center, dtype=float), (rr.size, 1))
    points[:, first] += (rr * np.cos(aa)).ravel()
    points[:, second] += (rr * np.sin(aa)).ravel()
    return SurfaceQuadrature(points, ww)


@dataclass(frozen=True)
class Grid(object):
    """Uniform node grid over the bounding box of a Domain.

    Nodes outside an L-shape are inactive (see `mask`).
    """
    domain: Domain
    counts: tuple

    def __post_init__(self):
        if len(self.counts) != self.domain.n:
            raise InvalidGeometry("Grid needs one count per axis.")
        if any(int(c) < 2 for c in self.counts):
            raise InvalidGeometry("Grid needs at least 2 nodes per axis.")
        if not self.domain.is_box:
            width = self.domain.thickness
            for h in self.spacing:
                cells = width / h
                if abs(cells - round(cells)) > 1e-6 or round(cells) < 1:
                    raise InvalidGeometry(
                        "Grid spacing %g does not resolve the L-shape "
                        "thickness %g." % (h, width))

    @property
    def n(self):
        return self.domain.n

    @property
    def shape(self):
        return tuple(int(c) for c in self.counts)

    @property
    def spacing(self):
        return tuple(extent / (int(count) - 1)
                     for extent, count in zip(self.domain.extents,
                                              self.counts))

    def axis_coords(self, axis):
        return np.linspace(0.0, self.domain.extents[axis],
                           int(self.counts[axis]))

    @functools.cached_property
    def coordinates(self):
        """Tuple of per-axis coordinate arrays of grid shape."""
        return tuple(np.meshgrid(*[self.axis_coords(d) for d in range(self.n)],
                                 indexing="ij"))

    def points(self):
        """(N, n) array of all node coordinates, C order."""
        return np.stack([c.ravel() for c in self.coordinates], axis=1)

    def node(self, index):
        return tuple(float(self.axis_coords(d)[i]) for d, i in
                     enumerate(index))

    @property
    def tolerance(self):
        return 1e-6 * min(self.spacing)

    @functools.cached_property
    def mask(self):
        """Active nodes (in the closure of Omega)."""
        active = self.domain.contains(self.points(), self.tolerance)
        return active.reshape(self.shape)

    def neighbor_missing(self, axis, side):
        """Mask of active nodes whose neighbor at side (+1/-1) is absent."""
        mask = self.mask
        shifted = np.zeros_like(mask)
        src = [slice(None)] * self.n
        dst = [slice(None)] * self.n
        if side > 0:
            src[axis] = slice(1, None)
            dst[axis] = slice(None, -1)
        else:
            src[axis] = slice(None, -1)
            dst[axis] = slice(1, None)
        shifted[tuple(dst)] = mask[tuple(src)]
        return mask & ~shifted

    @functools.cached_property
    def cell_mask(self):
        """Grid cells (indexed by their lower node) lying inside Omega."""
        centers = [0.5 * (c[:-1] + c[1:]) for c in
                   (self.axis_coords(d) for d in range(self.n))]
        mesh = np.meshgrid(*centers, indexing="ij")
        inside = self.domain.contains(
            np.stack([m.ravel() for m in mesh], axis=1), self.tolerance)
        return inside.reshape(mesh[0].shape)

    def cell_volumes(self):
        """Dual-cell volumes (trapezoid weights); zero at inactive nodes.

        Each node collects a 2^-n share of every adjacent grid cell lying
        inside the domain, so the volumes sum to |Omega| exactly.
        """
        padded = np.pad(self.cell_mask.astype(float), 1)
        shares = np.zeros(self.shape)
        for offsets in itertools.product((0, 1), repeat=self.n):
            shares += padded[tuple(slice(o, o + count) for o, count in
                                   zip(offsets, self.shape))]
        return shares * math.prod(self.spacing) / 2 ** self.n

    def edge_weights(self, axis):
        """Share of inside cells around each edge from a node to its
        +axis neighbor; grid shape, zero where no such edge exists.
        """
        cells = self.cell_mask.astype(float)
        pad = [(1, 1)] * self.n
        pad[axis] = (0, 0)
        padded = np.pad(cells, pad)
        shape = list(self.shape)
        shape[axis] -= 1
        shares = np.zeros(shape)
        others = [d for d in range(self.n) if d != axis]
        for offsets in itertools.product((0, 1), repeat=len(others)):
            index = [slice(None)] * self.n
            for d, o in zip(others, offsets):
                index[d] = slice(o, o + self.shape[d])
            shares += padded[tuple(index)]
        weights = np.zeros(self.shape)
        index = [slice(None)] * self.n
        index[axis] = slice(None, -1)
        weights[tuple(index)] = shares / 2 ** len(others)
        return weights

    @functools.cached_property
    def boundary_mask(self):
        points = self.points()
        on_boundary = np.zeros(len(points), dtype=bool)
        for face in self.domain.faces():
            on_boundary |= face.contains(points, self.tolerance)
        return on_boundary.reshape(self.shape) & self.mask

    def classify_boundary(self, patch):
        """Label every node: NOT_BOUNDARY, GAMMA_1, GAMMA_2 or INTERFACE.

        Each boundary node receives exactly one label.
        """
        points = self.points()
        tol = self.tolerance
        labels = np.full(len(points), NOT_BOUNDARY, dtype=np.int8)
        boundary = self.boundary_mask.ravel()
        labels[boundary] = GAMMA_2
        on_patch = boundary & patch.contains(points, tol)
        labels[on_patch] = GAMMA_1
        labels[on_patch & patch.interface_mask(points, tol)] = INTERFACE
        return labels.reshape(self.shape)

    def flux_weights(self, patch):
        """Per (axis, side) weights of u^q in the ghost-node flux.

        Returns:
            dict mapping (axis, side) to an array of grid shape holding 1
            on Gamma_1 nodes, 1/2 on interface nodes, 0 elsewhere, for
            nodes whose missing neighbor lies across the patch's face.
        """
        labels = self.classify_boundary(patch)
        base = np.where(labels == GAMMA_1, 1.0,
                        np.where(labels == INTERFACE, 0.5, 0.0))
        level = np.abs(self.coordinates[patch.face.axis] - patch.face.level)
        on_plane = level <= self.tolerance
        weights = {}
        for axis in range(self.n):
            for side in (-1, 1):
                weight = np.zeros(self.shape)
                if axis == patch.face.axis and side == patch.face.outward:
                    across = self.neighbor_missing(axis, side) & on_plane
                    weight = np.where(across, base, 0.0)
                weights[(axis, side)] = weight
        return weights

    def patch_nodes(self, patch):
        """Nodes on the closed patch with their dual cells on the face.

        Returns:
            (indices, quadrature): a tuple of index arrays into the grid
            and a SurfaceQuadrature whose cells are the nodes' dual cells
            clipped to the patch.
        """
        if patch.shape != "rect":
            raise InvalidGeometry("Grid patch nodes need a rectangular patch.")
        labels = self.classify_boundary(patch)
        selected = (labels == GAMMA_1) | (labels == INTERFACE)
        indices = np.nonzero(selected)
        points = np.stack([self.coordinates[d][indices]
                           for d in range(self.n)], axis=1)
        cell_lo = points.copy()
        cell_hi = points.copy()
        for d in patch.tangential_axes:
            half = 0.5 * self.spacing[d]
            cell_lo[:, d] = np.maximum(points[:, d] - half, patch.lo[d])
            cell_hi[:, d] = np.minimum(points[:, d] + half, patch.hi[d])
        tangential = list(patch.tangential_axes)
        weights = np.prod(cell_hi[:, tangential] - cell_lo[:, tangential],
                          axis=1)
        return indices, SurfaceQuadrature(points, weights, cell_lo, cell_hi)

    def nodes_across(self, patch):
        """Smallest number of grid nodes across the patch, per axis."""
        counts = []
        for d in patch.tangential_axes:
            coords = self.axis_coords(d)
            tol = self.tolerance
            counts.append(int(np.count_nonzero(
                (coords >= patch.lo[d] - tol) & (coords <= patch.hi[d] + tol))))
        return min(counts)


def make_grid(domain, counts):
    """Grid with the given node count per axis."""
    return Grid(domain, tuple(int(c) for c in counts))


def grid_for_spacing(domain, h):
    """Grid whose per-axis spacing is as close to h as the extents allow."""
    if not h > 0:
        raise InvalidGeometry("Grid spacing must be positive.")
    counts = [max(2, int(round(extent / h)) + 1) for extent in domain.extents]
    return make_grid(domain, counts)

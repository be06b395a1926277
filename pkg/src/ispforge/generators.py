"""Scatterer profile generators.

Every generator is a pure function of its configuration and seed and returns
a :class:`~ispforge.forward.ContrastMap` on the configured grid. Shapes are
rasterized by testing cell centers (painter's order resolves overlaps: the
last shape drawn wins); any shape whose interior catches no cell center still
claims the cell containing its own center, so no generated scatterer is
silently empty. The cylinder validation map additionally supports cell
averaging, the pulse-basis projection of the true profile.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import PhysicsConfig
from .errors import BadIdxFileError, OverlapViolationError
from .forward import ContrastMap
from .geometry import grid_coordinates

EPS_RANGE_DEFAULT = (1.0, 5.0)  # relative permittivity drawn from (1, 5]
POLYGON_RADIUS_RANGE = (0.1, 1.6)  # circumradius in wavelengths
POLYGON_SIDES = (3, 7)
POLYGON_COUNT = (1, 3)

AUSTRIA_CIRCLE_RADIUS = 0.56
AUSTRIA_CIRCLE_CENTERS = ((-0.7, 1.4), (0.7, 1.4))
AUSTRIA_ANNULUS_CENTER = (0.0, -0.7)
AUSTRIA_ANNULUS_INNER = 0.7
AUSTRIA_ANNULUS_OUTER = 1.4


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def draw_permittivity(rng: np.random.Generator, eps_range=EPS_RANGE_DEFAULT) -> float:
    """One relative permittivity uniform over the half-open range (lo, hi]."""
    lo, hi = eps_range
    return hi - rng.uniform(0.0, hi - lo)


def _cell_of_point(cfg: PhysicsConfig, x: float, y: float) -> tuple[int, int]:
    half = cfg.doi_side / 2.0
    j = int(np.clip((x + half) // cfg.cell_side, 0, cfg.grid_n - 1))
    i = int(np.clip((y + half) // cfg.cell_side, 0, cfg.grid_n - 1))
    return i, j


def gen_digit(glyph: np.ndarray, eps_range, seed, cfg: PhysicsConfig) -> ContrastMap:
    """Homogeneous scatterer from one grayscale glyph.

    The glyph is upsampled to the grid with nearest-neighbor lookup,
    binarized at half its peak intensity and assigned a single random
    relative permittivity from ``eps_range``; contrast is eps_r - 1 inside
    the glyph and zero outside. An all-black glyph yields the zero map.
    """
    rng = _as_rng(seed)
    glyph = np.asarray(glyph, dtype=np.float64)
    if glyph.ndim != 2:
        raise BadIdxFileError(f"glyph must be 2D, got shape {glyph.shape}")
    eps = draw_permittivity(rng, eps_range)
    n = cfg.grid_n
    rows = (np.arange(n) * glyph.shape[0]) // n
    cols = (np.arange(n) * glyph.shape[1]) // n
    up = glyph[np.ix_(rows, cols)]
    peak = up.max()
    values = np.zeros((n, n), dtype=np.float64)
    if peak > 0:
        values[up >= 0.5 * peak] = eps - 1.0
    return ContrastMap(values)


def _point_in_convex(xx: np.ndarray, yy: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Boolean mask of grid points inside a convex polygon (CCW vertices)."""
    inside = np.ones_like(xx, dtype=bool)
    n = len(vertices)
    for k in range(n):
        x0, y0 = vertices[k]
        x1, y1 = vertices[(k + 1) % n]
        cross = (x1 - x0) * (yy - y0) - (y1 - y0) * (xx - x0)
        inside &= cross >= 0.0
    return inside


def gen_polygon(cfg: PhysicsConfig, seed) -> ContrastMap:
    """One to three random regular polygons, painter's order on overlap.

    Side counts are uniform over 3..7, circumradii uniform over
    [0.1, 1.6] wavelengths, centers uniform in the DOI, rotations uniform,
    and each polygon carries its own permittivity from (1, 5].
    """
    rng = _as_rng(seed)
    xx, yy = grid_coordinates(cfg)
    values = np.zeros((cfg.grid_n, cfg.grid_n), dtype=np.float64)
    half = cfg.doi_side / 2.0
    count = int(rng.integers(POLYGON_COUNT[0], POLYGON_COUNT[1] + 1))
    for _ in range(count):
        sides = int(rng.integers(POLYGON_SIDES[0], POLYGON_SIDES[1] + 1))
        radius = rng.uniform(*POLYGON_RADIUS_RANGE) * cfg.wavelength
        cx = rng.uniform(-half, half)
        cy = rng.uniform(-half, half)
        rot = rng.uniform(0.0, 2.0 * np.pi)
        eps = draw_permittivity(rng)
        angles = rot + 2.0 * np.pi * np.arange(sides) / sides
        vertices = np.column_stack([cx + radius * np.cos(angles), cy + radius * np.sin(angles)])
        mask = _point_in_convex(xx, yy, vertices)
        if not mask.any():
            mask[_cell_of_point(cfg, cx, cy)] = True
        values[mask] = eps - 1.0
    return ContrastMap(values)


@dataclass(frozen=True)
class CircleSpec:
    """One circular scatterer: center in meters, radius in meters, eps_r."""

    center: tuple[float, float]
    radius: float
    eps_r: float


def gen_overlap_circles(specs: list[CircleSpec], cfg: PhysicsConfig) -> ContrastMap:
    """Circles painted in list order; later entries overwrite earlier ones."""
    xx, yy = grid_coordinates(cfg)
    values = np.zeros((cfg.grid_n, cfg.grid_n), dtype=np.float64)
    for spec in specs:
        mask = np.hypot(xx - spec.center[0], yy - spec.center[1]) <= spec.radius
        if not mask.any():
            cx, cy = spec.center
            if abs(cx) <= cfg.doi_side / 2.0 and abs(cy) <= cfg.doi_side / 2.0:
                mask[_cell_of_point(cfg, cx, cy)] = True
        values[mask] = spec.eps_r - 1.0
    return ContrastMap(values)


def gen_austria(eps_circles: tuple[float, float], eps_annulus: float, cfg: PhysicsConfig) -> ContrastMap:
    """Canonical two-disks-plus-annulus benchmark profile.

    Two circles of radius 0.56 wavelengths centered at (+-0.7, 1.4)
    wavelengths and an annulus at (0, -0.7) wavelengths with radii 0.7/1.4
    wavelengths; each region is homogeneous at its given permittivity.
    """
    lam = cfg.wavelength
    centers = [(cx * lam, cy * lam) for cx, cy in AUSTRIA_CIRCLE_CENTERS]
    r_circle = AUSTRIA_CIRCLE_RADIUS * lam
    c_ann = (AUSTRIA_ANNULUS_CENTER[0] * lam, AUSTRIA_ANNULUS_CENTER[1] * lam)
    r_in = AUSTRIA_ANNULUS_INNER * lam
    r_out = AUSTRIA_ANNULUS_OUTER * lam

    # regions are disjoint for the canonical constants; guard anyway
    for cx, cy in centers:
        if np.hypot(cx - c_ann[0], cy - c_ann[1]) < r_out + r_circle:
            raise OverlapViolationError("a circle intersects the annulus")
    (x0, y0), (x1, y1) = centers
    if np.hypot(x1 - x0, y1 - y0) < 2.0 * r_circle:
        raise OverlapViolationError("the two circles intersect")

    xx, yy = grid_coordinates(cfg)
    values = np.zeros((cfg.grid_n, cfg.grid_n), dtype=np.float64)
    d_ann = np.hypot(xx - c_ann[0], yy - c_ann[1])
    values[(d_ann >= r_in) & (d_ann <= r_out)] = eps_annulus - 1.0
    for (cx, cy), eps in zip(centers, eps_circles):
        values[np.hypot(xx - cx, yy - cy) <= r_circle] = eps - 1.0
    return ContrastMap(values)


def cylinder_map(
    cfg: PhysicsConfig,
    radius: float,
    eps_r: float,
    cell_average: bool = True,
    supersample: int = 64,
) -> ContrastMap:
    """Centered homogeneous cylinder on the grid.

    With ``cell_average`` each boundary cell carries the contrast scaled by
    its covered area fraction (the L2 projection of the true profile onto
    pulse basis functions); otherwise cells are binary by center membership.
    """
    xx, yy = grid_coordinates(cfg)
    d = np.hypot(xx, yy)
    chi = eps_r - 1.0
    values = np.where(d <= radius, chi, 0.0)
    if cell_average:
        cell = cfg.cell_side
        boundary = np.abs(d - radius) < cell
        offsets = (np.arange(supersample) + 0.5) / supersample - 0.5
        ox, oy = np.meshgrid(offsets, offsets)
        ox = ox.ravel() * cell
        oy = oy.ravel() * cell
        ii, jj = np.nonzero(boundary)
        for i, j in zip(ii, jj):
            covered = np.hypot(xx[i, j] + ox, yy[i, j] + oy) <= radius
            values[i, j] = chi * float(np.mean(covered))
    return ContrastMap(values)

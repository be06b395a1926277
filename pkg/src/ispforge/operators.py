"""Discretized Green operators for the 2D TM volume integral equations.

Mathematical form
-----------------
With the e^{+j omega t} time convention the outgoing scalar Green function is

    g(r, r') = -(j/4) H0^(2)(k0 |r - r'|),

and the state/data equations discretized with pulse basis functions and
point matching (each square cell replaced by the equal-area disk of radius
a = cell_side / sqrt(pi)) give

    G_D[m, n] = -(j/2) pi k0 a J1(k0 a) H0^(2)(k0 rho_mn)      (m != n)
    G_D[m, m] = -(j/2) (pi k0 a H1^(2)(k0 a) - 2j)
    G_S[q, n] = -(j/2) pi k0 a J1(k0 a) H0^(2)(k0 |r_q - r_n|)

where rho_mn is the center-to-center distance and r_q a receiver position.
The disk integrals are exact consequences of the Bessel addition theorem,
so G_D is symmetric and every entry depends on distance only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import hankel2, j1

from .config import PhysicsConfig
from .geometry import Geometry


@dataclass(frozen=True)
class OperatorPair:
    """Dense domain-to-domain and domain-to-surface Green operators."""

    g_domain: np.ndarray  # (n_cells, n_cells) complex
    g_surface: np.ndarray  # (n_rx, n_cells) complex


def equivalent_radius(cell_side: float) -> float:
    """Radius of the disk with the same area as a square cell."""
    return cell_side / np.sqrt(np.pi)


def radiation_kernel(k0: float, cell_side: float, distances: np.ndarray) -> np.ndarray:
    """Field radiated by a unit-contrast cell observed at the given distances.

    Valid for observation points outside the source cell; the self term is
    handled by :func:`self_term`.
    """
    a = equivalent_radius(cell_side)
    return -0.5j * np.pi * k0 * a * j1(k0 * a) * hankel2(0, k0 * distances)


def self_term(k0: float, cell_side: float) -> complex:
    """Self interaction of a cell, from the equal-area disk integral."""
    a = equivalent_radius(cell_side)
    return -0.5j * (np.pi * k0 * a * hankel2(1, k0 * a) - 2.0j)


def _pairwise_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.hypot(a[:, 0][:, None] - b[:, 0][None, :], a[:, 1][:, None] - b[:, 1][None, :])


def domain_green(points: np.ndarray, k0: float, cell_side: float) -> np.ndarray:
    """Domain operator block for an arbitrary subset of cell centers.

    Returns the square matrix whose off-diagonal entries follow
    :func:`radiation_kernel` and whose diagonal is :func:`self_term`.
    """
    dist = _pairwise_distances(points, points)
    # placeholder on the diagonal keeps the Hankel argument nonzero
    np.fill_diagonal(dist, 1.0)
    out = radiation_kernel(k0, cell_side, dist)
    np.fill_diagonal(out, self_term(k0, cell_side))
    return out


def surface_green(
    observers: np.ndarray, points: np.ndarray, k0: float, cell_side: float
) -> np.ndarray:
    """Cell-to-observer operator block; observers must lie outside all cells."""
    return radiation_kernel(k0, cell_side, _pairwise_distances(observers, points))


def assemble_operators(geom: Geometry, cfg: PhysicsConfig) -> OperatorPair:
    """Build the full dense operator pair for a geometry."""
    cfg.validate()
    k0 = cfg.k0
    g_domain = domain_green(geom.cell_centers, k0, geom.cell_side)
    g_surface = surface_green(geom.rx_positions, geom.cell_centers, k0, geom.cell_side)
    return OperatorPair(g_domain=g_domain, g_surface=g_surface)

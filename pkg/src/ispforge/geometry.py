"""Measurement geometry: DOI cell grid and antenna rings."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import PhysicsConfig


@dataclass(frozen=True)
class Geometry:
    """Cell centers and antenna positions, all in meters.

    ``cell_centers`` is (grid_n**2, 2), row-major over the grid: cell
    ``(i, j)`` of the image maps to flat index ``i * grid_n + j`` with
    x = -doi/2 + (j + 0.5) * cell_side and y = -doi/2 + (i + 0.5) * cell_side.
    Antennas sit at angles 2*pi*k/n starting from angle 0 on the x axis.
    """

    cell_centers: np.ndarray
    cell_side: float
    tx_positions: np.ndarray
    rx_positions: np.ndarray


def _ring(radius: float, count: int) -> np.ndarray:
    angles = 2.0 * np.pi * np.arange(count) / count
    return np.column_stack([radius * np.cos(angles), radius * np.sin(angles)])


def build_geometry(cfg: PhysicsConfig) -> Geometry:
    """Lay out cell centers and antennas for a validated configuration."""
    cfg.validate()
    n = cfg.grid_n
    cell = cfg.cell_side
    coords = -cfg.doi_side / 2.0 + (np.arange(n) + 0.5) * cell
    xx, yy = np.meshgrid(coords, coords, indexing="xy")
    centers = np.column_stack([xx.ravel(), yy.ravel()])
    return Geometry(
        cell_centers=centers,
        cell_side=cell,
        tx_positions=_ring(cfg.array_radius, cfg.n_tx),
        rx_positions=_ring(cfg.array_radius, cfg.n_rx),
    )


def grid_coordinates(cfg: PhysicsConfig) -> tuple[np.ndarray, np.ndarray]:
    """(grid_n, grid_n) meshgrids of cell-center x and y coordinates."""
    coords = -cfg.doi_side / 2.0 + (np.arange(cfg.grid_n) + 0.5) * cfg.cell_side
    return np.meshgrid(coords, coords, indexing="xy")

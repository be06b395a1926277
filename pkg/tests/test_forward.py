import numpy as np
import pytest

from ispforge import (
    ContrastMap,
    PhysicsConfig,
    build_geometry,
    cylinder_map,
    gen_polygon,
    mie_reference,
    solve_forward,
)
from ispforge.errors import DimensionMismatchError
from ispforge.forward import line_source_fields, solve_reduced
from ispforge.geometry import grid_coordinates
from ispforge.operators import domain_green, surface_green


def test_zero_contrast_passthrough(cfg_small, ops_small, inc_small):
    chi = ContrastMap(np.zeros((cfg_small.grid_n, cfg_small.grid_n)))
    fields, scatter = solve_forward(chi, ops_small, inc_small)
    np.testing.assert_array_equal(fields.total, inc_small.incident)
    assert np.all(scatter.values == 0)
    assert np.all(fields.induced_current == 0)


def test_induced_current_invariant(cfg_small, ops_small, inc_small):
    chi = gen_polygon(cfg_small, 5)
    fields, _ = solve_forward(chi, ops_small, inc_small)
    np.testing.assert_array_equal(
        fields.induced_current, chi.flat()[None, :] * fields.total
    )


def test_reciprocity_collocated_arrays(cfg64, ops64, inc64):
    chi = gen_polygon(cfg64, 3)
    _, scatter = solve_forward(chi, ops64, inc64)
    s = scatter.values
    assert np.linalg.norm(s - s.T) <= 1e-8 * np.linalg.norm(s)


def test_born_limit_small_contrast(cfg64, ops64, inc64):
    disk = cylinder_map(cfg64, 0.5 * cfg64.wavelength, 1.01)
    _, scatter = solve_forward(disk, ops64, inc64)
    born = ops64.g_surface @ (disk.flat()[:, None] * inc64.incident.T)
    err = np.linalg.norm(scatter.values - born) / np.linalg.norm(born)
    assert err < 0.02


def test_incident_magnitude_decays(cfg64, geom64, inc64):
    # independent special-function fact: |H0^(2)| decreases monotonically,
    # so the incident magnitude falls with distance where k0 d >= 1
    tx = geom64.tx_positions[0]
    d = np.hypot(geom64.cell_centers[:, 0] - tx[0], geom64.cell_centers[:, 1] - tx[1])
    far = cfg64.k0 * d >= 1.0
    # symmetric cell pairs sit at equal distances up to rounding, so compare
    # group means over distinct distances
    rounded = np.round(d[far], 9)
    mags = np.abs(inc64.incident[0][far])
    uniq, inverse = np.unique(rounded, return_inverse=True)
    sums = np.bincount(inverse, weights=mags)
    means = sums / np.bincount(inverse)
    assert np.all(np.diff(means) < 0)


def test_wavelength_doubling_halves_kernel_argument():
    cfg1 = PhysicsConfig(wavelength=0.075)
    cfg2 = PhysicsConfig(wavelength=0.15, doi_side=cfg1.doi_side, array_radius=cfg1.array_radius)
    geom = build_geometry(cfg1)
    a = line_source_fields(geom.tx_positions[:1], geom.cell_centers[:8], cfg1.k0)
    b = line_source_fields(geom.tx_positions[:1] * 2.0, geom.cell_centers[:8] * 2.0, cfg2.k0)
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_dimension_mismatch_rejected(cfg_small, ops_small, inc_small):
    with pytest.raises(DimensionMismatchError):
        solve_forward(ContrastMap(np.zeros((7, 7))), ops_small, inc_small)


def _cylinder_scatter_on_fine_grid(cfg, radius, eps_r):
    """Support-only forward solve for a centered cylinder on a fine grid;
    exercises the same reduced-solve core as solve_forward."""
    xx, yy = grid_coordinates(cfg)
    d = np.hypot(xx, yy).ravel()
    chi_full = np.where(d <= radius, eps_r - 1.0, 0.0)
    support = np.flatnonzero(chi_full)
    centers = np.column_stack([xx.ravel()[support], yy.ravel()[support]])
    geom = build_geometry(cfg)
    g_dd = domain_green(centers, cfg.k0, cfg.cell_side)
    g_sd = surface_green(geom.rx_positions, centers, cfg.k0, cfg.cell_side)
    e_inc = line_source_fields(geom.tx_positions, centers, cfg.k0)
    _, scatter = solve_reduced(g_dd, g_sd, e_inc, chi_full[support])
    return scatter


def test_converges_to_cylinder_series_on_fine_grid():
    # the 64x64 production grid carries a known discretization error
    # (see the acceptance analysis); on a fine grid the solver and the
    # analytic oracle must agree tightly
    cfg = PhysicsConfig(grid_n=256)
    geom = build_geometry(cfg)
    radius = 0.5 * cfg.wavelength
    mie = mie_reference(radius, 2.0, geom, cfg)
    scatter = _cylinder_scatter_on_fine_grid(cfg, radius, 2.0)
    err = np.linalg.norm(scatter - mie.values) / np.linalg.norm(mie.values)
    assert err < 0.01

"""Analytic eigenfunction-series scattering by a centered dielectric cylinder.

Independent oracle for the MoM solver. A homogeneous non-magnetic cylinder of
radius R and relative permittivity eps_r sits at the origin; each transmitter
is the same unit-amplitude line source used by :func:`ispforge.forward.incident_fields`,
so both solvers share the e^{+j omega t} convention with outgoing H^(2) waves.

For a source at (rho_p, phi_p) and a receiver at (rho_q, phi_q), expanding the
line-source field with the addition theorem and matching E_z and dE_z/drho at
the cylinder boundary gives

    E_sca(q, p) = -(j/4) sum_m b_m H_m^(2)(k0 rho_q) H_m^(2)(k0 rho_p)
                               e^{j m (phi_q - phi_p)}

    b_m = - [k1 J'_m(k1 R) J_m(k0 R) - k0 J_m(k1 R) J'_m(k0 R)]
          / [k1 J'_m(k1 R) H_m^(2)(k0 R) - k0 J_m(k1 R) H_m^(2)'(k0 R)]

with k1 = k0 sqrt(eps_r). The series is summed over symmetric order pairs
until their contribution drops below a relative floor.
"""

from __future__ import annotations

import numpy as np
from scipy.special import h2vp, hankel2, jv, jvp

from .config import PhysicsConfig
from .errors import InvalidConfigError, NonConvergenceError
from .forward import ScatterMatrix
from .geometry import Geometry

RELATIVE_FLOOR = 1e-12
MAX_ORDER = 300
_QUIET_ORDERS = 3  # consecutive negligible order pairs required to stop


def _scatter_coefficient(m: np.ndarray, k0: float, k1: float, radius: float) -> np.ndarray:
    num = k1 * jvp(m, k1 * radius) * jv(m, k0 * radius) - k0 * jv(m, k1 * radius) * jvp(
        m, k0 * radius
    )
    den = k1 * jvp(m, k1 * radius) * hankel2(m, k0 * radius) - k0 * jv(m, k1 * radius) * h2vp(
        m, k0 * radius
    )
    return -num / den


def mie_reference(
    radius: float, eps_r: float, geom: Geometry, cfg: PhysicsConfig
) -> ScatterMatrix:
    """Scatter matrix of the centered cylinder at the configured antennas."""
    if not 0 <= radius < cfg.doi_side / 2.0:
        raise InvalidConfigError(
            f"cylinder radius {radius} must lie in [0, doi_side/2 = {cfg.doi_side / 2.0})"
        )
    if eps_r <= 0:
        raise InvalidConfigError(f"eps_r must be positive, got {eps_r}")

    n_rx = geom.rx_positions.shape[0]
    n_tx = geom.tx_positions.shape[0]
    out = np.zeros((n_rx, n_tx), dtype=np.complex128)
    if radius == 0.0 or eps_r == 1.0:
        return ScatterMatrix(out)

    k0 = cfg.k0
    k1 = k0 * np.sqrt(eps_r)
    rho_q = np.hypot(geom.rx_positions[:, 0], geom.rx_positions[:, 1])
    phi_q = np.arctan2(geom.rx_positions[:, 1], geom.rx_positions[:, 0])
    rho_p = np.hypot(geom.tx_positions[:, 0], geom.tx_positions[:, 1])
    phi_p = np.arctan2(geom.tx_positions[:, 1], geom.tx_positions[:, 0])
    dphi = phi_q[:, None] - phi_p[None, :]

    quiet = 0
    for m in range(MAX_ORDER + 1):
        b = _scatter_coefficient(np.array(m), k0, k1, radius)
        radial = np.outer(hankel2(m, k0 * rho_q), hankel2(m, k0 * rho_p))
        term = b * radial * np.exp(1j * m * dphi)
        if m > 0:
            # b_{-m} = b_m and H_{-m} = (-1)^m H_m, so the pair contributes
            # twice the cosine component
            term = term + b * radial * np.exp(-1j * m * dphi)
        out += term
        scale = np.linalg.norm(out)
        if scale > 0 and np.linalg.norm(term) < RELATIVE_FLOOR * scale:
            quiet += 1
            if quiet >= _QUIET_ORDERS:
                return ScatterMatrix(-0.25j * out)
        else:
            quiet = 0
    raise NonConvergenceError(
        f"cylinder series did not converge within {MAX_ORDER} orders "
        f"(k0 R = {k0 * radius:.3f})"
    )

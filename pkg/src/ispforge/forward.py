"""Forward scattering by the method of moments.

Solves the discretized state equation

    (I - G_D diag(chi)) E_tot = E_inc        (one factorization, all sources)

and evaluates the data equation  E_sca = G_S (chi * E_tot)  at the receivers.
Because chi vanishes outside the scatterer support, the solve is restricted
to the supported cells; this is algebraically exact, not an approximation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import hankel2

from .config import PhysicsConfig
from .errors import DimensionMismatchError, InvalidConfigError, SingularSystemError
from .geometry import Geometry
from .operators import OperatorPair


@dataclass
class ContrastMap:
    """Real contrast grid chi = eps_r - 1 over the DOI, (grid_n, grid_n)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DimensionMismatchError(f"contrast map must be square 2D, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InvalidConfigError("contrast map holds non-finite values")
        if np.any(v < 0):
            raise InvalidConfigError("contrast map holds negative values (eps_r < 1)")
        self.values = v

    @property
    def grid_n(self) -> int:
        return self.values.shape[0]

    def flat(self) -> np.ndarray:
        return self.values.ravel()


@dataclass
class FieldSet:
    """Per-transmitter complex fields on the DOI grid, each (n_tx, n_cells)."""

    incident: np.ndarray
    total: np.ndarray | None = None
    induced_current: np.ndarray | None = None


@dataclass
class ScatterMatrix:
    """Received scattered fields, (n_rx, n_tx) complex."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.ndim != 2:
            raise DimensionMismatchError(f"scatter matrix must be 2D, got {self.values.shape}")


def line_source_fields(sources: np.ndarray, points: np.ndarray, k0: float) -> np.ndarray:
    """(n_sources, n_points) line-source fields -(j/4) H0^(2)(k0 d)."""
    d = np.hypot(
        sources[:, 0][:, None] - points[:, 0][None, :],
        sources[:, 1][:, None] - points[:, 1][None, :],
    )
    if np.any(d == 0):
        raise InvalidConfigError("a source coincides with an observation point")
    return -0.25j * hankel2(0, k0 * d)


def incident_fields(geom: Geometry, cfg: PhysicsConfig) -> FieldSet:
    """Unit-amplitude line-source fields at the cell centers.

    incident[p, m] = -(j/4) H0^(2)(k0 |r_m - r_p|) for transmitter p, using
    the same e^{+j omega t} convention as the Green operators.
    """
    return FieldSet(incident=line_source_fields(geom.tx_positions, geom.cell_centers, cfg.k0))


def solve_reduced(
    g_dd: np.ndarray,
    g_sd: np.ndarray,
    e_inc_support: np.ndarray,
    chi_support: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Direct solve on the scatterer support.

    Parameters are the domain-operator block restricted to supported cells,
    the receiver operator columns for those cells, the incident fields there
    (n_tx, n_support) and the contrast values. Returns the total field on the
    support (n_tx, n_support) and the scatter matrix (n_rx, n_tx).
    """
    system = np.eye(chi_support.size, dtype=np.complex128) - g_dd * chi_support[None, :]
    try:
        e_tot = np.linalg.solve(system, e_inc_support.T).T
    except np.linalg.LinAlgError as exc:
        cond = float(np.linalg.cond(system))
        raise SingularSystemError(
            f"forward system factorization failed (cond ~ {cond:.3e})", condition=cond
        ) from exc
    currents = chi_support[None, :] * e_tot
    return e_tot, (g_sd @ currents.T)


def solve_forward(
    chi: ContrastMap, ops: OperatorPair, inc: FieldSet
) -> tuple[FieldSet, ScatterMatrix]:
    """Solve the forward problem for one contrast map.

    Returns a FieldSet with incident, total and induced-current arrays over
    the full grid, and the receiver scatter matrix. The zero-contrast map
    short-circuits to E_tot = E_inc and an exactly zero scatter matrix.
    """
    flat = chi.flat()
    n_cells = ops.g_domain.shape[0]
    if flat.size != n_cells or inc.incident.shape[1] != n_cells:
        raise DimensionMismatchError(
            f"contrast ({flat.size}), operators ({n_cells}) and incident fields "
            f"({inc.incident.shape[1]}) disagree on cell count"
        )
    support = np.flatnonzero(flat)
    n_rx = ops.g_surface.shape[0]
    n_tx = inc.incident.shape[0]
    if support.size == 0:
        fields = FieldSet(
            incident=inc.incident,
            total=inc.incident.copy(),
            induced_current=np.zeros_like(inc.incident),
        )
        return fields, ScatterMatrix(np.zeros((n_rx, n_tx), dtype=np.complex128))

    g_dd = ops.g_domain[np.ix_(support, support)]
    g_sd = ops.g_surface[:, support]
    e_tot_support, scatter = solve_reduced(g_dd, g_sd, inc.incident[:, support], flat[support])
    currents_support = flat[support][None, :] * e_tot_support
    total = inc.incident + currents_support @ ops.g_domain[:, support].T
    total[:, support] = e_tot_support  # keep the factored solution on the support
    induced = flat[None, :] * total
    fields = FieldSet(incident=inc.incident, total=total, induced_current=induced)
    return fields, ScatterMatrix(scatter)

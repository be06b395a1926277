"""Back-propagation initial imaging from a measured scatter matrix.

For each transmitter p the induced current is approximated by projecting the
measurement back through the adjoint radiation operator,

    J_p = gamma_p G_S^H E_sca_p,
    gamma_p = <G_S G_S^H E_sca_p, E_sca_p> / ||G_S G_S^H E_sca_p||^2,

which is the least-squares amplitude along the back-projected direction
(the quadratic form is real because G_S G_S^H is Hermitian). The total field
is completed through the domain operator, E_tot_p = E_inc_p + G_D J_p, and
the pixelwise contrast estimate combines all transmitters:

    chi_hat(m) = sum_p J_p(m) conj(E_tot_p(m)) / sum_p |E_tot_p(m)|^2.

The image is returned complex and unclamped; display and scoring decide how
to reduce it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .forward import FieldSet, ScatterMatrix
from .operators import OperatorPair


@dataclass
class BpImage:
    """Complex back-propagation image, (grid_n, grid_n).

    ``degenerate`` marks pixels where every transmitter's total field
    vanished; those pixels are zeroed. Empty when no pixel degenerated.
    """

    values: np.ndarray
    degenerate: np.ndarray | None = None


def back_project(scatter_values: np.ndarray, g_surface: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares back-projected currents.

    Returns the per-transmitter current columns (n_cells, n_tx) and the
    amplitudes gamma (n_tx,). Transmitters with a vanishing back projection
    get gamma = 0.
    """
    back = g_surface.conj().T @ scatter_values  # (n_cells, n_tx): G_S^H E_sca
    forward_again = g_surface @ back  # (n_rx, n_tx): G_S G_S^H E_sca
    denom = np.sum(np.abs(forward_again) ** 2, axis=0)
    numer = np.sum(forward_again * scatter_values.conj(), axis=0)
    gamma = np.zeros(scatter_values.shape[1], dtype=np.complex128)
    nonzero = denom > 0
    gamma[nonzero] = numer[nonzero] / denom[nonzero]
    return back * gamma[None, :], gamma


def backpropagate(scatter: ScatterMatrix, ops: OperatorPair, inc: FieldSet) -> BpImage:
    """Form the complex BP contrast image from one scatter matrix."""
    s = np.asarray(scatter.values)
    n_rx, n_cells = ops.g_surface.shape
    n_tx = inc.incident.shape[0]
    if s.shape != (n_rx, n_tx) or inc.incident.shape[1] != n_cells:
        raise DimensionMismatchError(
            f"scatter {s.shape}, operators ({n_rx}, {n_cells}) and incident "
            f"fields {inc.incident.shape} are inconsistent"
        )
    grid_n = int(round(np.sqrt(n_cells)))

    currents, _ = back_project(s, ops.g_surface)  # (n_cells, n_tx)
    total = inc.incident + (ops.g_domain @ currents).T  # (n_tx, n_cells)

    weight = np.sum(np.abs(total) ** 2, axis=0)
    image = np.zeros(n_cells, dtype=np.complex128)
    live = weight > 0
    image[live] = np.sum(currents.T * total.conj(), axis=0)[live] / weight[live]
    degenerate = None
    if not np.all(live):
        degenerate = (~live).reshape(grid_n, grid_n)
    return BpImage(values=image.reshape(grid_n, grid_n), degenerate=degenerate)

"""Reference image metrics and composite losses.

These are the plain NumPy implementations that every other component must
agree with: root-mean-square error, Gaussian-windowed SSIM, smoothed
isotropic total variation, the frozen-field scattering consistency loss and
the composite objective

    mix = contrast + (1 - SSIM^2) + alpha * field + beta * tv(pred),

where ``contrast`` is the pixel-mean squared error and alpha balances the
contrast and field magnitudes per sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate

from .errors import BetaRangeError, DimensionMismatchError, MissingFieldsError
from .forward import ContrastMap, FieldSet
from .operators import OperatorPair

TV_SMOOTHING = 1e-8


def _gaussian_window(size: int, sigma: float) -> np.ndarray:
    half = (size - 1) / 2.0
    x = np.arange(size) - half
    g = np.exp(-(x**2) / (2.0 * sigma**2))
    w = np.outer(g, g)
    return w / w.sum()


@dataclass(frozen=True)
class SsimParams:
    """Windowing and stabilization constants for SSIM.

    ``dynamic_range`` defaults to 4.0, the contrast span for relative
    permittivities in (1, 5].
    """

    window_size: int = 11
    sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 4.0

    def window(self) -> np.ndarray:
        return _gaussian_window(self.window_size, self.sigma)


DEFAULT_SSIM = SsimParams()


@dataclass
class LossBreakdown:
    """Per-term values of the composite loss for one prediction."""

    contrast: float
    ssim_term: float
    field: float
    tv: float
    alpha: float
    beta: float
    mix_total: float


def _as_grid(x) -> np.ndarray:
    values = x.values if isinstance(x, ContrastMap) else np.asarray(x, dtype=np.float64)
    if values.ndim != 2:
        raise DimensionMismatchError(f"expected a 2D map, got shape {values.shape}")
    return np.asarray(values, dtype=np.float64)


def rmse(pred, truth) -> float:
    """Root of the pixel-mean squared difference of two maps."""
    p, t = _as_grid(pred), _as_grid(truth)
    if p.shape != t.shape:
        raise DimensionMismatchError(f"shape mismatch {p.shape} vs {t.shape}")
    return float(np.sqrt(np.mean((p - t) ** 2)))


def ssim(pred, truth, params: SsimParams = DEFAULT_SSIM) -> float:
    """Mean local SSIM with Gaussian windowing and symmetric edge padding."""
    p, t = _as_grid(pred), _as_grid(truth)
    if p.shape != t.shape:
        raise DimensionMismatchError(f"shape mismatch {p.shape} vs {t.shape}")
    w = params.window()
    c1 = (params.k1 * params.dynamic_range) ** 2
    c2 = (params.k2 * params.dynamic_range) ** 2

    def smooth(img):
        return correlate(img, w, mode="reflect")

    mu_p = smooth(p)
    mu_t = smooth(t)
    var_p = smooth(p * p) - mu_p * mu_p
    var_t = smooth(t * t) - mu_t * mu_t
    cov = smooth(p * t) - mu_p * mu_t
    num = (2.0 * mu_p * mu_t + c1) * (2.0 * cov + c2)
    den = (mu_p * mu_p + mu_t * mu_t + c1) * (var_p + var_t + c2)
    return float(np.mean(num / den))


def tv(map_like) -> float:
    """Smoothed isotropic total variation, averaged over all pixels.

    Forward differences with replicated edges (zero difference on the last
    row/column); each pixel contributes sqrt(dx^2 + dy^2 + eps^2), so a
    constant map scores exactly eps = 1e-8.
    """
    m = _as_grid(map_like)
    dx = np.zeros_like(m)
    dy = np.zeros_like(m)
    dx[:, :-1] = m[:, 1:] - m[:, :-1]
    dy[:-1, :] = m[1:, :] - m[:-1, :]
    return float(np.mean(np.sqrt(dx * dx + dy * dy + TV_SMOOTHING**2)))


def _scattered_in_domain(delta: np.ndarray, fields: FieldSet, ops: OperatorPair) -> np.ndarray:
    """G_D ((delta * E_tot_p)) for every transmitter, (n_tx, n_cells)."""
    if fields.total is None:
        raise MissingFieldsError("FieldSet lacks total fields; run solve_forward first")
    return (fields.total * delta[None, :]) @ ops.g_domain.T


def field_loss(pred, truth, fields: FieldSet, ops: OperatorPair) -> float:
    """Scattering-consistency loss of a prediction under frozen total fields.

    (1/n_tx) sum_p ||G_D ((pred - truth) * E_tot_p)||^2 / n_cells, where the
    total fields come from the forward solve of the true contrast.
    """
    p, t = _as_grid(pred), _as_grid(truth)
    if p.shape != t.shape:
        raise DimensionMismatchError(f"shape mismatch {p.shape} vs {t.shape}")
    delta = (p - t).ravel()
    radiated = _scattered_in_domain(delta, fields, ops)
    n_tx, n_cells = radiated.shape
    return float(np.sum(np.abs(radiated) ** 2) / (n_tx * n_cells))


def alpha_balance(truth, fields: FieldSet, ops: OperatorPair) -> float:
    """Ratio ||chi||^2 / sum_p ||G_D (chi * E_tot_p)||^2, both unnormalized.

    Returns +inf for a zero scatterer (zero denominator).
    """
    chi = _as_grid(truth).ravel()
    radiated = _scattered_in_domain(chi, fields, ops)
    denom = float(np.sum(np.abs(radiated) ** 2))
    if denom == 0.0:
        return math.inf
    return float(np.sum(chi * chi)) / denom


def loss_eval(
    pred,
    truth,
    fields: FieldSet,
    ops: OperatorPair,
    beta: float,
    ssim_params: SsimParams = DEFAULT_SSIM,
) -> LossBreakdown:
    """Evaluate every term of the composite loss for one prediction.

    ``contrast`` is the pixel-mean squared error (grid-size invariant);
    alpha is recomputed from the true contrast and frozen fields. A zero
    field term contributes nothing even when alpha is the +inf sentinel of
    a zero scatterer.
    """
    if not 0.0 <= beta <= 1.0:
        raise BetaRangeError(f"beta must lie in [0, 1], got {beta}")
    p, t = _as_grid(pred), _as_grid(truth)
    if p.shape != t.shape:
        raise DimensionMismatchError(f"shape mismatch {p.shape} vs {t.shape}")
    contrast = float(np.mean((p - t) ** 2))
    s = ssim(p, t, ssim_params)
    ssim_term = 1.0 - s * s
    fld = field_loss(p, t, fields, ops)
    alpha = alpha_balance(t, fields, ops)
    tv_pred = tv(p)
    field_contrib = 0.0 if fld == 0.0 else alpha * fld
    mix = contrast + ssim_term + field_contrib + beta * tv_pred
    return LossBreakdown(
        contrast=contrast,
        ssim_term=ssim_term,
        field=fld,
        tv=tv_pred,
        alpha=alpha,
        beta=beta,
        mix_total=mix,
    )

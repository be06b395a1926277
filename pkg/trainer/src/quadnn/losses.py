"""Differentiable losses matching the reference metric definitions.

All terms reproduce the workbench reference implementations to numerical
precision: Gaussian-window SSIM (11x11, sigma 1.5, stabilizers from a
dynamic range of 4) with symmetric edge padding, epsilon-smoothed isotropic
total variation with forward differences and replicated edges, and the
frozen-field scattering consistency term

    field(pred) = (1/n_tx) sum_p ||G_D ((pred - truth) * E_tot_p)||^2 / n_cells.

The composite objective per sample is

    mix = mean((pred - truth)^2) + (1 - SSIM^2) + alpha * field + beta * tv(pred)

with alpha precomputed per sample at dataset-export time.
"""

from __future__ import annotations

import math

import torch
import torch.nn.functional as F

TV_SMOOTHING = 1e-8
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
SSIM_RANGE = 4.0


def gaussian_window(dtype=torch.float32, device=None) -> torch.Tensor:
    half = (SSIM_WINDOW - 1) / 2.0
    x = torch.arange(SSIM_WINDOW, dtype=torch.float64, device=device) - half
    g = torch.exp(-(x**2) / (2.0 * SSIM_SIGMA**2))
    w = torch.outer(g, g)
    return (w / w.sum()).to(dtype)


def symmetric_pad(x: torch.Tensor, pad: int) -> torch.Tensor:
    """Edge-repeating mirror padding on the last two axes.

    torch's built-in "reflect" mode excludes the edge sample; the reference
    metrics repeat it, so this builds the same extension from flipped
    slices.
    """
    left = x[..., :, :pad].flip(-1)
    right = x[..., :, -pad:].flip(-1)
    x = torch.cat([left, x, right], dim=-1)
    top = x[..., :pad, :].flip(-2)
    bottom = x[..., -pad:, :].flip(-2)
    return torch.cat([top, x, bottom], dim=-2)


def _smooth(x: torch.Tensor, window: torch.Tensor) -> torch.Tensor:
    pad = SSIM_WINDOW // 2
    padded = symmetric_pad(x.unsqueeze(1), pad)
    return F.conv2d(padded, window[None, None]).squeeze(1)


def ssim(pred: torch.Tensor, truth: torch.Tensor) -> torch.Tensor:
    """Per-sample mean SSIM for (B, H, W) tensors; returns (B,)."""
    window = gaussian_window(dtype=pred.dtype, device=pred.device)
    c1 = (SSIM_K1 * SSIM_RANGE) ** 2
    c2 = (SSIM_K2 * SSIM_RANGE) ** 2
    mu_p = _smooth(pred, window)
    mu_t = _smooth(truth, window)
    var_p = _smooth(pred * pred, window) - mu_p * mu_p
    var_t = _smooth(truth * truth, window) - mu_t * mu_t
    cov = _smooth(pred * truth, window) - mu_p * mu_t
    num = (2 * mu_p * mu_t + c1) * (2 * cov + c2)
    den = (mu_p * mu_p + mu_t * mu_t + c1) * (var_p + var_t + c2)
    return (num / den).mean(dim=(1, 2))


def tv(x: torch.Tensor) -> torch.Tensor:
    """Per-sample smoothed isotropic total variation for (B, H, W); (B,)."""
    dx = F.pad(x[:, :, 1:] - x[:, :, :-1], (0, 1))
    dy = F.pad(x[:, 1:, :] - x[:, :-1, :], (0, 0, 0, 1))
    return torch.sqrt(dx * dx + dy * dy + TV_SMOOTHING**2).mean(dim=(1, 2))


def field_consistency(
    pred: torch.Tensor, truth: torch.Tensor, etot: torch.Tensor, g_domain: torch.Tensor
) -> torch.Tensor:
    """Per-sample frozen-field consistency loss.

    pred/truth: (B, H, W) real; etot: (B, n_tx, H, W) complex frozen total
    fields of the true contrast; g_domain: (n_cells, n_cells) complex.
    """
    b, n_tx = etot.shape[:2]
    n_cells = g_domain.shape[0]
    delta = (pred - truth).reshape(b, 1, n_cells)
    currents = delta.to(etot.dtype) * etot.reshape(b, n_tx, n_cells)
    radiated = currents.reshape(b * n_tx, n_cells) @ g_domain.T
    power = (radiated.real**2 + radiated.imag**2).reshape(b, n_tx, n_cells)
    return power.sum(dim=(1, 2)) / (n_tx * n_cells)


def contrast_mse(pred: torch.Tensor, truth: torch.Tensor) -> torch.Tensor:
    return ((pred - truth) ** 2).mean(dim=(1, 2))


def mix_loss(
    pred: torch.Tensor,
    truth: torch.Tensor,
    beta: float,
    alpha: torch.Tensor | None = None,
    etot: torch.Tensor | None = None,
    g_domain: torch.Tensor | None = None,
) -> tuple[torch.Tensor, dict]:
    """Batch-mean composite loss and its per-term means.

    The physics term needs ``alpha``, ``etot`` and ``g_domain``; without
    them the loss reduces to the data-fitting and smoothness terms (and is
    exactly the visual-quality objective when beta is also zero).
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    data_term = contrast_mse(pred, truth)
    s = ssim(pred, truth)
    ssim_term = 1.0 - s * s
    total = data_term + ssim_term
    parts = {
        "contrast": float(data_term.mean().detach()),
        "ssim_term": float(ssim_term.mean().detach()),
        "field": 0.0,
        "tv": 0.0,
    }
    if etot is not None and g_domain is not None and alpha is not None:
        field = field_consistency(pred, truth, etot, g_domain)
        # a zero scatterer exports an infinite balance weight; its physics
        # term must contribute nothing rather than poison the gradient
        alpha = alpha.to(field.dtype)
        alpha_safe = torch.where(torch.isfinite(alpha), alpha, torch.zeros_like(alpha))
        total = total + alpha_safe * field
        parts["field"] = float(field.mean().detach())
    if beta > 0.0:
        smooth = tv(pred)
        total = total + beta * smooth
        parts["tv"] = float(smooth.mean().detach())
    else:
        with torch.no_grad():
            parts["tv"] = float(tv(pred).mean())
    loss = total.mean()
    if not math.isfinite(float(loss.detach())):
        raise FloatingPointError("non-finite training loss")
    return loss, parts

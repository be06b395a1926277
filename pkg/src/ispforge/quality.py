"""Sample quality scoring and quality-stratified dataset composition.

The quality factor of a sample is SSIM/RMSE of its back-propagation image
(clamped real part, since physical contrast is non-negative) against the true
contrast. Sorting a batch by quality and splitting it into equal quarters
yields the categories excellent/good/fair/poor; composition then draws a
fixed share from each category, weighting hard samples most.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .bp import BpImage
from .errors import (
    DimensionMismatchError,
    IndivisibleCountError,
    InsufficientCategoryError,
    InvalidConfigError,
    ZeroSignalError,
)
from .forward import ContrastMap, ScatterMatrix
from .metrics import DEFAULT_SSIM, SsimParams, rmse, ssim

CATEGORIES = ("excellent", "good", "fair", "poor")
DEFAULT_PROPORTIONS = (0.1, 0.2, 0.3, 0.4)


@dataclass
class SampleRecord:
    """One dataset entry: ground truth, noisy measurement, BP image, score.

    Arrays are stored exactly as serialized (float32 truth, complex64
    measurement and image) so containers round-trip bit-exactly. ``etot``
    and ``alpha`` are present only when the sample was exported with frozen
    total fields for training-time physics losses.
    """

    id: str
    truth: np.ndarray  # (grid_n, grid_n) float32
    scatter_noisy: np.ndarray  # (n_rx, n_tx) complex64
    bp: np.ndarray  # (grid_n, grid_n) complex64
    q_bp: float
    category: str = "unassigned"
    snr_db: float = math.inf
    provenance: dict | None = None
    etot: np.ndarray | None = None  # (n_tx, grid_n, grid_n) complex64
    alpha: float | None = None


def add_noise(scatter: ScatterMatrix, snr_db: float, seed) -> ScatterMatrix:
    """Add complex white Gaussian noise at the requested matrix-level SNR.

    Noise power per entry is mean(|entry|^2) / 10^(snr_db/10), split evenly
    between independent real and imaginary components. ``snr_db = +inf``
    returns the input unchanged; an all-zero matrix has no signal scale and
    is rejected.
    """
    values = np.asarray(scatter.values)
    if math.isinf(snr_db) and snr_db > 0:
        return ScatterMatrix(values.copy())
    if not math.isfinite(snr_db):
        raise InvalidConfigError(f"snr_db must be finite or +inf, got {snr_db}")
    signal_power = float(np.mean(np.abs(values) ** 2))
    if signal_power == 0.0:
        raise ZeroSignalError("cannot set a relative noise level on a zero scatter matrix")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    noise_power = signal_power / 10.0 ** (snr_db / 10.0)
    sigma = math.sqrt(noise_power / 2.0)
    noise = sigma * (rng.standard_normal(values.shape) + 1j * rng.standard_normal(values.shape))
    return ScatterMatrix(values + noise)


def scored_bp_image(bp: BpImage | np.ndarray) -> np.ndarray:
    """Real non-negative reduction of a complex BP image: max(Re, 0)."""
    values = bp.values if isinstance(bp, BpImage) else np.asarray(bp)
    return np.maximum(np.real(values), 0.0)


def quality_factor(
    truth: ContrastMap | np.ndarray,
    bp: BpImage | np.ndarray,
    params: SsimParams = DEFAULT_SSIM,
) -> float:
    """SSIM/RMSE of the clamped-real BP image against the true contrast.

    Returns +inf when the images agree exactly (zero RMSE).
    """
    truth_values = truth.values if isinstance(truth, ContrastMap) else np.asarray(truth)
    scored = scored_bp_image(bp)
    if truth_values.shape != scored.shape:
        raise DimensionMismatchError(
            f"truth {truth_values.shape} vs BP image {scored.shape}"
        )
    err = rmse(scored, truth_values)
    if err == 0.0:
        return math.inf
    return ssim(scored, truth_values, params) / err


def categorize(samples: list[SampleRecord]) -> list[SampleRecord]:
    """Assign quality categories by descending quality factor, in quarters.

    Ties break on sample id so the split is deterministic. The input count
    must divide evenly by four; returns new records, input order preserved.
    """
    if len(samples) % len(CATEGORIES) != 0:
        raise IndivisibleCountError(
            f"sample count {len(samples)} not divisible by {len(CATEGORIES)}"
        )
    quarter = len(samples) // len(CATEGORIES)
    order = sorted(range(len(samples)), key=lambda i: (-samples[i].q_bp, samples[i].id))
    category_of = {}
    for rank, idx in enumerate(order):
        category_of[idx] = CATEGORIES[rank // quarter]
    return [replace(rec, category=category_of[i]) for i, rec in enumerate(samples)]


def _rounded_counts(target_n: int, proportions) -> list[int]:
    # banker's rounding per category, any residual lands on the last (poor)
    counts = [round(p * target_n) for p in proportions]
    counts[-1] += target_n - sum(counts)
    return counts


def compose(
    samples: list[SampleRecord],
    target_n: int,
    proportions=DEFAULT_PROPORTIONS,
    seed=0,
) -> list[SampleRecord]:
    """Quality-stratified subset: fixed share per category, drawn uniformly.

    Proportions follow the category order excellent/good/fair/poor; counts
    are rounded half-to-even with the residual assigned to poor. Selection
    within each category is uniform without replacement; the result is
    sorted by sample id.
    """
    if len(proportions) != len(CATEGORIES):
        raise InsufficientCategoryError(
            f"need {len(CATEGORIES)} proportions, got {len(proportions)}"
        )
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    counts = _rounded_counts(target_n, proportions)
    chosen: list[SampleRecord] = []
    for category, need in zip(CATEGORIES, counts):
        pool = sorted(
            (rec for rec in samples if rec.category == category), key=lambda r: r.id
        )
        if len(pool) < need:
            raise InsufficientCategoryError(
                f"category {category!r} holds {len(pool)} samples, need {need}"
            )
        picks = rng.choice(len(pool), size=need, replace=False)
        chosen.extend(pool[i] for i in picks)
    return sorted(chosen, key=lambda r: r.id)


def compose_uniform(samples: list[SampleRecord], target_n: int, seed=0) -> list[SampleRecord]:
    """Uniform subset without replacement, sorted by sample id."""
    if target_n > len(samples):
        raise InsufficientCategoryError(
            f"cannot draw {target_n} samples from a population of {len(samples)}"
        )
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    pool = sorted(samples, key=lambda r: r.id)
    picks = rng.choice(len(pool), size=target_n, replace=False)
    return sorted((pool[i] for i in picks), key=lambda r: r.id)


def category_histogram(samples: list[SampleRecord]) -> dict[str, int]:
    hist = {name: 0 for name in (*CATEGORIES, "unassigned")}
    for rec in samples:
        hist[rec.category] = hist.get(rec.category, 0) + 1
    return {k: v for k, v in hist.items() if v or k != "unassigned"}

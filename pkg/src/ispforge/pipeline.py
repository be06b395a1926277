"""End-to-end dataset production: profile, forward solve, noise, BP, score.

Each sample derives its own random generator from the master seed and its
index (``SeedSequence(master, spawn_key=(index,))``), so output is
bit-identical whatever the worker count. Workers are forked after the dense
operators are assembled and share them read-only.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .bp import backpropagate
from .config import PhysicsConfig
from .container import Dataset
from .errors import InvalidConfigError
from .forward import ContrastMap, FieldSet, incident_fields, solve_forward
from .generators import (
    CircleSpec,
    gen_austria,
    gen_digit,
    gen_overlap_circles,
    gen_polygon,
)
from .geometry import build_geometry
from .glyphs import glyph_bank
from .metrics import alpha_balance
from .operators import OperatorPair, assemble_operators
from .quality import SampleRecord, add_noise, quality_factor

GENERATOR_NAMES = ("digit", "polygon", "austria", "overlap")

# canonical shapes for the fixed-profile generators, in wavelengths
DEFAULT_OVERLAP_CIRCLES = (
    ((-0.35, 0.0), 0.9, 2.0),
    ((0.55, 0.0), 0.7, 3.0),
)
DEFAULT_AUSTRIA_EPS = (2.0, 2.0, 2.0)


@dataclass
class GenerationRecipe:
    """Everything cmd_generate needs besides the physics configuration."""

    generator: str = "digit"
    n: int = 1
    snr_db: float = math.inf
    seed: int = 0
    with_fields: bool = False
    eps_range: tuple[float, float] = (1.0, 5.0)
    glyphs: np.ndarray | None = None  # (count, 28, 28) uint8; defaults to the built-in bank
    austria_eps: tuple[float, float, float] = DEFAULT_AUSTRIA_EPS
    overlap_circles: tuple = DEFAULT_OVERLAP_CIRCLES

    def validate(self):
        if self.generator not in GENERATOR_NAMES:
            raise InvalidConfigError(
                f"unknown generator {self.generator!r}, expected one of {GENERATOR_NAMES}"
            )
        if self.n < 1:
            raise InvalidConfigError(f"sample count must be >= 1, got {self.n}")


def sample_rng(master_seed: int, index: int) -> np.random.Generator:
    """Deterministic per-sample generator, independent of worker layout."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))


def _make_profile(recipe: GenerationRecipe, cfg, rng, index) -> ContrastMap:
    if recipe.generator == "digit":
        glyphs = recipe.glyphs
        glyph = glyphs[index % len(glyphs)]
        return gen_digit(glyph, recipe.eps_range, rng, cfg)
    if recipe.generator == "polygon":
        return gen_polygon(cfg, rng)
    if recipe.generator == "austria":
        eps = recipe.austria_eps
        return gen_austria((eps[0], eps[1]), eps[2], cfg)
    specs = [
        CircleSpec(
            center=(c[0][0] * cfg.wavelength, c[0][1] * cfg.wavelength),
            radius=c[1] * cfg.wavelength,
            eps_r=c[2],
        )
        for c in recipe.overlap_circles
    ]
    return gen_overlap_circles(specs, cfg)


def produce_sample(
    index: int,
    recipe: GenerationRecipe,
    cfg: PhysicsConfig,
    ops: OperatorPair,
    inc: FieldSet,
) -> SampleRecord:
    """Run the full per-sample chain and freeze the storage-precision arrays."""
    rng = sample_rng(recipe.seed, index)
    profile = _make_profile(recipe, cfg, rng, index)
    fields, scatter = solve_forward(profile, ops, inc)
    noisy = add_noise(scatter, recipe.snr_db, rng) if profile.values.any() else scatter
    bp_image = backpropagate(noisy, ops, inc)

    truth32 = profile.values.astype("<f4")
    scatter64 = np.asarray(noisy.values, dtype="<c8")
    bp64 = np.asarray(bp_image.values, dtype="<c8")
    q = quality_factor(truth32.astype(np.float64), bp64.astype(np.complex128))

    etot = None
    alpha = None
    if recipe.with_fields:
        grid = cfg.grid_n
        etot = fields.total.reshape(cfg.n_tx, grid, grid).astype("<c8")
        alpha = alpha_balance(profile.values, fields, ops)
    provenance = {
        "generator": recipe.generator,
        "master_seed": recipe.seed,
        "index": index,
    }
    if recipe.generator == "digit":
        eps_max = float(truth32.max()) + 1.0
        provenance["eps_r"] = eps_max
    return SampleRecord(
        id=f"{index:06d}",
        truth=truth32,
        scatter_noisy=scatter64,
        bp=bp64,
        q_bp=q,
        snr_db=recipe.snr_db,
        provenance=provenance,
        etot=etot,
        alpha=alpha,
    )


_WORKER_CTX: dict = {}


def _worker(index: int) -> SampleRecord:
    ctx = _WORKER_CTX
    return produce_sample(index, ctx["recipe"], ctx["cfg"], ctx["ops"], ctx["inc"])


def default_workers() -> int:
    value = os.environ.get("ISPFORGE_WORKERS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def produce_dataset(
    cfg: PhysicsConfig,
    recipe: GenerationRecipe,
    workers: int | None = None,
) -> Dataset:
    """Generate a full dataset; parallelism never changes the result."""
    recipe.validate()
    if recipe.generator == "digit" and recipe.glyphs is None:
        from dataclasses import replace

        recipe = replace(recipe, glyphs=glyph_bank(max(32, min(recipe.n, 256)), seed=recipe.seed))
    geom = build_geometry(cfg)
    ops = assemble_operators(geom, cfg)
    inc = incident_fields(geom, cfg)
    workers = default_workers() if workers is None else max(1, workers)

    indices = list(range(recipe.n))
    if workers == 1 or recipe.n == 1:
        records = [produce_sample(i, recipe, cfg, ops, inc) for i in indices]
    else:
        import multiprocessing as mp

        _WORKER_CTX.update(recipe=recipe, cfg=cfg, ops=ops, inc=inc)
        try:
            with mp.get_context("fork").Pool(processes=workers) as pool:
                records = pool.map(_worker, indices, chunksize=4)
        finally:
            _WORKER_CTX.clear()

    dataset = Dataset(physics=cfg, samples=records)
    if recipe.with_fields:
        dataset.g_domain = ops.g_domain.astype("<c8")
    return dataset

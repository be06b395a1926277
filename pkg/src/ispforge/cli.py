"""Command-line entry point.

    ispforge generate --config cfg.json --seed 7 --out data/run1 --n 200 [--snr-db 5]
    ispforge curate   data/run1 --mode qbp --n 100 --seed 7 --out data/curated
    ispforge evaluate data/pred data/run1 --out reports/run1 [--beta 0.2]
    ispforge render   data/run1 --ids 000000,000001 --out images/

Exit codes: 0 success, 1 unexpected failure, 2 bad arguments or
configuration, 3 insufficient category during curation, 4 malformed
container, 5 malformed input data, 6 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .config import PhysicsConfig
from .container import Dataset, read_container, write_container
from .errors import InvalidConfigError, IspForgeError
from .evaluate import evaluate_datasets, write_report
from .forward import FieldSet
from .idx import read_idx_images
from .metrics import loss_eval
from .operators import OperatorPair
from .pipeline import (
    DEFAULT_AUSTRIA_EPS,
    DEFAULT_OVERLAP_CIRCLES,
    GENERATOR_NAMES,
    GenerationRecipe,
    default_workers,
    produce_dataset,
)
from .quality import categorize, compose, compose_uniform
from .render import DEFAULT_MAX_CHI, write_pgm


def _load_recipe_file(path: str | None) -> tuple[PhysicsConfig, dict]:
    if path is None:
        return PhysicsConfig(), {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidConfigError(f"config {path} must hold a JSON object")
    physics = PhysicsConfig.from_dict(data.get("physics", {}))
    recipe_keys = {k: v for k, v in data.items() if k != "physics"}
    return physics, recipe_keys


def cmd_generate(args) -> int:
    physics, extras = _load_recipe_file(args.config)
    recipe = GenerationRecipe(
        generator=args.generator or extras.get("generator", "digit"),
        n=args.n if args.n is not None else int(extras.get("n", 1)),
        snr_db=args.snr_db if args.snr_db is not None else float(extras.get("snr_db", math.inf)),
        seed=args.seed,
        with_fields=args.with_fields or bool(extras.get("with_fields", False)),
        eps_range=tuple(extras.get("eps_range", (1.0, 5.0))),
        austria_eps=tuple(extras.get("austria_eps", DEFAULT_AUSTRIA_EPS)),
        overlap_circles=tuple(
            (tuple(c[0]), c[1], c[2]) for c in extras.get("overlap_circles", DEFAULT_OVERLAP_CIRCLES)
        ),
    )
    if args.mnist_idx:
        recipe.glyphs = read_idx_images(args.mnist_idx)
    dataset = produce_dataset(physics, recipe, workers=args.workers)
    write_container(dataset, args.out)
    print(f"wrote {len(dataset)} samples to {args.out}")
    return 0


def cmd_curate(args) -> int:
    dataset = read_container(args.container)
    categorized = categorize(dataset.samples)
    if args.mode == "qbp":
        selected = compose(categorized, args.n, seed=args.seed)
    else:
        selected = compose_uniform(categorized, args.n, seed=args.seed)
    out = Dataset(physics=dataset.physics, samples=selected, g_domain=dataset.g_domain)
    write_container(out, args.out)
    print(f"curated {len(selected)} of {len(categorized)} samples ({args.mode}) to {args.out}")
    return 0


def _loss_summary(pred_ds: Dataset, truth_ds: Dataset, beta: float) -> dict | None:
    if truth_ds.g_domain is None:
        return None
    usable = [rec for rec in truth_ds.samples if rec.etot is not None]
    if not usable:
        return None
    from .evaluate import prediction_maps

    g_domain = truth_ds.g_domain.astype(np.complex128)
    ops = OperatorPair(g_domain=g_domain, g_surface=np.zeros((0, g_domain.shape[0])))
    preds = {rec.id: pred for rec, pred in zip(pred_ds.samples, prediction_maps(pred_ds))}
    terms = []
    for rec in usable:
        if rec.id not in preds:
            continue
        n_tx = rec.etot.shape[0]
        fields = FieldSet(
            incident=np.zeros((n_tx, g_domain.shape[0])),
            total=rec.etot.reshape(n_tx, -1).astype(np.complex128),
        )
        breakdown = loss_eval(
            preds[rec.id], np.asarray(rec.truth, dtype=np.float64), fields, ops, beta
        )
        terms.append(breakdown)
    if not terms:
        return None
    return {
        "beta": beta,
        "mean_contrast": float(np.mean([t.contrast for t in terms])),
        "mean_ssim_term": float(np.mean([t.ssim_term for t in terms])),
        "mean_field": float(np.mean([t.field for t in terms])),
        "mean_tv": float(np.mean([t.tv for t in terms])),
        "mean_mix": float(np.mean([t.mix_total for t in terms])),
    }


def cmd_evaluate(args) -> int:
    pred_ds = read_container(args.pred)
    truth_ds = read_container(args.truth)
    rows = evaluate_datasets(pred_ds, truth_ds)
    summary = write_report(rows, args.out)
    if args.beta is not None:
        losses = _loss_summary(pred_ds, truth_ds, args.beta)
        if losses is not None:
            summary["losses"] = losses
            (Path(args.out) / "summary.json").write_text(json.dumps(summary, indent=1, sort_keys=True))
    print(
        f"evaluated {summary['count']} samples: mean RMSE {summary['mean_rmse']:.4f}, "
        f"mean SSIM {summary['mean_ssim']:.4f}"
    )
    return 0


def cmd_render(args) -> int:
    dataset = read_container(args.container)
    wanted = set(args.ids.split(",")) if args.ids else None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    count = 0
    for rec in dataset.samples:
        if wanted is not None and rec.id not in wanted:
            continue
        write_pgm(out / f"{rec.id}_truth.pgm", rec.truth, args.max_chi)
        write_pgm(out / f"{rec.id}_bp.pgm", np.abs(rec.bp), args.max_chi)
        count += 1
    print(f"rendered {count} samples to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ispforge", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="simulate and score a dataset")
    gen.add_argument("--config", help="JSON physics/recipe configuration")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.add_argument("--n", type=int, default=None)
    gen.add_argument("--snr-db", type=float, default=None, dest="snr_db")
    gen.add_argument("--generator", choices=GENERATOR_NAMES, default=None)
    gen.add_argument("--workers", type=int, default=default_workers())
    gen.add_argument("--with-fields", action="store_true", dest="with_fields")
    gen.add_argument("--mnist-idx", default=None, dest="mnist_idx")
    gen.set_defaults(func=cmd_generate)

    cur = sub.add_parser("curate", help="categorize and compose a training subset")
    cur.add_argument("container")
    cur.add_argument("--mode", choices=("qbp", "uniform"), default="qbp")
    cur.add_argument("--n", type=int, required=True)
    cur.add_argument("--seed", type=int, default=0)
    cur.add_argument("--out", required=True)
    cur.set_defaults(func=cmd_curate)

    ev = sub.add_parser("evaluate", help="score a prediction container against truth")
    ev.add_argument("pred")
    ev.add_argument("truth")
    ev.add_argument("--out", required=True)
    ev.add_argument("--beta", type=float, default=None)
    ev.set_defaults(func=cmd_evaluate)

    ren = sub.add_parser("render", help="emit PGM images of maps and BP magnitudes")
    ren.add_argument("container")
    ren.add_argument("--ids", default=None)
    ren.add_argument("--out", required=True)
    ren.add_argument("--max-chi", type=float, default=DEFAULT_MAX_CHI, dest="max_chi")
    ren.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IspForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # pragma: no cover - last-resort diagnostics
        print(f"unexpected error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

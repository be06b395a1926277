"""Training and inference loops.

Training is plain SGD with momentum over seeded random batches of the
(BP real/imag -> contrast) pairs; the physics term uses the frozen total
fields and balance weights exported in the container, so no forward solver
runs here. One process, sequential steps, fully seed-deterministic.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np
import torch

from .container import DataBundle, load_container, write_prediction_container
from .losses import mix_loss
from .network import NetworkSpec, ReseUNet, build_network

DESK_LEARNING_RATE = 1e-3  # desk-scale runs; the full-scale default is 5e-6


@dataclass
class TrainConfig:
    learning_rate: float = 5e-6
    momentum: float = 0.99
    epochs: int = 30
    batch_size: int = 16
    beta: float = 0.2
    seed: int = 0

    def validate(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        if self.learning_rate < 0 or self.epochs < 1 or self.batch_size < 1:
            raise ValueError("hyperparameters must be positive")


def _inputs_from_bp(bp: np.ndarray) -> torch.Tensor:
    """(n, grid, grid) complex BP images -> (n, 2, grid, grid) float tensor."""
    stacked = np.stack([bp.real, bp.imag], axis=1).astype(np.float32)
    return torch.from_numpy(stacked)


def train(
    data: DataBundle | str | Path,
    cfg: TrainConfig = TrainConfig(),
    spec: NetworkSpec = NetworkSpec(),
    out_dir: str | Path | None = None,
) -> tuple[ReseUNet, list[dict]]:
    """Train a model on a container; returns the model and per-epoch stats."""
    cfg.validate()
    bundle = load_container(data) if not isinstance(data, DataBundle) else data
    if bundle.grid_n % 2**spec.depth:
        raise ValueError(
            f"container grid {bundle.grid_n} not divisible by 2^{spec.depth}"
        )
    torch.manual_seed(cfg.seed)
    model = build_network(spec)

    inputs = _inputs_from_bp(bundle.bp)
    targets = torch.from_numpy(bundle.truth.astype(np.float32))
    use_physics = bundle.etot is not None and bundle.g_domain is not None
    if use_physics:
        etot = torch.from_numpy(bundle.etot)  # complex64
        g_domain = torch.from_numpy(bundle.g_domain)
        alphas = torch.tensor(
            [s.alpha if s.alpha is not None else math.inf for s in bundle.samples],
            dtype=torch.float32,
        )
    optimizer = torch.optim.SGD(model.parameters(), lr=cfg.learning_rate, momentum=cfg.momentum)
    order_rng = np.random.default_rng(cfg.seed)

    n = len(bundle)
    history: list[dict] = []
    model.train()
    for epoch in range(cfg.epochs):
        perm = order_rng.permutation(n)
        epoch_loss = 0.0
        seen = 0
        for start in range(0, n, cfg.batch_size):
            idx = perm[start : start + cfg.batch_size]
            batch_in = inputs[idx]
            batch_truth = targets[idx]
            optimizer.zero_grad()
            pred = model(batch_in).squeeze(1)
            if use_physics:
                loss, _ = mix_loss(
                    pred,
                    batch_truth,
                    cfg.beta,
                    alpha=alphas[idx],
                    etot=etot[idx],
                    g_domain=g_domain,
                )
            else:
                loss, _ = mix_loss(pred, batch_truth, cfg.beta)
            loss.backward()
            optimizer.step()
            epoch_loss += float(loss.detach()) * len(idx)
            seen += len(idx)
        history.append({"epoch": epoch, "train_loss": epoch_loss / seen})

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        save_checkpoint(out / "checkpoint.pt", model, cfg)
        with open(out / "loss_curve.csv", "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=["epoch", "train_loss"])
            writer.writeheader()
            writer.writerows(history)
    return model, history


def save_checkpoint(path: str | Path, model: ReseUNet, cfg: TrainConfig) -> None:
    torch.save(
        {
            "state_dict": model.state_dict(),
            "network_spec": asdict(model.spec),
            "train_config": asdict(cfg),
        },
        path,
    )


def load_checkpoint(path: str | Path) -> ReseUNet:
    payload = torch.load(path, map_location="cpu", weights_only=True)
    model = build_network(NetworkSpec(**payload["network_spec"]))
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model


def predict(
    model: ReseUNet, data: DataBundle | str | Path, out_dir: str | Path | None = None
) -> np.ndarray:
    """Clamped non-negative contrast predictions for every sample.

    Runs in eval mode without gradients, so repeated calls are bit-identical.
    Writes an ispds-1 prediction container when ``out_dir`` is given.
    """
    bundle = load_container(data) if not isinstance(data, DataBundle) else data
    model.eval()
    outputs = []
    with torch.no_grad():
        inputs = _inputs_from_bp(bundle.bp)
        for start in range(0, len(bundle), 32):
            chunk = inputs[start : start + 32]
            pred = model(chunk).squeeze(1).clamp(min=0.0)
            outputs.append(pred.numpy())
    predictions = np.concatenate(outputs, axis=0) if outputs else np.zeros_like(bundle.truth)
    if out_dir is not None:
        write_prediction_container(bundle, predictions, out_dir)
    return predictions


def summarize_history(history: list[dict]) -> dict:
    return {
        "epochs": len(history),
        "first_loss": history[0]["train_loss"] if history else math.nan,
        "final_loss": history[-1]["train_loss"] if history else math.nan,
    }

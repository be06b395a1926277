"""Residual squeeze-excitation U-Net trainer for contrast reconstruction."""

from .container import DataBundle, load_container, write_prediction_container
from .losses import field_consistency, gaussian_window, mix_loss, ssim, tv
from .network import NetworkSpec, ReseUNet, build_network
from .training import (
    TrainConfig,
    load_checkpoint,
    predict,
    save_checkpoint,
    train,
)

__all__ = [
    "DataBundle",
    "NetworkSpec",
    "ReseUNet",
    "TrainConfig",
    "build_network",
    "field_consistency",
    "gaussian_window",
    "load_checkpoint",
    "load_container",
    "mix_loss",
    "predict",
    "save_checkpoint",
    "ssim",
    "train",
    "tv",
    "write_prediction_container",
]

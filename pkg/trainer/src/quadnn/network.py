"""Residual squeeze-excitation U-Net for image-to-image contrast regression.

Input: two channels (real and imaginary parts of the back-propagation
image). Output: one channel of predicted contrast, linear (clamping to the
physical range happens at inference, not in the network).

Encoder stage: 3x3 conv + BatchNorm + ReLU + squeeze-excitation channel
attention + additive residual (1x1 projection when the channel count
changes), then 2x2 max pooling. Decoder stage: stride-2 3x3 transposed
conv + BatchNorm + ReLU, concatenation with the matching encoder skip, and
a feature transformation layer (3x3 conv + BatchNorm) that stabilizes the
merged features. A final 1x1 convolution maps to the output channel.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn


@dataclass(frozen=True)
class NetworkSpec:
    """Architecture hyperparameters; defaults give the full-size model."""

    input_channels: int = 2
    output_channels: int = 1
    depth: int = 4
    base_channels: int = 64
    se_reduction: int = 16
    kernel_size: int = 3

    def validate(self):
        if self.depth < 1 or self.base_channels < 1:
            raise ValueError("depth and base_channels must be positive")
        if self.kernel_size % 2 != 1:
            raise ValueError("kernel size must be odd")


class SqueezeExcite(nn.Module):
    """Channel attention from globally pooled statistics."""

    def __init__(self, channels: int, reduction: int):
        super().__init__()
        hidden = max(1, channels // reduction)
        self.fc1 = nn.Linear(channels, hidden)
        self.fc2 = nn.Linear(hidden, channels)

    def scales(self, x: torch.Tensor) -> torch.Tensor:
        squeezed = x.mean(dim=(2, 3))
        return torch.sigmoid(self.fc2(torch.relu(self.fc1(squeezed))))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x * self.scales(x)[:, :, None, None]


class EncoderBlock(nn.Module):
    """conv + BN + ReLU + SE, with an additive residual shortcut."""

    def __init__(self, c_in: int, c_out: int, spec: NetworkSpec):
        super().__init__()
        pad = spec.kernel_size // 2
        self.conv = nn.Conv2d(c_in, c_out, spec.kernel_size, padding=pad)
        self.bn = nn.BatchNorm2d(c_out)
        self.se = SqueezeExcite(c_out, spec.se_reduction)
        self.shortcut = nn.Identity() if c_in == c_out else nn.Conv2d(c_in, c_out, 1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        y = self.se(torch.relu(self.bn(self.conv(x))))
        return y + self.shortcut(x)


class DecoderStage(nn.Module):
    """Upsample, merge the encoder skip, and transform the merged features."""

    def __init__(self, c_in: int, c_out: int, spec: NetworkSpec):
        super().__init__()
        pad = spec.kernel_size // 2
        self.up = nn.ConvTranspose2d(
            c_in, c_out, spec.kernel_size, stride=2, padding=pad, output_padding=1
        )
        self.up_bn = nn.BatchNorm2d(c_out)
        self.transform = nn.Conv2d(2 * c_out, c_out, spec.kernel_size, padding=pad)
        self.transform_bn = nn.BatchNorm2d(c_out)

    def forward(self, x: torch.Tensor, skip: torch.Tensor) -> torch.Tensor:
        x = torch.relu(self.up_bn(self.up(x)))
        x = torch.cat([x, skip], dim=1)
        return self.transform_bn(self.transform(x))


class ReseUNet(nn.Module):
    def __init__(self, spec: NetworkSpec = NetworkSpec()):
        super().__init__()
        spec.validate()
        self.spec = spec
        widths = [spec.base_channels * 2**i for i in range(spec.depth)]
        self.encoders = nn.ModuleList()
        c = spec.input_channels
        for w in widths:
            self.encoders.append(EncoderBlock(c, w, spec))
            c = w
        self.pool = nn.MaxPool2d(2)
        self.bottleneck = EncoderBlock(c, 2 * c, spec)
        self.decoders = nn.ModuleList()
        c = 2 * c
        for w in reversed(widths):
            self.decoders.append(DecoderStage(c, w, spec))
            c = w
        self.head = nn.Conv2d(c, spec.output_channels, 1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        h, w = x.shape[-2:]
        factor = 2**self.spec.depth
        if h % factor or w % factor:
            raise ValueError(f"spatial dims {h}x{w} not divisible by {factor}")
        skips = []
        for enc in self.encoders:
            x = enc(x)
            skips.append(x)
            x = self.pool(x)
        x = self.bottleneck(x)
        for dec, skip in zip(self.decoders, reversed(skips)):
            x = dec(x, skip)
        return self.head(x)


def build_network(spec: NetworkSpec = NetworkSpec()) -> ReseUNet:
    return ReseUNet(spec)

"""Measurement-setup configuration.

All lengths are in meters. The domain of interest (DOI) is a square of side
``doi_side`` centered at the origin, discretized into ``grid_n`` x ``grid_n``
cells. Transmitting and receiving antennas sit on a circle of radius
``array_radius`` that must clear the DOI diagonal so every antenna lies
outside the imaging region.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict
from pathlib import Path

from .errors import InvalidConfigError

DEFAULT_WAVELENGTH = 0.075
DOI_SIDE_IN_WAVELENGTHS = 5.6
ARRAY_RADIUS_IN_WAVELENGTHS = 4.5


@dataclass(frozen=True)
class PhysicsConfig:
    """Geometry and illumination parameters for the 2D TM setup.

    ``doi_side`` and ``array_radius`` default to 5.6 and 4.5 wavelengths and
    track ``wavelength`` when left unset.
    """

    wavelength: float = DEFAULT_WAVELENGTH
    doi_side: float | None = None
    grid_n: int = 64
    n_tx: int = 36
    n_rx: int = 36
    array_radius: float | None = None
    background_permittivity: float = 1.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.doi_side is None:
            object.__setattr__(self, "doi_side", DOI_SIDE_IN_WAVELENGTHS * self.wavelength)
        if self.array_radius is None:
            object.__setattr__(
                self, "array_radius", ARRAY_RADIUS_IN_WAVELENGTHS * self.wavelength
            )
        self.validate()

    def validate(self):
        if not (self.wavelength > 0 and math.isfinite(self.wavelength)):
            raise InvalidConfigError(f"wavelength must be positive, got {self.wavelength}")
        if self.grid_n < 2:
            raise InvalidConfigError(f"grid_n must be >= 2, got {self.grid_n}")
        if self.n_tx < 1 or self.n_rx < 1:
            raise InvalidConfigError(
                f"antenna counts must be >= 1, got n_tx={self.n_tx}, n_rx={self.n_rx}"
            )
        if self.doi_side <= 0:
            raise InvalidConfigError(f"doi_side must be positive, got {self.doi_side}")
        # antennas must lie strictly outside the DOI square
        if self.array_radius <= self.doi_side * math.sqrt(2.0) / 2.0:
            raise InvalidConfigError(
                f"array_radius {self.array_radius} does not clear the DOI diagonal "
                f"{self.doi_side * math.sqrt(2.0) / 2.0}"
            )
        if self.background_permittivity <= 0:
            raise InvalidConfigError(
                f"background_permittivity must be positive, got {self.background_permittivity}"
            )

    @property
    def k0(self) -> float:
        """Background wavenumber 2*pi/wavelength."""
        return 2.0 * math.pi / self.wavelength

    @property
    def cell_side(self) -> float:
        return self.doi_side / self.grid_n

    @property
    def n_cells(self) -> int:
        return self.grid_n * self.grid_n

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "PhysicsConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise InvalidConfigError(f"unknown physics config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise InvalidConfigError(str(exc)) from exc


def load_config(path: str | Path) -> PhysicsConfig:
    """Read a PhysicsConfig from a JSON file.

    The file may either hold the physics fields at top level or nest them
    under a ``"physics"`` key (recipe files do the latter).
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidConfigError(f"config {path} must hold a JSON object")
    if "physics" in data:
        data = data["physics"]
    return PhysicsConfig.from_dict(data)

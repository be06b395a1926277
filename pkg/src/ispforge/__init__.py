"""2D TM inverse-scattering workbench.

Forward scattering by the method of moments, back-propagation initial
imaging, quality-factor dataset curation, reference metrics and losses,
and a dataset container format shared with downstream trainers.
"""

from .bp import BpImage, backpropagate
from .config import PhysicsConfig, load_config
from .container import Dataset, read_container, write_container
from .forward import (
    ContrastMap,
    FieldSet,
    ScatterMatrix,
    incident_fields,
    solve_forward,
)
from .generators import (
    CircleSpec,
    cylinder_map,
    gen_austria,
    gen_digit,
    gen_overlap_circles,
    gen_polygon,
)
from .geometry import Geometry, build_geometry
from .metrics import (
    LossBreakdown,
    SsimParams,
    alpha_balance,
    field_loss,
    loss_eval,
    rmse,
    ssim,
    tv,
)
from .mie import mie_reference
from .operators import OperatorPair, assemble_operators
from .pipeline import GenerationRecipe, produce_dataset
from .quality import (
    SampleRecord,
    add_noise,
    categorize,
    compose,
    compose_uniform,
    quality_factor,
)

__all__ = [
    "BpImage",
    "CircleSpec",
    "ContrastMap",
    "Dataset",
    "FieldSet",
    "GenerationRecipe",
    "Geometry",
    "LossBreakdown",
    "OperatorPair",
    "PhysicsConfig",
    "SampleRecord",
    "ScatterMatrix",
    "SsimParams",
    "add_noise",
    "alpha_balance",
    "assemble_operators",
    "backpropagate",
    "build_geometry",
    "categorize",
    "compose",
    "compose_uniform",
    "cylinder_map",
    "field_loss",
    "gen_austria",
    "gen_digit",
    "gen_overlap_circles",
    "gen_polygon",
    "incident_fields",
    "load_config",
    "loss_eval",
    "mie_reference",
    "produce_dataset",
    "quality_factor",
    "read_container",
    "rmse",
    "solve_forward",
    "ssim",
    "tv",
    "write_container",
]

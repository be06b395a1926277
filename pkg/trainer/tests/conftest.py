"""Shared fixtures.

The workbench package (ispforge) appears here as a test-only dependency:
it generates the containers the trainer consumes and provides the reference
metric values the differentiable losses must reproduce. The trainer's
product code touches nothing but the container directories.
"""

import pytest

import ispforge
from ispforge.container import write_container
from ispforge.pipeline import GenerationRecipe, produce_dataset

import quadnn


@pytest.fixture(scope="session")
def small_cfg():
    return ispforge.PhysicsConfig(grid_n=32, n_tx=10, n_rx=10)


@pytest.fixture(scope="session")
def small_container(tmp_path_factory, small_cfg):
    """12 digit samples at 32x32 with frozen fields, via the workbench."""
    recipe = GenerationRecipe(generator="digit", n=12, snr_db=5.0, seed=61, with_fields=True)
    ds = produce_dataset(small_cfg, recipe, workers=1)
    root = tmp_path_factory.mktemp("data") / "small"
    write_container(ds, root)
    return root


@pytest.fixture(scope="session")
def small_bundle(small_container):
    return quadnn.load_container(small_container)

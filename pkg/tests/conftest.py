import numpy as np
import pytest

from ispforge import (
    PhysicsConfig,
    assemble_operators,
    build_geometry,
    incident_fields,
)


@pytest.fixture(scope="session")
def cfg64():
    return PhysicsConfig()


@pytest.fixture(scope="session")
def geom64(cfg64):
    return build_geometry(cfg64)


@pytest.fixture(scope="session")
def ops64(cfg64, geom64):
    return assemble_operators(geom64, cfg64)


@pytest.fixture(scope="session")
def inc64(cfg64, geom64):
    return incident_fields(geom64, cfg64)


@pytest.fixture(scope="session")
def cfg_small():
    # cheap setup for solver behavior tests
    return PhysicsConfig(grid_n=32, n_tx=12, n_rx=12)


@pytest.fixture(scope="session")
def geom_small(cfg_small):
    return build_geometry(cfg_small)


@pytest.fixture(scope="session")
def ops_small(cfg_small, geom_small):
    return assemble_operators(geom_small, cfg_small)


@pytest.fixture(scope="session")
def inc_small(cfg_small, geom_small):
    return incident_fields(geom_small, cfg_small)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)

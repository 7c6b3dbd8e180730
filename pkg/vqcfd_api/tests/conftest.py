import os

os.environ["ENV_STATE"] = "test"
from typing import AsyncGenerator, Generator

import numpy as np
import pytest
from fastapi.testclient import TestClient
from httpx import ASGITransport, AsyncClient

from vqcfd_api.main import app
from vqcfd_api.models.lbm import BoundarySpec, InitialCondition, InitialKind, SimulationConfig


# only run once for all tests
@pytest.fixture(scope="session")
def anyio_backend():
    return "asyncio"


@pytest.fixture()
def client() -> Generator:
    yield TestClient(app)


@pytest.fixture()
async def async_client(client) -> AsyncGenerator:
    async with AsyncClient(
        transport=ASGITransport(app),
        base_url=client.base_url,
    ) as ac:
        yield ac


@pytest.fixture()
def out_dir(tmp_path):
    return tmp_path / "out"


# 4x4 periodic lattice with a sinusoidal shear, the desk-scale verification case
@pytest.fixture()
def sheared_sim() -> SimulationConfig:
    return SimulationConfig(
        nx=4,
        ny=4,
        tau=0.8,
        boundary=BoundarySpec.fully_periodic(),
        initial=InitialCondition(kind=InitialKind.shear_wave, amplitude=0.05),
        steps=1,
        snapshot_every=1,
    )


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)

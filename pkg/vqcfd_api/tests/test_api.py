import inspect

import pytest
from httpx import AsyncClient

from vqcfd_api.routers import performance, pqc


@pytest.mark.anyio
async def test_health(async_client: AsyncClient):
    response = await async_client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


@pytest.mark.anyio
async def test_q5e7(async_client: AsyncClient):
    response = await async_client.get("/q5e7", params={"unit_scale": "table-units"})
    assert response.status_code == 200
    body = response.json()
    assert body["n_q"] == 26
    assert body["unit_scale"] == "table-units"
    assert body["ratio"] > 1e10


@pytest.mark.anyio
async def test_fits(async_client: AsyncClient):
    response = await async_client.get("/fits/large")
    assert response.status_code == 200
    assert response.json()["refit"]["kind"] == "quadratic"


@pytest.mark.anyio
async def test_unknown_table_is_not_found(async_client: AsyncClient):
    response = await async_client.get("/fits/medium")
    assert response.status_code == 404


@pytest.mark.anyio
async def test_optimal_nodes(async_client: AsyncClient):
    response = await async_client.get("/cperf/optimal-nodes", params={"grid": 1e7})
    assert response.status_code == 200
    assert response.json()["n_nodes"] == 15


@pytest.mark.anyio
async def test_optimal_nodes_calibrated(async_client: AsyncClient):
    response = await async_client.get(
        "/cperf/optimal-nodes", params={"grid": 1e7, "preset": "frontier_calibrated"}
    )
    assert response.status_code == 200
    assert abs(response.json()["n_nodes"] - 52) <= 5


@pytest.mark.anyio
async def test_model_errors_are_unprocessable(async_client: AsyncClient):
    response = await async_client.get("/cperf/optimal-nodes", params={"grid": 4})
    assert response.status_code == 422
    assert response.json()["error"] == "CapacityError"


@pytest.mark.anyio
async def test_crossover(async_client: AsyncClient):
    response = await async_client.post("/crossover", json={"grids": [65536, 5e7]})
    assert response.status_code == 200
    rows = response.json()
    assert [row["n_q"] for row in rows] == [16, 26]
    assert rows[1]["ratio"] > 1e10


@pytest.mark.anyio
async def test_crossover_rejects_non_positive_grids(async_client: AsyncClient):
    response = await async_client.post("/crossover", json={"grids": [0]})
    assert response.status_code == 422


@pytest.mark.anyio
async def test_pqc_train(async_client: AsyncClient):
    target = [0.2, 0.4, 0.9, 1.2, 1.2, 0.9, 0.4, 0.2]
    response = await async_client.post("/pqc/train", json={"target": target, "layers": 6})
    assert response.status_code == 200
    body = response.json()
    assert body["fidelity"] >= 0.99
    assert len(body["recovered"]) == 8
    assert len(body["theta"]) == 18


@pytest.mark.anyio
async def test_pqc_train_rejects_ragged_length(async_client: AsyncClient):
    response = await async_client.post("/pqc/train", json={"target": [1.0, 2.0, 3.0]})
    assert response.status_code == 422
    assert response.json()["error"] == "DimensionError"


@pytest.mark.parametrize(
    "handler",
    [performance.get_q5e7, performance.get_fits, performance.get_optimal_nodes, performance.post_crossover, pqc.post_train],
)
def test_model_sweeps_run_off_the_event_loop(handler):
    assert not inspect.iscoroutinefunction(handler)

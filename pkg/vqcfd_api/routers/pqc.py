import logging

from fastapi import APIRouter
from pydantic import BaseModel, Field, PositiveInt

from vqcfd_api.config import config
from vqcfd_api.models.quantum import TrainBudget
from vqcfd_api.quantum import encode_vector

router = APIRouter()
logger = logging.getLogger(__name__)


class TrainRequest(BaseModel):
    target: list[float] = Field(min_length=2, max_length=2**10)
    layers: PositiveInt = 8
    seed: int = Field(default=config.DEFAULT_SEED, ge=0, lt=2**64)


class TrainResponse(BaseModel):
    theta: list[float]
    fidelity: float
    recovered: list[float]
    linf: float


# CPU bound, so FastAPI runs it in the threadpool
@router.post("/pqc/train", response_model=TrainResponse)
def post_train(request: TrainRequest):
    encoded = encode_vector(request.target, request.layers, TrainBudget(seed=request.seed))
    logger.info(f"Trained {len(request.target)}-point target to fidelity {encoded.fidelity:.6f}")
    return TrainResponse(
        theta=encoded.theta.tolist(),
        fidelity=encoded.fidelity,
        recovered=encoded.recovered.tolist(),
        linf=encoded.linf,
    )

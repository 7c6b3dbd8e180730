import logging
from contextlib import asynccontextmanager

from asgi_correlation_id import CorrelationIdMiddleware
from fastapi import FastAPI, HTTPException, Request
from fastapi.exception_handlers import http_exception_handler
from fastapi.responses import JSONResponse

from vqcfd_api.errors import VqcfdError
from vqcfd_api.logging_conf import configure_logging
from vqcfd_api.routers.performance import router as performance_router
from vqcfd_api.routers.pqc import router as pqc_router

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    configure_logging()
    logger.info("Starting vqcfd-api")
    yield


app = FastAPI(lifespan=lifespan)

app.add_middleware(CorrelationIdMiddleware)

app.include_router(performance_router)
app.include_router(pqc_router)


@app.exception_handler(HTTPException)
async def http_exception_handler_logging(request, exc):
    logger.error(f"HTTPException: {exc.status_code} - {exc.detail}")
    return await http_exception_handler(request, exc)


@app.exception_handler(VqcfdError)
async def vqcfd_error_handler(request: Request, exc: VqcfdError):
    logger.error(f"{type(exc).__name__} on {request.url.path}: {exc}")
    return JSONResponse(status_code=422, content={"error": type(exc).__name__, "detail": str(exc)})

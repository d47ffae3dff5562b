"""HTTP service exposing the computations as JSON endpoints.

Run with:  uvicorn moonshine.service:app

Every command takes a POST with a typed request body and returns the
same report dict the CLI renders.  Error mapping: invalid parameters ->
400, missing/corrupt data files -> 404, failed rounding certificates ->
502 with kind "certificate".
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import ops
from .rademacher import CertificateError

app = FastAPI(title="moonshine", version="0.1.0",
              description="Exact and Rademacher-sum computation of "
                          "McKay-Thompson series and Monster multiplicity data")


class JCoeffsRequest(BaseModel):
    n_max: int = Field(default=10, ge=0, le=2000)


class CoefficientRow(BaseModel):
    n: int
    c: str


class JCoeffsResponse(BaseModel):
    rows: list[CoefficientRow]


class ConvergenceRequest(BaseModel):
    class_name: str = "1A"
    ns: list[int] = Field(default=[1, 5, 10])
    thresholds: list[int] = Field(default=[25, 50, 75, 100])
    c_max_exact: int = Field(default=200, ge=1, le=5000)
    working_bits: int = Field(default=256, ge=64, le=4096)


class ConvergenceRow(BaseModel):
    threshold: int
    values: list[str]
    values_full: list[str]


class ConvergenceResponse(BaseModel):
    class_name: str = Field(alias="class")
    symbol: str
    ns: list[int]
    rows: list[ConvergenceRow]
    exact: list[str]
    max_certificate_distance: float
    c_max_exact: int

    model_config = {"populate_by_name": True}


class TowerRequest(BaseModel):
    class_name: str = "1A"
    m: int = Field(default=2, ge=1, le=10)
    prec: int = Field(default=10, ge=2, le=200)
    c_max: int = Field(default=200, ge=1, le=5000)
    working_bits: int = Field(default=256, ge=64, le=4096)


class SeriesJSON(BaseModel):
    lead: int
    coeffs: list[str]
    prec: int


class TowerResponse(BaseModel):
    class_name: str = Field(alias="class")
    m: int
    series: SeriesJSON
    polynomial: list[str]

    model_config = {"populate_by_name": True}


class MultiplicitiesRequest(BaseModel):
    chartab: str | None = None
    m: int = Field(default=1, ge=1, le=5)
    n_max: int = Field(default=4, ge=1, le=400)
    indices: list[int] | None = None
    c_max: int = Field(default=200, ge=1, le=5000)
    working_bits: int = Field(default=256, ge=64, le=4096)


class DecompositionRow(BaseModel):
    n: int
    multiplicities: dict[str, str]
    dimension: str


class AuditSummary(BaseModel):
    checked: int
    violations: list[str]
    passed: bool


class MultiplicitiesResponse(BaseModel):
    m: int
    route: str
    rows: list[DecompositionRow]
    audit: AuditSummary


class DistributionRequest(BaseModel):
    chartab: str | None = None
    m: int = Field(default=1, ge=1, le=5)
    n_start: int = Field(default=1, ge=1)
    n_max: int = Field(default=4, ge=1, le=400)
    indices: list[int] | None = None
    c_max: int = Field(default=200, ge=1, le=5000)
    working_bits: int = Field(default=256, ge=64, le=4096)
    sig: int = Field(default=4, ge=1, le=30)


class DistributionRow(BaseModel):
    n: int
    delta: dict[str, str | None]
    exact: dict[str, str | None]


class DistributionResponse(BaseModel):
    m: int
    indices: list[int]
    rows: list[DistributionRow]
    limit: dict[str, str]
    limit_exact: dict[str, str]


def _guarded(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ops.ValidationError as exc:
        raise HTTPException(status_code=400, detail={"kind": "validation", "message": str(exc)})
    except ops.DataError as exc:
        raise HTTPException(status_code=404, detail={"kind": "data", "message": str(exc)})
    except CertificateError as exc:
        raise HTTPException(status_code=502, detail={"kind": "certificate", "message": str(exc)})


@app.get("/healthz")
def healthz() -> dict:
    return {"status": "ok"}


@app.post("/v1/jcoeffs", response_model=JCoeffsResponse)
def jcoeffs(req: JCoeffsRequest):
    return _guarded(ops.run_jcoeffs, req.n_max)


@app.post("/v1/convergence", response_model=ConvergenceResponse)
def convergence(req: ConvergenceRequest):
    return _guarded(ops.run_convergence, req.class_name, req.ns, req.thresholds,
                    req.c_max_exact, req.working_bits)


@app.post("/v1/tower", response_model=TowerResponse)
def tower(req: TowerRequest):
    return _guarded(ops.run_tower, req.class_name, req.m, req.prec,
                    req.c_max, req.working_bits)


@app.post("/v1/multiplicities", response_model=MultiplicitiesResponse)
def multiplicities(req: MultiplicitiesRequest):
    return _guarded(ops.run_multiplicities, req.chartab, req.m, req.n_max,
                    req.indices, req.c_max, req.working_bits)


@app.post("/v1/distribution", response_model=DistributionResponse)
def distribution(req: DistributionRequest):
    return _guarded(ops.run_distribution, req.chartab, req.m, req.n_start, req.n_max,
                    req.indices, req.c_max, req.working_bits, req.sig)

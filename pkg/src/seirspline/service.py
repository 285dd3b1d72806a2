"""HTTP API over the fit/project pipeline.

Errors are structured JSON {code, message, details}: 400 for validation
problems, 404 for unknown countries/models, 422 when a fit is infeasible,
500 otherwise.
"""

from __future__ import annotations

from datetime import date
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .documents import ModelDocument, ModelStore, load_data_directory, now_timestamp
from .errors import DataError, FitError, SeirSplineError
from .fitting import FitConfig, fit
from .ingest import derive_observations
from .scenarios import COEFFICIENT_CONVENTION, ScenarioSpec, project


class FitRequest(BaseModel):
    country: str
    start: date
    end: date
    population: float | None = Field(
        None, description="overrides the data directory's populations.json")
    scale: float = Field(1.0, gt=0, description="multiplier applied to both observed series")
    top: int = Field(3, ge=1)
    seed: int = 0
    config: dict | None = Field(
        None, description="advanced fit settings (weights, bounds, budgets)")


class ScenarioBody(BaseModel):
    t5_offset_days: int = Field(15, gt=0, description="days after T4 (typical menu: 5, 15, 25)")
    horizon_days: int = Field(60, gt=0, description="projection span after T4")
    coef1: float = Field(1.0, gt=0, description=COEFFICIENT_CONVENTION["coef1"])
    coef2: float = Field(1.0, gt=0, description=COEFFICIENT_CONVENTION["coef2"])
    coef11: float = Field(1.0, gt=0, description=COEFFICIENT_CONVENTION["coef11"])
    coef22: float = Field(1.0, gt=0, description=COEFFICIENT_CONVENTION["coef22"])


class ProjectRequest(BaseModel):
    model_id: str
    rank: int = Field(1, ge=1)
    scenario: ScenarioBody = ScenarioBody()


def _error(status: int, code: str, message: str, details=None):
    return HTTPException(status_code=status,
                         detail={"code": code, "message": message, "details": details})


def create_app(data_dir, store_dir, ui_dir=None) -> FastAPI:
    app = FastAPI(title="seirspline", version="0.1.0")
    data = load_data_directory(data_dir)
    store = ModelStore(store_dir)

    @app.exception_handler(HTTPException)
    async def http_exception_handler(request: Request, exc: HTTPException):
        detail = exc.detail
        if not isinstance(detail, dict):
            detail = {"code": "error", "message": str(detail), "details": None}
        return JSONResponse(status_code=exc.status_code, content=detail)

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        details = [{"loc": [str(p) for p in err.get("loc", ())],
                    "msg": err.get("msg"), "type": err.get("type")}
                   for err in exc.errors()]
        return JSONResponse(status_code=400, content={
            "code": "validation_error",
            "message": "request body failed validation",
            "details": details,
        })

    @app.exception_handler(SeirSplineError)
    async def domain_handler(request: Request, exc: SeirSplineError):
        return JSONResponse(status_code=400, content={
            "code": "invalid_input",
            "message": str(exc),
            "details": getattr(exc, "violations", None),
        })

    def observations_for(country: str, start: date, end: date,
                         population: float | None, scale: float):
        if country not in data.countries():
            raise _error(404, "unknown_country", f"no data for {country!r}")
        if population is None:
            population = data.population_of(country)
        return derive_observations(data.confirmed, data.recovered, data.deaths,
                                   country, start, end, population, scale)

    @app.get("/api/countries")
    def countries():
        return {"countries": data.countries()}

    @app.get("/api/observations/{country}")
    def observations(country: str, start: date, end: date,
                     scale: float = 1.0, population: float | None = None):
        return observations_for(country, start, end, population, scale).to_dict()

    @app.post("/api/fit")
    def run_fit(body: FitRequest):
        obs = observations_for(body.country, body.start, body.end,
                               body.population, body.scale)
        merged = FitConfig.from_dict(body.config or {}).to_dict()
        merged.update({"top_k": body.top, "seed": body.seed})
        config = FitConfig.from_dict(merged)
        try:
            report = fit(obs, config)
        except FitError as exc:
            raise _error(422, "fit_infeasible", str(exc))
        doc = ModelDocument(
            country=body.country, t1=body.start, t4=body.end,
            population_n=obs.population_n, sigma=config.sigma, lam=config.lam,
            scale=body.scale, report=report, observations=obs,
            data_fingerprint=report.observation_fingerprint,
            created_at=now_timestamp())
        doc_id, stored = store.put(doc)
        return {"model_id": doc_id, "document": stored.to_dict()}

    @app.get("/api/models")
    def list_models():
        return {"model_ids": store.ids()}

    @app.get("/api/models/{doc_id}")
    def get_model(doc_id: str):
        try:
            return store.get(doc_id).to_dict()
        except DataError as exc:
            raise _error(404, "unknown_model", str(exc))

    @app.post("/api/project")
    def run_project(body: ProjectRequest):
        try:
            doc = store.get(body.model_id)
        except DataError as exc:
            raise _error(404, "unknown_model", str(exc))
        ranks = {m.rank: m for m in doc.report.models}
        if body.rank not in ranks:
            raise _error(404, "unknown_model",
                         f"rank {body.rank} not in document (has {sorted(ranks)})")
        spec = ScenarioSpec(**body.scenario.model_dump())
        proj = project(ranks[body.rank], doc.observations, spec, sigma=doc.sigma)
        return proj.to_dict()

    if ui_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = candidate if candidate.is_dir() else None
    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app

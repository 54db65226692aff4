"""FastAPI application exposing the simulation operations."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import handlers, schemas


def create_app() -> FastAPI:
    app = FastAPI(
        title="spincoh",
        description="Spin-1 qubit coherence in an optical dipole trap: "
                    "trap quantities, noise distributions, ensemble dephasing "
                    "curves, model fits and partial tomography.",
        version="0.1.0",
    )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/trap", response_model=schemas.TrapSummary)
    def trap(req: schemas.TrapRequest):
        return _guard(handlers.run_trap, req)

    @app.post("/dist", response_model=schemas.DistResponse)
    def dist(req: schemas.DistRequest):
        return _guard(handlers.run_dist, req)

    @app.post("/evolve", response_model=schemas.CurvePayload)
    def evolve(req: schemas.EvolveRequest):
        return _guard(handlers.run_evolve, req)

    @app.post("/dephase", response_model=schemas.CurvePayload)
    def dephase(req: schemas.DephaseRequest):
        return _guard(handlers.run_dephase, req)

    @app.post("/fit", response_model=schemas.FitResponse)
    def fit(req: schemas.FitRequest):
        return _guard(handlers.run_fit, req)

    @app.post("/tomo", response_model=schemas.TomoResponse)
    def tomo(req: schemas.TomoRequest):
        return _guard(handlers.run_tomo, req)

    return app


def _guard(handler, req):
    try:
        return handler(req)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


app = create_app()

"""HTTP surface of the simulator: experiments, oracle solves, plot tables.

Experiments run as background jobs (submit, then poll); the oracle and plot
endpoints are synchronous. Structured error codes (`config`, `io`,
`oracle_size`) let clients map failures to exit codes without parsing text.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..config import ConfigError, apply_overrides, config_from_ini, preset
from ..env import EnvConfig, StarRisEnv
from ..oracle import OracleSizeError, brute_force_best_assignment
from ..plots import emit_plot_data
from ..starris import active_element_count
from .jobs import JobRegistry
from .models import (
    ExperimentRequest,
    ExperimentStatus,
    ExperimentSubmitted,
    HealthResponse,
    JobProgress,
    OracleRequest,
    OracleResponse,
    PlotsRequest,
    PlotsResponse,
)


def _http_error(status: int, code: str, detail: str) -> HTTPException:
    return HTTPException(status_code=status, detail={"detail": detail, "error_code": code})


def create_app() -> FastAPI:
    app = FastAPI(title="starsim", version=__version__)
    registry = JobRegistry()
    app.state.registry = registry

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=__version__)

    @app.post("/experiments", response_model=ExperimentSubmitted)
    def submit_experiment(req: ExperimentRequest):
        try:
            if req.config_text is not None:
                cfg = config_from_ini(req.config_text)
            elif req.preset is not None:
                cfg = preset(req.preset)
            else:
                raise ConfigError("provide either a preset or a config body")
            cfg = apply_overrides(cfg, seed=req.seed, mu=req.mu, mode=req.mode)
        except ConfigError as exc:
            raise _http_error(400, "config", str(exc)) from exc
        job = registry.submit(cfg, req.out_dir)
        return ExperimentSubmitted(job_id=job.job_id, state=job.state)

    @app.get("/experiments/{job_id}", response_model=ExperimentStatus)
    def experiment_status(job_id: str):
        job = registry.get(job_id)
        if job is None:
            raise _http_error(404, "not_found", f"no such job {job_id}")
        snap = job.snapshot()
        return ExperimentStatus(
            job_id=snap["job_id"],
            state=snap["state"],
            error=snap["error"],
            error_code=snap["error_code"],
            progress=JobProgress(
                run=snap["run"],
                episode=snap["episode"],
                runs_total=snap["runs_total"],
                episodes_total=snap["episodes_total"],
            ),
            result=snap["result"],
        )

    @app.post("/oracle", response_model=OracleResponse)
    def solve_oracle(req: OracleRequest):
        try:
            env_cfg = EnvConfig(
                n_h=req.n,
                n_v=1,
                m=req.m,
                k=req.k,
                l=req.l,
                users_reflection=tuple(EnvConfig().users_reflection)[: req.k],
                users_transmission=tuple(EnvConfig().users_transmission)[: req.l],
                seed=req.seed,
            )
            env = StarRisEnv(env_cfg)
            assignment, phases, value = brute_force_best_assignment(
                env._static_channels, req.k, req.l, env_cfg.budget, req.phase_levels
            )
        except OracleSizeError as exc:
            raise _http_error(400, "oracle_size", str(exc)) from exc
        except ValueError as exc:
            raise _http_error(400, "config", str(exc)) from exc
        return OracleResponse(
            objective=value,
            assignment=np.asarray(assignment).tolist(),
            phases=list(map(float, phases)),
            active_elements=active_element_count(assignment),
        )

    @app.post("/plots", response_model=PlotsResponse)
    def make_plots(req: PlotsRequest):
        try:
            tables = emit_plot_data(req.experiment_dirs, req.out_dir)
        except ConfigError as exc:
            raise _http_error(400, "config", str(exc)) from exc
        except OSError as exc:
            raise _http_error(400, "io", str(exc)) from exc
        return PlotsResponse(tables=tables)

    return app


app = create_app()

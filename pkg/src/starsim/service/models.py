"""Request/response schemas of the experiment service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class ExperimentRequest(BaseModel):
    """Submission of a training or baseline experiment.

    Exactly one of `preset` or `config_text` selects the scenario;
    `config_text` (an INI body) wins when both are given. The optional
    overrides replace the seed and deactivation weight of that scenario.
    """

    mode: Literal["learned", "equal-partition"] = "learned"
    preset: Literal["desk", "paper"] | None = None
    config_text: str | None = None
    seed: int | None = None
    mu: float | None = None
    out_dir: str


class ExperimentSubmitted(BaseModel):
    job_id: str
    state: str


class JobProgress(BaseModel):
    run: int | None = None
    episode: int | None = None
    runs_total: int
    episodes_total: int


class ExperimentStatus(BaseModel):
    job_id: str
    state: Literal["queued", "running", "done", "failed"]
    error: str | None = None
    error_code: str | None = None
    progress: JobProgress
    result: dict | None = None  # file paths written by the harness


class OracleRequest(BaseModel):
    """Tiny static instance solved by exhaustive enumeration."""

    n: int = Field(default=4, ge=2)
    k: int = Field(default=1, ge=1)
    l: int = Field(default=1, ge=1)
    m: int = Field(default=2, ge=1)
    phase_levels: int = Field(default=8, ge=1)
    seed: int = 0


class OracleResponse(BaseModel):
    objective: float
    assignment: list[list[int]]
    phases: list[float]
    active_elements: int


class PlotsRequest(BaseModel):
    experiment_dirs: list[str]
    out_dir: str


class PlotsResponse(BaseModel):
    tables: list[str]


class ErrorBody(BaseModel):
    detail: str
    error_code: Literal["config", "io", "oracle_size", "internal", "not_found"]

"""Background experiment jobs: one worker thread per submission.

Training runs are minutes to hours long, so the service returns a job id
immediately and exposes progress for polling. Each job owns its environment
and agent; nothing is shared between jobs, so results stay deterministic.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field

from ..config import ConfigError, ExperimentConfig
from ..harness import run_experiment


@dataclass
class Job:
    job_id: str
    cfg: ExperimentConfig
    out_dir: str
    state: str = "queued"
    error: str | None = None
    error_code: str | None = None
    run: int | None = None
    episode: int | None = None
    result: dict | None = None
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def snapshot(self) -> dict:
        with self._lock:
            return {
                "job_id": self.job_id,
                "state": self.state,
                "error": self.error,
                "error_code": self.error_code,
                "run": self.run,
                "episode": self.episode,
                "result": self.result,
                "runs_total": self.cfg.runs,
                "episodes_total": self.cfg.episodes,
            }


class JobRegistry:
    def __init__(self):
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()

    def submit(self, cfg: ExperimentConfig, out_dir: str) -> Job:
        job = Job(job_id=uuid.uuid4().hex, cfg=cfg, out_dir=out_dir)
        with self._lock:
            self._jobs[job.job_id] = job
        thread = threading.Thread(target=self._work, args=(job,), daemon=True)
        thread.start()
        return job

    def get(self, job_id: str) -> Job | None:
        with self._lock:
            return self._jobs.get(job_id)

    @staticmethod
    def _work(job: Job) -> None:
        def progress(run, episode):
            with job._lock:
                job.run = run
                job.episode = episode

        with job._lock:
            job.state = "running"
        try:
            result = run_experiment(job.cfg, job.out_dir, progress=progress)
        except ConfigError as exc:
            with job._lock:
                job.state, job.error, job.error_code = "failed", str(exc), "config"
        except OSError as exc:
            with job._lock:
                job.state, job.error, job.error_code = "failed", str(exc), "io"
        except Exception as exc:  # noqa: BLE001 - job boundary
            with job._lock:
                job.state, job.error, job.error_code = "failed", str(exc), "internal"
        else:
            with job._lock:
                job.state = "done"
                job.result = result

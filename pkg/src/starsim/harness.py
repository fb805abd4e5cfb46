"""Experiment orchestration: seeded training runs and metrics persistence.

One experiment is `runs` independent seeded trainings of the same scenario.
Per training episode the harness logs each user's mean rate, the summed rate,
the mean reward and the mean number of active elements; every `eval_every`
episodes it interleaves noise-free evaluation episodes and logs them to a
second file with the same schema. Both CSVs are byte-reproducible for a
fixed config and seed: the `seconds` column counts simulated seconds (one
per step), while measured wall time goes to the log only.
"""

from __future__ import annotations

import csv
import io
import logging
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .agent import DdpgAgent, actor_forward, explore, noise_sigma
from .config import ExperimentConfig, config_to_ini
from .env import StarRisEnv
from .numerics import derive_stream

log = logging.getLogger(__name__)

METRICS_FILE = "metrics.csv"
EVAL_FILE = "eval_metrics.csv"
CONFIG_ECHO_FILE = "config.ini"

EVAL_SEED_BASE = 1_000_000  # keeps evaluation episodes off the training seeds


@dataclass
class MetricsRecord:
    run: int
    episode: int
    user_rates: np.ndarray  # transmission users first, then reflection
    total_rate: float
    reward_mean: float
    active_mean: float
    seconds: float


def _episode_record(run, episode, rates_r_sum, rates_t_sum, reward_sum, active_sum, steps):
    per_user = np.concatenate([rates_t_sum, rates_r_sum]) / steps
    return MetricsRecord(
        run=run,
        episode=episode,
        user_rates=per_user,
        total_rate=float(per_user.sum()),
        reward_mean=reward_sum / steps,
        active_mean=active_sum / steps,
        seconds=float(steps),
    )


def _run_episode(env, agent, steps, *, episode_seed, explore_rng=None, sample_rng=None,
                 sigma_fn=None, train=True):
    """One episode; returns the sums backing a MetricsRecord."""
    cfg = env.cfg
    state = env.reset(episode_seed)
    rates_r = np.zeros(cfg.k)
    rates_t = np.zeros(cfg.l)
    reward_sum = 0.0
    active_sum = 0.0
    for step in range(steps):
        action = agent.act(state)
        if train:
            action = explore(action, sigma_fn(), explore_rng)
        result = env.step(action)
        if train:
            agent.record(state, action, result.reward, result.next_state)
            if (step + 1) % agent.hyper.update_every == 0:
                agent.train_step(sample_rng)
        rates_r += result.report.rate_r
        rates_t += result.report.rate_t
        reward_sum += result.reward
        active_sum += result.active_count
        state = result.next_state
    return rates_r, rates_t, reward_sum, active_sum


def _train_single_run(cfg: ExperimentConfig, run: int, progress=None):
    env_cfg = replace(
        cfg.env,
        seed=cfg.env.seed + run,
        episode_length=cfg.steps_per_episode,
        assignment_mode="equal" if cfg.mode == "equal-partition" else "learned",
    )
    env = StarRisEnv(env_cfg)
    agent = DdpgAgent(
        derive_stream(env_cfg.seed, 10), env_cfg.state_dim, env_cfg.n, cfg.agent
    )
    explore_rng = derive_stream(env_cfg.seed, 11)
    sample_rng = derive_stream(env_cfg.seed, 12)

    steps = cfg.steps_per_episode
    total_steps = cfg.episodes * steps
    global_step = 0
    train_records, eval_records = [], []
    eval_counter = 0

    for episode in range(1, cfg.episodes + 1):
        t0 = time.perf_counter()

        def sigma():
            return noise_sigma(global_step, total_steps,
                               cfg.agent.noise_start, cfg.agent.noise_end)

        sums = _run_episode(env, agent, steps, episode_seed=episode,
                            explore_rng=explore_rng, sample_rng=sample_rng,
                            sigma_fn=sigma, train=True)
        global_step += steps
        rec = _episode_record(run, episode, *sums, steps=steps)
        train_records.append(rec)
        log.info(
            "run %d episode %d: total_rate=%.3f reward=%.3f active=%.1f (%.2fs wall)",
            run, episode, rec.total_rate, rec.reward_mean, rec.active_mean,
            time.perf_counter() - t0,
        )
        if progress is not None:
            progress(run, episode)

        if episode % cfg.eval_every == 0:
            for _ in range(cfg.eval_episodes):
                eval_counter += 1
                sums = _run_episode(env, agent, steps,
                                    episode_seed=EVAL_SEED_BASE + eval_counter,
                                    train=False)
                eval_records.append(_episode_record(run, eval_counter, *sums, steps=steps))
    return train_records, eval_records


def records_to_csv(records, users: int) -> str:
    """Render records with the fixed column order; floats use repr-stable %.10g."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["run", "episode"]
        + [f"ue{i + 1}" for i in range(users)]
        + ["total_rate", "reward_mean", "active_elements_mean", "seconds"]
    )
    for rec in records:
        writer.writerow(
            [rec.run, rec.episode]
            + [f"{r:.10g}" for r in rec.user_rates]
            + [f"{rec.total_rate:.10g}", f"{rec.reward_mean:.10g}",
               f"{rec.active_mean:.10g}", f"{rec.seconds:.10g}"]
        )
    return buf.getvalue()


def run_experiment(cfg: ExperimentConfig, out_dir, progress=None) -> dict:
    """Train every run of an experiment and persist metrics under out_dir.

    Returns the paths of the written files. Fully deterministic for a fixed
    config (including its seed).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    all_train, all_eval = [], []
    for run in range(cfg.runs):
        train_records, eval_records = _train_single_run(cfg, run, progress)
        all_train.extend(train_records)
        all_eval.extend(eval_records)

    users = cfg.env.users
    metrics_path = out / METRICS_FILE
    eval_path = out / EVAL_FILE
    config_path = out / CONFIG_ECHO_FILE
    metrics_path.write_text(records_to_csv(all_train, users), encoding="utf-8")
    eval_path.write_text(records_to_csv(all_eval, users), encoding="utf-8")
    config_path.write_text(config_to_ini(cfg), encoding="utf-8")
    return {
        "metrics_csv": str(metrics_path),
        "eval_csv": str(eval_path),
        "config": str(config_path),
    }


def read_metrics_csv(path) -> tuple[list[str], np.ndarray]:
    """Read a metrics CSV back as (header, float matrix)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise OSError(f"empty metrics file: {path}")
    header = rows[0]
    data = np.array([[float(v) for v in row] for row in rows[1:]])
    return header, data

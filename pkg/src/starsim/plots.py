"""Plot-ready tables aggregated from experiment metrics.

Three table kinds mirror the standard result figures:

  * rates_vs_episode_<name>.csv — one file per experiment; columns
    `episode, ue1..ueU` with each user's rate averaged over runs;
  * active_elements_vs_episode.csv — columns `episode, mu_<value>...`,
    one per experiment, mean active elements averaged over runs;
  * total_rate_vs_episode.csv — same layout with the summed rate.

Every experiment directory must hold the metrics CSV and config echo that
`run_experiment` wrote there.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .config import load_config
from .harness import CONFIG_ECHO_FILE, METRICS_FILE, read_metrics_csv


def _episode_means(data: np.ndarray, columns: list[int]) -> tuple[np.ndarray, np.ndarray]:
    """Average the selected columns over runs, grouped by episode."""
    episodes = np.unique(data[:, 1])
    means = np.array([
        data[data[:, 1] == ep][:, columns].mean(axis=0) for ep in episodes
    ])
    return episodes, means


def _write_table(path: Path, header: list[str], episodes: np.ndarray, rows: np.ndarray) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for ep, row in zip(episodes, np.atleast_2d(rows.T).T):
        writer.writerow([f"{ep:g}"] + [f"{v:.10g}" for v in np.atleast_1d(row)])
    path.write_text(buf.getvalue(), encoding="utf-8")


def emit_plot_data(experiment_dirs, out_dir) -> list[str]:
    """Aggregate one or more experiment directories into plot tables."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    per_exp = []
    for exp_dir in experiment_dirs:
        exp_dir = Path(exp_dir)
        header, data = read_metrics_csv(exp_dir / METRICS_FILE)
        cfg = load_config(exp_dir / CONFIG_ECHO_FILE)
        users = cfg.env.users
        user_cols = list(range(2, 2 + users))
        total_col = header.index("total_rate")
        active_col = header.index("active_elements_mean")
        per_exp.append((exp_dir.name, cfg, header, data, user_cols, total_col, active_col))

    for name, cfg, header, data, user_cols, _, _ in per_exp:
        episodes, means = _episode_means(data, user_cols)
        path = out / f"rates_vs_episode_{name}.csv"
        _write_table(path, ["episode"] + header[2:2 + len(user_cols)], episodes, means)
        written.append(str(path))

    def combined(metric_col_idx: int, filename: str) -> None:
        all_eps = None
        columns = []
        labels = []
        for name, cfg, _, data, _, total_col, active_col in per_exp:
            col = total_col if metric_col_idx == 0 else active_col
            episodes, means = _episode_means(data, [col])
            if all_eps is None:
                all_eps = episodes
            n = min(len(all_eps), len(episodes))
            all_eps = all_eps[:n]
            columns = [c[:n] for c in columns]
            columns.append(means[:n, 0])
            labels.append(f"mu_{cfg.env.mu:g}_{name}")
        table = np.stack(columns, axis=1)
        path = out / filename
        _write_table(path, ["episode"] + labels, all_eps, table)
        written.append(str(path))

    combined(0, "total_rate_vs_episode.csv")
    combined(1, "active_elements_vs_episode.csv")
    return written

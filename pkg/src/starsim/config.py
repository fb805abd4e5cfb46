"""Experiment configuration: presets, INI files and strict parsing.

Config files are flat key = value sections ([experiment], [env], [agent]).
Unknown sections or keys are rejected so typos fail loudly instead of being
silently ignored. Two presets ship: `desk` runs in minutes on a laptop,
`paper` encodes the full-scale setup (N=144, six users, 210x1000 steps,
four seeds) for long runs.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import asdict, dataclass, field, replace

from .agent import AgentHyperparams
from .channel import PathLossParams, RicianParams
from .env import EnvConfig
from .phy import LinkBudget


class ConfigError(ValueError):
    """Invalid or unknown configuration input."""


MODES = ("learned", "equal-partition")


@dataclass
class ExperimentConfig:
    env: EnvConfig = field(default_factory=EnvConfig)
    agent: AgentHyperparams = field(default_factory=AgentHyperparams)
    mode: str = "learned"
    episodes: int = 210
    steps_per_episode: int = 1000
    runs: int = 4
    eval_every: int = 10  # training episodes between evaluation points
    eval_episodes: int = 2  # noise-free episodes per evaluation point

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        for name in ("episodes", "steps_per_episode", "runs", "eval_every", "eval_episodes"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")


def desk_preset() -> ExperimentConfig:
    """Laptop-scale static scenario: N=16, two users per space, two seeds."""
    env = EnvConfig(
        n_h=4,
        n_v=4,
        m=4,
        k=2,
        l=2,
        users_reflection=((40.0, 15.0, 1.5), (45.0, 18.0, 1.5)),
        users_transmission=((55.0, 25.0, 1.5), (50.0, 22.0, 1.5)),
        seed=1,
    )
    return ExperimentConfig(env=env, episodes=50, steps_per_episode=200, runs=2)


def paper_preset() -> ExperimentConfig:
    """Full-scale static scenario: N=144, six users, four seeds."""
    env = EnvConfig(n_h=12, n_v=12, m=4, k=3, l=3, seed=1)
    return ExperimentConfig(env=env, episodes=210, steps_per_episode=1000, runs=4)


PRESETS = {"desk": desk_preset, "paper": paper_preset}


def preset(name: str) -> ExperimentConfig:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


# ---------------------------------------------------------------------------
# INI serialization
# ---------------------------------------------------------------------------

def _fmt_positions(points) -> str:
    return "; ".join(",".join(f"{c:g}" for c in p) for p in points)


def _parse_positions(text: str):
    points = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        coords = tuple(float(c) for c in chunk.split(","))
        if len(coords) != 3:
            raise ConfigError(f"positions need three coordinates, got {chunk!r}")
        points.append(coords)
    return tuple(points)


def config_to_ini(cfg: ExperimentConfig) -> str:
    parser = configparser.ConfigParser()
    parser["experiment"] = {
        "mode": cfg.mode,
        "episodes": str(cfg.episodes),
        "steps_per_episode": str(cfg.steps_per_episode),
        "runs": str(cfg.runs),
        "eval_every": str(cfg.eval_every),
        "eval_episodes": str(cfg.eval_episodes),
    }
    env = cfg.env
    parser["env"] = {
        "n_h": str(env.n_h),
        "n_v": str(env.n_v),
        "m": str(env.m),
        "k": str(env.k),
        "l": str(env.l),
        "mu": f"{env.mu:g}",
        "mobility": env.mobility,
        "seed": str(env.seed),
        "bs_pos": ",".join(f"{c:g}" for c in env.bs_pos),
        "ris_pos": ",".join(f"{c:g}" for c in env.ris_pos),
        "users_reflection": _fmt_positions(env.users_reflection),
        "users_transmission": _fmt_positions(env.users_transmission),
        "power_w": f"{env.budget.power_w:g}",
        "noise_density_dbm_hz": f"{env.budget.noise_density_dbm_hz:g}",
        "bandwidth_hz": f"{env.budget.bandwidth_hz:g}",
        "f_c": f"{env.pathloss.f_c:g}",
        "zeta_ris": f"{env.pathloss.zeta_ris:g}",
        "zeta_direct": f"{env.pathloss.zeta_direct:g}",
        "d0": f"{env.pathloss.d0:g}",
        "rician_direct_los": f"{env.rician.direct_los:g}",
        "rician_direct_nlos": f"{env.rician.direct_nlos:g}",
        "rician_ris_user_los": f"{env.rician.ris_user_los:g}",
        "rician_ris_user_nlos": f"{env.rician.ris_user_nlos:g}",
        "rician_bs_ris_los": f"{env.rician.bs_ris_los:g}",
        "rician_bs_ris_nlos": f"{env.rician.bs_ris_nlos:g}",
        "rwp_area_m2": f"{env.rwp_area_m2:g}",
        "rwp_speed": f"{env.rwp_speed:g}",
    }
    agent = cfg.agent
    parser["agent"] = {k: f"{v:g}" for k, v in asdict(agent).items()}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


_EXPERIMENT_KEYS = {"mode", "episodes", "steps_per_episode", "runs", "eval_every", "eval_episodes"}
_ENV_KEYS = {
    "n_h", "n_v", "m", "k", "l", "mu", "mobility", "seed", "bs_pos", "ris_pos",
    "users_reflection", "users_transmission", "power_w", "noise_density_dbm_hz",
    "bandwidth_hz", "f_c", "zeta_ris", "zeta_direct", "d0",
    "rician_direct_los", "rician_direct_nlos", "rician_ris_user_los",
    "rician_ris_user_nlos", "rician_bs_ris_los", "rician_bs_ris_nlos",
    "rwp_area_m2", "rwp_speed",
}
_AGENT_KEYS = {
    "discount", "actor_lr", "critic_lr", "soft_tau", "batch_size",
    "buffer_capacity", "hidden_width", "hidden_layers", "noise_start", "noise_end",
    "update_every",
}


def config_from_ini(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    known = {"experiment": _EXPERIMENT_KEYS, "env": _ENV_KEYS, "agent": _AGENT_KEYS}
    for section in parser.sections():
        if section not in known:
            raise ConfigError(f"unknown config section [{section}]")
        for key in parser[section]:
            if key not in known[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")

    def get(section, key, conv, default):
        if section in parser and key in parser[section]:
            try:
                return conv(parser[section][key])
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(f"bad value for {section}.{key}: {exc}") from exc
        return default

    def parse_triple(text):
        coords = tuple(float(c) for c in text.split(","))
        if len(coords) != 3:
            raise ConfigError(f"expected x,y,z, got {text!r}")
        return coords

    env_defaults = EnvConfig()
    k = get("env", "k", int, env_defaults.k)
    l = get("env", "l", int, env_defaults.l)
    default_refl = tuple(env_defaults.users_reflection)[:k]
    default_trans = tuple(env_defaults.users_transmission)[:l]
    try:
        env = EnvConfig(
            n_h=get("env", "n_h", int, env_defaults.n_h),
            n_v=get("env", "n_v", int, env_defaults.n_v),
            m=get("env", "m", int, env_defaults.m),
            k=k,
            l=l,
            mu=get("env", "mu", float, 0.0),
            mobility=get("env", "mobility", str, "static"),
            seed=get("env", "seed", int, env_defaults.seed),
            bs_pos=get("env", "bs_pos", parse_triple, env_defaults.bs_pos),
            ris_pos=get("env", "ris_pos", parse_triple, env_defaults.ris_pos),
            users_reflection=get("env", "users_reflection", _parse_positions, default_refl),
            users_transmission=get("env", "users_transmission", _parse_positions, default_trans),
            budget=LinkBudget(
                power_w=get("env", "power_w", float, 1.0),
                noise_density_dbm_hz=get("env", "noise_density_dbm_hz", float, -174.0),
                bandwidth_hz=get("env", "bandwidth_hz", float, 100e6),
            ),
            pathloss=PathLossParams(
                f_c=get("env", "f_c", float, 3.5e9),
                zeta_ris=get("env", "zeta_ris", float, 2.2),
                zeta_direct=get("env", "zeta_direct", float, 3.45),
                d0=get("env", "d0", float, 1.0),
            ),
            rician=RicianParams(
                direct_los=get("env", "rician_direct_los", float, 10.0),
                direct_nlos=get("env", "rician_direct_nlos", float, 10.0),
                ris_user_los=get("env", "rician_ris_user_los", float, 10.0),
                ris_user_nlos=get("env", "rician_ris_user_nlos", float, 10.0),
                bs_ris_los=get("env", "rician_bs_ris_los", float, 10.0),
                bs_ris_nlos=get("env", "rician_bs_ris_nlos", float, 10.0),
            ),
            rwp_area_m2=get("env", "rwp_area_m2", float, 100.0),
            rwp_speed=get("env", "rwp_speed", float, 1.0),
        )
        agent = AgentHyperparams(
            discount=get("agent", "discount", float, 0.6),
            actor_lr=get("agent", "actor_lr", float, 1e-4),
            critic_lr=get("agent", "critic_lr", float, 1e-3),
            soft_tau=get("agent", "soft_tau", float, 0.005),
            batch_size=get("agent", "batch_size", int, 64),
            buffer_capacity=get("agent", "buffer_capacity", int, 10000),
            hidden_width=get("agent", "hidden_width", int, 128),
            hidden_layers=get("agent", "hidden_layers", int, 2),
            noise_start=get("agent", "noise_start", float, 0.5),
            noise_end=get("agent", "noise_end", float, 0.05),
            update_every=get("agent", "update_every", int, 1),
        )
        return ExperimentConfig(
            env=env,
            agent=agent,
            mode=get("experiment", "mode", str, "learned"),
            episodes=get("experiment", "episodes", int, 210),
            steps_per_episode=get("experiment", "steps_per_episode", int, 1000),
            runs=get("experiment", "runs", int, 4),
            eval_every=get("experiment", "eval_every", int, 10),
            eval_episodes=get("experiment", "eval_episodes", int, 2),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return config_from_ini(fh.read())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc


def apply_overrides(cfg: ExperimentConfig, seed=None, mu=None, mode=None) -> ExperimentConfig:
    env = cfg.env
    if seed is not None:
        env = replace(env, seed=int(seed))
    if mu is not None:
        env = replace(env, mu=float(mu))
    out = replace(cfg, env=env)
    if mode is not None:
        out = replace(out, mode=mode)
    return out

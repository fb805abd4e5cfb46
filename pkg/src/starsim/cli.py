"""Command-line client of the experiment service.

Every subcommand talks HTTP: against `--server URL` when given, otherwise
against a private service instance started on an ephemeral localhost port for
the duration of the command. Exit codes: 0 success, 2 configuration error,
3 I/O error, 4 oracle instance too large.
"""

from __future__ import annotations

import json
import sys
import threading
import time
from contextlib import contextmanager
from pathlib import Path

import click
import httpx
import uvicorn

from .service.app import app as service_app

EXIT_CODES = {"config": 2, "io": 3, "oracle_size": 4}
POLL_SECONDS = 0.3


class CommandFailed(Exception):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def _fail_from_response(resp: httpx.Response) -> CommandFailed:
    try:
        detail = resp.json()["detail"]
        message = detail["detail"]
        code = EXIT_CODES.get(detail.get("error_code"), 1)
    except Exception:  # noqa: BLE001 - non-JSON error body
        message = resp.text
        code = 1
    return CommandFailed(message, code)


@contextmanager
def api_client(server: str | None):
    """HTTP client against `server`, or a temporary local service."""
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            yield client
        return
    local = uvicorn.Server(
        uvicorn.Config(service_app, host="127.0.0.1", port=0, log_level="warning")
    )
    thread = threading.Thread(target=local.run, daemon=True)
    thread.start()
    deadline = time.time() + 15
    while not local.started:
        if time.time() > deadline or not thread.is_alive():
            raise CommandFailed("local service failed to start", 1)
        time.sleep(0.02)
    port = local.servers[0].sockets[0].getsockname()[1]
    try:
        with httpx.Client(base_url=f"http://127.0.0.1:{port}", timeout=None) as client:
            yield client
    finally:
        local.should_exit = True
        thread.join(timeout=10)


def _post(client: httpx.Client, path: str, body: dict) -> dict:
    resp = client.post(path, json=body)
    if resp.status_code != 200:
        raise _fail_from_response(resp)
    return resp.json()


def _get(client: httpx.Client, path: str) -> dict:
    resp = client.get(path)
    if resp.status_code != 200:
        raise _fail_from_response(resp)
    return resp.json()


def _read_config_text(config: str | None) -> str | None:
    if config is None:
        return None
    try:
        return Path(config).read_text(encoding="utf-8")
    except OSError as exc:
        raise CommandFailed(f"cannot read config file: {exc}", EXIT_CODES["config"]) from exc


def _run_experiment_command(server, mode, preset, config, seed, out, mu):
    config_text = _read_config_text(config)
    if config_text is None and preset is None:
        raise CommandFailed("provide --config or --preset", EXIT_CODES["config"])
    body = {
        "mode": mode,
        "preset": preset,
        "config_text": config_text,
        "seed": seed,
        "mu": mu,
        "out_dir": str(out),
    }
    with api_client(server) as client:
        job = _post(client, "/experiments", body)
        job_id = job["job_id"]
        click.echo(f"job {job_id} submitted")
        last = None
        while True:
            status = _get(client, f"/experiments/{job_id}")
            progress = status["progress"]
            key = (progress.get("run"), progress.get("episode"))
            if key != last and key[0] is not None:
                click.echo(
                    f"run {key[0] + 1}/{progress['runs_total']} "
                    f"episode {key[1]}/{progress['episodes_total']}"
                )
                last = key
            if status["state"] == "done":
                for name, path in status["result"].items():
                    click.echo(f"{name}: {path}")
                return
            if status["state"] == "failed":
                raise CommandFailed(
                    status["error"] or "experiment failed",
                    EXIT_CODES.get(status["error_code"], 1),
                )
            time.sleep(POLL_SECONDS)


def _experiment_options(fn):
    fn = click.option("--config", type=click.Path(), default=None,
                      help="INI config file (overrides --preset).")(fn)
    fn = click.option("--preset", type=click.Choice(["desk", "paper"]), default=None)(fn)
    fn = click.option("--seed", type=int, default=None, help="Base seed override.")(fn)
    fn = click.option("--out", type=click.Path(), required=True,
                      help="Directory for metrics files.")(fn)
    fn = click.option("--mu", type=float, default=None,
                      help="Element-deactivation reward weight override.")(fn)
    return fn


@click.group()
@click.option("--server", default=None, envvar="STARSIM_SERVER",
              help="Service URL; omit to run a private local service.")
@click.pass_context
def main(ctx, server):
    """Simulator and learning harness for a dual-sided smart-surface downlink."""
    ctx.obj = {"server": server}


@main.command()
@_experiment_options
@click.pass_context
def train(ctx, config, preset, seed, out, mu):
    """Train the policy that picks phases and element assignment."""
    _run_experiment_command(ctx.obj["server"], "learned", preset, config, seed, out, mu)


@main.command()
@_experiment_options
@click.pass_context
def baseline(ctx, config, preset, seed, out, mu):
    """Train phases only, with the equal-partition element assignment."""
    _run_experiment_command(ctx.obj["server"], "equal-partition", preset, config, seed, out, mu)


@main.command()
@click.option("--config", type=click.Path(), default=None,
              help="INI file whose [env] section defines the instance.")
@click.option("--n", type=int, default=4, help="Surface elements.")
@click.option("--k", type=int, default=1, help="Reflection-space users.")
@click.option("--l", type=int, default=1, help="Transmission-space users.")
@click.option("--m", type=int, default=2, help="BS antennas.")
@click.option("--grid", type=int, default=8, help="Phase levels per element.")
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(), default=None,
              help="Directory for oracle.json (optional).")
@click.pass_context
def oracle(ctx, config, n, k, l, m, grid, seed, out):
    """Exhaustively solve a tiny instance (N<=6, K+L<=3)."""
    if config is not None:
        import configparser

        parser = configparser.ConfigParser()
        text = _read_config_text(config)
        parser.read_string(text)
        env = parser["env"] if "env" in parser else {}
        n = int(env.get("n_h", n)) * int(env.get("n_v", 1))
        k = int(env.get("k", k))
        l = int(env.get("l", l))
        m = int(env.get("m", m))
        seed = int(env.get("seed", seed))
    body = {"n": n, "k": k, "l": l, "m": m, "phase_levels": grid, "seed": seed}
    with api_client(ctx.obj["server"]) as client:
        result = _post(client, "/oracle", body)
    click.echo(f"objective (total SINR): {result['objective']:.6g}")
    click.echo(f"active elements: {result['active_elements']}")
    click.echo(f"assignment: {result['assignment']}")
    if out is not None:
        out_dir = Path(out)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            path = out_dir / "oracle.json"
            path.write_text(json.dumps(result, indent=2), encoding="utf-8")
        except OSError as exc:
            raise CommandFailed(str(exc), EXIT_CODES["io"]) from exc
        click.echo(f"written: {path}")


@main.command()
@click.argument("experiment_dirs", nargs=-1, required=True, type=click.Path())
@click.option("--out", type=click.Path(), required=True, help="Directory for tables.")
@click.pass_context
def plots(ctx, experiment_dirs, out):
    """Aggregate experiment metrics into plot-ready tables."""
    body = {"experiment_dirs": [str(d) for d in experiment_dirs], "out_dir": str(out)}
    with api_client(ctx.obj["server"]) as client:
        result = _post(client, "/plots", body)
    for table in result["tables"]:
        click.echo(f"written: {table}")


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8321)
def serve(host, port):
    """Run the experiment service in the foreground."""
    uvicorn.run(service_app, host=host, port=port)


def entrypoint(argv=None) -> int:
    try:
        main.main(args=argv, standalone_mode=False)
        return 0
    except CommandFailed as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Abort:
        return 130


if __name__ == "__main__":
    sys.exit(entrypoint())

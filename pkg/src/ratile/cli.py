"""Command-line client for the analysis service.

Thin by design: every subcommand reads a JSON config, posts to the HTTP
service (in-process by default, remote with --server) and formats the JSON
reply.  Exit codes: 0 ok, 2 bad config or usage, 3 math precondition
failed, 4 internal invariant violated.
"""

from __future__ import annotations

import json
import sys

import click
import httpx

from .errors import ConfigError


def _client(server):
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient
    from .service import app
    return TestClient(app, raise_server_exceptions=False)


def _load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as err:
        _config_abort(f"cannot read config {path}: {err}")
    except json.JSONDecodeError as err:
        _config_abort(f"config {path} is not valid JSON at line {err.lineno}, "
                      f"column {err.colno}: {err.msg}")
    if not isinstance(data, dict) or "matrix" not in data:
        _config_abort(f"config {path} must be an object with a "
                      "'matrix' field")
    return data


def _config_abort(message):
    click.echo(f"error: {message}", err=True)
    sys.exit(ConfigError.exit_code)


def _post(ctx, path, payload):
    with _client(ctx.obj.get("server")) as client:
        reply = client.post(path, json=payload)
    if reply.status_code == 200:
        return reply.json()
    try:
        body = reply.json()
    except ValueError:
        body = {"error": reply.text}
    if reply.status_code == 422:
        code, message = 2, json.dumps(body.get("detail", body))
    else:
        code = body.get("code", 4)
        message = body.get("error", reply.text)
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _merge_options(config, **flags):
    options = dict(config.get("options") or {})
    for key, value in flags.items():
        if value is not None:
            options[key] = value
    config = dict(config)
    config["options"] = options
    return config, options


@click.group()
@click.option("--server", default=None, metavar="URL",
              help="use a running service instead of in-process execution")
@click.pass_context
def main(ctx, server):
    """Exact analysis of rational matrix digit systems and their tiles."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


@main.command()
@click.argument("config_path", metavar="CONFIG")
@click.pass_context
def analyze(ctx, config_path):
    """Counts, determinant, invariant factors and residue systems."""
    config = _load_config(config_path)
    out = _post(ctx, "/analyze", config)
    if "warning" in out:
        click.echo(f"warning: {out['warning']}", err=True)
    click.echo(json.dumps(out, indent=2))


@main.command()
@click.argument("config_path", metavar="CONFIG")
@click.option("--side", type=click.Choice(["A", "B"]), default="B")
@click.pass_context
def residues(ctx, config_path, side):
    """Complete residue system for the chosen side."""
    config = _load_config(config_path)
    out = _post(ctx, f"/residues?side={side}", config)
    click.echo(json.dumps(out, indent=2))


@main.command()
@click.argument("config_path", metavar="CONFIG")
@click.argument("vector")
@click.option("--max-steps", default=64, show_default=True)
@click.option("--policy", type=click.Choice(["first", "detect-branching"]),
              default="first")
@click.pass_context
def expand(ctx, config_path, vector, max_steps, policy):
    """Digit expansion of an integer vector (comma-separated)."""
    config = _load_config(config_path)
    payload = {"config": config, "vector": vector.split(","),
               "max_steps": max_steps, "policy": policy}
    out = _post(ctx, "/expand", payload)
    click.echo(json.dumps(out, indent=2))


@main.command()
@click.argument("config_path", metavar="CONFIG")
@click.option("--k", type=int, required=True, help="expansion level")
@click.option("--depth", type=int, default=None, help="digit truncation")
@click.option("--cap", type=int, default=10 ** 6, show_default=True)
@click.option("--out", "out_path", default=None, metavar="FILE",
              help="write the CSV here instead of stdout")
@click.pass_context
def tile(ctx, config_path, k, depth, cap, out_path):
    """Point cloud of the attractor at level k, as CSV."""
    config = _load_config(config_path)
    config, options = _merge_options(config, k=k, depth=depth, cap=cap)
    payload = {"config": config, "k": options["k"], "cap": options["cap"]}
    if options.get("depth") is not None:
        payload["depth"] = options["depth"]
    out = _post(ctx, "/tile", payload)
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(out["csv"])
        click.echo(f"{out['rows']} points -> {out_path} "
                   f"(hausdorff bound {out['hausdorff_bound']:.3g})")
    else:
        click.echo(out["csv"], nl=False)


@main.command()
@click.argument("config_path", metavar="CONFIG")
@click.option("--k", type=int, required=True, help="resolution level")
@click.option("--depth", type=int, default=None)
@click.option("--samples", type=int, default=50, show_default=True)
@click.option("--window", default=None,
              help="clamp the translate search box (rational)")
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def tiling(ctx, config_path, k, depth, samples, window, seed):
    """Sampled covering-multiplicity report for the lattice tiling."""
    config = _load_config(config_path)
    config, options = _merge_options(config, k=k, depth=depth, seed=seed,
                                     samples=samples)
    payload = {"config": config, "k": options["k"],
               "samples": options["samples"], "seed": options["seed"]}
    if options.get("depth") is not None:
        payload["depth"] = options["depth"]
    if window is not None:
        payload["window"] = window
    out = _post(ctx, "/tiling", payload)
    click.echo(json.dumps(out, indent=2))


@main.command()
@click.argument("config_path", metavar="CONFIG")
@click.option("--s", "s_text", required=True,
              help='character index, e.g. "v=-1;d=1"')
@click.option("--y", "y_text", required=True,
              help='point, digit-string or plain vector, e.g. "v=-1;d=1"')
@click.option("--r", "r_text", default=None,
              help="real-side character index (comma-separated rationals)")
@click.option("--x", "x_text", default=None,
              help="real coordinate for the combined angle")
@click.pass_context
def chars(ctx, config_path, s_text, y_text, r_text, x_text):
    """Exact character phase as a fraction of a turn."""
    config = _load_config(config_path)
    payload = {"config": config, "s": s_text, "y": y_text}
    if r_text is not None:
        payload["r"] = r_text.split(",")
        if x_text is not None:
            payload["x"] = x_text.split(",")
    out = _post(ctx, "/chars", payload)
    from fractions import Fraction
    turn = Fraction(out["turn"])
    click.echo(f"S = {out['S']}")
    click.echo(f"{turn.numerator}/{turn.denominator} turns")
    if "combined_turn" in out:
        click.echo(f"combined: {out['combined_turn']} turns")


def run():
    try:
        main(standalone_mode=False)
    except click.exceptions.Abort:
        sys.exit(1)
    except click.ClickException as err:
        err.show()
        sys.exit(2)
    except ConfigError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    run()

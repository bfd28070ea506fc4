"""Command-line entry points.

`qdpli run` executes a scenario in-process by default; with --server it
posts the scenario to a running service instance and writes the
returned artifacts, byte-identical to a local run.  Exit codes: 1 for
configuration errors (the message names the offending key), 2 for
numerics failures, 3 for I/O problems.
"""

import json
import os
import sys

import click

from .errors import ConfigError, NumericsError
from .runner import run_scenario
from .svgplot import emit_plot

_THREADS_ENV = "QDPLI_THREADS"


def _fail(code, message):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
def main():
    """Phonon-dressed emission rates and photoluminescence spectra."""


@main.command()
@click.argument("scenario", type=click.Path())
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Output directory (defaults to the scenario's [output] dir).")
@click.option("--threads", type=int, default=None,
              help=f"Worker threads for grid sweeps (default ${_THREADS_ENV} or 1).")
@click.option("--verify", is_flag=True,
              help="Also run the steady-state oracle suite; nonzero exit on failure.")
@click.option("--convergence-report", is_flag=True,
              help="Re-run with doubled quadrature densities and record residuals.")
@click.option("--server", default=None, metavar="URL",
              help="Delegate the computation to a running service instance.")
def run(scenario, out_dir, threads, verify, convergence_report, server):
    """Run a scenario file: writes pli.csv, purcell.csv, dip_vs_T.csv,
    SVG plots and run_manifest.json."""
    if threads is None:
        try:
            threads = int(os.environ.get(_THREADS_ENV, "1"))
        except ValueError:
            threads = 1
    threads = max(1, threads)
    try:
        if server is not None:
            code, manifest = _run_remote(server, scenario, out_dir, verify,
                                         convergence_report)
        else:
            code, manifest = run_scenario(
                scenario, out_dir=out_dir, threads=threads,
                convergence_report=convergence_report, verify=verify)
    except ConfigError as exc:
        _fail(1, str(exc))
    except NumericsError as exc:
        detail = f" (residual {exc.residual:.3e})" if exc.residual is not None else ""
        _fail(2, f"{exc}{detail}")
    except OSError as exc:
        _fail(3, str(exc))
    for name in manifest.get("outputs", []):
        click.echo(f"wrote {name}")
    if verify:
        rep = manifest.get("verify", {})
        status = "passed" if rep.get("passed") else "FAILED"
        click.echo(f"oracle verification {status} "
                   f"(max |formula - steady state| = {rep.get('max_abs_error'):.3e})")
    sys.exit(code)


def _run_remote(server, scenario_path, out_dir, verify, convergence_report):
    import httpx

    try:
        with open(scenario_path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        _fail(3, str(exc))
    payload = {"scenario_text": text, "verify": verify,
               "convergence_report": convergence_report}
    try:
        resp = httpx.post(f"{server.rstrip('/')}/scenario/run", json=payload,
                          timeout=600.0)
    except httpx.HTTPError as exc:
        _fail(3, f"cannot reach service at {server}: {exc}")
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        code = 1 if resp.status_code in (400, 422) else 2
        _fail(code, f"service rejected the scenario: {detail}")
    body = resp.json()
    manifest = body["manifest"]
    target = out_dir or manifest.get("output_dir", "out")
    os.makedirs(target, exist_ok=True)
    for name in sorted(body["files"]):
        with open(os.path.join(target, name), "w", encoding="utf-8",
                  newline="") as fh:
            fh.write(body["files"][name])
    manifest["outputs"] = sorted(body["files"])
    with open(os.path.join(target, "run_manifest.json"), "w",
              encoding="utf-8", newline="") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    exit_code = 0
    if verify and not manifest.get("verify", {}).get("passed", True):
        exit_code = 2
    return exit_code, manifest


@main.command()
@click.argument("csv_path", type=click.Path())
@click.argument("svg_path", type=click.Path())
@click.option("--columns", default=None,
              help="Comma-separated column names to plot (default: all).")
@click.option("--title", default=None)
def plot(csv_path, svg_path, columns, title):
    """Render a CSV produced by `run` into a standalone SVG."""
    style = {}
    if columns:
        style["columns"] = [c.strip() for c in columns.split(",")]
    if title:
        style["title"] = title
    try:
        emit_plot(csv_path, svg_path, style)
    except ConfigError as exc:
        _fail(1, str(exc))
    except OSError as exc:
        _fail(3, str(exc))
    click.echo(f"wrote {svg_path}")


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8300, type=int)
def serve(host, port):
    """Start the HTTP service wrapping the same computation pipeline."""
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()

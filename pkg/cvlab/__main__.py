#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : __main__.py                                                                         #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 10:31:27 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Main entry point for the CV Lab command line.

Four commands share one set of run options: ``run`` simulates a circuit file on a chosen
backend, ``sweep`` evaluates a named experiment over a parameter grid, ``decompose`` exports the
Gaussian-sum decomposition of a cubic phase state, and ``adiabatic solve`` answers Diophantine
instances with the adiabatic construction. Every deliberate failure ends in a critical log line
and the exit code its error class carries; nothing ends in a bare traceback.
"""
import logging
import logging.handlers
import os
import sys
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Optional

import typer
from dotenv import load_dotenv
from tqdm.auto import tqdm

from cvlab.adiabatic import START_LOGICAL, manders_adleman
from cvlab.config import RunConfig
from cvlab.constants import DEFAULT_LOG_FILEPATH
from cvlab.errors import CVLabError
from cvlab.experiment import parse_grid
from cvlab.lab import FILE_LOCATION, SOURCE, CVLab
from cvlab.persist import record_line

# ------------------------------------------------------------------------------------------------ #
load_dotenv()
# ------------------------------------------------------------------------------------------------ #
LOG_FILEPATH = os.getenv("LOG_FILEPATH", DEFAULT_LOG_FILEPATH)

app = typer.Typer(
    name="cv-lab",
    help="Simulate continuous-variable circuits with certified error budgets and run sweeps.",
    add_completion=False,
)
adiabatic_app = typer.Typer(
    help="The adiabatic Diophantine construction at desk scale.", add_completion=False
)
app.add_typer(adiabatic_app, name="adiabatic")


class _TqdmLoggingHandler(logging.Handler):
    """Writes log records through ``tqdm.write`` so sweep progress bars stay intact."""

    def emit(self, record: logging.LogRecord) -> None:
        try:
            tqdm.write(self.format(record), file=sys.stderr)
        except Exception:
            self.handleError(record)


def setup_logging(log_filepath: str) -> None:
    """Configure logging to use a time-rotating file handler.

    The root logger emits INFO to a file rotated daily with seven days kept. When
    ``LOG_TO_CONSOLE`` is ``true``, ERROR and above also go to stderr through the tqdm-aware
    handler.

    Args:
        log_filepath (str): Path to the log file; its directory is created if missing.
    """
    log_dir = os.path.dirname(log_filepath)
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)

    logger = logging.getLogger()
    logger.setLevel(logging.INFO)

    # Prevent handlers from being added multiple times
    if logger.hasHandlers():
        logger.handlers.clear()

    handler = logging.handlers.TimedRotatingFileHandler(
        log_filepath, when="d", interval=1, backupCount=7
    )
    formatter = logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    handler.setFormatter(formatter)
    logger.addHandler(handler)

    if os.getenv("LOG_TO_CONSOLE", "false").lower() == "true":
        console_handler = _TqdmLoggingHandler()
        console_handler.setLevel(logging.ERROR)
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

    logging.info("Logging has been configured successfully.")


@contextmanager
def _exit_on_error(command: str) -> Iterator[None]:
    """Maps a CVLabError to its exit code after a critical log line."""
    try:
        yield
    except CVLabError as e:
        logging.critical(f"{command} failed ({e.__class__.__name__}): {e}")
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(code=e.exit_code)


def _overrides(**options: Any) -> Dict[str, Any]:
    """The options that were actually given; omitted ones keep RunConfig's defaults."""
    return {key: value for key, value in options.items() if value is not None}


def create_lab(overrides: Dict[str, Any], verbose: bool, save: bool = True) -> CVLab:
    """Builds the controller the commands run through.

    Raises:
        ConfigError: If an override is out of range.
    """
    config = RunConfig().with_overrides(**overrides)
    return CVLab(directory=FILE_LOCATION, source=SOURCE, config=config, save=save, verbose=verbose)


# ------------------------------------------------------------------------------------------------ #
#                                        OPTIONS                                                   #
# ------------------------------------------------------------------------------------------------ #
SeedOption = typer.Option(None, "--seed", help="Seed for every random draw of the run.")
MaxDimOption = typer.Option(None, "--max-dim", help="Cap on dense matrix dimension.")
MaxCutoffOption = typer.Option(None, "--max-cutoff", help="Cap on the per-mode Fock cutoff.")
SpanOption = typer.Option("", "--span", help="Run label used in output file names.")
VerboseOption = typer.Option(False, "--verbose", "-v", help="Print tables to the console.")
NoSaveOption = typer.Option(False, "--no-save", help="Do not write result files.")


@app.command()
def run(
    circuit_file: str = typer.Argument(..., help="Path of a JSON circuit file."),
    backend: Optional[str] = typer.Option(
        None, "--backend", "-b", help="Simulator: fock, gaussian or pathsum."
    ),
    trunc_eps: Optional[float] = typer.Option(
        None, "--trunc-eps", help="Target error of adaptive Fock truncation."
    ),
    sum_delta: Optional[float] = typer.Option(
        None, "--sum-delta", help="Error budget of the Gaussian-rank decompositions."
    ),
    branch_cap: Optional[int] = typer.Option(
        None, "--branch-cap", help="Cap on path-sum branch contributions."
    ),
    output_format: Optional[str] = typer.Option(
        None, "--format", "-f", help="Result file format: json or csv."
    ),
    seed: Optional[int] = SeedOption,
    max_dim: Optional[int] = MaxDimOption,
    max_cutoff: Optional[int] = MaxCutoffOption,
    span: str = SpanOption,
    verbose: bool = VerboseOption,
    no_save: bool = NoSaveOption,
) -> None:
    """Simulate one circuit and print its result record as a JSON line."""
    setup_logging(LOG_FILEPATH)
    overrides = _overrides(
        backend=backend,
        trunc_eps=trunc_eps,
        sum_delta=sum_delta,
        branch_cap=branch_cap,
        output_format=output_format,
        seed=seed,
        max_dim=max_dim,
        max_cutoff=max_cutoff,
    )
    with _exit_on_error("run"):
        lab = create_lab(overrides, verbose=verbose, save=not no_save)
        record = lab.run(circuit_file, span=span)
    typer.echo(record_line(record))


@app.command()
def sweep(
    experiment: str = typer.Argument(..., help="Experiment name, for example cubic_growth."),
    grid: List[str] = typer.Option(
        [], "--grid", "-g", help="Grid axis as key=v1,v2,...; repeat for more axes."
    ),
    threads: Optional[int] = typer.Option(
        None, "--threads", "-t", help="Points evaluated in parallel. Row order is unaffected."
    ),
    output_format: str = typer.Option("csv", "--format", "-f", help="Table format: csv or json."),
    seed: Optional[int] = SeedOption,
    max_dim: Optional[int] = MaxDimOption,
    max_cutoff: Optional[int] = MaxCutoffOption,
    span: str = SpanOption,
    verbose: bool = VerboseOption,
    no_save: bool = NoSaveOption,
) -> None:
    """Evaluate an experiment at every grid point; failed points are kept with their status."""
    setup_logging(LOG_FILEPATH)
    overrides = _overrides(
        threads=threads,
        output_format=output_format,
        seed=seed,
        max_dim=max_dim,
        max_cutoff=max_cutoff,
    )
    with _exit_on_error("sweep"):
        lab = create_lab(overrides, verbose=verbose, save=not no_save)
        table = lab.sweep(experiment, parse_grid(grid), span=span)
    failed = int((table["status"] != "ok").sum())
    message = f"{experiment}: {len(table)} point(s), {failed} failed"
    output = lab.summary["output"].iloc[-1]
    if output:
        message += f", written to {output}"
    typer.echo(message)


@app.command()
def decompose(
    theta: float = typer.Option(1.0, "--theta", help="Cubic phase strength."),
    xi: float = typer.Option(1.0, "--xi", help="Ancilla width."),
    delta: float = typer.Option(1e-2, "--delta", help="Euclidean error budget."),
    span: str = SpanOption,
    verbose: bool = VerboseOption,
    no_save: bool = NoSaveOption,
) -> None:
    """Decompose V(theta) S_xi|0> into Gaussians and stream the terms as JSON lines."""
    setup_logging(LOG_FILEPATH)
    with _exit_on_error("decompose"):
        lab = create_lab({}, verbose=verbose, save=not no_save)
        gsum = lab.decompose(theta, xi, delta, span=span)
    output = lab.summary["output"].iloc[-1]
    typer.echo(
        record_line({"rank": gsum.rank, "declared_error": gsum.declared_error, "output": output})
    )


@adiabatic_app.command("solve")
def adiabatic_solve(
    instance_file: Optional[str] = typer.Argument(
        None, help="Instance file; omit to build one from --alpha, --beta, --gamma."
    ),
    alpha: int = typer.Option(1, "--alpha", help="Coefficient of x1^2."),
    beta: int = typer.Option(1, "--beta", help="Coefficient of x2."),
    gamma: int = typer.Option(2, "--gamma", help="Constant term subtracted."),
    tau: Optional[float] = typer.Option(None, "--tau", help="Total adiabatic time."),
    steps: Optional[int] = typer.Option(None, "--steps", help="Integrator steps."),
    t_out: Optional[float] = typer.Option(None, "--t-out", help="Output squeezing time."),
    whisker_power: Optional[int] = typer.Option(
        None, "--whisker-power", help="Whisker weight exponent, 0 or 1."
    ),
    start: str = typer.Option(START_LOGICAL, "--start", help="Initial state: logical or ground."),
    span: str = SpanOption,
    verbose: bool = VerboseOption,
    no_save: bool = NoSaveOption,
) -> None:
    """Answer Diophantine instances end to end, one JSON line per instance."""
    setup_logging(LOG_FILEPATH)
    options = _overrides(tau=tau, steps=steps, t_out=t_out, whisker_power=whisker_power)
    options["start"] = start
    with _exit_on_error("adiabatic solve"):
        lab = create_lab({}, verbose=verbose, save=not no_save)
        instances = instance_file or manders_adleman(alpha, beta, gamma)
        records = lab.solve(instances, span=span, **options)
    for record in records:
        typer.echo(record_line({k: v for k, v in record.items() if k != "gap_trace"}))


if __name__ == "__main__":
    app()

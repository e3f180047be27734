#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : lab.py                                                                              #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 10:05:51 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Programmatic entry point for runs, sweeps, decompositions and adiabatic solves.

:mod:`cvlab.__main__` wires each command by hand inside a Typer function. :class:`CVLab` is the
same wiring for callers that are not a shell, such as a notebook or a test: settings that
describe the machine (where results land, the run configuration, how chatty to be) are
constructor state, and each call describes one job. The controller keeps a record of every
job it ran, successful or not, readable through :attr:`CVLab.summary`.

The three circuit backends live here as module functions so the CLI and the controller share
them:

* ``fock`` evolves gate by gate with certified adaptive truncation;
* ``gaussian`` tracks covariance, mean and global phase, homodyne post-selection included;
* ``pathsum`` sums over Gaussian branches of the cubic-gate gadgets.
"""
from __future__ import annotations

import logging
import os
from dataclasses import replace
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import pandas as pd
from dotenv import load_dotenv

from cvlab import focksim, gausssim
from cvlab.adiabatic import DiophantineInstance, load_instances, solve_instance
from cvlab.circuit import (
    CircuitIR,
    Gate,
    HomodynePostselect,
    Observable,
    PhotonNumber,
    RawGaussian,
)
from cvlab.config import RunConfig
from cvlab.constants import (
    DEFAULT_FILE_LOCATION,
    DEFAULT_LOG_FILEPATH,
    DEFAULT_MIN_CUTOFF,
    DEFAULT_SOURCE,
)
from cvlab.errors import CertificateNotMetError, CVLabError, DomainError, ModeMismatchError
from cvlab.experiment import get_experiment
from cvlab.grank import GaussianSum, decompose_cubic
from cvlab.pathsum import estimate_acceptance, estimate_expectation, eval_poly_observable
from cvlab.persist import FileManager, to_jsonable
from cvlab.print import Printer

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
load_dotenv()

FILE_LOCATION = os.getenv("FILE_LOCATION", DEFAULT_FILE_LOCATION)
SOURCE = os.getenv("SOURCE", DEFAULT_SOURCE)
LOG_FILEPATH = os.getenv("LOG_FILEPATH", DEFAULT_LOG_FILEPATH)

DEFAULT_MEASUREMENT = PhotonNumber(0, (0,))
_FOCK_POINTS = {1: 801, 2: 401}
_FOCK_POINTS_WIDE = 121


# ------------------------------------------------------------------------------------------------ #
#                                        BACKENDS                                                  #
# ------------------------------------------------------------------------------------------------ #
def _probability_budget(distance: float) -> float:
    """Acceptance error implied by a normalized-state distance d: 2d + d^2."""
    return 2.0 * distance + distance * distance


def run_fock(circuit: CircuitIR, config: RunConfig) -> Dict[str, Any]:
    """Simulates the circuit gate by gate in a truncated number basis.

    Every gate gets an equal share of ``trunc_eps``; the per-gate certificates add up because
    each later gate is unitary. Renormalizing the truncated output at most doubles the
    distance, and the acceptance budget follows from that distance.

    Raises:
        DomainError: If a gate has no Hamiltonian form (raw Gaussian matrices, homodyne).
        CertificateNotMetError: If a gate cannot be certified below ``max_cutoff``.
    """
    m = circuit.num_modes
    measurement = circuit.measurement or DEFAULT_MEASUREMENT
    share = config.trunc_eps / max(1, len(circuit.gates))
    state = focksim.vacuum([1] * m)
    certificates = []
    total = 0.0
    for index, gate in enumerate(circuit.gates):
        H, t = gate.hamiltonian(m)
        state, certificate = focksim.evolve_adaptive(
            state,
            H,
            t,
            target_eps=share,
            max_cutoff=config.max_cutoff,
            min_cutoff=min(DEFAULT_MIN_CUTOFF, config.max_cutoff),
            max_dim=config.max_dim,
        )
        logger.debug(f"gates[{index}] ({gate.kind}) certified to {certificate.total:.3e}.")
        certificates.append({"gate": gate.kind, **certificate.to_dict()})
        total += certificate.total
    distance = 2.0 * total
    record: Dict[str, Any] = {"measurement": measurement.to_dict()}
    if isinstance(measurement, PhotonNumber):
        record["probability"] = focksim.probability(state, measurement.mode, measurement.accept)
        record["budget"] = _probability_budget(distance)
    else:
        record["value"] = focksim.expectation(state, measurement.operator(m))
        record["budget"] = None
    record["certificate"] = {"total": total, "state_distance": distance, "gates": certificates}
    record["diagnostics"] = {
        "cutoffs": list(state.cutoffs),
        "norm": state.norm,
        "mean_photons": [focksim.mean_photon_number(state, k) for k in range(m)],
    }
    return record


def _relabel(gate: Gate, alive: Sequence[int], index: int) -> Gate:
    """The gate with its modes renumbered onto the surviving register."""
    dropped = [k for k in gate.modes if k not in alive]
    if dropped:
        raise ModeMismatchError(f"gates[{index}] ({gate.kind}) acts on measured mode {dropped[0]}.")
    if isinstance(gate, RawGaussian):
        return replace(gate, targets=tuple(alive.index(k) for k in gate.targets))
    return replace(gate, **{f: alive.index(getattr(gate, f)) for f in gate.MODE_FIELDS})


def _gaussian_acceptance(
    state: gausssim.GaussianDesc, mode: int, accept: Sequence[int], config: RunConfig
) -> Tuple[float, float, int]:
    """Accepted weight on a number box and the weight the box misses, doubling its cutoff.

    The true probability lies in [p, p + missing].

    Raises:
        CertificateNotMetError: If the box outgrows ``max_dim`` before the missing weight
            drops below ``trunc_eps``.
    """
    m = state.num_modes
    points = _FOCK_POINTS.get(m, _FOCK_POINTS_WIDE)
    E = max(min(DEFAULT_MIN_CUTOFF, config.max_cutoff), max(accept))
    best = (0.0, 1.0, E)
    while E <= config.max_cutoff and (E + 1) ** m <= config.max_dim:
        fock_state = gausssim.to_fock(state, [E] * m, points=points)
        weight = fock_state.norm**2
        accepted = focksim.probability(fock_state, mode, accept) * weight
        best = (float(accepted), float(max(0.0, 1.0 - weight)), E)
        logger.debug(f"Gaussian readout at cutoff {E}: missing weight {best[1]:.3e}.")
        if best[1] <= config.trunc_eps:
            return best
        E *= 2
    raise CertificateNotMetError(best[1], best[2], config.trunc_eps)


def run_gaussian(circuit: CircuitIR, config: RunConfig) -> Dict[str, Any]:
    """Simulates a Gaussian circuit exactly, global phase included.

    Homodyne post-selection removes its mode; later gates are renumbered onto the surviving
    modes. Photon-number readouts go through number-basis amplitudes of the final state on a
    box grown until the weight it misses is below ``trunc_eps``. Observables are carried back
    through the gates exactly and need a circuit without post-selection.

    Raises:
        DomainError: If a gate is not Gaussian, or an observable follows post-selection.
    """
    measurement = circuit.measurement or DEFAULT_MEASUREMENT
    state = gausssim.vacuum(circuit.num_modes)
    alive = list(range(circuit.num_modes))
    densities = []
    for index, gate in enumerate(circuit.gates):
        if isinstance(gate, HomodynePostselect):
            if gate.mode not in alive:
                raise ModeMismatchError(f"gates[{index}] measures mode {gate.mode} twice.")
            state, density, _ = gausssim.homodyne_postselect(
                state, alive.index(gate.mode), float(gate.q)
            )
            alive.remove(gate.mode)
            densities.append(density)
        elif gate.gaussian and gate.unitary:
            local = _relabel(gate, alive, index)
            state = gausssim.apply_gaussian(state, local.symplectic(len(alive)))
        else:
            raise DomainError(
                f"The gaussian backend cannot apply gates[{index}] ('{gate.kind}')."
            )
    record: Dict[str, Any] = {"measurement": measurement.to_dict()}
    if isinstance(measurement, Observable):
        if densities:
            raise DomainError("Observables after homodyne post-selection need another backend.")
        record["value"] = eval_poly_observable(circuit, measurement.expression)
        record["budget"] = 0.0
    elif measurement.mode in alive:
        probability, missing, cutoff = _gaussian_acceptance(
            state, alive.index(measurement.mode), measurement.accept, config
        )
        record["probability"] = probability
        record["budget"] = missing
        record["certificate"] = {"cutoff": cutoff, "missing_weight": missing}
    elif circuit.measurement is not None:
        raise ModeMismatchError(f"Measured mode {measurement.mode} was post-selected away.")
    record["diagnostics"] = {
        "modes": alive,
        "phase": state.phase,
        "homodyne_densities": densities,
        "mean_photons": [gausssim.mean_photon_number(state, k) for k in range(len(alive))],
    }
    return record


def run_pathsum(circuit: CircuitIR, config: RunConfig) -> Dict[str, Any]:
    """Estimates the readout by the Gaussian-branch path sum with its error budget."""
    measurement = circuit.measurement or DEFAULT_MEASUREMENT
    record: Dict[str, Any] = {"measurement": measurement.to_dict()}
    if isinstance(measurement, Observable):
        result = estimate_expectation(
            circuit,
            measurement.expression,
            delta=config.sum_delta,
            branch_cap=config.branch_cap,
        ).as_dict()
        record["value"] = result.pop("value")
    else:
        result = estimate_acceptance(
            circuit,
            measurement.accept,
            delta=config.sum_delta,
            mode=measurement.mode,
            branch_cap=config.branch_cap,
        ).as_dict()
        record["probability"] = result.pop("probability")
    record["budget"] = result.pop("error_budget")
    result.pop("wall_time", None)
    record["diagnostics"] = result
    return record


BACKEND_RUNNERS = {"fock": run_fock, "gaussian": run_gaussian, "pathsum": run_pathsum}


def run_circuit(circuit: CircuitIR, config: RunConfig) -> Dict[str, Any]:
    """Dispatches to the configured backend and returns a JSON-ready result record."""
    logger.info(
        f"Running a {circuit.num_modes}-mode circuit of {len(circuit.gates)} gate(s) on the "
        f"{config.backend} backend."
    )
    body = BACKEND_RUNNERS[config.backend](circuit, config)
    record = {"backend": config.backend, "num_modes": circuit.num_modes}
    record["gates"] = len(circuit.gates)
    record.update(body)
    return to_jsonable(record)


# ------------------------------------------------------------------------------------------------ #
#                                       CONTROLLER                                                 #
# ------------------------------------------------------------------------------------------------ #
CircuitSource = Union[CircuitIR, str, Path]
InstanceSource = Union[DiophantineInstance, Sequence[DiophantineInstance], str, Path]


class CVLab:
    """Runs jobs from inside the calling process and keeps a record of each one.

    Args:
        directory (str): Where results are written. Defaults to ``FILE_LOCATION`` from the
            environment, then ``'results'``.
        source (str): Producer name used in file names. Defaults to ``SOURCE``, then
            ``'cvlab'``.
        config (Optional[RunConfig]): Settings every job starts from; per-call overrides are
            applied on top. Defaults to ``RunConfig()``.
        save (bool): Whether jobs write their results through a :class:`FileManager`.
        verbose (bool): Whether results and sweep summaries are printed.
        configure_logging (bool): When True, point logging at the CLI's rotating file. Off by
            default because it clears the root logger's handlers.
        log_filepath (str): Log file to configure.
    """

    def __init__(
        self,
        directory: str = FILE_LOCATION,
        source: str = SOURCE,
        *,
        config: Optional[RunConfig] = None,
        save: bool = True,
        verbose: bool = False,
        configure_logging: bool = False,
        log_filepath: str = LOG_FILEPATH,
    ) -> None:
        self._directory = directory
        self._source = source
        self._config = config or RunConfig()
        self._save = save
        self._printer = Printer(verbose=verbose)
        if configure_logging:
            from cvlab.__main__ import setup_logging

            setup_logging(log_filepath)
        self._records: List[Dict[str, Any]] = []
        self._filemanager: Optional[FileManager] = None

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}(directory='{self._directory}', "
            f"source='{self._source}', backend='{self._config.backend}', "
            f"jobs={len(self._records)})"
        )

    @property
    def config(self) -> RunConfig:
        return self._config

    @property
    def printer(self) -> Printer:
        return self._printer

    @property
    def filemanager(self) -> Optional[FileManager]:
        """The FileManager the last job wrote through, or None."""
        return self._filemanager

    @property
    def summary(self) -> pd.DataFrame:
        """One row per job, oldest first.

        Columns: command, topic, start, end, duration, status, output. ``status`` is ``ok``
        or the name of the error that stopped the job; ``output`` is the file written, if any.
        """
        columns = ["command", "topic", "start", "end", "duration", "status", "output"]
        return pd.DataFrame(self._records, columns=columns)

    # -------------------------------------------------------------------------------------------- #
    def run(self, circuit: CircuitSource, span: str = "", **overrides: Any) -> Dict[str, Any]:
        """Simulates one circuit and returns its result record.

        Args:
            circuit: A circuit, or the path of a circuit file.
            span (str): Run label for the output file name.
            **overrides: RunConfig fields to change for this job.

        Raises:
            CVLabError: Any parse, cap, certificate or domain failure. The job is recorded
                before the error propagates.
        """
        config = self._config.with_overrides(**overrides)
        with self._job("run", "run") as job:
            if not isinstance(circuit, CircuitIR):
                circuit = CircuitIR.load(circuit)
            record = run_circuit(circuit, config)
            self._printer.print_record(record, title=f"{config.backend} result")
            if self._save:
                job["output"] = self._write_record(record, config, span)
        return record

    def sweep(
        self,
        experiment: str,
        grid: Mapping[str, Sequence[Any]],
        span: str = "",
        **overrides: Any,
    ) -> pd.DataFrame:
        """Evaluates a named experiment over a grid and returns its table in grid order."""
        config = self._config.with_overrides(**overrides)
        with self._job("sweep", experiment) as job:
            cls = get_experiment(experiment)
            sweep = cls(grid, config=config, printer=self._printer)
            table = sweep.run()
            if self._save:
                self._filemanager = self._create_file_manager(experiment)
                if config.output_format == "csv":
                    path = self._filemanager.write_sweep(table, experiment=experiment, span=span)
                else:
                    path = self._filemanager.write_records(
                        table.to_dict(orient="records"), span=span
                    )
                job["output"] = str(path)
        return table

    def decompose(self, theta: float, xi: float, delta: float, span: str = "") -> GaussianSum:
        """Decomposes V(theta) S_xi|0> into a Gaussian sum and streams it to disk."""
        with self._job("decompose", "decompose") as job:
            gsum = decompose_cubic(theta, xi, delta)
            summary = {
                "theta": theta,
                "xi": xi,
                "delta": delta,
                "rank": gsum.rank,
                "declared_error": gsum.declared_error,
            }
            self._printer.print_dict("Gaussian sum", summary)
            if self._save:
                self._filemanager = self._create_file_manager("decompose")
                job["output"] = str(self._filemanager.write_gaussian_sum(gsum, span=span))
        return gsum

    def solve(self, instances: InstanceSource, span: str = "", **options: Any) -> List[Dict]:
        """Answers Diophantine instances with the adiabatic construction.

        Args:
            instances: One instance, a list of them, or the path of an instance file.
            span (str): Run label for the output file name.
            **options: Keyword arguments for :func:`cvlab.adiabatic.solve_instance`.
        """
        with self._job("solve", "adiabatic") as job:
            if isinstance(instances, (str, Path)):
                instances = load_instances(instances)
            elif isinstance(instances, DiophantineInstance):
                instances = [instances]
            records = [solve_instance(instance, **options) for instance in instances]
            for record in records:
                self._printer.print_record(
                    {k: v for k, v in record.items() if k != "gap_trace"},
                    title=f"Instance {record['name'] or '?'}",
                )
            if self._save:
                self._filemanager = self._create_file_manager("adiabatic")
                job["output"] = str(self._filemanager.write_records(records, span=span))
        return records

    # -------------------------------------------------------------------------------------------- #
    def _write_record(self, record: Dict[str, Any], config: RunConfig, span: str) -> str:
        self._filemanager = self._create_file_manager("run")
        if config.output_format == "csv":
            table = pd.json_normalize(record)
            return str(self._filemanager.write_sweep(table, experiment="run", span=span))
        return str(self._filemanager.write_records([record], span=span))

    def _create_file_manager(self, topic: str) -> FileManager:
        return FileManager(source=self._source, topic=topic, file_location=self._directory)

    def _job(self, command: str, topic: str) -> _Job:
        return _Job(self._records, command, topic)


class _Job:
    """Context manager that appends one summary row when the job ends, raised or not."""

    def __init__(self, records: List[Dict[str, Any]], command: str, topic: str) -> None:
        self._records = records
        self._entry: Dict[str, Any] = {"command": command, "topic": topic, "output": None}

    def __enter__(self) -> Dict[str, Any]:
        self._entry["start"] = datetime.now()
        logger.info(f"Starting {self._entry['command']} ({self._entry['topic']}).")
        return self._entry

    def __exit__(self, exc_type, exc, tb) -> bool:
        end = datetime.now()
        self._entry["end"] = end
        self._entry["duration"] = end - self._entry["start"]
        if exc is None:
            self._entry["status"] = "ok"
        else:
            self._entry["status"] = exc_type.__name__
            if isinstance(exc, CVLabError):
                logger.error(f"{self._entry['command']} failed: {exc}")
        self._records.append(self._entry)
        return False

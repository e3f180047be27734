#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : test_cli.py                                                                         #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 11:41:19 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Tests for cvlab.lab and the cv-lab command line.

The backends are checked on circuits with closed-form readouts: a squeezed vacuum has
P(n = 0) = 1 / cosh r and <n> = sinh^2 r, and homodyne post-selection of one arm of a two-mode
squeezed pair at q = 0 leaves the other arm squeezed with exp(2s) = cosh 2r. Failures must end
in the exit code of their error class.
"""
import inspect
import json
import logging
import math
from datetime import datetime

import pytest

from cvlab.__main__ import app, setup_logging
from cvlab.circuit import CircuitIR, Observable, PhotonNumber, Squeeze
from cvlab.config import RunConfig
from cvlab.errors import CircuitParseError, DomainError
from cvlab.lab import CVLab, run_circuit
from cvlab.persist import FileManager

# ------------------------------------------------------------------------------------------------ #
# pylint: disable=missing-class-docstring, line-too-long, redefined-outer-name
# mypy: ignore-errors
# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
double_line = f"\n{100 * '='}"
single_line = f"\n{100 * '-'}"


# ------------------------------------------------------------------------------------------------ #
def log_start(cls_name: str, test_name: str) -> datetime:
    """Logs the start of a test and returns the start time.

    Args:
        cls_name (str): The name of the test class.
        test_name (str): The name of the test method.

    Returns:
        datetime: The moment the test began, for duration reporting.
    """
    start = datetime.now()
    logger.info(
        f"\n\nStarted {cls_name} {test_name} at {start.strftime('%I:%M:%S %p')} on {start.strftime('%m/%d/%Y')}"
    )
    logger.info(double_line)
    return start


# ------------------------------------------------------------------------------------------------ #
def log_end(cls_name: str, test_name: str, start: datetime) -> None:
    """Logs the completion of a test and its duration.

    Args:
        cls_name (str): The name of the test class.
        test_name (str): The name of the test method.
        start (datetime): The value returned by ``log_start``.
    """
    end = datetime.now()
    duration = round((end - start).total_seconds(), 1)
    logger.info(
        f"\n\nCompleted {cls_name} {test_name} in {duration} seconds at {end.strftime('%I:%M:%S %p')} on {end.strftime('%m/%d/%Y')}"
    )
    logger.info(single_line)
SQUEEZE_R = 0.5
TMS_R = 0.4


def last_record(result) -> dict:
    return json.loads(result.stdout.strip().splitlines()[-1])


def conditioned_vacuum_probability(r: float) -> float:
    es = math.sqrt(math.cosh(2.0 * r))
    return 2.0 / (es + 1.0 / es)


# ------------------------------------------------------------------------------------------------ #
#                                        BACKENDS                                                  #
# ------------------------------------------------------------------------------------------------ #
@pytest.mark.cli
class TestBackends:
    # ============================================================================================ #
    @pytest.mark.parametrize("backend", ["fock", "gaussian", "pathsum"])
    def test_squeezed_vacuum(self, backend, caplog) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        circuit = CircuitIR(1, (Squeeze(0, SQUEEZE_R),), PhotonNumber(0, (0,)))
        record = run_circuit(circuit, RunConfig(backend=backend, threads=1))
        assert record["backend"] == backend
        assert record["gates"] == 1
        expected = 1.0 / math.cosh(SQUEEZE_R)
        assert abs(record["probability"] - expected) <= record["budget"] + 1e-6
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_default_measurement(self, caplog) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        record = run_circuit(CircuitIR(1), RunConfig(threads=1))
        assert record["measurement"] == {"type": "photon_number", "mode": 0, "accept": [0]}
        assert record["probability"] == pytest.approx(1.0)
        assert record["certificate"]["total"] == 0.0
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_observable(self, caplog) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        circuit = CircuitIR(1, (Squeeze(0, SQUEEZE_R),), Observable("n0"))
        expected = math.sinh(SQUEEZE_R) ** 2
        gaussian = run_circuit(circuit, RunConfig(backend="gaussian", threads=1))
        assert gaussian["budget"] == 0.0
        assert gaussian["value"]["re"] == pytest.approx(expected, abs=1e-9)
        fock = run_circuit(circuit, RunConfig(backend="fock", threads=1))
        assert fock["budget"] is None
        assert fock["value"]["re"] == pytest.approx(expected, abs=1e-3)
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_homodyne_renumbers_modes(self, homodyne_file, caplog) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        record = run_circuit(CircuitIR.load(homodyne_file), RunConfig(backend="gaussian"))
        assert record["diagnostics"]["modes"] == [1]
        assert len(record["diagnostics"]["homodyne_densities"]) == 1
        expected = conditioned_vacuum_probability(TMS_R)
        assert abs(record["probability"] - expected) <= record["budget"] + 1e-6
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_gaussian_backend_rejects_cubic(self, cubic_file, caplog) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        with pytest.raises(DomainError):
            run_circuit(CircuitIR.load(cubic_file), RunConfig(backend="gaussian"))
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_fock_rejects_homodyne(self, homodyne_file, caplog) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        with pytest.raises(DomainError):
            run_circuit(CircuitIR.load(homodyne_file), RunConfig(backend="fock"))
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)


# ------------------------------------------------------------------------------------------------ #
#                                       CONTROLLER                                                 #
# ------------------------------------------------------------------------------------------------ #
@pytest.mark.cli
class TestCVLab:
    # ============================================================================================ #
    def test_run_writes_record(self, squeeze_file, tmp_path, caplog) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        lab = CVLab(directory=str(tmp_path / "results"), config=RunConfig(threads=1))
        record = lab.run(squeeze_file, span="unit")
        assert record["backend"] == "fock"
        summary = lab.summary
        assert list(summary.columns) == [
            "command",
            "topic",
            "start",
            "end",
            "duration",
            "status",
            "output",
        ]
        assert summary.loc[0, "status"] == "ok"
        written = list(FileManager("cvlab", "run", str(tmp_path / "results")).read_records("unit"))
        assert written[0]["probability"] == record["probability"]
        assert summary.loc[0, "output"].endswith("cvlab-run-unit.ndjson")
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_overrides_apply_per_job(self, squeeze_file, tmp_path, caplog) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        lab = CVLab(directory=str(tmp_path), save=False, config=RunConfig(threads=1))
        record = lab.run(squeeze_file, backend="gaussian")
        assert record["backend"] == "gaussian"
        assert lab.config.backend == "fock"
        assert lab.summary.loc[0, "output"] is None
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_failed_job_is_recorded(self, tmp_path, caplog) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        lab = CVLab(directory=str(tmp_path), save=False, config=RunConfig(threads=1))
        with pytest.raises(CircuitParseError):
            lab.run(tmp_path / "missing.json")
        lab.run(CircuitIR(1))
        assert lab.summary["status"].tolist() == ["CircuitParseError", "ok"]
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_sweep_and_decompose(self, tmp_path, caplog) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        lab = CVLab(directory=str(tmp_path), config=RunConfig(threads=1))
        table = lab.sweep("tails", {"kind": ["smsv_upper", "smsv_left"]}, output_format="csv")
        assert table["holds"].all()
        restored = FileManager("cvlab", "tails", str(tmp_path)).read_sweep()
        assert restored["kind"].tolist() == ["smsv_upper", "smsv_left"]

        gsum = lab.decompose(0.5, 1.0, 0.1)
        assert FileManager("cvlab", "decompose", str(tmp_path)).read_gaussian_sum().rank == (
            gsum.rank
        )
        assert lab.summary["command"].tolist() == ["sweep", "decompose"]
        assert lab.summary["topic"].tolist() == ["tails", "decompose"]
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)


# ------------------------------------------------------------------------------------------------ #
#                                      COMMAND LINE                                                #
# ------------------------------------------------------------------------------------------------ #
@pytest.mark.cli
class TestCommandLine:
    # ============================================================================================ #
    def test_run(self, runner, squeeze_file, isolated, caplog) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        result = runner.invoke(app, ["run", str(squeeze_file), "--span", "cli"])
        assert result.exit_code == 0, result.output
        record = last_record(result)
        expected = 1.0 / math.cosh(SQUEEZE_R)
        assert abs(record["probability"] - expected) <= record["budget"] + 1e-6
        assert (isolated / "results" / "run" / "cvlab-run-cli.ndjson").exists()
        assert (isolated / "logs" / "cvlab.log").exists()
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_run_gaussian_homodyne(self, runner, homodyne_file, isolated, caplog) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        result = runner.invoke(app, ["run", str(homodyne_file), "-b", "gaussian", "--no-save"])
        assert result.exit_code == 0, result.output
        record = last_record(result)
        assert record["backend"] == "gaussian"
        assert record["diagnostics"]["modes"] == [1]
        assert not (isolated / "results").exists()
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_run_csv(self, runner, squeeze_file, isolated, caplog) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        result = runner.invoke(app, ["run", str(squeeze_file), "-b", "pathsum", "-f", "csv"])
        assert result.exit_code == 0, result.output
        path = isolated / "results" / "run" / "cvlab-run.csv"
        assert path.read_text(encoding="utf-8").splitlines()[0] == "# cvlab-sweep v1 run"
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    @pytest.mark.parametrize(
        "args, code",
        [
            (["run", "{broken}"], 2),
            (["run", "{missing}"], 2),
            (["run", "{squeeze}", "--backend", "mps"], 2),
            (["run", "{cubic}", "--backend", "gaussian"], 1),
            (["run", "{cubic}", "--max-cutoff", "8", "--trunc-eps", "1e-9"], 4),
            (["sweep", "cubic"], 2),
            (["sweep", "tails", "-g", "kind"], 2),
            (["sweep", "tails", "-g", "theta=1"], 2),
        ],
        ids=[
            "malformed",
            "missing",
            "backend",
            "not_gaussian",
            "certificate",
            "experiment",
            "grid_item",
            "grid_key",
        ],
    )
    def test_exit_codes(
        self, runner, args, code, broken_file, squeeze_file, cubic_file, tmp_path, caplog
    ) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        paths = {
            "broken": broken_file,
            "missing": tmp_path / "missing.json",
            "squeeze": squeeze_file,
            "cubic": cubic_file,
        }
        args = [arg.format(**paths) for arg in args]
        result = runner.invoke(app, args + ["--no-save"])
        assert result.exit_code == code, result.output
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_sweep(self, runner, isolated, caplog) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        result = runner.invoke(
            app, ["sweep", "tails", "-g", "kind=smsv_upper,smsv_left,poisson", "-t", "2"]
        )
        assert result.exit_code == 0, result.output
        assert "tails: 3 point(s), 1 failed" in result.stdout
        path = isolated / "results" / "tails" / "cvlab-tails.csv"
        table = FileManager("cvlab", "tails", str(isolated / "results")).read_sweep(filepath=path)
        assert table["status"].tolist() == ["ok", "ok", "DomainError"]
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_decompose(self, runner, isolated, caplog) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        result = runner.invoke(
            app, ["decompose", "--theta", "0.5", "--xi", "1", "--delta", "0.1", "--no-save"]
        )
        assert result.exit_code == 0, result.output
        record = last_record(result)
        assert record["rank"] >= 1
        assert record["declared_error"] <= 0.1 + 1e-9
        assert record["output"] is None
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_adiabatic_solve(self, runner, caplog) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        args = ["adiabatic", "solve", "--alpha", "2", "--beta", "4", "--gamma", "7"]
        result = runner.invoke(app, args + ["--tau", "50", "--steps", "200", "--no-save"])
        assert result.exit_code == 0, result.output
        record = last_record(result)
        assert record["expected"] == "NO"
        assert record["answer"] == "NO"
        assert "gap_trace" not in record
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_setup_logging(self, isolated, caplog) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        log_filepath = isolated / "other" / "cvlab.log"
        setup_logging(str(log_filepath))
        setup_logging(str(log_filepath))
        root = logging.getLogger()
        assert len(root.handlers) == 1
        assert root.level == logging.INFO
        assert log_filepath.exists()
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

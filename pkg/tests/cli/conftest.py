#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : conftest.py                                                                         #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 11:38:52 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Fixtures for the controller and the command line: circuit files and an isolated log/results
location for every test."""
import json
import logging
import logging.handlers

import pytest
from typer.testing import CliRunner

# ------------------------------------------------------------------------------------------------ #
# pylint: disable=redefined-outer-name, unused-argument
# mypy: ignore-errors
# ------------------------------------------------------------------------------------------------ #
SQUEEZE_R = 0.5
TMS_R = 0.4


def _write(path, document):
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


# ------------------------------------------------------------------------------------------------ #
@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    """Points the CLI's log file and results directory into tmp_path.

    The commands point the root logger at a rotating file; that handler is closed and the
    level restored after each test.
    """
    root = logging.getLogger()
    level = root.level
    monkeypatch.setattr("cvlab.__main__.LOG_FILEPATH", str(tmp_path / "logs" / "cvlab.log"))
    monkeypatch.setattr("cvlab.__main__.FILE_LOCATION", str(tmp_path / "results"))
    monkeypatch.delenv("LOG_TO_CONSOLE", raising=False)
    yield tmp_path
    for handler in root.handlers[:]:
        if isinstance(handler, logging.handlers.TimedRotatingFileHandler):
            root.removeHandler(handler)
            handler.close()
    root.setLevel(level)


# ------------------------------------------------------------------------------------------------ #
@pytest.fixture
def runner():
    return CliRunner()


# ------------------------------------------------------------------------------------------------ #
@pytest.fixture
def squeeze_file(tmp_path):
    """Vacuum squeezed by r = 1/2, read out as P(n = 0) = 1 / cosh r."""
    return _write(
        tmp_path / "squeeze.json",
        {
            "format": "cvlab-circuit",
            "version": 1,
            "num_modes": 1,
            "gates": [{"gate": "squeeze", "mode": 0, "z": SQUEEZE_R}],
            "measurement": {"type": "photon_number", "mode": 0, "accept": [0]},
        },
    )


# ------------------------------------------------------------------------------------------------ #
@pytest.fixture
def homodyne_file(tmp_path):
    """A two-mode squeezed pair with mode 0 post-selected at q = 0."""
    return _write(
        tmp_path / "homodyne.json",
        {
            "format": "cvlab-circuit",
            "version": 1,
            "num_modes": 2,
            "gates": [
                {"gate": "two_mode_squeeze", "i": 0, "j": 1, "r": TMS_R},
                {"gate": "homodyne", "mode": 0, "q": 0.0},
            ],
            "measurement": {"type": "photon_number", "mode": 1, "accept": [0]},
        },
    )


# ------------------------------------------------------------------------------------------------ #
@pytest.fixture
def cubic_file(tmp_path):
    return _write(
        tmp_path / "cubic.json",
        {
            "format": "cvlab-circuit",
            "version": 1,
            "num_modes": 1,
            "gates": [{"gate": "cubic", "mode": 0, "theta": 1.0}],
        },
    )


# ------------------------------------------------------------------------------------------------ #
@pytest.fixture
def broken_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"format": "cvlab-circuit", "version": 1,', encoding="utf-8")
    return path

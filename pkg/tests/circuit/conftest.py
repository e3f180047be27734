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
# Created    : Sunday October 18th 2026 11:14:02 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Fixtures for the circuit representation tests."""
import copy
from typing import Any, Dict

import pytest

from cvlab.circuit import (
    Beamsplitter,
    Displace,
    Fourier,
    QuadraticPhase,
    Rotate,
    Squeeze,
    Sum,
    TwoModeSqueeze,
)

# ------------------------------------------------------------------------------------------------ #
# pylint: disable=missing-class-docstring, redefined-outer-name
# mypy: ignore-errors
# ------------------------------------------------------------------------------------------------ #
DOCUMENT: Dict[str, Any] = {
    "format": "cvlab-circuit",
    "version": 1,
    "num_modes": 2,
    "gates": [
        {"gate": "squeeze", "mode": 0, "z": "1/2^2"},
        {"gate": "beamsplitter", "i": 0, "j": 1, "theta": 0.3},
        {"gate": "cubic", "mode": 1, "theta": "3/2^3"},
        {"gate": "kerr", "mode": 0, "chi": 0.1, "time": 2.0},
        {"gate": "custom", "H": "ad0 a1 + a0 ad1", "time": 0.5},
    ],
    "measurement": {"type": "photon_number", "mode": 0, "accept": {"min": 0, "max": 2}},
}

GAUSSIAN_GATES = [
    Squeeze(0, 0.3),
    Displace(0, 0.2, -0.1),
    Rotate(1, 0.7),
    Fourier(0),
    QuadraticPhase(1, 0.4),
    Sum(0, 1, 0.5),
    Beamsplitter(0, 1, 0.6),
    TwoModeSqueeze(0, 1, 0.25),
]


@pytest.fixture
def document() -> Dict[str, Any]:
    """A circuit document touching every parameter form; safe to mutate."""
    return copy.deepcopy(DOCUMENT)


@pytest.fixture(params=GAUSSIAN_GATES, ids=lambda gate: gate.kind)
def gaussian_gate(request):
    return request.param

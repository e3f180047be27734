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
# Created    : Sunday October 18th 2026 11:31:05 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Fixtures for the sweep driver: a seeded toy experiment and small analytic grids."""
from typing import Any, Dict

import numpy as np
import pytest

from cvlab.errors import DomainError
from cvlab.experiment import Experiment

# ------------------------------------------------------------------------------------------------ #
# pylint: disable=missing-class-docstring, redefined-outer-name, unused-argument
# mypy: ignore-errors
# ------------------------------------------------------------------------------------------------ #
TAIL_KINDS = ["tmsv_lower", "tmsv_upper", "smsv_upper", "smsv_left", "smsv_small"]


class Draw(Experiment):
    name = "draw"
    defaults = {"scale": 1.0, "fail": 0}

    def evaluate(self, point: Dict[str, Any], rng: np.random.Generator) -> Dict[str, Any]:
        if point["fail"]:
            raise DomainError("asked to fail")
        return {"draw": float(rng.normal()) * float(point["scale"])}


# ------------------------------------------------------------------------------------------------ #
@pytest.fixture(scope="session")
def draw_grid():
    return {"scale": [1.0, 2.0], "fail": [0, 1]}


# ------------------------------------------------------------------------------------------------ #
@pytest.fixture(scope="session")
def tails_grid():
    """Every tail bound at the default parameters, all inside their domains."""
    return {"kind": TAIL_KINDS}


# ------------------------------------------------------------------------------------------------ #
@pytest.fixture(scope="session")
def draw():
    """A toy experiment whose only output is a draw from its per-point generator."""
    return Draw

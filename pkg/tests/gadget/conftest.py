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
# Created    : Sunday October 18th 2026 11:08:55 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Fixtures for the cubic-gate teleportation tests."""
import pytest

from cvlab import focksim
from cvlab.grank import cubic_state_wavefunction

# ------------------------------------------------------------------------------------------------ #
# pylint: disable=missing-class-docstring, redefined-outer-name
# mypy: ignore-errors
# ------------------------------------------------------------------------------------------------ #
CUTOFF = 30


@pytest.fixture
def vacuum_input() -> focksim.FockState:
    return focksim.vacuum([CUTOFF])


@pytest.fixture
def cubic_target():
    """V(theta)|0> projected on the output box."""

    def build(theta: float) -> focksim.FockState:
        return focksim.from_wavefunction(cubic_state_wavefunction(theta, 1.0), (CUTOFF,))

    return build

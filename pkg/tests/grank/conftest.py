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
# Created    : Sunday October 18th 2026 11:03:28 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Fixtures for the Gaussian-rank decomposition tests."""
import numpy as np
import pytest

from cvlab.grank import GaussianSum, decompose_cubic

# ------------------------------------------------------------------------------------------------ #
# pylint: disable=missing-class-docstring, redefined-outer-name
# mypy: ignore-errors
# ------------------------------------------------------------------------------------------------ #


@pytest.fixture(scope="module")
def cubic_sum() -> GaussianSum:
    """V(1) S_1 |0> to within 0.1."""
    return decompose_cubic(1.0, 1.0, 0.1)


@pytest.fixture
def l2_distance():
    """Trapezoid L2 distance between two callables on a wide grid."""

    def distance(f, g, half_width: float = 10.0, points: int = 8001) -> float:
        x = np.linspace(-half_width, half_width, points)
        diff = np.abs(f(x) - g(x)) ** 2
        return float(np.sqrt(np.trapezoid(diff, x)))

    return distance

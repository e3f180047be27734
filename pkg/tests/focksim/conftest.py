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
# Created    : Sunday October 18th 2026 10:51:20 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Fixtures for the truncated Fock simulator tests."""
import numpy as np
import pytest

from cvlab.algebra import PolyOp

# ------------------------------------------------------------------------------------------------ #
# pylint: disable=missing-class-docstring, redefined-outer-name
# mypy: ignore-errors
# ------------------------------------------------------------------------------------------------ #


@pytest.fixture
def hopping() -> PolyOp:
    """a0^dag a1 + a0 a1^dag. Conserves the total photon number."""
    return PolyOp.ladder(2, 0, dagger=True) * PolyOp.ladder(2, 1) + PolyOp.ladder(
        2, 0
    ) * PolyOp.ladder(2, 1, dagger=True)


@pytest.fixture
def cubic() -> PolyOp:
    """X^3 on one mode, the simplest Hamiltonian that leaves every finite box."""
    return PolyOp.quad_x(1, 0) ** 3


@pytest.fixture
def ground_wavefunction():
    """The oscillator ground state pi^(-1/4) exp(-x^2/2)."""

    def psi(x: np.ndarray) -> np.ndarray:
        return np.pi**-0.25 * np.exp(-0.5 * x**2)

    return psi

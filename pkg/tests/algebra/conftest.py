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
# Created    : Sunday October 18th 2026 10:46:02 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Fixtures for the operator algebra tests.

Oracles here are built independently of :mod:`cvlab.algebra`: dense single-mode ladder
matrices come straight from sqrt(n) on the off-diagonal, and multi-mode operators are formed
with ``numpy.kron`` in the documented mode-0-fastest order.
"""
from typing import Callable

import numpy as np
import pytest

from cvlab.algebra import PolyOp

# ------------------------------------------------------------------------------------------------ #
# pylint: disable=missing-class-docstring, redefined-outer-name
# mypy: ignore-errors
# ------------------------------------------------------------------------------------------------ #


# ------------------------------------------------------------------------------------------------ #
#                                      DENSE ORACLES                                               #
# ------------------------------------------------------------------------------------------------ #
@pytest.fixture
def dense_a() -> Callable[[int], np.ndarray]:
    """Returns a builder of the annihilation matrix on photon numbers 0..cutoff."""

    def build(cutoff: int) -> np.ndarray:
        return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), k=1).astype(complex)

    return build


@pytest.fixture
def dense_x(dense_a) -> Callable[[int], np.ndarray]:
    """Returns a builder of X = (a + a^dag)/sqrt(2) on photon numbers 0..cutoff."""

    def build(cutoff: int) -> np.ndarray:
        a = dense_a(cutoff)
        return (a + a.conj().T) / np.sqrt(2.0)

    return build


# ------------------------------------------------------------------------------------------------ #
#                                       OPERATORS                                                  #
# ------------------------------------------------------------------------------------------------ #
@pytest.fixture
def x0() -> PolyOp:
    """Position quadrature of a single mode."""
    return PolyOp.quad_x(1, 0)


@pytest.fixture
def p0() -> PolyOp:
    """Momentum quadrature of a single mode."""
    return PolyOp.quad_p(1, 0)


@pytest.fixture
def two_mode_hopping() -> PolyOp:
    """a0^dag a1 + a0 a1^dag, the Hermitian beam-splitter generator."""
    a0, a1 = PolyOp.ladder(2, 0), PolyOp.ladder(2, 1)
    return PolyOp.ladder(2, 0, dagger=True) * a1 + a0 * PolyOp.ladder(2, 1, dagger=True)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for random coefficients."""
    return np.random.default_rng(7)

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
# Created    : Sunday October 18th 2026 10:57:05 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Fixtures for the Gaussian simulator tests.

Fock-basis references are built with :mod:`cvlab.focksim` on a box large enough that
truncation is invisible at the compared tolerance, then cut back to the comparison box.
"""
import math

import numpy as np
import pytest

from cvlab import focksim
from cvlab.algebra import PolyOp
from cvlab.circuit import Beamsplitter, Displace, QuadraticPhase, Rotate, Squeeze, Sum

# ------------------------------------------------------------------------------------------------ #
# pylint: disable=missing-class-docstring, redefined-outer-name
# mypy: ignore-errors
# ------------------------------------------------------------------------------------------------ #
REFERENCE_CUTOFF = 60


@pytest.fixture
def displacement_hamiltonian():
    """Builds H with exp(-i H) = D(beta)."""

    def build(beta: complex) -> PolyOp:
        a, ad = PolyOp.ladder(1, 0), PolyOp.ladder(1, 0, dagger=True)
        return ad * (1j * beta) + a * (-1j * np.conj(beta))

    return build


@pytest.fixture
def fock_reference(displacement_hamiltonian) -> focksim.FockState:
    """quadratic_phase(0.5) D(0.3 + 0.2i) S(0.4)|0>, evolved in the number basis."""
    state = focksim.squeezed_vacuum(0.4, REFERENCE_CUTOFF)
    state = focksim.evolve_truncated(state, displacement_hamiltonian(0.3 + 0.2j), 1.0)
    shear = PolyOp.quad_x(1, 0) ** 2 * (-0.25)
    return focksim.evolve_truncated(state, shear, 1.0)


@pytest.fixture
def random_two_mode_gates():
    """Seeded two-mode gate lists from every Gaussian family, with a blocksqueezing layer."""

    def build(seed: int):
        rng = np.random.default_rng(seed)

        def u(bound: float) -> float:
            return float(rng.uniform(-bound, bound))

        gates = [
            Squeeze(0, u(0.3)),
            Displace(1, u(0.4), u(0.4)),
            Beamsplitter(0, 1, u(1.0)),
            Sum(0, 1, u(0.4)),
            QuadraticPhase(1, u(0.3)),
            Rotate(0, u(math.pi)),
        ]
        order = rng.permutation(len(gates))
        return [gates[k] for k in order], np.array([u(0.3), u(0.3)])

    return build

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
# Created    : Sunday October 18th 2026 11:23:04 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Fixtures for the energy growth tests."""
import pytest

from cvlab import focksim

# ------------------------------------------------------------------------------------------------ #
# pylint: disable=redefined-outer-name
# mypy: ignore-errors
# ------------------------------------------------------------------------------------------------ #
CUTOFF = 80


@pytest.fixture
def run_gates():
    """Applies circuit gates to vacuum in the number basis and returns <N> after each."""

    def run(gates, cutoff: int = CUTOFF):
        state = focksim.vacuum([cutoff])
        energies = []
        for gate in gates:
            H, t = gate.hamiltonian(1)
            state = focksim.evolve_truncated(state, H, t)
            energies.append(focksim.mean_photon_number(state))
        return energies

    return run


@pytest.fixture
def tail_cases():
    """(kind, params) pairs inside each bound's domain."""
    return [
        ("tmsv_lower", {"nbar": 4.0, "m": 2.0}),
        ("tmsv_upper", {"nbar": 4.0, "k": 3.0}),
        ("smsv_upper", {"nbar": 2.0, "k": 2.0}),
        ("smsv_left", {"nbar": 3.0, "k": 2.0}),
        ("smsv_small", {"r": 0.5, "k": 4.0}),
    ]

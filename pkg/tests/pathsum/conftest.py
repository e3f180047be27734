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
# Created    : Sunday October 18th 2026 11:18:30 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Fixtures for the Gaussian path-sum tests."""
import numpy as np
import pytest

from cvlab import focksim
from cvlab.circuit import CircuitIR, Cubic, Displace, Rotate, Squeeze
from cvlab.grank import cubic_state_wavefunction

# ------------------------------------------------------------------------------------------------ #
# pylint: disable=redefined-outer-name
# mypy: ignore-errors
# ------------------------------------------------------------------------------------------------ #
ORACLE_CUTOFF = 60


@pytest.fixture
def cubic_circuit():
    """A single cubic gate on vacuum, optionally read out by photon counting."""

    def build(theta: float, measurement=None) -> CircuitIR:
        return CircuitIR(1, (Cubic(0, theta),), measurement)

    return build


@pytest.fixture
def squeeze_circuit() -> CircuitIR:
    return CircuitIR(1, (Squeeze(0, 0.5),))


@pytest.fixture
def ideal_cubic_vacuum():
    """V(theta)|0> in the number basis; vacuum is the width-1 cubic-phase state."""

    def build(theta: float, cutoff: int = 40) -> focksim.FockState:
        wavefunction = cubic_state_wavefunction(theta, 1.0)
        return focksim.from_wavefunction(wavefunction, (cutoff,)).normalized()

    return build


@pytest.fixture
def fock_oracle():
    """Runs a single-mode circuit gate by gate in a generous fixed box."""

    def run(circuit: CircuitIR) -> focksim.FockState:
        state = focksim.vacuum([ORACLE_CUTOFF])
        for gate in circuit.gates:
            H, t = gate.hamiltonian(circuit.num_modes)
            state = focksim.evolve_truncated(state, H, t)
        return state.normalized()

    return run


@pytest.fixture
def random_cubic_circuits():
    """Seeded single-mode circuits: a Gaussian layer, one weak cubic gate, a Gaussian layer."""

    def build(count: int, seed: int = 2026):
        rng = np.random.default_rng(seed)
        circuits = []
        for _ in range(count):
            gates = (
                Squeeze(0, float(rng.uniform(-0.3, 0.3))),
                Displace(0, float(rng.uniform(-0.3, 0.3)), float(rng.uniform(-0.3, 0.3))),
                Cubic(0, float(rng.uniform(0.1, 0.4))),
                Rotate(0, float(rng.uniform(0.0, np.pi))),
                Squeeze(0, float(rng.uniform(-0.2, 0.2))),
            )
            circuits.append(CircuitIR(1, gates))
        return circuits

    return build

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
# Created    : Sunday October 18th 2026 11:27:15 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Fixtures for the adiabatic Diophantine solver tests."""
import json

import pytest

from cvlab.adiabatic import DiophantineInstance, build_adiabatic, manders_adleman

# ------------------------------------------------------------------------------------------------ #
# pylint: disable=redefined-outer-name
# mypy: ignore-errors
# ------------------------------------------------------------------------------------------------ #


@pytest.fixture
def shifted_root() -> DiophantineInstance:
    """x - 1 on {0, 1, 2}."""
    return DiophantineInstance({(1,): 1, (0,): -1}, (2,), name="shifted-root")


@pytest.fixture
def pair() -> DiophantineInstance:
    """x - 1 on {0, 1}: the smallest connected box."""
    return DiophantineInstance({(1,): 1, (0,): -1}, (1,), name="pair")


@pytest.fixture
def shifted_root_hamiltonian(shifted_root):
    return build_adiabatic(shifted_root)


@pytest.fixture
def solvable() -> DiophantineInstance:
    """x1^2 + x2 = 1, solved by (1, 0) and (0, 1)."""
    return manders_adleman(1, 1, 1)


@pytest.fixture
def unsolvable() -> DiophantineInstance:
    """2 x1^2 + 4 x2 = 7 has no solution: the left side is even."""
    return manders_adleman(2, 4, 7)


@pytest.fixture
def instance_file(tmp_path, solvable, unsolvable):
    path = tmp_path / "instances.json"
    data = {"instances": [solvable.to_dict(), unsolvable.to_dict()]}
    path.write_text(json.dumps(data), encoding="utf-8")
    return path

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
# Created    : Sunday October 18th 2026 11:35:10 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Fixtures for result files: a file manager rooted in a temporary directory and sample data."""
import pandas as pd
import pytest

from cvlab.grank import decompose_cubic
from cvlab.persist import FileManager

# ------------------------------------------------------------------------------------------------ #
# pylint: disable=redefined-outer-name
# mypy: ignore-errors
# ------------------------------------------------------------------------------------------------ #


@pytest.fixture(scope="function")
def filemanager(tmp_path):
    return FileManager("cvlab", "Tails", file_location=str(tmp_path))


# ------------------------------------------------------------------------------------------------ #
@pytest.fixture(scope="function")
def sweep_table():
    return pd.DataFrame(
        {
            "index": [0, 1],
            "kind": ["smsv_upper", "smsv_left"],
            "bound": [0.25, 0.5],
            "exact": [0.125, 0.25],
            "holds": [True, True],
            "status": ["ok", "ok"],
        }
    )


# ------------------------------------------------------------------------------------------------ #
@pytest.fixture(scope="session")
def cubic_sum():
    """A small cubic-state decomposition to stream to disk and back."""
    return decompose_cubic(0.5, 1.0, 0.1)

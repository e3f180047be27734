#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : __init__.py                                                                         #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 04:12:09 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
# type: ignore[attr-defined]
"""A continuous-variable bosonic circuit laboratory: truncated-Fock simulation with error certificates, phase-tracked Gaussian simulation, Gaussian-rank path sums, energy-growth analytics and a desk-scale adiabatic Diophantine demo."""

from importlib import metadata as importlib_metadata


def get_version() -> str:
    try:
        return importlib_metadata.version("cv-lab")
    except importlib_metadata.PackageNotFoundError:  # pragma: no cover
        return "unknown"


version: str = get_version()
APP_NAME = "CVLab"

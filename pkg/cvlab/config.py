#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : config.py                                                                           #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 04:16:40 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Run configuration for CV Lab.

A :class:`RunConfig` bundles every knob a run or sweep needs: which backend simulates the
circuit, the error targets handed to the truncation and path-sum machinery, the hard caps that
keep a request at desk scale, the seed, the output format and the parallelism width. Defaults
come from :mod:`cvlab.constants`; the thread count can also be set through ``CVLAB_THREADS``.
"""
from __future__ import annotations

import logging
import os
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict

from dotenv import load_dotenv

from cvlab.constants import (
    DEFAULT_BRANCH_CAP,
    DEFAULT_MAX_CUTOFF,
    DEFAULT_MAX_DIM,
    DEFAULT_SEED,
    DEFAULT_THREADS,
)
from cvlab.errors import ConfigError

# ------------------------------------------------------------------------------------------------ #
load_dotenv()
# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
BACKENDS = ("fock", "gaussian", "pathsum")
OUTPUT_FORMATS = ("json", "csv")


# ------------------------------------------------------------------------------------------------ #
def threads_from_env() -> int:
    """Returns the parallelism width named by ``CVLAB_THREADS``.

    Raises:
        ConfigError: If the variable is set but is not a positive integer.
    """
    raw = os.getenv("CVLAB_THREADS")
    if raw is None or raw.strip() == "":
        return DEFAULT_THREADS
    try:
        threads = int(raw)
    except ValueError as e:
        raise ConfigError(f"CVLAB_THREADS must be an integer, got {raw!r}.") from e
    if threads < 1:
        raise ConfigError(f"CVLAB_THREADS must be at least 1, got {threads}.")
    return threads


# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class RunConfig:
    """Settings shared by ``run`` and ``sweep``.

    Args:
        backend (str): One of ``fock``, ``gaussian`` or ``pathsum``.
        trunc_eps (float): Target error for adaptive Fock truncation, in (0, 1).
        sum_delta (float): Target error for Gaussian-rank decompositions, in (0, 1).
        max_dim (int): Cap on dense matrix dimension.
        max_cutoff (int): Cap on the per-mode Fock cutoff reached by cutoff doubling.
        branch_cap (int): Cap on the number of path-sum branch pairs.
        seed (int): Seed for every random draw made during the run.
        output_format (str): ``json`` or ``csv``.
        threads (int): Parallelism width. Output order never depends on it.

    Raises:
        ConfigError: If any value is out of range.
    """

    backend: str = "fock"
    trunc_eps: float = 1e-4
    sum_delta: float = 1e-2
    max_dim: int = DEFAULT_MAX_DIM
    max_cutoff: int = DEFAULT_MAX_CUTOFF
    branch_cap: int = DEFAULT_BRANCH_CAP
    seed: int = DEFAULT_SEED
    output_format: str = "json"
    threads: int = field(default_factory=threads_from_env)

    def __post_init__(self) -> None:
        if self.backend not in BACKENDS:
            raise ConfigError(f"Unknown backend {self.backend!r}; expected one of {BACKENDS}.")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(
                f"Unknown output format {self.output_format!r}; expected one of {OUTPUT_FORMATS}."
            )
        for name in ("trunc_eps", "sum_delta"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ConfigError(f"{name} must lie in (0, 1), got {value}.")
        for name in ("max_dim", "max_cutoff", "branch_cap", "threads"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value}.")
        if self.seed < 0:
            raise ConfigError(f"seed must be nonnegative, got {self.seed}.")

    def with_overrides(self, **overrides: Any) -> RunConfig:
        """Returns a copy with the given fields replaced and revalidated."""
        try:
            return replace(self, **overrides)
        except TypeError as e:
            raise ConfigError(str(e)) from e

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)

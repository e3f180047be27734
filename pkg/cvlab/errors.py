#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : errors.py                                                                           #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 03:58:12 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Exception hierarchy for CV Lab.

Every failure the library raises on purpose derives from :class:`CVLabError` and carries the
process exit code the command line maps it to. The numbers are part of the CLI contract:
2 for input that could not be understood, 3 for a request larger than the configured caps,
4 for a truncation certificate that could not be met.
"""
from __future__ import annotations

from typing import Optional


# ------------------------------------------------------------------------------------------------ #
class CVLabError(Exception):
    """Base class for every error raised deliberately by the package."""

    exit_code: int = 1


# ------------------------------------------------------------------------------------------------ #
class ConfigError(CVLabError, ValueError):
    """A run configuration or option value is out of range."""

    exit_code = 2


class CircuitParseError(CVLabError, ValueError):
    """A circuit or instance file is malformed.

    Args:
        message (str): What was wrong.
        location (Optional[str]): Where in the file, for example ``gates[3].theta``.
    """

    exit_code = 2

    def __init__(self, message: str, location: Optional[str] = None) -> None:
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class ModeMismatchError(CVLabError, ValueError):
    """Operands act on different numbers of modes."""


# ------------------------------------------------------------------------------------------------ #
class CapExceededError(CVLabError):
    """A dimension, cutoff, term or branch count exceeds its configured cap.

    Args:
        what (str): The quantity that overflowed.
        requested (float): The size the request needed.
        cap (float): The configured ceiling.
    """

    exit_code = 3

    def __init__(self, what: str, requested: float, cap: float) -> None:
        self.what = what
        self.requested = requested
        self.cap = cap
        super().__init__(f"{what} of {requested:,} exceeds the cap of {cap:,}.")


class CertificateNotMetError(CVLabError):
    """Adaptive truncation reached the cutoff cap without meeting its target.

    Args:
        best_delta (float): The smallest certified error reached.
        cutoff (int): The last cutoff tried.
        target (float): The requested error.
    """

    exit_code = 4

    def __init__(self, best_delta: float, cutoff: int, target: float) -> None:
        self.best_delta = best_delta
        self.cutoff = cutoff
        self.target = target
        super().__init__(
            f"Certified error {best_delta:.3e} at cutoff {cutoff} misses the target {target:.3e}; "
            "the evolution may have unbounded energy."
        )


# ------------------------------------------------------------------------------------------------ #
class NonSymplecticError(CVLabError, ValueError):
    """A gate matrix fails S Omega S^T = Omega."""


class IllConditionedError(CVLabError):
    """A matrix to be inverted is too ill-conditioned to trust.

    Args:
        context (str): The operation that needed the inverse.
        condition (float): The measured condition number.
    """

    def __init__(self, context: str, condition: float) -> None:
        self.context = context
        self.condition = condition
        super().__init__(f"{context}: condition number {condition:.3e} exceeds the guard.")


class PostselectionError(CVLabError):
    """A post-selected branch has vanishing norm or an undefined density."""


class SolverError(CVLabError):
    """A numerical solver failed or its result failed its own check.

    Args:
        message (str): What failed.
        residual (Optional[float]): The residual that exceeded tolerance, when there is one.
    """

    def __init__(self, message: str, residual: Optional[float] = None) -> None:
        self.residual = residual
        suffix = f" (residual {residual:.3e})" if residual is not None else ""
        super().__init__(f"{message}{suffix}")


class DomainError(CVLabError, ValueError):
    """Parameters lie outside the regime an analysis covers."""

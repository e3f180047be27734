#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : test_gadget.py                                                                      #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 11:10:41 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Tests for cvlab.gadget.

For a vacuum input the branch density at q = 0 has the closed form
1/(sqrt(pi) xi sqrt(1 + 1/xi^2)), independent of the cubic strength, which pins down the
success normalization. The certified bound is checked against the trace distance proxy
sqrt(2 (1 - sqrt(F))) between the gadget output and V(theta) applied directly.
"""
import inspect
import logging
import math
from datetime import datetime

import numpy as np
import pytest

from cvlab import focksim
from cvlab.errors import DomainError, ModeMismatchError, PostselectionError
from cvlab.gadget import (
    POSTSELECT_ZERO,
    SAMPLE,
    q_window,
    teleport_cubic,
    xi_threshold,
    z_bracket,
    z_lambda,
)
from cvlab.gausssim import vacuum
from cvlab.grank import GaussianSum

# ------------------------------------------------------------------------------------------------ #
# pylint: disable=missing-class-docstring, line-too-long, redefined-outer-name
# mypy: ignore-errors
# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
double_line = f"\n{100 * '='}"
single_line = f"\n{100 * '-'}"


# ------------------------------------------------------------------------------------------------ #
def log_start(cls_name: str, test_name: str) -> datetime:
    """Logs the start of a test and returns the start time.

    Args:
        cls_name (str): The name of the test class.
        test_name (str): The name of the test method.

    Returns:
        datetime: The moment the test began, for duration reporting.
    """
    start = datetime.now()
    logger.info(
        f"\n\nStarted {cls_name} {test_name} at {start.strftime('%I:%M:%S %p')} on {start.strftime('%m/%d/%Y')}"
    )
    logger.info(double_line)
    return start


# ------------------------------------------------------------------------------------------------ #
def log_end(cls_name: str, test_name: str, start: datetime) -> None:
    """Logs the completion of a test and its duration.

    Args:
        cls_name (str): The name of the test class.
        test_name (str): The name of the test method.
        start (datetime): The value returned by ``log_start``.
    """
    end = datetime.now()
    duration = round((end - start).total_seconds(), 1)
    logger.info(
        f"\n\nCompleted {cls_name} {test_name} in {duration} seconds at {end.strftime('%I:%M:%S %p')} on {end.strftime('%m/%d/%Y')}"
    )
    logger.info(single_line)


# ------------------------------------------------------------------------------------------------ #
#                                      FOCK PATH                                                   #
# ------------------------------------------------------------------------------------------------ #
@pytest.mark.gadget
class TestTeleportFock:
    # ============================================================================================ #
    def test_branch_density_at_zero(self, vacuum_input) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        xi = 4.0
        expected = 1.0 / (math.sqrt(math.pi) * xi * math.sqrt(1.0 + 1.0 / xi**2))
        _, report = teleport_cubic(vacuum_input, 0.3, xi, POSTSELECT_ZERO)
        low, high = z_bracket(xi, z_lambda(xi, 0.0))

        assert report.q == 0.0
        assert report.Z == pytest.approx(expected, rel=1e-6)
        assert low <= report.Z <= high
        assert not report.flagged
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_output_within_certified_bound(self, vacuum_input, cubic_target) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        theta = 0.2
        output, report = teleport_cubic(vacuum_input, theta, 8.0)
        fid = focksim.fidelity(output, cubic_target(theta))
        error = math.sqrt(max(0.0, 2.0 * (1.0 - math.sqrt(fid))))

        assert report.path == "fock"
        assert error <= report.eps_bound + 1e-3, f"{error:.3e} vs bound {report.eps_bound:.3e}"
        assert output.norm == pytest.approx(1.0, abs=1e-12)
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_wider_ancilla_tightens_bound(self, vacuum_input) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        _, narrow = teleport_cubic(vacuum_input, 0.2, 2.0)
        _, wide = teleport_cubic(vacuum_input, 0.2, 8.0)

        assert wide.eps_bound < narrow.eps_bound
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_outcome_outside_window_is_flagged(self, vacuum_input) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        _, report = teleport_cubic(vacuum_input, 0.1, 1.0, q_policy=4.0, flag_delta=0.5)

        assert report.q == 4.0
        assert 4.0 > q_window(1.0, 0.5)
        assert report.flagged
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_vanishing_branch_raises(self, vacuum_input) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        with pytest.raises(PostselectionError):
            teleport_cubic(vacuum_input, 0.1, 1.0, q_policy=9.0)
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_sampled_outcome_is_reproducible(self, vacuum_input) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        _, first = teleport_cubic(vacuum_input, 0.2, 2.0, SAMPLE, rng=np.random.default_rng(5))
        _, again = teleport_cubic(vacuum_input, 0.2, 2.0, SAMPLE, rng=np.random.default_rng(5))

        assert first.q == again.q
        assert first.Z > 0.0
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_invalid_arguments_raise(self, vacuum_input) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        with pytest.raises(DomainError):
            teleport_cubic(vacuum_input, 0.2, 0.0)
        with pytest.raises(DomainError):
            teleport_cubic(vacuum_input, 0.2, 2.0, q_policy="guess")
        with pytest.raises(ModeMismatchError):
            teleport_cubic(vacuum_input, 0.2, 2.0, mode=1)
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)


# ------------------------------------------------------------------------------------------------ #
#                                    GAUSSIAN PATH                                                 #
# ------------------------------------------------------------------------------------------------ #
@pytest.mark.gadget
class TestTeleportGaussian:
    # ============================================================================================ #
    def test_gaussian_path_agrees_with_fock_path(self, vacuum_input) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        theta, xi = 0.2, 2.0
        fock_out, fock_report = teleport_cubic(vacuum_input, theta, xi)
        gauss_out, gauss_report = teleport_cubic(GaussianSum.single(vacuum(1)), theta, xi)
        fid = focksim.fidelity(gauss_out.to_fock([30]), fock_out)

        assert gauss_report.path == "gaussian"
        assert gauss_report.ancilla_error <= 1e-2 + 1e-9
        assert gauss_out.norm() == pytest.approx(1.0, abs=1e-9)
        assert gauss_report.Z == pytest.approx(fock_report.Z, rel=5e-2)
        assert fid >= 0.99, f"fidelity between paths {fid:.5f}"
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)


# ------------------------------------------------------------------------------------------------ #
#                                    ANALYTIC BOUNDS                                               #
# ------------------------------------------------------------------------------------------------ #
@pytest.mark.gadget
class TestBounds:
    # ============================================================================================ #
    def test_xi_threshold_formula(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        eps, delta = 0.1, 0.2
        expected = 8.0 * 10.0 * math.exp(0.5 * math.log(10.0) ** 2) * math.log(5.0) ** 2

        assert xi_threshold(1.0, eps, delta) == pytest.approx(expected)
        assert xi_threshold(2.0, eps, delta) == pytest.approx(2 * expected)
        with pytest.raises(DomainError):
            xi_threshold(1.0, 1.5, delta)
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_q_window_grows_with_confidence(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        assert q_window(1.0, 1e-3) > q_window(1.0, 1e-1)
        assert q_window(2.0, 1e-2) == pytest.approx(2 * q_window(1.0, 1e-2))
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : test_grank.py                                                                       #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 11:05:12 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Tests for cvlab.grank.

The declared error of a decomposition is a bound, so the tests measure the actual L2 distance
to the cubic phase state on a fine grid and require it to stay under the declaration.
"""
import inspect
import logging
import math
from datetime import datetime

import numpy as np
import pytest

from cvlab import gausssim
from cvlab.errors import CapExceededError, DomainError
from cvlab.grank import (
    AncillaQuadrature,
    GaussianSum,
    PhaseStateIdentity,
    aliasing_error,
    cubic_state_wavefunction,
    decompose_cubic,
    rank_envelope,
    riemann_error,
    smoothing_bound,
    smoothing_error,
    smoothing_width,
    tensor_rank,
    window_error,
)

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
#                                   CUBIC DECOMPOSITION                                            #
# ------------------------------------------------------------------------------------------------ #
@pytest.mark.grank
class TestDecomposeCubic:
    # ============================================================================================ #
    def test_actual_error_within_declared(self, cubic_sum: GaussianSum, l2_distance) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        target = cubic_state_wavefunction(1.0, 1.0)
        error = l2_distance(cubic_sum.wavefunction, target)

        assert cubic_sum.declared_error <= 0.1 + 1e-9
        assert error <= cubic_sum.declared_error, f"{error:.3e} > {cubic_sum.declared_error:.3e}"
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_norm_matches_grid_integral(self, cubic_sum: GaussianSum) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        x = np.linspace(-10.0, 10.0, 8001)
        grid_norm = math.sqrt(np.trapezoid(np.abs(cubic_sum.wavefunction(x)) ** 2, x))

        assert cubic_sum.norm() == pytest.approx(grid_norm, rel=1e-8)
        assert abs(cubic_sum.norm() - 1.0) <= cubic_sum.declared_error
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_zero_strength_is_a_single_squeezed_state(self, l2_distance) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        gsum = decompose_cubic(0.0, 2.0, 0.01)

        assert gsum.rank == 1
        assert gsum.declared_error == 0.0
        assert l2_distance(gsum.wavefunction, cubic_state_wavefunction(0.0, 2.0)) < 1e-10
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_tighter_budget_needs_more_terms(self, cubic_sum: GaussianSum) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        tight = decompose_cubic(1.0, 1.0, 0.01)

        assert tight.rank > cubic_sum.rank
        assert tight.declared_error <= 0.01 + 1e-9
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_weak_gate_on_a_wide_ancilla(self, l2_distance) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        gsum = decompose_cubic(0.3, 2.0, 0.15)
        error = l2_distance(gsum.wavefunction, cubic_state_wavefunction(0.3, 2.0), 16.0, 16001)

        assert gsum.declared_error <= 0.15 + 1e-9
        assert error <= gsum.declared_error
        assert gsum.rank < 1000
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_parameters_outside_regime_raise(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        cases = ((1.0, 0.5, 0.1), (1.0, 1.0, 0.5), (1.0, 1.0, 0.0), (5.0, 1.0, 0.1))
        for theta, xi, delta in cases:
            with pytest.raises(DomainError):
                decompose_cubic(theta, xi, delta)
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_term_cap_raises(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        with pytest.raises(CapExceededError):
            decompose_cubic(2.0, 2.0, 1e-3, max_terms=5)
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_records_restore_the_sum(self, cubic_sum: GaussianSum) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        records = list(cubic_sum.records())
        restored = GaussianSum.from_records(records)
        x = np.linspace(-4.0, 4.0, 17)

        assert records[0]["rank"] == cubic_sum.rank == len(records) - 1
        assert restored.declared_error == cubic_sum.declared_error
        assert np.allclose(restored.wavefunction(x), cubic_sum.wavefunction(x), atol=1e-12)
        with pytest.raises(DomainError):
            GaussianSum.from_records([{"format": "other"}])
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)


# ------------------------------------------------------------------------------------------------ #
#                                    TENSOR PRODUCTS                                               #
# ------------------------------------------------------------------------------------------------ #
@pytest.mark.grank
class TestTensorRank:
    # ============================================================================================ #
    def test_rank_multiplies_and_error_scales(self, cubic_sum: GaussianSum) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        other = GaussianSum.single(gausssim.coherent_state([0.5j]), declared_error=0.0)
        joint = tensor_rank([cubic_sum, other])

        assert joint.rank == cubic_sum.rank
        assert joint.num_modes == 2
        assert joint.declared_error == pytest.approx(2 * cubic_sum.declared_error)
        assert joint.norm() == pytest.approx(cubic_sum.norm() * other.norm(), rel=1e-10)
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_product_wavefunction_factorizes(self, cubic_sum: GaussianSum) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        joint = tensor_rank([cubic_sum, cubic_sum])
        x, y = np.meshgrid(np.linspace(-2, 2, 5), np.linspace(-1, 3, 5), indexing="ij")
        expected = cubic_sum.wavefunction(x) * cubic_sum.wavefunction(y)

        assert joint.rank == cubic_sum.rank**2
        assert np.allclose(joint.wavefunction(x, y), expected, atol=1e-12)
        with pytest.raises(CapExceededError):
            joint.terms(cap=cubic_sum.rank)
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_empty_product_raises(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        with pytest.raises(DomainError):
            tensor_rank([])
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)


# ------------------------------------------------------------------------------------------------ #
#                                       BOUNDS                                                     #
# ------------------------------------------------------------------------------------------------ #
@pytest.mark.grank
class TestBounds:
    # ============================================================================================ #
    def test_riemann_error_formula(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        assert riemann_error(2.0, -1.0, 1.0, 8) == pytest.approx(0.5)
        with pytest.raises(DomainError):
            riemann_error(1.0, 1.0, 1.0, 4)
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_rank_envelope_grows(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        assert rank_envelope(2.0, 0.1) == pytest.approx(2.0**12 * 100 * math.log(10.0) ** 6)
        assert rank_envelope(2.0, 0.01) > rank_envelope(2.0, 0.1)
        assert rank_envelope(3.0, 0.1) > rank_envelope(2.0, 0.1)
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_phase_state_identity(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        quartic = PhaseStateIdentity(4)
        x = np.array([0.0, 1.0, 2.0])

        assert quartic.num_integrals == 2
        assert "y1 y2" in quartic.formula
        assert np.allclose(quartic.target(0.5)(x), np.exp(0.5j * x**4 / 4))
        with pytest.raises(DomainError):
            PhaseStateIdentity(2)
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_aliasing_bound_vanishes_on_finer_grids(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        quad = AncillaQuadrature.build(2.0)
        bounds = [aliasing_error(quad, 0.3, 6.0, R, 0.25) for R in (64, 128, 256, 512)]

        assert all(later < earlier for earlier, later in zip(bounds, bounds[1:]))
        assert bounds[-1] < 0.01
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_window_error_shrinks_with_the_window(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        quad = AncillaQuadrature.build(2.0)
        errors = [window_error(quad, Y, 0.25) for Y in (4.0, 6.0, 8.0, 10.0)]

        assert all(later < earlier for earlier, later in zip(errors, errors[1:]))
        assert errors[-1] < 1e-5
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_smoothing_width_is_the_largest_admissible(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        theta, xi, budget = 1.0, 1.0, 0.05
        quad = AncillaQuadrature.build(xi)
        eps = smoothing_width(theta, xi, budget, quad)

        assert smoothing_error(quad, theta, eps) <= budget
        assert smoothing_error(quad, theta, 1.01 * eps) > budget
        # the closed-form quartic bound is looser than the integrated cost
        assert smoothing_error(quad, theta, eps) < smoothing_bound(theta, xi, eps)
        assert eps >= budget / smoothing_bound(theta, xi, 1.0)
        with pytest.raises(DomainError):
            smoothing_width(0.0, xi, budget)
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : test_algebra.py                                                                     #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 10:48:14 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Tests for cvlab.algebra.

Normal ordering is checked against hand-expanded identities, in exact rational mode where the
coefficients are rational so the comparison is ``==``. Truncated matrices are checked against
dense ladder matrices built in the fixtures, including the projection identity that the
truncated matrix of a normal-ordered operator is the top-left block of any larger one.
"""
import inspect
import logging
import math
from datetime import datetime

import numpy as np
import pytest

from cvlab.algebra import (
    PolyOp,
    TruncatedMatrix,
    apply_to_vector,
    commutator,
    normal_order,
    parse_expression,
    to_matrix,
)
from cvlab.errors import CapExceededError, CircuitParseError, DomainError, ModeMismatchError

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
#                                     NORMAL ORDERING                                              #
# ------------------------------------------------------------------------------------------------ #
@pytest.mark.algebra
class TestNormalOrder:
    # ============================================================================================ #
    def test_annihilation_then_creation_picks_up_identity(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        result = normal_order(["a0", "ad0"], exact=True)
        expected = PolyOp.number(1, 0, exact=True) + PolyOp.identity(1, exact=True)

        assert result == expected, f"a a^dag normal ordered to {result}"
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_oscillator_hamiltonian_is_number_operator(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        result = normal_order("(x0^2 + p0^2 - I)/2")

        assert result.allclose(PolyOp.number(1, 0)), f"(X^2+P^2-I)/2 gave {result}"
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_square_of_a_plus_adag_expands(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        result = normal_order("(a0 + ad0)^2", exact=True)

        assert result.coefficient((2,), (0,)) == 1
        assert result.coefficient((1,), (1,)) == 2
        assert result.coefficient((0,), (2,)) == 1
        assert result.constant() == 1
        assert len(result.terms) == 4, f"Unexpected extra terms in {result}"
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_renormal_ordering_is_identity(self, two_mode_hopping: PolyOp) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        op = two_mode_hopping * two_mode_hopping + PolyOp.number(2, 1)

        assert normal_order(op) == op
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_normal_ordering_is_linear(self, rng: np.random.Generator) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        A = parse_expression("a0 ad0 a0 + x0^3", 1)
        B = parse_expression("p0 x0 p0 - 2 n0", 1)
        for _ in range(5):
            alpha, beta = rng.normal(size=2) + 1j * rng.normal(size=2)
            combined = normal_order(A * alpha + B * beta)

            assert combined.allclose(normal_order(A) * alpha + normal_order(B) * beta)
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_zero_coefficients_are_dropped(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        op = PolyOp.number(1, 0) - PolyOp.number(1, 0)

        assert op.is_zero()
        assert op.degree == 0
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_malformed_expression_raises_parse_error(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        for text in ("", "a0 +", "(x0", "q0"):
            with pytest.raises(CircuitParseError):
                parse_expression(text, 1)
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)


# ------------------------------------------------------------------------------------------------ #
#                                       COMMUTATORS                                                #
# ------------------------------------------------------------------------------------------------ #
@pytest.mark.algebra
class TestCommutator:
    # ============================================================================================ #
    def test_canonical_commutator(self, x0: PolyOp, p0: PolyOp) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        result = commutator(x0, p0)

        assert result.allclose(PolyOp.identity(1) * 1j), f"[X, P] = {result}"
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_number_commutes_with_its_square(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        N = PolyOp.number(1, 0, exact=True)

        assert commutator(N, N**2).is_zero()
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_p_with_x_cubed(self, x0: PolyOp, p0: PolyOp) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        result = commutator(p0, x0**3)

        assert result.allclose((x0**2) * (-3j)), f"[P, X^3] = {result}"
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_distinct_modes_commute(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        result = commutator(PolyOp.quad_x(2, 0), PolyOp.quad_p(2, 1))

        assert result.allclose(PolyOp(2))
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_mode_mismatch_raises(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        with pytest.raises(ModeMismatchError):
            commutator(PolyOp.number(1, 0), PolyOp.number(2, 1))
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)


# ------------------------------------------------------------------------------------------------ #
#                                   TRUNCATED MATRICES                                             #
# ------------------------------------------------------------------------------------------------ #
@pytest.mark.algebra
class TestToMatrix:
    # ============================================================================================ #
    def test_number_operator_is_diagonal(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        matrix = to_matrix(PolyOp.number(1, 0), [3])

        assert isinstance(matrix, TruncatedMatrix)
        assert np.allclose(matrix.entries, np.diag([0, 1, 2, 3]))
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_position_is_tridiagonal(self, x0: PolyOp) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        entries = to_matrix(x0, [2]).entries
        expected = np.array(
            [[0, math.sqrt(0.5), 0], [math.sqrt(0.5), 0, 1.0], [0, 1.0, 0]], dtype=complex
        )

        assert np.allclose(entries, expected, atol=1e-14), f"X at cutoff 2:\n{entries}"
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_x_cubed_matches_enlarged_dense_product(self, x0: PolyOp, dense_x) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        X = dense_x(11)
        oracle = (X @ X @ X)[:9, :9]
        entries = to_matrix(x0**3, [8]).entries

        assert np.allclose(entries, oracle, atol=1e-12)
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_projection_identity(self, two_mode_hopping: PolyOp) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        op = two_mode_hopping**2 + PolyOp.quad_x(2, 0) ** 3
        small = to_matrix(op, [3, 2])
        large = to_matrix(op, [3 + op.degree, 2 + op.degree])

        assert np.allclose(large.restrict([3, 2]).entries, small.entries, atol=1e-12)
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_kron_order_is_mode_zero_fastest(self, dense_a) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        entries = to_matrix(PolyOp.ladder(2, 0), [2, 1]).entries
        oracle = np.kron(np.eye(2), dense_a(2))

        assert np.allclose(entries, oracle)
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_hermitian_operator_gives_hermitian_matrix(self, two_mode_hopping: PolyOp) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        op = two_mode_hopping * PolyOp.quad_x(2, 1) + PolyOp.quad_x(2, 1) * two_mode_hopping

        assert op.is_hermitian()
        assert to_matrix(op, [4, 4]).is_hermitian()
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_matrix_free_action_matches_dense(self, two_mode_hopping: PolyOp, rng) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        op = two_mode_hopping + PolyOp.quad_x(2, 0) ** 3
        cutoffs = [5, 3]
        vec = rng.normal(size=24) + 1j * rng.normal(size=24)

        dense = to_matrix(op, cutoffs).entries @ vec
        assert np.allclose(apply_to_vector(op, vec, cutoffs), dense, atol=1e-12)
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_dense_cap_raises(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        with pytest.raises(CapExceededError) as excinfo:
            to_matrix(PolyOp.number(2, 0), [99, 99], max_dim=1000)

        assert excinfo.value.requested == 10000
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

    # ============================================================================================ #
    def test_negative_power_raises(self, x0: PolyOp) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        with pytest.raises(DomainError):
            x0 ** -1
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)


# ------------------------------------------------------------------------------------------------ #
#                                     SERIALIZATION                                                #
# ------------------------------------------------------------------------------------------------ #
@pytest.mark.algebra
class TestRecords:
    # ============================================================================================ #
    def test_records_keep_exact_coefficients(self) -> None:
        start = log_start(self.__class__.__name__, inspect.stack()[0][3])
        # ---------------------------------------------------------------------------------------- #
        op = normal_order("(a0 + ad0)^2 / 3", exact=True)
        records = op.to_records()

        assert all(set(r) == {"mu", "nu", "re", "im"} for r in records)
        assert PolyOp.from_records(1, records) == op
        # ---------------------------------------------------------------------------------------- #
        log_end(self.__class__.__name__, inspect.stack()[0][3], start)

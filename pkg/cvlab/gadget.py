#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : gadget.py                                                                           #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 06:52:08 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""The cubic-gate teleportation gadget with a finitely squeezed ancilla.

The input mode x and the ancilla V(theta) S_xi |0> go through SUM^-1, which maps position kets
|x>|y> to |x>|y - x>. Conditioning the ancilla on the homodyne outcome q leaves

    phi(x) a(q + x),    a(u) = pi^{-1/4} xi^{-1/2} exp(-u^2/(2 xi^2) + i theta u^3/3),

and the Gaussian correction G(q) = exp(-i theta q^3/3 - i theta q X^2 - i theta q^2 X) strips
every cubic cross term. What is left is V(theta) applied to phi(x) exp(-x^2/(2 xi^2) - xq/xi^2):
the finite squeezing shows up as a Gaussian envelope, and its cost is what the report certifies.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from cvlab import focksim, gausssim, grank
from cvlab.constants import DEFAULT_BRANCH_FLOOR, DEFAULT_GRID_POINTS, DEFAULT_XI_CONSTANT
from cvlab.errors import DomainError, ModeMismatchError, PostselectionError
from cvlab.focksim import FockState
from cvlab.gausssim import SymplecticGate
from cvlab.grank import GaussianSum, GaussianTerm

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
QPolicy = Union[str, float]
POSTSELECT_ZERO = "postselect_zero"
SAMPLE = "sample"


# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class GadgetReport:
    """Outcome and certificate of one gadget run.

    Args:
        q (float): Homodyne outcome used.
        xi (float): Ancilla width.
        eps_bound (float): Euclidean distance bound between the normalized output and
            V(theta) applied to the input, valid for this q.
        Z (float): Branch density at q; the success normalization.
        flagged (bool): |q| lies outside the window 2 xi sqrt(2 log(2/delta)).
        theta (float): Cubic strength.
        path (str): ``fock`` or ``gaussian``.
        ancilla_error (float): Declared error of the ancilla decomposition (Gaussian path).
    """

    q: float
    xi: float
    eps_bound: float
    Z: float
    flagged: bool
    theta: float = 0.0
    path: str = "fock"
    ancilla_error: float = 0.0

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


# ------------------------------------------------------------------------------------------------ #
#                                    ANALYTIC BOUNDS                                               #
# ------------------------------------------------------------------------------------------------ #
def xi_threshold(
    E: float, eps: float, delta: float, c: float = DEFAULT_XI_CONSTANT
) -> float:
    """Squeezing sufficient for an eps-accurate gadget.

    c (E/eps) e^{log^2(2/delta)/2} log^2(1/delta) with c = 8 by default.

    Raises:
        DomainError: If an argument is outside its range.
    """
    if not (E > 0 and 0 < eps < 1 and 0 < delta < 1):
        raise DomainError(
            f"xi_threshold needs E > 0 and eps, delta in (0, 1); got {E}, {eps}, {delta}."
        )
    return c * (E / eps) * math.exp(0.5 * math.log(2.0 / delta) ** 2) * math.log(1.0 / delta) ** 2


def proxy_substitution_error(eps_in: float, lam: float) -> float:
    """2 (1 + lambda) eps: cost of teleporting through a low-energy proxy at distance eps.

    Raises:
        DomainError: If eps_in >= 1 - 2 lambda.
    """
    if not 0 <= eps_in < 1 - 2 * lam:
        raise DomainError(f"Proxy substitution needs eps < 1 - 2 lambda; got {eps_in}, {lam}.")
    return 2.0 * (1.0 + lam) * eps_in


def z_bracket(xi: float, lam: float, delta1: float = 0.0) -> Tuple[float, float]:
    """[(1 - 2 lambda - delta1)/(sqrt(pi) xi), 1/(sqrt(pi) xi)], the range of Z at q = 0."""
    if not delta1 < 1 - 2 * lam:
        raise DomainError(f"z_bracket needs delta1 < 1 - 2 lambda; got {delta1}, {lam}.")
    top = 1.0 / (math.sqrt(math.pi) * xi)
    return (1.0 - 2.0 * lam - delta1) * top, top


def z_lambda(xi: float, E: float) -> float:
    """The lambda for which xi = sqrt(2E + 1)/lambda."""
    return math.sqrt(2.0 * E + 1.0) / xi


def q_window(xi: float, delta: float) -> float:
    """2 xi sqrt(2 log(2/delta)); outcomes beyond it occur with probability at most delta."""
    return 2.0 * xi * math.sqrt(2.0 * math.log(2.0 / delta))


def normalization_error(eps: float, norm_u: float) -> float:
    """2 eps / ||u||: distance to the normalized vector given an eps-close unnormalized u."""
    if norm_u <= 0:
        raise PostselectionError("Cannot normalize a vanishing vector.")
    return 2.0 * eps / norm_u


# ------------------------------------------------------------------------------------------------ #
#                                      HELPERS                                                     #
# ------------------------------------------------------------------------------------------------ #
def correction_gate(theta: float, q: float) -> SymplecticGate:
    """G(q) = e^{-i theta q^3/3} D(-i theta q^2/sqrt(2)) e^{-i theta q X^2}."""
    qp = gausssim.quadratic_phase(-2.0 * theta * q)
    phase = qp.phase * np.exp(-1j * theta * q**3 / 3.0)
    return SymplecticGate(qp.S, np.array([0.0, -theta * q * q]), phase)


def ancilla_wavefunction(theta: float, xi: float):
    return grank.cubic_state_wavefunction(theta, xi)


def sample_q(
    grid: np.ndarray,
    input_density: np.ndarray,
    xi: float,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """Draws q = y - x from the exact homodyne marginal.

    The outcome is the ancilla position (variance xi^2/2) minus the input position, so it is
    sampled as the difference of independent draws.

    Args:
        grid (np.ndarray): Uniform position grid.
        input_density (np.ndarray): |phi(x)|^2 on ``grid``.
        xi (float): Ancilla width.
        rng (Optional[np.random.Generator]): Random source; a fresh default one if omitted.
    """
    rng = rng if rng is not None else np.random.default_rng()
    weights = np.clip(np.asarray(input_density, dtype=float), 0.0, None)
    weights = weights / weights.sum()
    step = grid[1] - grid[0]
    x = grid[rng.choice(grid.size, p=weights)] + step * (rng.random() - 0.5)
    y = rng.normal(0.0, xi / math.sqrt(2.0))
    return float(y - x)


def _resolve_q(
    q_policy: QPolicy,
    grid: np.ndarray,
    input_density: np.ndarray,
    xi: float,
    rng: Optional[np.random.Generator],
) -> float:
    if q_policy == POSTSELECT_ZERO:
        return 0.0
    if q_policy == SAMPLE:
        return sample_q(grid, input_density, xi, rng)
    if isinstance(q_policy, str):
        raise DomainError(f"Unknown q policy {q_policy!r}.")
    return float(q_policy)


def _envelope_error(grid: np.ndarray, marginal: np.ndarray, xi: float, q: float) -> float:
    """Normalized-output distance from the envelope exp(-x^2/(2 xi^2) - xq/xi^2)."""
    step = grid[1] - grid[0]
    weights = np.full(grid.size, step)
    weights[[0, -1]] *= 0.5
    envelope = np.exp(-0.5 * grid**2 / xi**2 - grid * q / xi**2)
    eps = math.sqrt(float(np.sum(weights * marginal * (envelope - 1.0) ** 2)))
    norm_u = math.sqrt(float(np.sum(weights * marginal * envelope**2)))
    return normalization_error(eps, norm_u)


def _marginal_on_axis(values: np.ndarray, axis: int, grid: np.ndarray) -> np.ndarray:
    density = np.abs(values) ** 2
    step = grid[1] - grid[0]
    other = tuple(k for k in range(density.ndim) if k != axis)
    return density.sum(axis=other) * step ** len(other) if other else density


# ------------------------------------------------------------------------------------------------ #
#                                     TELEPORTATION                                                #
# ------------------------------------------------------------------------------------------------ #
def teleport_cubic(
    input_state: Union[FockState, GaussianSum],
    theta: float,
    xi: float,
    q_policy: QPolicy = POSTSELECT_ZERO,
    mode: int = 0,
    cutoffs: Optional[Tuple[int, ...]] = None,
    ancilla_delta: float = 1e-2,
    flag_delta: float = 1e-3,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[Union[FockState, GaussianSum], GadgetReport]:
    """Applies V(theta) to ``mode`` of the input by teleportation.

    FockState inputs use the exact ancilla wavefunction on a position grid and project the
    corrected branch back onto number states. GaussianSum inputs use the decomposed ancilla
    and carry every term through SUM^-1, homodyne conditioning and the correction exactly.

    Args:
        input_state: State to act on.
        theta (float): Cubic strength.
        xi (float): Ancilla width.
        q_policy: ``postselect_zero``, ``sample``, or a fixed outcome.
        mode (int): Target mode.
        cutoffs: Output box for the Fock path; defaults to the input box.
        ancilla_delta (float): Decomposition budget for the Gaussian path.
        flag_delta (float): Tail probability defining the flagged window.
        rng: Random source for ``sample``.

    Returns:
        Tuple: The normalized output and its report.

    Raises:
        PostselectionError: If the branch density falls below the floor.
    """
    if xi <= 0:
        raise DomainError(f"xi must be positive, got {xi}.")
    if not 0 <= mode < input_state.num_modes:
        raise ModeMismatchError(f"Mode {mode} outside a {input_state.num_modes}-mode input.")
    if isinstance(input_state, FockState):
        output, report = _teleport_fock(input_state, theta, xi, q_policy, mode, cutoffs, rng)
    else:
        output, report = _teleport_gaussian(
            input_state, theta, xi, q_policy, mode, ancilla_delta, rng
        )
    flagged = abs(report.q) > q_window(xi, flag_delta)
    if flagged:
        logger.warning(f"Homodyne outcome q={report.q:.4f} lies outside the {flag_delta} window.")
    report = GadgetReport(**{**report.as_dict(), "flagged": flagged})
    logger.info(
        f"Teleported V({theta}) with xi={xi} at q={report.q:.4f}: Z={report.Z:.4e}, "
        f"eps_bound={report.eps_bound:.3e}."
    )
    return output, report


def _teleport_fock(
    state: FockState,
    theta: float,
    xi: float,
    q_policy: QPolicy,
    mode: int,
    cutoffs: Optional[Tuple[int, ...]],
    rng: Optional[np.random.Generator],
) -> Tuple[FockState, GadgetReport]:
    m = state.num_modes
    out_cutoffs = tuple(cutoffs) if cutoffs is not None else state.cutoffs
    extent = max(focksim.default_extent(max(out_cutoffs + state.cutoffs)), 4.0 * xi)
    grid = np.linspace(-extent, extent, DEFAULT_GRID_POINTS)
    values = focksim.position_wavefunction(state.normalized(), *([grid] * m))
    marginal = _marginal_on_axis(values, mode, grid)

    q = _resolve_q(q_policy, grid, marginal, xi, rng)
    ancilla = ancilla_wavefunction(theta, xi)(q + grid)
    # correction removes theta (q^3/3 + q x^2 + q^2 x)
    correction = np.exp(-1j * theta * (q**3 / 3.0 + q * grid**2 + q * q * grid))
    shape = [1] * m
    shape[mode] = grid.size
    branch = values * (ancilla * correction).reshape(shape)

    step = grid[1] - grid[0]
    density = float(np.sum(np.abs(branch) ** 2)) * step**m
    if not density > DEFAULT_BRANCH_FLOOR:
        raise PostselectionError(f"Branch density {density:.3e} at q={q} is below the floor.")
    output = focksim.from_grid_values(branch / math.sqrt(density), grid, out_cutoffs)
    report = GadgetReport(
        q=q,
        xi=xi,
        eps_bound=_envelope_error(grid, marginal, xi, q),
        Z=density,
        flagged=False,
        theta=theta,
        path="fock",
    )
    return output.normalized(), report


def _teleport_gaussian(
    state: GaussianSum,
    theta: float,
    xi: float,
    q_policy: QPolicy,
    mode: int,
    ancilla_delta: float,
    rng: Optional[np.random.Generator],
) -> Tuple[GaussianSum, GadgetReport]:
    m = state.num_modes
    extent = 12.0 * max(xi, 1.0)
    grid = np.linspace(-extent, extent, DEFAULT_GRID_POINTS)
    if m == 1:
        marginal = np.abs(state.wavefunction(grid)) ** 2 / state.norm() ** 2
    else:
        # the other modes are integrated out on a coarser grid
        coarse = np.linspace(-extent, extent, 201)
        mesh = np.meshgrid(*[grid if k == mode else coarse for k in range(m)], indexing="ij")
        values = state.wavefunction(*mesh)
        marginal = _marginal_on_axis(values, mode, coarse) / state.norm() ** 2
    q = _resolve_q(q_policy, grid, marginal, xi, rng)

    ancilla = grank.decompose_cubic(theta, xi, ancilla_delta)
    inverse_sum = gausssim.sum_gate(-1.0, mode, m, m + 1)
    correction = correction_gate(theta, q).embed(m, [mode]) if q != 0 else None

    branch_terms = []
    for term in state.iter_terms():
        for anc in ancilla.iter_terms():
            joint = gausssim.apply_gaussian(gausssim.product(term.state, anc.state), inverse_sum)
            reduced, density, phase = gausssim.homodyne_postselect(joint, m, q)
            if correction is not None:
                reduced = gausssim.apply_gaussian(reduced, correction)
            branch_terms.append(
                GaussianTerm(
                    term.log_mag + anc.log_mag + 0.5 * math.log(density),
                    term.phase * anc.phase * phase * reduced.phase,
                    reduced.pinned(),
                )
            )
    unnormalized = GaussianSum((tuple(branch_terms),), state.declared_error)
    norm = unnormalized.norm()
    if not norm**2 > DEFAULT_BRANCH_FLOOR:
        raise PostselectionError(f"Branch density {norm**2:.3e} at q={q} is below the floor.")
    shift = math.log(norm)
    output = GaussianSum(
        (tuple(t._replace(log_mag=t.log_mag - shift) for t in branch_terms),),
        state.declared_error,
    )
    report = GadgetReport(
        q=q,
        xi=xi,
        eps_bound=_envelope_error(grid, marginal, xi, q),
        Z=norm**2,
        flagged=False,
        theta=theta,
        path="gaussian",
        ancilla_error=ancilla.declared_error,
    )
    return output, report

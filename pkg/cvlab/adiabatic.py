#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : adiabatic.py                                                                        #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 08:52:30 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Adiabatic search for roots of Diophantine equations, simulated on its logical subspace.

An integer j_i in {0..n_i} lives in four modes as |j, j, n-j, n-j>, so hopping along the search
box has integer matrix elements, and one extra pair of modes holds a flag bit b. On the logical
basis |j, b>_L the Hamiltonian is

    A(t) = L (x) |0><0|  +  sum_j (W1 |j,0> - W0(j) |j,1>)(W1 <j,0| - W0(j) <j,1|),

with L the grid Laplacian built from one integer-weighted path per variable, the whisker weight
W1(t) = (1 + t)|S|^p and W0(j, t) = 1 + ((1 - t) F0(j) + t F1(j)^2)|S|. A(t) is quadratic in t and
annihilates sum_j (|j,0> + (W1/W0(j)) |j,1>), which starts near |0^k, 1>_L and ends near the
solution set of F1. The output gadget squeezes a fresh mode for a long time when F1(j) = 0 and
barely at all otherwise, so counting photons decides the instance.
"""
from __future__ import annotations

import itertools
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.linalg import eigh, eigvalsh

from cvlab import gausssim
from cvlab.algebra import PolyOp
from cvlab.constants import (
    DEFAULT_ADIABATIC_CAP,
    DEFAULT_ADIABATIC_STEPS,
    DEFAULT_ADIABATIC_TAU,
    DEFAULT_GAP_POINTS,
    DEFAULT_JSON_INDENT,
    DEFAULT_KERNEL_TOL,
    DEFAULT_OUTPUT_TIME,
    DEFAULT_UNITARITY_TOL,
    DEFAULT_WHISKER_POWER,
    INSTANCE_FORMAT,
)
from cvlab.energetics import smsv_survival
from cvlab.errors import CapExceededError, CircuitParseError, DomainError, SolverError
from cvlab.gausssim import GaussianDesc, SymplecticGate

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
INSTANCE_VERSION = 1
START_GROUND = "ground"
START_LOGICAL = "logical"
# Fourth-order commutator-free Magnus weights and Gauss nodes.
_CF4_A1 = (3.0 - 2.0 * math.sqrt(3.0)) / 12.0
_CF4_A2 = (3.0 + 2.0 * math.sqrt(3.0)) / 12.0
_GAUSS_OFFSET = math.sqrt(3.0) / 6.0

Polynomial = Dict[Tuple[int, ...], int]


# ------------------------------------------------------------------------------------------------ #
#                                        INSTANCES                                                 #
# ------------------------------------------------------------------------------------------------ #
def _as_polynomial(poly: Mapping[Sequence[int], Any], k: int, name: str) -> Polynomial:
    result: Polynomial = {}
    for powers, coeff in poly.items():
        powers = tuple(int(p) for p in powers)
        if len(powers) != k or min(powers, default=0) < 0:
            raise DomainError(f"{name} term {powers} does not fit {k} variables.")
        if isinstance(coeff, bool) or int(coeff) != coeff:
            raise DomainError(f"{name} coefficients must be integers, got {coeff!r}.")
        if int(coeff):
            result[powers] = result.get(powers, 0) + int(coeff)
    return result


def evaluate_polynomial(poly: Polynomial, point: Sequence[int]) -> int:
    """Exact integer value of the polynomial at an integer point."""
    total = 0
    for powers, coeff in poly.items():
        term = coeff
        for x, p in zip(point, powers):
            term *= int(x) ** p
        total += term
    return total


@dataclass(frozen=True)
class DiophantineInstance:
    """An integer polynomial F1 searched over the box S_n = {0..n_1} x ... x {0..n_k}.

    Args:
        F1 (Polynomial): Exponent tuple -> integer coefficient.
        bounds (Tuple[int, ...]): Box bounds n_i >= 0, one per variable.
        F0 (Optional[Polynomial]): Start polynomial, zero only at the origin; sum of the
            variables when omitted.
        name (str): Label carried into results.

    Raises:
        DomainError: On non-integer coefficients, mismatched arities or a box of one point.
    """

    F1: Polynomial
    bounds: Tuple[int, ...]
    F0: Optional[Polynomial] = None
    name: str = ""

    def __post_init__(self) -> None:
        bounds = tuple(int(n) for n in self.bounds)
        if not bounds or min(bounds) < 0:
            raise DomainError(f"Bounds must be nonnegative integers, got {self.bounds}.")
        k = len(bounds)
        if math.prod(n + 1 for n in bounds) < 2:
            raise DomainError("The search box must hold at least two points to stay connected.")
        F1 = _as_polynomial(self.F1, k, "F1")
        if self.F0 is None:
            F0 = {tuple(int(i == v) for i in range(k)): 1 for v in range(k)}
        else:
            F0 = _as_polynomial(self.F0, k, "F0")
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "F1", F1)
        object.__setattr__(self, "F0", F0)

    @property
    def num_vars(self) -> int:
        return len(self.bounds)

    @property
    def search_size(self) -> int:
        return math.prod(n + 1 for n in self.bounds)

    def points(self) -> List[Tuple[int, ...]]:
        """Every point of S_n, first variable fastest."""
        ranges = [range(n + 1) for n in reversed(self.bounds)]
        return [tuple(reversed(point)) for point in itertools.product(*ranges)]

    def f0(self, point: Sequence[int]) -> int:
        return evaluate_polynomial(self.F0, point)  # type: ignore[arg-type]

    def f1(self, point: Sequence[int]) -> int:
        return evaluate_polynomial(self.F1, point)

    def solutions(self) -> List[Tuple[int, ...]]:
        return [j for j in self.points() if self.f1(j) == 0]

    # -------------------------------------------------------------------------------------------- #
    def to_dict(self) -> Dict[str, Any]:
        def terms(poly: Polynomial) -> List[Dict[str, Any]]:
            return [{"coeff": c, "powers": list(p)} for p, c in sorted(poly.items())]

        return {
            "format": INSTANCE_FORMAT,
            "version": INSTANCE_VERSION,
            "name": self.name,
            "bounds": list(self.bounds),
            "F1": terms(self.F1),
            "F0": terms(self.F0),  # type: ignore[arg-type]
        }

    @classmethod
    def from_dict(cls, data: Any, location: str = "") -> DiophantineInstance:
        """Reads an instance document.

        Raises:
            CircuitParseError: On a malformed document, with its location.
        """
        if not isinstance(data, Mapping):
            raise CircuitParseError("An instance must be a JSON object.", location or None)
        if data.get("format", INSTANCE_FORMAT) != INSTANCE_FORMAT:
            raise CircuitParseError(f"Expected format '{INSTANCE_FORMAT}'.", f"{location}format")

        def terms(key: str) -> Optional[Polynomial]:
            raw = data.get(key)
            if raw is None:
                return None
            if not isinstance(raw, list):
                raise CircuitParseError(f"{key} must be a list of terms.", f"{location}{key}")
            try:
                return {tuple(t["powers"]): t["coeff"] for t in raw}
            except (KeyError, TypeError) as e:
                raise CircuitParseError(
                    "Each term needs 'coeff' and 'powers'.", f"{location}{key}"
                ) from e

        F1 = terms("F1")
        if F1 is None or "bounds" not in data:
            raise CircuitParseError("An instance needs F1 and bounds.", location or None)
        try:
            return cls(F1, tuple(data["bounds"]), terms("F0"), str(data.get("name", "")))
        except (DomainError, TypeError, ValueError) as e:
            raise CircuitParseError(str(e), location or None) from e

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=DEFAULT_JSON_INDENT, ensure_ascii=False)


def load_instances(filepath: Union[str, Path]) -> List[DiophantineInstance]:
    """Reads one instance, or a document with an ``instances`` list."""
    path = Path(filepath)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise CircuitParseError(f"Cannot read instance file ({e.strerror}).", str(path)) from e
    except json.JSONDecodeError as e:
        raise CircuitParseError(e.msg, f"line {e.lineno} column {e.colno}") from e
    if isinstance(data, Mapping) and "instances" in data:
        raw = data["instances"]
        if not isinstance(raw, list):
            raise CircuitParseError("instances must be a list.", "instances")
        instances = [
            DiophantineInstance.from_dict(d, f"instances[{i}].") for i, d in enumerate(raw)
        ]
    else:
        instances = [DiophantineInstance.from_dict(data)]
    logger.info(f"Loaded {len(instances)} Diophantine instance(s) from {path.name}.")
    return instances


def manders_adleman(
    alpha: int, beta: int, gamma: int, n: Optional[Sequence[int]] = None
) -> DiophantineInstance:
    """alpha x1^2 + beta x2 - gamma over a box that holds every nonnegative solution.

    The default box is x1 <= isqrt(gamma // alpha), x2 <= gamma // beta.
    """
    if alpha < 1 or beta < 1 or gamma < 0:
        raise DomainError(f"Need alpha, beta >= 1 and gamma >= 0, got {alpha}, {beta}, {gamma}.")
    if n is None:
        n = (math.isqrt(gamma // alpha), gamma // beta)
    bounds = tuple(n)
    if math.prod(b + 1 for b in bounds) < 2:
        bounds = (max(bounds[0], 1), bounds[1])
    F1 = {(2, 0): alpha, (0, 1): beta, (0, 0): -gamma}
    return DiophantineInstance(F1, bounds, name=f"ma-{alpha}-{beta}-{gamma}")


# ------------------------------------------------------------------------------------------------ #
#                                       HAMILTONIAN                                                #
# ------------------------------------------------------------------------------------------------ #
def build_hvar(n: int) -> np.ndarray:
    """Restriction of the hopping Hamiltonian of one variable to |j, j, n-j, n-j>.

    Tridiagonal with H_jj = j(n-j+1) + (j+1)(n-j) and H_{j,j+1} = -(j+1)(n-j): the Laplacian of a
    path with integer weights, so rows sum to zero and the kernel is the all-ones vector.
    """
    if n < 1:
        raise DomainError(f"A variable needs n >= 1, got {n}.")
    j = np.arange(n + 1)
    diagonal = j * (n - j + 1) + (j + 1) * (n - j)
    off = -((j[:-1] + 1) * (n - j[:-1]))
    return np.diag(diagonal) + np.diag(off, 1) + np.diag(off, -1)


def _grid_laplacian(bounds: Sequence[int]) -> sparse.csr_matrix:
    """Kronecker sum of the per-variable path Laplacians, first variable fastest."""
    sizes = [n + 1 for n in bounds]
    total = sparse.csr_matrix((math.prod(sizes), math.prod(sizes)))
    for i, n in enumerate(bounds):
        if n == 0:
            continue
        before = sparse.identity(math.prod(sizes[:i]), format="csr")
        after = sparse.identity(math.prod(sizes[i + 1:]), format="csr")
        total = total + sparse.kron(after, sparse.kron(sparse.csr_matrix(build_hvar(n)), before))
    return total.tocsr()


@dataclass(frozen=True)
class LogicalHamiltonian:
    """A(t) = A0 + t A1 + t^2 A2 on the logical basis |j, b>_L, index b + 2 flat(j).

    Args:
        instance (DiophantineInstance): The compiled instance.
        whisker_power (int): p in W1 = (1 + t)|S|^p.
        parts (Tuple[sparse.csr_matrix, ...]): A0, A1, A2.
        labels (List[Tuple[Tuple[int, ...], int]]): (j, b) per basis index.
    """

    instance: DiophantineInstance
    whisker_power: int
    parts: Tuple[sparse.csr_matrix, sparse.csr_matrix, sparse.csr_matrix]
    labels: List[Tuple[Tuple[int, ...], int]] = field(repr=False)

    @property
    def dimension(self) -> int:
        return len(self.labels)

    @property
    def whisker_scale(self) -> float:
        return float(self.instance.search_size) ** self.whisker_power

    def matrix(self, t: float) -> np.ndarray:
        A0, A1, A2 = self.parts
        return (A0 + t * A1 + (t * t) * A2).toarray()

    def weights(self, t: float) -> Tuple[np.ndarray, float]:
        """(W0(j, t) per search point, W1(t))."""
        size = self.instance.search_size
        points = self.instance.points()
        f0 = np.array([self.instance.f0(j) for j in points], dtype=float)
        f1 = np.array([self.instance.f1(j) for j in points], dtype=float)
        w0 = 1.0 + ((1.0 - t) * f0 + t * f1**2) * size
        return w0, (1.0 + t) * self.whisker_scale

    def index(self, point: Sequence[int], b: int) -> int:
        flat, stride = 0, 1
        for x, n in zip(point, self.instance.bounds):
            flat += int(x) * stride
            stride *= n + 1
        return b + 2 * flat


def build_adiabatic(
    instance: DiophantineInstance,
    whisker_power: int = DEFAULT_WHISKER_POWER,
    cap: int = DEFAULT_ADIABATIC_CAP,
    check_times: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 1.0),
) -> LogicalHamiltonian:
    """Compiles the instance into A(t) and checks the closed-form ground state at sample times.

    Raises:
        CapExceededError: If the logical dimension 2|S_n| exceeds ``cap``.
        SolverError: If A(t) fails to annihilate its closed-form ground state.
    """
    if whisker_power not in (0, 1):
        raise DomainError(f"whisker_power must be 0 or 1, got {whisker_power}.")
    size = instance.search_size
    dim = 2 * size
    if dim > cap:
        raise CapExceededError("logical dimension", dim, cap)
    points = instance.points()
    scale = float(size) ** whisker_power
    f0 = np.array([instance.f0(j) for j in points], dtype=float)
    f1sq = np.array([instance.f1(j) ** 2 for j in points], dtype=float)
    if np.min(f0) < 0:
        raise DomainError("F0 must be nonnegative on the search box.")
    a = 1.0 + f0 * size
    b = (f1sq - f0) * size

    zero = np.arange(size) * 2
    one = zero + 1
    grid = _grid_laplacian(instance.bounds).tocoo()

    def assemble(
        rows: List[np.ndarray], cols: List[np.ndarray], vals: List[np.ndarray]
    ) -> sparse.csr_matrix:
        r, c, v = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
        return sparse.coo_matrix((v, (r, c)), shape=(dim, dim)).tocsr()

    # A0: grid on the b=0 sheet, W1(0)^2, W0(0)^2 and the -W0 W1 coupling at t=0
    A0 = assemble(
        [2 * grid.row, zero, one, zero, one],
        [2 * grid.col, zero, one, one, zero],
        [grid.data, np.full(size, scale**2), a**2, -scale * a, -scale * a],
    )
    A1 = assemble(
        [zero, one, zero, one],
        [zero, one, one, zero],
        [np.full(size, 2 * scale**2), 2 * a * b, -scale * (a + b), -scale * (a + b)],
    )
    A2 = assemble(
        [zero, one, zero, one],
        [zero, one, one, zero],
        [np.full(size, scale**2), b**2, -scale * b, -scale * b],
    )
    labels = [(j, bit) for j in points for bit in (0, 1)]
    H = LogicalHamiltonian(instance, whisker_power, (A0, A1, A2), labels)

    for t in check_times:
        matrix = H.matrix(t)
        psi = ground_state(H, t)
        residual = float(np.linalg.norm(matrix @ psi))
        bound = DEFAULT_KERNEL_TOL * max(1.0, float(np.linalg.norm(matrix, 2)))
        if residual > bound:
            raise SolverError(f"A({t}) does not annihilate its ground state", residual=residual)
    logger.info(
        f"Built adiabatic Hamiltonian for {instance.name or 'instance'}: dimension {dim}, "
        f"{len(instance.solutions())} solution(s) in the box."
    )
    return H


def ground_state(H: LogicalHamiltonian, t: float) -> np.ndarray:
    """Normalized sum_j (|j,0> + (W1/W0(j)) |j,1>)."""
    w0, w1 = H.weights(t)
    psi = np.empty(H.dimension)
    psi[0::2] = 1.0
    psi[1::2] = w1 / w0
    return psi / np.linalg.norm(psi)


def logical_start(H: LogicalHamiltonian) -> np.ndarray:
    """|0^k, 1>_L."""
    psi = np.zeros(H.dimension)
    psi[H.index([0] * H.instance.num_vars, 1)] = 1.0
    return psi


def _register_modes(k: int) -> Tuple[List[List[int]], Tuple[int, int]]:
    return [list(range(4 * i, 4 * i + 4)) for i in range(k)], (4 * k, 4 * k + 1)


def polynomial_hamiltonian(H: LogicalHamiltonian, t: float) -> PolyOp:
    """A(t) as a polynomial in the ladder operators of all 4k + 2 modes."""
    k = H.instance.num_vars
    m = 4 * k + 2
    registers, (flag0, flag1) = _register_modes(k)
    identity = PolyOp.identity(m)

    def N(mode: int) -> PolyOp:
        return PolyOp.number(m, mode)

    def a(mode: int, dagger: bool = False) -> PolyOp:
        return PolyOp.ladder(m, mode, dagger=dagger)

    hvar = PolyOp(m)
    for q0, q1, q2, q3 in registers:
        hvar = hvar + N(q0) * (N(q2) + identity) + (N(q0) + identity) * N(q2)
        hvar = hvar - a(q0, True) * a(q1, True) * a(q2) * a(q3)
        hvar = hvar - a(q0) * a(q1) * a(q2, True) * a(q3, True)

    def poly_of_counts(poly: Polynomial) -> PolyOp:
        total = PolyOp(m)
        for powers, coeff in poly.items():
            term = identity * coeff
            for (q0, _, _, _), p in zip(registers, powers):
                term = term * N(q0) ** p
            total = total + term
        return total

    size = H.instance.search_size
    f1 = poly_of_counts(H.instance.F1)
    w0 = identity + (poly_of_counts(H.instance.F0) * (1.0 - t) + f1 * f1 * t) * size
    w1 = (1.0 + t) * H.whisker_scale
    hop = a(flag0) * a(flag1, True) + a(flag0, True) * a(flag1)
    return hvar * N(flag0) + N(flag0) * w1**2 + N(flag1) * w0 * w0 - hop * w0 * w1


def photon_sectors(H: LogicalHamiltonian, t: float = 0.5) -> bool:
    """True if A(t) conserves the photon count of every register and of the flag pair."""
    k = H.instance.num_vars
    registers, flags = _register_modes(k)
    groups = registers + [list(flags)]
    for (mu, nu), _ in polynomial_hamiltonian(H, t).items():
        for group in groups:
            if sum(mu[q] for q in group) != sum(nu[q] for q in group):
                return False
    return True


# ------------------------------------------------------------------------------------------------ #
#                                      SPECTRAL GAP                                                #
# ------------------------------------------------------------------------------------------------ #
class SpectralGap(NamedTuple):
    gap: float
    formula_gap: float


def whiskered_gap(n_max: int) -> float:
    """lambda_2 of the unweighted grid with one pendant vertex per node."""
    lam = 2.0 - 2.0 * math.cos(math.pi / (n_max + 1))
    return 0.5 * (lam + 2.0 - math.sqrt(lam * lam + 4.0))


def gap_scale(H: LogicalHamiltonian, t: float) -> float:
    """Factor min(1, min_j W0(j)/W1)^2 lost when the whiskers are rescaled to unit weight."""
    w0, w1 = H.weights(t)
    return min(1.0, float(np.min(w0)) / w1) ** 2


def spectral_gap(H: LogicalHamiltonian, t: float) -> SpectralGap:
    """Eigensolved gap of A(t) next to the whiskered-grid formula.

    The gap must dominate ``gap_scale(H, t) * formula_gap``; A(t) dominates the version with
    whiskers divided by W1^2, and rescaling the whisker vertices by W0/W1 turns that into the
    Laplacian of a whiskered grid whose weights are at least one.

    Raises:
        SolverError: If the eigensolver fails or the gap falls below the rescaled formula.
    """
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t must lie in [0, 1], got {t}.")
    try:
        low = eigvalsh(H.matrix(t), subset_by_index=[0, 1])
    except np.linalg.LinAlgError as e:
        raise SolverError(f"Eigensolver failed at t={t}: {e}") from e
    gap = float(low[1] - low[0])
    formula = whiskered_gap(max(H.instance.bounds))
    floor = gap_scale(H, t) * formula
    if gap < floor * (1.0 - 1e-9) - 1e-12:
        raise SolverError(f"Gap {gap:.6g} below the rescaled formula {floor:.6g}", residual=gap)
    return SpectralGap(gap, formula)


def gap_trace(H: LogicalHamiltonian, points: int = DEFAULT_GAP_POINTS) -> List[Dict[str, float]]:
    return [
        {"t": float(t), "gap": spectral_gap(H, float(t)).gap}
        for t in np.linspace(0.0, 1.0, points)
    ]


# ------------------------------------------------------------------------------------------------ #
#                                       EVOLUTION                                                  #
# ------------------------------------------------------------------------------------------------ #
def _exp_step(matrix: np.ndarray, scale: float, vec: np.ndarray) -> np.ndarray:
    """exp(-i scale M) vec for real symmetric M."""
    values, vectors = eigh(matrix)
    return vectors @ (np.exp(-1j * scale * values) * (vectors.T @ vec))


def evolve_adiabatic(
    H: LogicalHamiltonian,
    tau: float = DEFAULT_ADIABATIC_TAU,
    steps: int = DEFAULT_ADIABATIC_STEPS,
    start: Union[str, np.ndarray] = START_LOGICAL,
) -> np.ndarray:
    """Integrates i d/ds psi = tau A(s) psi over s in [0, 1].

    Each step is the fourth-order commutator-free Magnus scheme: two exponentials of weighted
    combinations of A at the Gauss nodes, formed exactly from an eigendecomposition, then the state
    is renormalized.

    Args:
        H (LogicalHamiltonian): The compiled Hamiltonian.
        tau (float): Total time.
        steps (int): Magnus steps.
        start (Union[str, np.ndarray]): ``logical`` for |0^k, 1>_L, ``ground`` for psi(0), or an
            explicit vector.

    Raises:
        SolverError: If a step loses more norm than the unitarity tolerance.
    """
    if tau <= 0 or steps < 1:
        raise DomainError(f"Need tau > 0 and steps >= 1, got {tau}, {steps}.")
    if isinstance(start, str):
        if start == START_LOGICAL:
            psi = logical_start(H).astype(complex)
        elif start == START_GROUND:
            psi = ground_state(H, 0.0).astype(complex)
        else:
            raise DomainError(f"Unknown start {start!r}.")
    else:
        psi = np.asarray(start, dtype=complex).reshape(-1)
        psi = psi / np.linalg.norm(psi)

    h = 1.0 / steps
    logger.info(f"Adiabatic evolution: dimension {H.dimension}, tau={tau:g}, {steps} steps.")
    for n in range(steps):
        s = n * h
        A1 = H.matrix(s + (0.5 - _GAUSS_OFFSET) * h)
        A2 = H.matrix(s + (0.5 + _GAUSS_OFFSET) * h)
        psi = _exp_step(_CF4_A2 * A1 + _CF4_A1 * A2, tau * h, psi)
        psi = _exp_step(_CF4_A1 * A1 + _CF4_A2 * A2, tau * h, psi)
        norm = float(np.linalg.norm(psi))
        if abs(norm - 1.0) > DEFAULT_UNITARITY_TOL:
            raise SolverError(f"Magnus step {n} lost norm", residual=abs(norm - 1.0))
        psi = psi / norm
    return psi


def adiabatic_error(final: np.ndarray, H: LogicalHamiltonian) -> float:
    """Distance from the final state to psi(1), minimized over the global phase."""
    overlap = abs(np.vdot(ground_state(H, 1.0), final))
    return math.sqrt(max(0.0, 2.0 * (1.0 - overlap)))


def register_distribution(final: np.ndarray, H: LogicalHamiltonian) -> Dict[Tuple[int, ...], float]:
    """Probability of reading each search point off the variable registers."""
    probs = np.abs(final) ** 2
    out: Dict[Tuple[int, ...], float] = {}
    for (j, _), p in zip(H.labels, probs):
        out[j] = out.get(j, 0.0) + float(p)
    return out


def clock_error_bound(t: float, n_max: int, r: float) -> float:
    """(|t| + t^2) n_max^2 e^{-r}: cost of running the schedule off a squeezed clock."""
    return (abs(t) + t * t) * n_max**2 * math.exp(-r)


# ------------------------------------------------------------------------------------------------ #
#                                     INPUT LOADING                                                #
# ------------------------------------------------------------------------------------------------ #
class IntegerLoad(NamedTuple):
    mean: float
    variance_bound: float
    gate_count: int


def round_matrix_power(k: int) -> np.ndarray:
    """M^k for one doubling round M = [[3/2, 1], [1/2, 1]], in closed form."""
    return np.array(
        [
            [2.0 ** (k + 1) + 2.0**-k, 2.0 ** (k + 1) - 2.0 ** (1 - k)],
            [2.0**k - 2.0**-k, 2.0**k + 2.0 ** (1 - k)],
        ]
    ) / 3.0


def loading_circuit(x: int) -> List[Tuple[int, int, float]]:
    """SUM gates (control, target, s) on modes 0, 1, 2 that move x into the position of mode 2.

    For each bit k from the lowest: if set, SUM(0 -> 2, 1); then, unless it was the top bit, the
    doubling round SUM(0 -> 1, 1/2) followed by SUM(1 -> 0, 1).
    """
    if x < 1:
        raise DomainError(f"Loading needs x >= 1, got {x}.")
    gates: List[Tuple[int, int, float]] = []
    bits = x.bit_length()
    for k in range(bits):
        if (x >> k) & 1:
            gates.append((0, 2, 1.0))
        if k < bits - 1:
            gates.append((0, 1, 0.5))
            gates.append((1, 0, 1.0))
    return gates


def load_integer(x: int, r: float) -> IntegerLoad:
    """Mean, exact variance and gate count of loading x from squeezed inputs.

    Modes 0 and 1 start at positions 1 and 1/2, mode 2 at 0, each squeezed by r. Mode 2 ends at
    X_2 + A X_0 + B X_1 with A = sum b_k alpha_k, B = sum b_k beta_k, whose mean is x and whose
    variance is (1 + A^2 + B^2) e^{-2r}/2.
    """
    if r <= 0:
        raise DomainError(f"Squeezing must be positive, got {r}.")
    gates = loading_circuit(x)
    A = B = 0.0
    for k in range(x.bit_length()):
        if (x >> k) & 1:
            alpha, beta = round_matrix_power(k)[0]
            A += alpha
            B += beta
    mean = A + 0.5 * B
    variance = (1.0 + A * A + B * B) * math.exp(-2.0 * r) / 2.0
    return IntegerLoad(mean, variance, len(gates))


def simulate_load(x: int, r: float) -> Tuple[float, float]:
    """(mean, variance) of the position of mode 2 after :func:`loading_circuit`, in gausssim."""
    squeezed = [gausssim.squeezed_vacuum(r) for _ in range(3)]
    state = gausssim.product(*squeezed)
    for mode, position in ((0, 1.0), (1, 0.5)):
        shift = gausssim.displace(position / math.sqrt(2.0), mode, 3)
        state = gausssim.apply_gaussian(state, shift)
    for control, target, s in loading_circuit(x):
        state = gausssim.apply_gaussian(state, gausssim.sum_gate(s, control, target, 3))
    return float(state.mu[2]), float(state.Gamma[2, 2])


# ------------------------------------------------------------------------------------------------ #
#                                        OUTPUT                                                    #
# ------------------------------------------------------------------------------------------------ #
class Separation(NamedTuple):
    p_window: float
    p_low: float


def _dpa_bogoliubov(c: float, t: float) -> Tuple[complex, float]:
    if c < 0 or 0 < c <= 1:
        raise DomainError(f"The amplifier is analysed for c = 0 and c > 1, got c={c}.")
    if c == 0:
        return complex(math.cosh(t)), math.sinh(t)
    omega = math.sqrt(c * c - 1.0)
    u = complex(math.cos(omega * t), -c / omega * math.sin(omega * t))
    return u, math.sin(omega * t) / omega


def dpa_squeezing(c: float, t: float) -> float:
    """Squeezing r(t) = arcsinh|v(t)| of exp(-it G)|0>, G = c N + (i/2)(a^dag2 - a^2)."""
    _, v = _dpa_bogoliubov(c, t)
    return math.asinh(abs(v))


def dpa_output(c: float, t: float) -> GaussianDesc:
    """exp(-it G)|0> for the detuned degenerate parametric amplifier, up to global phase.

    a(t) = u a + v a^dag with u = cos(wt) - i (c/w) sin(wt), v = sin(wt)/w, w = sqrt(c^2 - 1);
    c = 0 gives S(-t)|0>. For c >= 2 the squeezing stays below ln((c+1)/(c-1))/2 < 1.

    Raises:
        DomainError: For c in (0, 1], where the dynamics is not analysed.
    """
    u, v = _dpa_bogoliubov(c, t)
    S = np.array([[u.real + v, -u.imag], [u.imag, u.real - v]])
    return gausssim.apply_gaussian(gausssim.vacuum(1), SymplecticGate(S))


def _window(nbar_state: float, low: float, high: float) -> float:
    return smsv_survival(nbar_state, low) - smsv_survival(nbar_state, math.floor(high) + 1)


def yes_no_separation(F_value: int, t: float) -> Separation:
    """Photon statistics of the output mode after time t for an instance value F.

    The output is squeezed with c = 2F^2, so a root (F = 0) squeezes by t and leaves nbar =
    sinh^2 t photons on average, while F != 0 keeps the squeezing below ln 3/2. Returns the exact
    probabilities of N in [sqrt(nbar), nbar^{3/2}] and of N < nbar for that F.
    """
    if t <= 0:
        raise DomainError(f"Output time must be positive, got {t}.")
    nbar = math.sinh(t) ** 2
    c = 2.0 * float(F_value) ** 2
    r = dpa_squeezing(c, t)
    n_state = math.sinh(r) ** 2
    p_window = _window(n_state, math.sqrt(nbar), nbar**1.5)
    p_low = 1.0 - smsv_survival(n_state, nbar)
    return Separation(p_window, p_low)


# ------------------------------------------------------------------------------------------------ #
#                                       PIPELINE                                                   #
# ------------------------------------------------------------------------------------------------ #
def solve_instance(
    instance: DiophantineInstance,
    tau: float = DEFAULT_ADIABATIC_TAU,
    steps: int = DEFAULT_ADIABATIC_STEPS,
    t_out: float = DEFAULT_OUTPUT_TIME,
    whisker_power: int = DEFAULT_WHISKER_POWER,
    start: str = START_LOGICAL,
    gap_points: int = DEFAULT_GAP_POINTS,
) -> Dict[str, Any]:
    """Builds, evolves, reads the registers and squeezes the output.

    The answer is YES when the output photon window is hit with probability at least one half.
    """
    H = build_adiabatic(instance, whisker_power=whisker_power)
    trace = gap_trace(H, gap_points)
    final = evolve_adiabatic(H, tau=tau, steps=steps, start=start)
    distribution = register_distribution(final, H)
    p_yes = sum(
        p * yes_no_separation(instance.f1(j), t_out).p_window for j, p in distribution.items()
    )
    solutions = instance.solutions()
    record = {
        "name": instance.name,
        "bounds": list(instance.bounds),
        "dimension": H.dimension,
        "tau": tau,
        "steps": steps,
        "t_out": t_out,
        "min_gap": min(point["gap"] for point in trace),
        "gap_trace": trace,
        "final_overlap": float(abs(np.vdot(ground_state(H, 1.0), final)) ** 2),
        "solution_probability": float(sum(distribution.get(j, 0.0) for j in solutions)),
        "p_window": float(p_yes),
        "answer": "YES" if p_yes >= 0.5 else "NO",
        "expected": "YES" if solutions else "NO",
    }
    logger.info(
        f"Instance {instance.name or '?'}: answer {record['answer']} "
        f"(window probability {p_yes:.4f}, expected {record['expected']})."
    )
    return record

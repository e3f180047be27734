#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : focksim.py                                                                          #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 05:02:47 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Dense truncated-Fock simulation with computable error certificates.

Everything else in the package is checked against this module, so it favours the obvious
computation over the clever one. States are flat complex vectors over a per-mode cutoff box,
ordered mode-0-fastest as in :mod:`cvlab.algebra`.

The adaptive evolution follows the slice-and-truncate scheme: evolve for slices of length
t = E^-d with the Hamiltonian realized on the larger box N = E + 8d, project back onto the box E
after every slice, and certify the result from the norm lost at each projection plus a leakage
term for the realization error. The cutoff doubles until the certificate meets the target.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import expm
from scipy.sparse.linalg import LinearOperator, expm_multiply
from scipy.special import gammaln

from cvlab.algebra import (
    PolyOp,
    TruncatedMatrix,
    apply_to_vector,
    box_dim,
    box_shape,
    ladder_monomial_matrix,
    to_matrix,
)
from cvlab.constants import (
    DEFAULT_GRID_POINTS,
    DEFAULT_JSON_INDENT,
    DEFAULT_KRYLOV_DIM,
    DEFAULT_LEAKAGE_ORDER,
    DEFAULT_MAX_AMPLITUDES,
    DEFAULT_MAX_CUTOFF,
    DEFAULT_MAX_DIM,
    DEFAULT_MIN_CUTOFF,
    DEFAULT_UNITARITY_TOL,
)
from cvlab.errors import (
    CapExceededError,
    CertificateNotMetError,
    DomainError,
    ModeMismatchError,
    SolverError,
)

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
Cutoffs = Union[int, Sequence[int]]


def _as_cutoffs(cutoffs: Cutoffs, num_modes: int) -> Tuple[int, ...]:
    if isinstance(cutoffs, (int, np.integer)):
        return (int(cutoffs),) * num_modes
    cutoffs = tuple(int(e) for e in cutoffs)
    if len(cutoffs) != num_modes:
        raise ModeMismatchError(f"{len(cutoffs)} cutoffs given for {num_modes} mode(s).")
    return cutoffs


# ------------------------------------------------------------------------------------------------ #
#                                         STATES                                                   #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class FockState:
    """Pure state on a per-mode cutoff box.

    Args:
        cutoffs (Tuple[int, ...]): Per-mode cutoffs; mode k holds photon numbers 0..cutoffs[k].
        amps (np.ndarray): Flat amplitudes, mode-0-fastest. Stored read-only.
        norm_log (float): Log of the norm already divided out of a post-selected branch.

    Raises:
        CapExceededError: If the box holds more than ``DEFAULT_MAX_AMPLITUDES`` amplitudes.
    """

    cutoffs: Tuple[int, ...]
    amps: np.ndarray
    norm_log: float = 0.0

    def __post_init__(self) -> None:
        cutoffs = tuple(int(e) for e in self.cutoffs)
        if not cutoffs or min(cutoffs) < 0:
            raise DomainError(f"Invalid cutoffs {self.cutoffs}.")
        dim = box_dim(cutoffs)
        if dim > DEFAULT_MAX_AMPLITUDES:
            raise CapExceededError("amplitude count", dim, DEFAULT_MAX_AMPLITUDES)
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if amps.size != dim:
            raise DomainError(f"{amps.size} amplitudes do not fill the box {cutoffs}.")
        amps.setflags(write=False)
        object.__setattr__(self, "cutoffs", cutoffs)
        object.__setattr__(self, "amps", amps)

    @property
    def num_modes(self) -> int:
        return len(self.cutoffs)

    @property
    def dim(self) -> int:
        return self.amps.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def as_tensor(self) -> np.ndarray:
        """Amplitudes as a tensor whose axis m-1-k belongs to mode k."""
        return self.amps.reshape(box_shape(self.cutoffs))

    def normalized(self) -> FockState:
        norm = self.norm
        if norm == 0.0:
            raise DomainError("Cannot normalize the zero vector.")
        return FockState(self.cutoffs, self.amps / norm, self.norm_log + math.log(norm))

    def padded(self, cutoffs: Cutoffs) -> FockState:
        """Embeds the state in a box at least as large on every mode."""
        cutoffs = _as_cutoffs(cutoffs, self.num_modes)
        if cutoffs == self.cutoffs:
            return self
        if any(a < b for a, b in zip(cutoffs, self.cutoffs)):
            raise DomainError(f"Box {cutoffs} is smaller than the state's box {self.cutoffs}.")
        tensor = np.zeros(box_shape(cutoffs), dtype=complex)
        tensor[tuple(slice(0, s) for s in box_shape(self.cutoffs))] = self.as_tensor()
        return FockState(cutoffs, tensor.reshape(-1), self.norm_log)

    def truncated(self, cutoffs: Cutoffs) -> FockState:
        """Applies Pi_E: keeps the amplitudes inside a box no larger on any mode."""
        cutoffs = _as_cutoffs(cutoffs, self.num_modes)
        if any(a > b for a, b in zip(cutoffs, self.cutoffs)):
            raise DomainError(f"Box {cutoffs} is larger than the state's box {self.cutoffs}.")
        tensor = self.as_tensor()[tuple(slice(0, s) for s in box_shape(cutoffs))]
        return FockState(cutoffs, tensor.reshape(-1), self.norm_log)

    def resized(self, cutoffs: Cutoffs) -> FockState:
        """Pads or truncates mode by mode."""
        cutoffs = _as_cutoffs(cutoffs, self.num_modes)
        common = tuple(min(a, b) for a, b in zip(cutoffs, self.cutoffs))
        return self.truncated(common).padded(cutoffs)

    def kron(self, other: FockState) -> FockState:
        """Tensor product; the modes of ``other`` follow those of this state."""
        return FockState(
            self.cutoffs + other.cutoffs,
            np.kron(other.amps, self.amps),
            self.norm_log + other.norm_log,
        )

    def support_cutoffs(self, atol: float = 0.0) -> Tuple[int, ...]:
        """Per-mode highest photon number carrying an amplitude above ``atol``."""
        weight = np.abs(self.as_tensor()) > atol
        m = self.num_modes
        result = []
        for k in range(m):
            axes = tuple(a for a in range(m) if a != m - 1 - k)
            occupied = np.nonzero(weight.any(axis=axes) if axes else weight)[0]
            result.append(int(occupied[-1]) if occupied.size else 0)
        return tuple(result)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cutoffs": list(self.cutoffs),
            "re": self.amps.real.tolist(),
            "im": self.amps.imag.tolist(),
            "norm_log": self.norm_log,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> FockState:
        amps = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        return cls(tuple(data["cutoffs"]), amps, float(data.get("norm_log", 0.0)))


@dataclass(frozen=True)
class DensityMatrix:
    """Mixed state on a cutoff box; produced by dissipation.

    Args:
        cutoffs (Tuple[int, ...]): Per-mode cutoffs.
        rho (np.ndarray): Square matrix over the flat box. Stored read-only.
    """

    cutoffs: Tuple[int, ...]
    rho: np.ndarray

    def __post_init__(self) -> None:
        cutoffs = tuple(int(e) for e in self.cutoffs)
        rho = np.array(self.rho, dtype=complex)
        dim = box_dim(cutoffs)
        if rho.shape != (dim, dim):
            raise DomainError(f"Density matrix of shape {rho.shape} does not fit box {cutoffs}.")
        rho.setflags(write=False)
        object.__setattr__(self, "cutoffs", cutoffs)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_state(cls, state: FockState) -> DensityMatrix:
        return cls(state.cutoffs, np.outer(state.amps, state.amps.conj()))

    @property
    def num_modes(self) -> int:
        return len(self.cutoffs)

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)))

    @property
    def purity(self) -> float:
        return float(np.real(np.vdot(self.rho, self.rho))) / self.trace**2

    def padded(self, cutoffs: Cutoffs) -> DensityMatrix:
        cutoffs = _as_cutoffs(cutoffs, self.num_modes)
        if cutoffs == self.cutoffs:
            return self
        shape = box_shape(cutoffs)
        tensor = np.zeros(shape + shape, dtype=complex)
        inner = tuple(slice(0, s) for s in box_shape(self.cutoffs))
        tensor[inner + inner] = self.rho.reshape(box_shape(self.cutoffs) * 2)
        dim = box_dim(cutoffs)
        return DensityMatrix(cutoffs, tensor.reshape(dim, dim))

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.rho))


StateLike = Union[FockState, DensityMatrix]


# ------------------------------------------------------------------------------------------------ #
#                                      CONSTRUCTORS                                                #
# ------------------------------------------------------------------------------------------------ #
def vacuum(cutoffs: Sequence[int]) -> FockState:
    cutoffs = tuple(int(e) for e in cutoffs)
    amps = np.zeros(box_dim(cutoffs), dtype=complex)
    amps[0] = 1.0
    return FockState(cutoffs, amps)


def fock(photons: Sequence[int], cutoffs: Sequence[int]) -> FockState:
    """The number state |n_0, ..., n_{m-1}>."""
    photons = tuple(int(n) for n in photons)
    cutoffs = tuple(int(e) for e in cutoffs)
    if len(photons) != len(cutoffs):
        raise ModeMismatchError("Photon numbers and cutoffs disagree on the mode count.")
    if any(n < 0 or n > e for n, e in zip(photons, cutoffs)):
        raise DomainError(f"Number state {photons} lies outside the box {cutoffs}.")
    tensor = np.zeros(box_shape(cutoffs), dtype=complex)
    tensor[tuple(reversed(photons))] = 1.0
    return FockState(cutoffs, tensor.reshape(-1))


def product(states: Iterable[FockState]) -> FockState:
    states = list(states)
    if not states:
        raise DomainError("A product needs at least one factor.")
    result = states[0]
    for state in states[1:]:
        result = result.kron(state)
    return result


def coherent(alpha: Union[complex, Sequence[complex]], cutoffs: Cutoffs) -> FockState:
    """D(alpha)|0>, amplitudes computed in the log domain."""
    if np.isscalar(alpha):
        alphas = [complex(alpha)]  # type: ignore[arg-type]
    else:
        alphas = [complex(a) for a in alpha]  # type: ignore[union-attr]
    cutoffs = _as_cutoffs(cutoffs, len(alphas))
    factors = []
    for a, cutoff in zip(alphas, cutoffs):
        n = np.arange(cutoff + 1)
        if a == 0:
            amps = (n == 0).astype(complex)
        else:
            log_mag = -0.5 * abs(a) ** 2 + n * math.log(abs(a)) - 0.5 * gammaln(n + 1)
            amps = np.exp(log_mag) * np.exp(1j * n * np.angle(a))
        factors.append(FockState((cutoff,), amps))
    return product(factors)


def squeezed_vacuum(r: float, cutoff: int, phi: float = 0.0) -> FockState:
    """S(r)|0> for S(r) = exp((r/2)(e^{-2i phi} a^2 - e^{2i phi} a^dag^2)); <N> = sinh^2 r.

    Amplitudes: (1/sqrt(cosh r)) (-e^{2i phi} tanh r)^m sqrt((2m)!) / (2^m m!) on |2m>.
    """
    amps = np.zeros(cutoff + 1, dtype=complex)
    m = np.arange(cutoff // 2 + 1)
    if r == 0.0:
        amps[0] = 1.0
        return FockState((cutoff,), amps)
    t = math.tanh(r)
    log_mag = (
        -0.5 * math.log(math.cosh(r))
        + m * math.log(abs(t))
        + 0.5 * gammaln(2 * m + 1)
        - m * math.log(2.0)
        - gammaln(m + 1)
    )
    phase = (-np.sign(t) * np.exp(2j * phi)) ** m
    amps[2 * m] = np.exp(log_mag) * phase
    return FockState((cutoff,), amps)


def hermite_functions(cutoff: int, x: np.ndarray) -> np.ndarray:
    """Position wavefunctions <x|n> for n = 0..cutoff, shape (cutoff+1, len(x)).

    Uses the three-term recurrence h_{n+1} = sqrt(2/(n+1)) x h_n - sqrt(n/(n+1)) h_{n-1}, which
    is stable where the explicit Hermite polynomials overflow.
    """
    x = np.asarray(x, dtype=float)
    h = np.zeros((cutoff + 1,) + x.shape)
    h[0] = math.pi**-0.25 * np.exp(-0.5 * x**2)
    if cutoff >= 1:
        h[1] = math.sqrt(2.0) * x * h[0]
    for n in range(1, cutoff):
        h[n + 1] = math.sqrt(2.0 / (n + 1)) * x * h[n] - math.sqrt(n / (n + 1)) * h[n - 1]
    return h


def default_extent(cutoff: int) -> float:
    return math.sqrt(2.0 * cutoff + 1.0) + 10.0


def from_wavefunction(
    wavefunction: Callable[..., np.ndarray],
    cutoffs: Cutoffs,
    num_modes: int = 1,
    extent: Optional[float] = None,
    points: int = DEFAULT_GRID_POINTS,
) -> FockState:
    """Projects a position wavefunction onto number states.

    The overlap with each Hermite function is a trapezoid sum on a uniform grid over
    [-extent, extent] per mode, which converges spectrally for smooth rapidly decaying inputs.

    Args:
        wavefunction (Callable[..., np.ndarray]): Vectorized psi(x_0, ..., x_{m-1}).
        cutoffs (Cutoffs): Target box.
        num_modes (int): Number of arguments of ``wavefunction``.
        extent (Optional[float]): Half-width of the grid; defaults to a margin beyond the
            classical turning point of the highest number state.
        points (int): Grid points per mode.

    Returns:
        FockState: The projected, unnormalized state.
    """
    cutoffs = _as_cutoffs(cutoffs, num_modes)
    grid = position_grid(cutoffs, extent, points)
    values = wavefunction(*np.meshgrid(*([grid] * num_modes), indexing="ij"))
    return from_grid_values(values, grid, cutoffs)


def position_grid(
    cutoffs: Sequence[int], extent: Optional[float] = None, points: int = DEFAULT_GRID_POINTS
) -> np.ndarray:
    """Uniform grid wide enough for every number state up to max(cutoffs)."""
    half = extent if extent is not None else default_extent(max(cutoffs))
    return np.linspace(-half, half, points)


def from_grid_values(values: np.ndarray, grid: np.ndarray, cutoffs: Cutoffs) -> FockState:
    """Projects wavefunction samples on ``grid`` (one axis per mode) onto number states."""
    tensor = np.asarray(values, dtype=complex)
    num_modes = tensor.ndim
    cutoffs = _as_cutoffs(cutoffs, num_modes)
    weights = np.full(grid.size, grid[1] - grid[0])
    weights[[0, -1]] *= 0.5
    for k in range(num_modes):
        basis = hermite_functions(cutoffs[k], grid) * weights
        tensor = np.moveaxis(np.tensordot(basis, tensor, axes=([1], [k])), 0, k)
    # axis k is mode k here; flat order wants mode 0 last
    tensor = np.transpose(tensor, tuple(reversed(range(num_modes))))
    return FockState(cutoffs, tensor.reshape(-1))


def position_wavefunction(state: FockState, *grids: np.ndarray) -> np.ndarray:
    """Evaluates psi on the outer product of one grid per mode; axis k follows mode k."""
    if len(grids) != state.num_modes:
        raise ModeMismatchError(f"Need {state.num_modes} grid(s), got {len(grids)}.")
    tensor = np.transpose(state.as_tensor(), tuple(reversed(range(state.num_modes))))
    for k, grid in enumerate(grids):
        basis = hermite_functions(state.cutoffs[k], np.asarray(grid, dtype=float))
        tensor = np.moveaxis(np.tensordot(basis.T, tensor, axes=([1], [k])), 0, k)
    return tensor


# ------------------------------------------------------------------------------------------------ #
#                                        READOUTS                                                  #
# ------------------------------------------------------------------------------------------------ #
def inner(bra: FockState, ket: FockState) -> complex:
    """<bra|ket> after padding both to a common box."""
    if bra.num_modes != ket.num_modes:
        raise ModeMismatchError("States act on different numbers of modes.")
    box = tuple(max(a, b) for a, b in zip(bra.cutoffs, ket.cutoffs))
    return complex(np.vdot(bra.padded(box).amps, ket.padded(box).amps))


def fidelity(a: FockState, b: FockState) -> float:
    """|<a|b>|^2 / (|a|^2 |b|^2)."""
    return abs(inner(a, b)) ** 2 / (a.norm**2 * b.norm**2)


def distance(a: FockState, b: FockState) -> float:
    """Euclidean distance between the (unnormalized) vectors."""
    box = tuple(max(x, y) for x, y in zip(a.cutoffs, b.cutoffs))
    return float(np.linalg.norm(a.padded(box).amps - b.padded(box).amps))


def expectation(state: StateLike, op: PolyOp) -> complex:
    """<op> in the truncation box, normalized by the state's norm or trace."""
    if op.num_modes != state.num_modes:
        raise ModeMismatchError(f"Operator on {op.num_modes} modes, state on {state.num_modes}.")
    if isinstance(state, DensityMatrix):
        matrix = to_matrix(op, state.cutoffs, max_dim=state.rho.shape[0])
        return complex(np.trace(matrix.entries @ state.rho)) / state.trace
    applied = apply_to_vector(op, state.amps, state.cutoffs)
    return complex(np.vdot(state.amps, applied)) / state.norm**2


def photon_distribution(state: StateLike, mode: Optional[int] = None) -> np.ndarray:
    """Photon-number distribution of one mode, or of the total count when ``mode`` is None."""
    if isinstance(state, DensityMatrix):
        weights = state.diagonal().reshape(box_shape(state.cutoffs)) / state.trace
    else:
        weights = np.abs(state.as_tensor()) ** 2 / state.norm**2
    m = len(state.cutoffs)
    if mode is None:
        totals = _total_photons(state.cutoffs)
        return np.bincount(totals.reshape(-1), weights=weights.reshape(-1))
    if not 0 <= mode < m:
        raise ModeMismatchError(f"Mode {mode} is outside a {m}-mode state.")
    axes = tuple(a for a in range(m) if a != m - 1 - mode)
    return weights.sum(axis=axes) if axes else weights


def probability(state: StateLike, mode: int, accept_set: Iterable[int]) -> float:
    """Probability that ``mode`` is found with a photon number in ``accept_set``."""
    dist = photon_distribution(state, mode)
    return float(sum(dist[n] for n in set(accept_set) if 0 <= n < dist.size))


def _total_photons(cutoffs: Sequence[int]) -> np.ndarray:
    total = np.zeros(box_shape(cutoffs), dtype=np.int64)
    m = len(cutoffs)
    for k, cutoff in enumerate(cutoffs):
        shape = [1] * m
        shape[m - 1 - k] = cutoff + 1
        total = total + np.arange(cutoff + 1).reshape(shape)
    return total


def moments(state: StateLike, k: int) -> float:
    """<N^k> for the total photon number, within the box.

    Raises:
        DomainError: If ``k`` < 1.
    """
    if int(k) != k or k < 1:
        raise DomainError(f"Moment order must be a positive integer, got {k}.")
    dist = photon_distribution(state)
    return float(np.dot(np.arange(dist.size, dtype=float) ** k, dist))


def mean_photon_number(state: StateLike, mode: Optional[int] = None) -> float:
    if mode is None:
        return moments(state, 1)
    dist = photon_distribution(state, mode)
    return float(np.dot(np.arange(dist.size), dist))


# ------------------------------------------------------------------------------------------------ #
#                                       EVOLUTION                                                  #
# ------------------------------------------------------------------------------------------------ #
def _diagonal(op: PolyOp, cutoffs: Sequence[int]) -> np.ndarray:
    diag = np.zeros(box_shape(cutoffs), dtype=complex)
    for (mu, nu), c in op.items():
        if mu != nu:
            continue
        factor = np.ones(())
        for k in reversed(range(op.num_modes)):
            elements = np.diag(ladder_monomial_matrix(mu[k], nu[k], cutoffs[k]))
            factor = np.multiply.outer(factor, elements)
        diag += complex(c) * factor
    return diag.reshape(-1)


def propagator(
    H: PolyOp, cutoffs: Sequence[int], time: float, max_dim: int = DEFAULT_MAX_DIM
) -> np.ndarray:
    """Dense exp(-i time H_N) on the box, by scaling and squaring."""
    matrix = to_matrix(H, cutoffs, max_dim=max_dim)
    U = expm(-1j * time * matrix.entries)
    if not np.all(np.isfinite(U)):
        raise SolverError("Matrix exponential produced non-finite entries.")
    return U


def _krylov_action(H: PolyOp, vec: np.ndarray, cutoffs: Tuple[int, ...], time: float) -> np.ndarray:
    dim = vec.size
    Hd = H.dagger()
    scale = -1j * time

    operator = LinearOperator(
        (dim, dim),
        matvec=lambda v: scale * apply_to_vector(H, v, cutoffs),
        rmatvec=lambda v: np.conj(scale) * apply_to_vector(Hd, v, cutoffs),
        dtype=complex,
    )
    trace = complex(scale * _diagonal(H, cutoffs).sum())
    logger.debug(f"Krylov exponential action on dimension {dim}.")
    return expm_multiply(operator, vec, traceA=trace)


def evolve_truncated(
    state: StateLike,
    H: PolyOp,
    time: float,
    cutoff: Optional[Cutoffs] = None,
    krylov_dim: int = DEFAULT_KRYLOV_DIM,
) -> StateLike:
    """Returns exp(-i time H_N) applied to the state, with H_N = Pi_N H Pi_N.

    The state is zero-padded to the box first. Up to ``krylov_dim`` the exponential is formed
    densely; above it a pure state is evolved by a Krylov action without forming the matrix.
    Density matrices are conjugated by the dense propagator.

    Args:
        state (StateLike): Input state, pure or mixed.
        H (PolyOp): Hamiltonian.
        time (float): Evolution time.
        cutoff (Optional[Cutoffs]): Box N; defaults to the state's own box.
        krylov_dim (int): Dimension above which the Krylov action is used.

    Returns:
        StateLike: The evolved state on the box N.

    Raises:
        SolverError: If the result is not finite or a Hermitian H fails to preserve the norm.
    """
    if not math.isfinite(time):
        raise DomainError(f"Evolution time must be finite, got {time}.")
    if H.num_modes != state.num_modes:
        raise ModeMismatchError(f"Hamiltonian on {H.num_modes} modes, state on {state.num_modes}.")
    box = state.cutoffs if cutoff is None else _as_cutoffs(cutoff, state.num_modes)
    if any(a > b for a, b in zip(state.cutoffs, box)):
        raise DomainError(f"State box {state.cutoffs} exceeds the evolution box {box}.")
    state = state.padded(box)
    dim = box_dim(box)

    if isinstance(state, DensityMatrix):
        if dim > krylov_dim:
            raise CapExceededError("density matrix dimension", dim, krylov_dim)
        U = propagator(H, box, time, max_dim=krylov_dim)
        return DensityMatrix(box, U @ state.rho @ U.conj().T)

    if dim <= krylov_dim:
        out = propagator(H, box, time, max_dim=krylov_dim) @ state.amps
    else:
        out = _krylov_action(H, state.amps, box, time)
    if not np.all(np.isfinite(out)):
        raise SolverError("Evolution produced non-finite amplitudes.")
    if H.is_hermitian(atol=1e-12):
        before, after = state.norm, float(np.linalg.norm(out))
        residual = abs(after - before)
        if residual > DEFAULT_UNITARITY_TOL * max(1.0, before):
            raise SolverError("Truncated evolution is not norm preserving", residual=residual)
    return FockState(box, out, state.norm_log)


# ------------------------------------------------------------------------------------------------ #
#                                  TRUNCATION CERTIFICATE                                          #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class TruncCertificate:
    """Certified error of an adaptive truncated evolution.

    ``delta_E`` is the sum of sqrt(max(0, |phi_{l-1}|^2 - |phi_l|^2)) over the slices plus
    sqrt(1 - |Pi_E psi(0)|^2). ``slice_term`` bounds the error of realizing H on the box N
    instead of exactly. ``trace`` keeps (E, delta_E, slice_term) for every cutoff tried.
    """

    cutoff: int
    slices: int
    slice_time: float
    delta_E: float
    per_slice_norm_losses: Tuple[float, ...]
    slice_term: float = 0.0
    leak_cutoff: int = 0
    trace: Tuple[Tuple[int, float, float], ...] = field(default_factory=tuple)

    @property
    def total(self) -> float:
        return self.delta_E + self.slice_term

    def to_dict(self, include_losses: bool = False) -> Dict[str, Any]:
        losses = np.asarray(self.per_slice_norm_losses, dtype=float)
        record: Dict[str, Any] = {
            "cutoff": self.cutoff,
            "leak_cutoff": self.leak_cutoff,
            "slices": self.slices,
            "slice_time": self.slice_time,
            "delta_E": self.delta_E,
            "slice_term": self.slice_term,
            "total": self.total,
            "max_slice_loss": float(losses.max(initial=0.0)),
            "trace": [list(entry) for entry in self.trace],
        }
        if include_losses:
            record["per_slice_norm_losses"] = losses.tolist()
        return record


def leakage_bound(E: int, k: int, d: int, s: float, H_coeff_bound: float) -> float:
    """Bound on the norm leaking out of the box during evolution for time ``s``.

    For a state supported on the box E, |Pi_perp e^{-isH} phi|^2 past E + (k-1)d is at most
    K^k s^k / k! * prod_{j=0}^{k-1} (E + j d)^{d/2}; the square root is returned. Any larger
    box, in particular E + kd, leaks no more.

    Args:
        E (int): Box of the initial state.
        k (int): Number of recursion steps.
        d (int): Degree of the Hamiltonian.
        s (float): Evolution time.
        H_coeff_bound (float): K_d, see :func:`coefficient_bound`.

    Returns:
        float: The leakage bound.
    """
    if E < 0 or k < 1 or d < 0 or s < 0 or H_coeff_bound < 0:
        raise DomainError("leakage_bound needs E >= 0, k >= 1, d >= 0, s >= 0 and K >= 0.")
    if s == 0 or H_coeff_bound == 0:
        return 0.0
    levels = [E + j * d for j in range(k)]
    if min(levels) == 0 and d > 0:
        return 0.0
    log_q = (
        k * math.log(H_coeff_bound)
        + k * math.log(s)
        - math.lgamma(k + 1)
        + 0.5 * d * sum(math.log(level) for level in levels if level > 0)
    )
    return math.exp(0.5 * log_q)


def _boundary_terms(H: PolyOp) -> List[Tuple[int, float]]:
    return [
        (sum(mu) + sum(nu), abs(complex(c)))
        for (mu, nu), c in H.items()
        if mu != nu
    ]


def coefficient_bound(H: PolyOp, E: int, levels: int = DEFAULT_LEAKAGE_ORDER) -> float:
    """K_d for the leakage recursion, valid on the boxes E, E+s, ..., E+(levels-1)s.

    A row of H between states inside and outside a box E' has at most one entry per term, and
    each entry of a^dag^mu a^nu between states with at most E'+s photons per mode is at most
    (E'+s)^{(|mu|+|nu|)/2}. Dividing the row sum by E'^{d/2} gives a valid K at that box; the
    maximum over the boxes the recursion visits is returned.
    """
    d = H.degree
    s = max(1, H.max_mode_shift)
    terms = _boundary_terms(H)
    if not terms:
        return 0.0
    best = 0.0
    for j in range(levels):
        level = max(1, E + j * s)
        row = sum(c * (level + s) ** (deg / 2.0) for deg, c in terms)
        best = max(best, row / level ** (d / 2.0))
    return best


def boundary_norm(H: PolyOp, cutoffs: Sequence[int], exact_dim: int = 2048) -> float:
    """Bound on |Pi_perp H Pi_N|: exact spectral norm on small boxes, a Schur bound otherwise."""
    s = max(1, H.max_mode_shift)
    outer = tuple(e + s for e in cutoffs)
    if box_dim(outer) <= exact_dim:
        full = to_matrix(H, outer, max_dim=exact_dim).entries
        inside = np.zeros(box_shape(outer), dtype=bool)
        inside[tuple(slice(0, e + 1) for e in reversed(cutoffs))] = True
        inside = inside.reshape(-1)
        block = full[np.ix_(~inside, inside)]
        return float(np.linalg.norm(block, 2)) if block.size else 0.0
    top = max(outer)
    return sum(c * top ** (deg / 2.0) for deg, c in _boundary_terms(H))


def _box_indices(inner_cutoffs: Sequence[int], outer_cutoffs: Sequence[int]) -> np.ndarray:
    """Flat indices of the inner box inside the outer box, in inner flat order."""
    grid = np.indices(box_shape(inner_cutoffs)).reshape(len(inner_cutoffs), -1)
    return np.ravel_multi_index(tuple(grid), box_shape(outer_cutoffs))


def evolve_adaptive(
    state: FockState,
    H: PolyOp,
    time: float,
    target_eps: float,
    max_cutoff: int = DEFAULT_MAX_CUTOFF,
    min_cutoff: int = DEFAULT_MIN_CUTOFF,
    max_dim: int = DEFAULT_MAX_DIM,
    order: int = DEFAULT_LEAKAGE_ORDER,
) -> Tuple[FockState, TruncCertificate]:
    """Slice-and-truncate evolution with a certified error.

    Args:
        state (FockState): Normalized input state.
        H (PolyOp): Hamiltonian.
        time (float): Total evolution time T.
        target_eps (float): Required bound on the Euclidean error, in (0, 1).
        max_cutoff (int): Largest cutoff E tried.
        min_cutoff (int): First cutoff tried when H moves photons.
        max_dim (int): Dense cap on the realization box N.
        order (int): Leakage recursion depth k; N = E + k d.

    Returns:
        Tuple[FockState, TruncCertificate]: phi_N(E, t, R) on the box E, and its certificate.

    Raises:
        CertificateNotMetError: If the cap is reached first. Carries the best total reached.
    """
    if not 0.0 < target_eps < 1.0:
        raise DomainError(f"target_eps must lie in (0, 1), got {target_eps}.")
    m = state.num_modes
    norm0 = state.norm
    psi0 = state.normalized()

    if H.max_mode_shift == 0:
        # photon numbers are conserved mode by mode, so the state's own box is exact
        box = psi0.support_cutoffs()
        evolved = evolve_truncated(psi0.truncated(box), H, time)
        cert = TruncCertificate(
            cutoff=max(box),
            slices=1,
            slice_time=float(time),
            delta_E=0.0,
            per_slice_norm_losses=(0.0,),
            leak_cutoff=max(box),
            trace=((max(box), 0.0, 0.0),),
        )
        out = evolved.padded(tuple(max(a, b) for a, b in zip(state.cutoffs, box)))
        return FockState(out.cutoffs, out.amps * norm0, state.norm_log), cert

    d = H.degree
    E = max(min_cutoff, max(psi0.support_cutoffs()))
    trace: List[Tuple[int, float, float]] = []
    best = math.inf
    logger.info(f"Adaptive truncation: degree {d}, time {time}, target {target_eps:.3e}.")

    while True:
        N = E + order * d
        box_E, box_N = (E,) * m, (N,) * m
        if E > max_cutoff or box_dim(box_N) > max_dim:
            logger.warning(f"Cutoff cap reached at E={E}; best certified error {best:.3e}.")
            raise CertificateNotMetError(best, E, target_eps)

        t = float(E) ** (-d)
        R = max(1, math.ceil(abs(time) / t - 1e-12))
        t_step = math.copysign(min(t, abs(time)), time) if time else 0.0
        t_last = time - (R - 1) * t_step

        idx = _box_indices(box_E, box_N)
        H_N = to_matrix(H, box_N, max_dim=max_dim).entries
        U = expm(-1j * t_step * H_N)[np.ix_(idx, idx)]
        U_last = U if t_last == t_step else expm(-1j * t_last * H_N)[np.ix_(idx, idx)]

        phi = psi0.resized(box_E).amps.copy()
        inside = float(np.vdot(phi, phi).real)
        prev = inside
        losses = []
        for step in range(R):
            phi = (U_last if step == R - 1 else U) @ phi
            now = float(np.vdot(phi, phi).real)
            losses.append(prev - now)
            prev = now
        if not np.all(np.isfinite(phi)):
            raise SolverError(f"Slice evolution produced non-finite amplitudes at E={E}.")

        delta_E = sum(math.sqrt(max(0.0, loss)) for loss in losses)
        delta_E += math.sqrt(max(0.0, 1.0 - inside))
        K = coefficient_bound(H, E, levels=order)
        leak = leakage_bound(E, order, d, abs(t_step), K)
        slice_term = R * leak * (2.0 + abs(t_step) * boundary_norm(H, box_N))
        total = delta_E + slice_term
        trace.append((E, delta_E, slice_term))
        best = min(best, total)
        logger.info(
            f"E={E}, N={N}, R={R}: delta_E={delta_E:.3e}, slice term={slice_term:.3e}."
        )

        if total <= target_eps:
            cert = TruncCertificate(
                cutoff=E,
                slices=R,
                slice_time=t_step,
                delta_E=delta_E,
                per_slice_norm_losses=tuple(losses),
                slice_term=slice_term,
                leak_cutoff=N,
                trace=tuple(trace),
            )
            return FockState(box_E, phi * norm0, state.norm_log), cert
        E *= 2


# ------------------------------------------------------------------------------------------------ #
#                                       DISSIPATION                                                #
# ------------------------------------------------------------------------------------------------ #
def damping_weights(cutoff: int, eta: float) -> np.ndarray:
    """W[j, n] = <n-j|K_j|n> = sqrt(C(n, j)) eta^{(n-j)/2} (1-eta)^{j/2}, zero for n < j."""
    dim = cutoff + 1
    W = np.zeros((dim, dim))
    if eta == 1.0:
        W[0] = 1.0
        return W
    n = np.arange(dim)
    for j in range(dim):
        src = n[j:]
        log_binom = gammaln(src + 1) - gammaln(j + 1) - gammaln(src - j + 1)
        with np.errstate(divide="ignore"):
            log_val = 0.5 * log_binom + 0.5 * (src - j) * np.log(eta) + 0.5 * j * np.log1p(-eta)
        W[j, j:] = np.exp(log_val)
    return W


def damping_kraus(cutoff: int, eta: float) -> List[np.ndarray]:
    """Kraus operators of amplitude damping with transmissivity eta.

    K_j |n> = sqrt(C(n, j)) eta^{(n-j)/2} (1-eta)^{j/2} |n-j>. The channel never raises photon
    number, so on a cutoff box it is exact.
    """
    W = damping_weights(cutoff, eta)
    dim = cutoff + 1
    ops = []
    for j in range(dim):
        K = np.zeros((dim, dim))
        K[np.arange(dim - j), np.arange(j, dim)] = W[j, j:]
        ops.append(K)
    return ops


def _damp_axis(tensor: np.ndarray, W: np.ndarray, ket: int, bra: int, dual: bool) -> np.ndarray:
    """sum_j K_j rho K_j^T, or K_j^T O K_j when ``dual``, on one ket/bra axis pair.

    Each K_j lives on the j-th superdiagonal, so every term is a shifted, reweighted block.
    """
    moved = np.moveaxis(tensor, (ket, bra), (0, 1))
    out = np.zeros_like(moved)
    dim = W.shape[1]
    extra = (1,) * (moved.ndim - 2)
    for j in range(dim):
        w = W[j, j:]
        if not w.any():
            continue
        weight = (w[:, None] * w[None, :]).reshape(w.size, w.size, *extra)
        if dual:
            out[j:, j:] += weight * moved[: dim - j, : dim - j]
        else:
            out[: dim - j, : dim - j] += weight * moved[j:, j:]
    return np.moveaxis(out, (0, 1), (ket, bra))


def lindblad_step(
    state: Union[FockState, DensityMatrix, TruncatedMatrix],
    gamma: float,
    time: float,
    modes: Optional[Sequence[int]] = None,
) -> Union[DensityMatrix, TruncatedMatrix]:
    """Integrates amplitude damping gamma (a rho a^dag - {rho, N}/2) for ``time``.

    Pure and mixed states evolve in the Schrodinger picture and come back as a
    :class:`DensityMatrix`. A :class:`TruncatedMatrix` is taken as an observable and evolves
    under the dual map, sum_j K_j^dag O K_j.

    Args:
        state (Union[FockState, DensityMatrix, TruncatedMatrix]): State or observable.
        gamma (float): Damping rate, nonnegative.
        time (float): Duration, nonnegative.
        modes (Optional[Sequence[int]]): Damped modes; all by default.

    Returns:
        Union[DensityMatrix, TruncatedMatrix]: The propagated state or observable.
    """
    if gamma < 0 or time < 0:
        raise DomainError(f"Damping needs gamma >= 0 and time >= 0, got {gamma}, {time}.")
    if isinstance(state, FockState):
        state = DensityMatrix.from_state(state)
    cutoffs = state.cutoffs
    m = len(cutoffs)
    targets = range(m) if modes is None else modes
    eta = math.exp(-gamma * time)
    dual = isinstance(state, TruncatedMatrix)
    matrix = state.entries if dual else state.rho
    shape = box_shape(cutoffs)
    tensor = np.asarray(matrix, dtype=complex).reshape(shape + shape)

    if eta != 1.0:
        for k in targets:
            axis = m - 1 - k
            tensor = _damp_axis(tensor, damping_weights(cutoffs[k], eta), axis, m + axis, dual)

    dim = box_dim(cutoffs)
    result = tensor.reshape(dim, dim)
    if dual:
        return TruncatedMatrix(cutoffs, result)
    return DensityMatrix(cutoffs, result)


# ------------------------------------------------------------------------------------------------ #
#                                        PERSISTENCE                                               #
# ------------------------------------------------------------------------------------------------ #
def dump_state(state: FockState, filepath: Union[str, Path]) -> Path:
    """Writes ``{"cutoffs", "re", "im", "norm_log"}`` as JSON."""
    filepath = Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    with open(filepath, "w", encoding="utf-8") as json_file:
        json.dump(state.to_dict(), json_file, indent=DEFAULT_JSON_INDENT)
    logger.info(f"Saved a {state.dim}-amplitude state to {filepath}.")
    return filepath


def load_state(filepath: Union[str, Path]) -> FockState:
    with open(filepath, "r", encoding="utf-8") as json_file:
        return FockState.from_dict(json.load(json_file))

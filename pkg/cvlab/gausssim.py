#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : gausssim.py                                                                         #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 05:41:19 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Phase-tracked simulation of pure Gaussian states.

A :class:`GaussianDesc` is the triple (Gamma, mu, r): covariance in (x_1..x_m, p_1..p_m) order
with vacuum Gamma = I/2, mean vector, and r = <alpha|g>, the overlap with the coherent state
displaced to the same mean. Gamma and mu fix the state up to a phase and r restores it, so sums
of Gaussian states can be added coherently.

Every description also carries its position wavefunction exponent,

    psi(x) = exp(-x^T K x / 2 + b^T x + c),

with K = Gamma_xx^{-1}/2 - i Gamma_xx^{-1} Gamma_xp and b = K x_bar + i p_bar. Overlaps, triple
overlaps, homodyne conditioning and the sandwich contraction are all Gaussian integrals over
these exponents, evaluated in the log domain.

A :class:`SymplecticGate` (S, d, phase) stands for phase * D(d) * U_S, where U_S is the
metaplectic operator with a positive vacuum amplitude. The named constructors set the phase so
each gate is exactly the unitary its name denotes.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import block_diag, logm

from cvlab import focksim
from cvlab.constants import DEFAULT_COND_GUARD, DEFAULT_PURITY_TOL, DEFAULT_SYMPLECTIC_TOL
from cvlab.errors import (
    DomainError,
    IllConditionedError,
    ModeMismatchError,
    NonSymplecticError,
    PostselectionError,
)

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
Exponent = Tuple[np.ndarray, np.ndarray, complex]
LOG_PI = math.log(math.pi)


def omega(num_modes: int) -> np.ndarray:
    """The symplectic form [[0, I], [-I, 0]]."""
    eye = np.eye(num_modes)
    zero = np.zeros((num_modes, num_modes))
    return np.block([[zero, eye], [-eye, zero]])


def interleaved_to_block(matrix_or_vector: np.ndarray) -> np.ndarray:
    """Reorders (x1, p1, x2, p2, ...) into (x1, ..., xm, p1, ..., pm)."""
    a = np.asarray(matrix_or_vector)
    n = a.shape[0]
    perm = np.concatenate([np.arange(0, n, 2), np.arange(1, n, 2)])
    return a[perm] if a.ndim == 1 else a[np.ix_(perm, perm)]


def block_to_interleaved(matrix_or_vector: np.ndarray) -> np.ndarray:
    a = np.asarray(matrix_or_vector)
    n = a.shape[0]
    perm = np.empty(n, dtype=int)
    perm[0::2] = np.arange(n // 2)
    perm[1::2] = np.arange(n // 2, n)
    return a[perm] if a.ndim == 1 else a[np.ix_(perm, perm)]


# ------------------------------------------------------------------------------------------------ #
#                                  GAUSSIAN INTEGRALS                                              #
# ------------------------------------------------------------------------------------------------ #
def log_gaussian_integral(
    M: np.ndarray, J: np.ndarray, C: complex, cond_guard: float = DEFAULT_COND_GUARD
) -> complex:
    """log of the integral of exp(-z^T M z / 2 + J^T z + C) over R^n.

    M is complex symmetric with positive definite real part, so its eigenvalues lie in the open
    right half plane and det(M)^{-1/2} is the product of principal square roots.

    Raises:
        IllConditionedError: If cond(M) exceeds ``cond_guard``.
    """
    n = M.shape[0]
    if n == 0:
        return complex(C)
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > cond_guard:
        raise IllConditionedError("Gaussian integral", float(cond))
    eigenvalues = np.linalg.eigvals(M)
    solution = np.linalg.solve(M, J)
    return complex(
        0.5 * n * math.log(2.0 * math.pi)
        - 0.5 * np.sum(np.log(eigenvalues))
        + 0.5 * J @ solution
        + C
    )


def _log_overlap(bra: Exponent, ket: Exponent) -> complex:
    Ka, ba, ca = bra
    Kb, bb, cb = ket
    return log_gaussian_integral(Ka.conj() + Kb, ba.conj() + bb, np.conj(ca) + cb)


def coherent_exponent(alpha: np.ndarray) -> Exponent:
    """Wavefunction exponent of D(alpha)|0>.

    K = I, b = x + ip and c = -n log(pi)/4 - x.x/2 - ip.x/2.
    """
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    n = alpha.size
    x, p = math.sqrt(2.0) * alpha.real, math.sqrt(2.0) * alpha.imag
    c = -0.25 * n * LOG_PI - 0.5 * float(x @ x) - 0.5j * float(p @ x)
    return np.eye(n, dtype=complex), x + 1j * p, complex(c)


def _raw_exponent(Gamma: np.ndarray, mu: np.ndarray) -> Exponent:
    """Normalized exponent of the state with covariance Gamma and mean mu, real constant."""
    n = mu.size // 2
    Gxx, Gxp = Gamma[:n, :n], Gamma[:n, n:]
    Gxx_inv = np.linalg.inv(Gxx)
    Kr = 0.5 * Gxx_inv
    Ki = -Gxx_inv @ Gxp
    Ki = 0.5 * (Ki + Ki.T)
    K = Kr + 1j * Ki
    x, p = mu[:n], mu[n:]
    b = K @ x + 1j * p
    _, logdet = np.linalg.slogdet(Kr)
    c = -0.25 * n * LOG_PI + 0.25 * logdet - 0.5 * float(x @ Kr @ x)
    return K, b, complex(c)


def _exponent_moments(
    K: np.ndarray, b: np.ndarray, c: complex
) -> Tuple[np.ndarray, np.ndarray, float]:
    """Covariance, mean and log-norm of exp(-x^T K x / 2 + b^T x + c)."""
    n = b.size
    Kr, Ki = K.real, K.imag
    Kr_inv = np.linalg.inv(Kr)
    Gxx = 0.5 * Kr_inv
    Gxp = -Gxx @ Ki
    Gpp = 0.5 * (Kr + Ki @ Kr_inv @ Ki)
    Gamma = np.block([[Gxx, Gxp], [Gxp.T, Gpp]])
    x = Kr_inv @ b.real
    p = b.imag - Ki @ x
    _, logdet = np.linalg.slogdet(Kr)
    log_norm_sq = 2.0 * c.real + 0.5 * n * LOG_PI - 0.5 * logdet + float(b.real @ x)
    return 0.5 * (Gamma + Gamma.T), np.concatenate([x, p]), 0.5 * log_norm_sq


# ------------------------------------------------------------------------------------------------ #
#                                       STATES                                                     #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class GaussianDesc:
    """A pure Gaussian state with its global phase.

    Args:
        Gamma (np.ndarray): Real symmetric 2m x 2m covariance, (x..., p...) order, det(2 Gamma) = 1.
        mu (np.ndarray): Real mean vector of length 2m.
        r (complex): <alpha|g> for the coherent state alpha at the same mean. Its modulus is
            fixed by Gamma to det(Gamma + I/2)^{-1/4}; its argument is the tracked phase.

    Raises:
        DomainError: If Gamma is not a pure covariance or |r| is inconsistent with it.
    """

    Gamma: np.ndarray
    mu: np.ndarray
    r: complex = 1.0

    def __post_init__(self) -> None:
        mu = np.array(self.mu, dtype=float).reshape(-1)
        n2 = mu.size
        Gamma = np.array(self.Gamma, dtype=float).reshape(n2, n2)
        Gamma = 0.5 * (Gamma + Gamma.T)
        if n2 % 2:
            raise DomainError(f"Mean vector of odd length {n2}.")
        r = complex(self.r)
        if n2 == 0:
            if not math.isclose(abs(r), 1.0, rel_tol=1e-9):
                raise DomainError(f"A zero-mode state carries a unit phase, got |r| = {abs(r)}.")
        else:
            sign, logdet = np.linalg.slogdet(2.0 * Gamma)
            if sign <= 0 or abs(logdet) > DEFAULT_PURITY_TOL * max(1.0, np.linalg.norm(Gamma)):
                raise DomainError(f"Covariance is not pure: log det(2 Gamma) = {logdet:.3e}.")
            expected = pure_overlap_modulus(Gamma)
            if r == 0 or not math.isclose(abs(r), expected, rel_tol=1e-6):
                raise DomainError(f"|r| = {abs(r):.6g} but the covariance implies {expected:.6g}.")
        Gamma.setflags(write=False)
        mu.setflags(write=False)
        object.__setattr__(self, "Gamma", Gamma)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "r", r)

    # -------------------------------------------------------------------------------------------- #
    @property
    def num_modes(self) -> int:
        return self.mu.size // 2

    @property
    def ref_alpha(self) -> np.ndarray:
        """Displacement of the reference coherent state, (x + ip)/sqrt(2) per mode."""
        n = self.num_modes
        return (self.mu[:n] + 1j * self.mu[n:]) / math.sqrt(2.0)

    @cached_property
    def exponent(self) -> Exponent:
        """(K, b, c) of the normalized wavefunction, phase included."""
        if self.num_modes == 0:
            empty = np.zeros((0, 0), dtype=complex)
            return empty, np.zeros(0, dtype=complex), complex(np.log(self.r))
        K, b, c = _raw_exponent(self.Gamma, self.mu)
        r_raw = np.exp(_log_overlap(coherent_exponent(self.ref_alpha), (K, b, c)))
        c = c + 1j * (np.angle(self.r) - np.angle(r_raw))
        return K, b, c

    @classmethod
    def from_exponent(cls, K: np.ndarray, b: np.ndarray, c: complex) -> Tuple[GaussianDesc, float]:
        """Reads a Gaussian wavefunction exponent back into a description.

        Returns:
            Tuple[GaussianDesc, float]: The normalized state, phase included, and the log of the
                norm that was divided out.
        """
        K = np.asarray(K, dtype=complex)
        b = np.asarray(b, dtype=complex).reshape(-1)
        if b.size == 0:
            c = complex(c)
            return cls(np.zeros((0, 0)), np.zeros(0), np.exp(1j * c.imag)), c.real
        K = 0.5 * (K + K.T)
        Gamma, mu, log_norm = _exponent_moments(K, b, complex(c))
        c_normed = complex(c) - log_norm
        alpha = (mu[: b.size] + 1j * mu[b.size :]) / math.sqrt(2.0)
        r = np.exp(_log_overlap(coherent_exponent(alpha), (K, b, c_normed)))
        state = cls(Gamma, mu, complex(r))
        state.__dict__["exponent"] = (K, b, c_normed)
        return state, log_norm

    @classmethod
    def empty(cls, phase: complex = 1.0) -> GaussianDesc:
        return cls(np.zeros((0, 0)), np.zeros(0), phase)

    def with_phase(self, phase: complex) -> GaussianDesc:
        """The same state multiplied by a unit phase."""
        return GaussianDesc(self.Gamma, self.mu, self.r * phase)

    def pinned(self) -> GaussianDesc:
        """The same ray with r real and positive."""
        return GaussianDesc(self.Gamma, self.mu, abs(self.r))

    @property
    def phase(self) -> complex:
        return self.r / abs(self.r)

    def wavefunction(self, *coords: np.ndarray) -> np.ndarray:
        """Evaluates psi at points given one coordinate array per mode (broadcast together)."""
        K, b, c = self.exponent
        xs = np.stack(np.broadcast_arrays(*[np.asarray(x, dtype=float) for x in coords]), axis=-1)
        quad = np.einsum("...i,ij,...j->...", xs, K, xs)
        return np.exp(-0.5 * quad + xs @ b + c)

    def to_dict(self) -> Dict[str, Any]:
        alpha = self.ref_alpha
        return {
            "Gamma": self.Gamma.reshape(-1).tolist(),
            "mu": self.mu.tolist(),
            "ref_alpha": {"re": alpha.real.tolist(), "im": alpha.imag.tolist()},
            "r": {"re": self.r.real, "im": self.r.imag},
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> GaussianDesc:
        mu = np.asarray(data["mu"], dtype=float)
        return cls(
            np.asarray(data["Gamma"], dtype=float).reshape(mu.size, mu.size),
            mu,
            complex(data["r"]["re"], data["r"]["im"]),
        )

    def __repr__(self) -> str:
        return f"GaussianDesc(num_modes={self.num_modes}, r={self.r:.6g})"


def pure_overlap_modulus(Gamma: np.ndarray) -> float:
    """|<alpha|g>| = det(Gamma + I/2)^{-1/4} for a pure state referenced at its own mean."""
    n2 = Gamma.shape[0]
    _, logdet = np.linalg.slogdet(Gamma + 0.5 * np.eye(n2))
    return math.exp(-0.25 * logdet)


def vacuum(num_modes: int) -> GaussianDesc:
    return GaussianDesc(0.5 * np.eye(2 * num_modes), np.zeros(2 * num_modes), 1.0)


def coherent_state(alpha: Sequence[complex]) -> GaussianDesc:
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    mu = math.sqrt(2.0) * np.concatenate([alpha.real, alpha.imag])
    return GaussianDesc(0.5 * np.eye(2 * alpha.size), mu, 1.0)


def squeezed_vacuum(z: float) -> GaussianDesc:
    """squeeze(z)|0>: position variance e^{-2z}/2, <N> = sinh^2 z."""
    Gamma = 0.5 * np.diag([math.exp(-2 * z), math.exp(2 * z)])
    return GaussianDesc(Gamma, np.zeros(2), 1.0 / math.sqrt(math.cosh(z)))


def two_mode_squeezed_vacuum(r: float) -> GaussianDesc:
    return apply_gaussian(vacuum(2), two_mode_squeeze(r, 0, 1, 2))


def product(*states: GaussianDesc) -> GaussianDesc:
    """Tensor product in the given mode order."""
    if not states:
        return GaussianDesc.empty()
    xs, ps, blocks_xx, blocks_xp, blocks_pp = [], [], [], [], []
    r = 1.0 + 0j
    for state in states:
        n = state.num_modes
        xs.append(state.mu[:n])
        ps.append(state.mu[n:])
        blocks_xx.append(state.Gamma[:n, :n])
        blocks_xp.append(state.Gamma[:n, n:])
        blocks_pp.append(state.Gamma[n:, n:])
        r *= state.r
    xp = block_diag(*blocks_xp)
    Gamma = np.block([[block_diag(*blocks_xx), xp], [xp.T, block_diag(*blocks_pp)]])
    return GaussianDesc(Gamma, np.concatenate(xs + ps), r)


# ------------------------------------------------------------------------------------------------ #
#                                        GATES                                                     #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class SymplecticGate:
    """phase * D(d) * U_S with <0|U_S|0> > 0.

    Args:
        S (np.ndarray): Real symplectic 2m x 2m matrix acting on (x..., p...).
        d (Optional[np.ndarray]): Displacement of the mean. Defaults to zero.
        phase (complex): Unit-modulus global phase. Defaults to 1.

    Raises:
        NonSymplecticError: If S Omega S^T differs from Omega by more than the tolerance.
    """

    S: np.ndarray
    d: Optional[np.ndarray] = None
    phase: complex = 1.0

    def __post_init__(self) -> None:
        S = np.array(self.S, dtype=float)
        n2 = S.shape[0]
        if S.shape != (n2, n2) or n2 % 2:
            raise NonSymplecticError(f"Gate matrix of shape {S.shape} is not 2m x 2m.")
        d = np.zeros(n2) if self.d is None else np.array(self.d, dtype=float).reshape(-1)
        if d.size != n2:
            raise ModeMismatchError(f"Displacement of length {d.size} for a {n2 // 2}-mode gate.")
        W = omega(n2 // 2)
        residual = float(np.max(np.abs(S @ W @ S.T - W), initial=0.0))
        if residual > DEFAULT_SYMPLECTIC_TOL * max(1.0, float(np.max(np.abs(S))) ** 2):
            raise NonSymplecticError(f"S Omega S^T deviates from Omega by {residual:.3e}.")
        S.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "phase", complex(self.phase))

    @property
    def num_modes(self) -> int:
        return self.S.shape[0] // 2

    @property
    def is_passive(self) -> bool:
        return bool(np.allclose(self.S @ self.S.T, np.eye(self.S.shape[0]), atol=1e-12))

    @property
    def vacuum_amplitude(self) -> float:
        """<0|U_S|0> = det((S S^T + I)/2)^{-1/4}."""
        n2 = self.S.shape[0]
        _, logdet = np.linalg.slogdet(0.5 * (self.S @ self.S.T + np.eye(n2)))
        return math.exp(-0.25 * logdet)

    def compose(self, first: SymplecticGate) -> SymplecticGate:
        """The gate ``self`` applied after ``first``, phase included."""
        if first.num_modes != self.num_modes:
            raise ModeMismatchError("Gates act on different numbers of modes.")
        n = self.num_modes
        # <0|U_1 U_2|0> = <U_1^dag 0|U_2 0>, both sides phase-pinned Gaussian states
        S1_inv = np.linalg.inv(self.S)
        left = GaussianDesc(0.5 * S1_inv @ S1_inv.T, np.zeros(2 * n), self.vacuum_amplitude)
        right = GaussianDesc(0.5 * first.S @ first.S.T, np.zeros(2 * n), first.vacuum_amplitude)
        amp = overlap(left, right)
        metaplectic_phase = amp / abs(amp)
        d_moved = self.S @ first.d
        beta1 = (self.d[:n] + 1j * self.d[n:]) / math.sqrt(2.0)
        beta2 = (d_moved[:n] + 1j * d_moved[n:]) / math.sqrt(2.0)
        displacement_phase = np.exp(1j * np.imag(np.sum(beta1 * np.conj(beta2))))
        return SymplecticGate(
            self.S @ first.S,
            self.d + d_moved,
            self.phase * first.phase * metaplectic_phase * displacement_phase,
        )

    def embed(self, num_modes: int, modes: Sequence[int]) -> SymplecticGate:
        """Places the gate on ``modes`` of a larger register."""
        k = self.num_modes
        if len(modes) != k:
            raise ModeMismatchError(f"Need {k} target modes, got {len(modes)}.")
        if any(not 0 <= j < num_modes for j in modes):
            raise ModeMismatchError(f"Target modes {modes} outside a {num_modes}-mode register.")
        index = list(modes) + [num_modes + j for j in modes]
        S = np.eye(2 * num_modes)
        S[np.ix_(index, index)] = self.S
        d = np.zeros(2 * num_modes)
        d[index] = self.d
        return SymplecticGate(S, d, self.phase)


def identity_gate(num_modes: int) -> SymplecticGate:
    return SymplecticGate(np.eye(2 * num_modes))


def passive_from_unitary(u: np.ndarray) -> SymplecticGate:
    """The passive gate with Heisenberg action a -> u a."""
    u = np.asarray(u, dtype=complex)
    return SymplecticGate(np.block([[u.real, -u.imag], [u.imag, u.real]]))


def rotate(theta: float, mode: int = 0, num_modes: int = 1) -> SymplecticGate:
    """R(theta) = exp(-i theta N): X -> cos X + sin P."""
    c, s = math.cos(theta), math.sin(theta)
    return SymplecticGate(np.array([[c, s], [-s, c]])).embed(num_modes, [mode])


def squeeze(z: float, mode: int = 0, num_modes: int = 1) -> SymplecticGate:
    """exp((z/2)(a^2 - a^dag^2)): X -> e^{-z} X, P -> e^{z} P."""
    return SymplecticGate(np.diag([math.exp(-z), math.exp(z)])).embed(num_modes, [mode])


def displace(beta: complex, mode: int = 0, num_modes: int = 1) -> SymplecticGate:
    """D(beta) = exp(beta a^dag - conj(beta) a)."""
    beta = complex(beta)
    d = math.sqrt(2.0) * np.array([beta.real, beta.imag])
    return SymplecticGate(np.eye(2), d).embed(num_modes, [mode])


def fourier(mode: int = 0, num_modes: int = 1) -> SymplecticGate:
    """F = exp(i pi/4 (X^2 + P^2)) = e^{i pi/4} R(-pi/2): X -> -P, P -> X."""
    return SymplecticGate(np.array([[0.0, -1.0], [1.0, 0.0]]), None, np.exp(0.25j * math.pi)).embed(
        num_modes, [mode]
    )


def quadratic_phase(s: float, mode: int = 0, num_modes: int = 1) -> SymplecticGate:
    """exp(i s X^2 / 2): P -> P + s X. Its vacuum amplitude is (1 - i s/2)^{-1/2}."""
    phase = np.exp(0.5j * math.atan(0.5 * s))
    return SymplecticGate(np.array([[1.0, 0.0], [s, 1.0]]), None, phase).embed(num_modes, [mode])


def sum_gate(s: float, control: int, target: int, num_modes: int = 2) -> SymplecticGate:
    """exp(-i s X_c P_t): X_t -> X_t + s X_c, P_c -> P_c - s P_t."""
    S = np.eye(4)
    S[1, 0] = s
    S[2, 3] = -s
    return SymplecticGate(S).embed(num_modes, [control, target])


def beamsplitter(theta: float, i: int = 0, j: int = 1, num_modes: int = 2) -> SymplecticGate:
    """exp(i theta (a_i^dag a_j + a_i a_j^dag)), u = [[cos, i sin], [i sin, cos]]."""
    c, s = math.cos(theta), math.sin(theta)
    return passive_from_unitary(np.array([[c, 1j * s], [1j * s, c]])).embed(num_modes, [i, j])


def two_mode_squeeze(r: float, i: int = 0, j: int = 1, num_modes: int = 2) -> SymplecticGate:
    """exp(r (a_i a_j - a_i^dag a_j^dag)); each mode ends with <N> = sinh^2 r."""
    c, s = math.cosh(r), math.sinh(r)
    S = np.array(
        [
            [c, -s, 0.0, 0.0],
            [-s, c, 0.0, 0.0],
            [0.0, 0.0, c, s],
            [0.0, 0.0, s, c],
        ]
    )
    return SymplecticGate(S).embed(num_modes, [i, j])


def passive_generator(gate: SymplecticGate) -> np.ndarray:
    """Hermitian h with U = exp(-i sum h_jk a_j^dag a_k) for a passive gate with phase 1.

    From a -> u a we get u = exp(-i h), so h = i log(u).
    """
    if not gate.is_passive:
        raise DomainError("Only passive gates have a number-conserving generator.")
    n = gate.num_modes
    u = gate.S[:n, :n] + 1j * gate.S[n:, :n]
    h = 1j * logm(u)
    return 0.5 * (h + h.conj().T)


# ------------------------------------------------------------------------------------------------ #
#                                      OPERATIONS                                                  #
# ------------------------------------------------------------------------------------------------ #
def overlap(a: GaussianDesc, b: GaussianDesc) -> complex:
    """<a|b>, global phases included.

    Raises:
        ModeMismatchError: If the states act on different numbers of modes.
        IllConditionedError: If the combined exponent is too ill-conditioned to invert.
    """
    if a.num_modes != b.num_modes:
        raise ModeMismatchError(f"Overlap of {a.num_modes}- and {b.num_modes}-mode states.")
    if a.num_modes == 0:
        return complex(np.conj(a.r) * b.r)
    return complex(np.exp(_log_overlap(a.exponent, b.exponent)))


def log_overlap(a: GaussianDesc, b: GaussianDesc) -> complex:
    if a.num_modes != b.num_modes:
        raise ModeMismatchError(f"Overlap of {a.num_modes}- and {b.num_modes}-mode states.")
    return _log_overlap(a.exponent, b.exponent)


def _reference_after(state: GaussianDesc, S: np.ndarray, vacuum_amplitude: float) -> complex:
    """r' = <alpha'|U_S g> through the phase-free triple overlap.

    U_S|alpha> is known exactly (mean S mu, covariance S S^T / 2, reference overlap v), so with
    T = <alpha'|g'><g'|U_S alpha><U_S alpha|alpha'> for any representative g' of the new ray,
    r' = T / (conj(r) v).
    """
    Gamma_new = S @ state.Gamma @ S.T
    mu_new = S @ state.mu
    K, b, c = _raw_exponent(0.5 * (Gamma_new + Gamma_new.T), mu_new)
    g_new = (K, b, c)
    moved_ref = GaussianDesc(0.5 * S @ S.T, mu_new, vacuum_amplitude).exponent
    n = state.num_modes
    new_ref = coherent_exponent((mu_new[:n] + 1j * mu_new[n:]) / math.sqrt(2.0))
    log_triple = (
        _log_overlap(new_ref, g_new)
        + _log_overlap(g_new, moved_ref)
        + _log_overlap(moved_ref, new_ref)
    )
    return complex(np.exp(log_triple) / (np.conj(state.r) * vacuum_amplitude))


def apply_gaussian(state: GaussianDesc, gate: SymplecticGate) -> GaussianDesc:
    """Applies phase * D(d) * U_S.

    Gamma' = S Gamma S^T and mu' = S mu + d. Passive gates leave r unchanged; active gates go
    through the triple overlap; the displacement contributes exp(i Im(beta conj(alpha))).

    Raises:
        ModeMismatchError: If the gate and state sizes differ.
    """
    if gate.num_modes != state.num_modes:
        raise ModeMismatchError(f"{gate.num_modes}-mode gate on a {state.num_modes}-mode state.")
    S = gate.S
    n = state.num_modes
    if gate.is_passive:
        r = state.r
    else:
        r = _reference_after(state, S, gate.vacuum_amplitude)
    mu_pre = S @ state.mu
    alpha_pre = (mu_pre[:n] + 1j * mu_pre[n:]) / math.sqrt(2.0)
    beta = (gate.d[:n] + 1j * gate.d[n:]) / math.sqrt(2.0)
    r = r * np.exp(1j * np.imag(np.sum(beta * np.conj(alpha_pre)))) * gate.phase
    Gamma = S @ state.Gamma @ S.T
    return GaussianDesc(0.5 * (Gamma + Gamma.T), mu_pre + gate.d, r)


def blocksqueezing(state: GaussianDesc, z: Sequence[float]) -> GaussianDesc:
    """Squeezes every mode j by z_j in one step.

    The reference overlap is updated with one triple overlap and v = prod_j 1/sqrt(cosh z_j).

    Raises:
        IllConditionedError: If an intermediate exponent is too ill-conditioned.
    """
    z = np.asarray(z, dtype=float).reshape(-1)
    if z.size != state.num_modes:
        raise ModeMismatchError(f"{z.size} squeezing values for {state.num_modes} modes.")
    if not np.all(np.isfinite(z)):
        raise DomainError("Squeezing parameters must be finite.")
    if not np.any(z):
        return state
    S = np.diag(np.concatenate([np.exp(-z), np.exp(z)]))
    v = float(np.prod(1.0 / np.sqrt(np.cosh(z))))
    r = _reference_after(state, S, v)
    Gamma = S @ state.Gamma @ S
    return GaussianDesc(Gamma, S @ state.mu, r)


def homodyne_postselect(
    state: GaussianDesc, mode: int, q: float
) -> Tuple[GaussianDesc, float, complex]:
    """Conditions ``mode`` on the position outcome ``q``.

    The unnormalized branch is <q|_mode g>, whose squared norm is the X-marginal density at q.
    It is returned as sqrt(density) * branch_phase * state with ``state`` phase-pinned.

    Args:
        state (GaussianDesc): The state to condition.
        mode (int): Measured mode.
        q (float): Outcome.

    Returns:
        Tuple[GaussianDesc, float, complex]: Remaining modes, density at q, branch phase.

    Raises:
        PostselectionError: If the branch has vanishing norm.
    """
    n = state.num_modes
    if not 0 <= mode < n:
        raise ModeMismatchError(f"Mode {mode} outside a {n}-mode state.")
    if state.Gamma[mode, mode] <= 0:
        raise PostselectionError(f"Position variance of mode {mode} is not positive.")
    K, b, c = state.exponent
    rest = [k for k in range(n) if k != mode]
    K_new = K[np.ix_(rest, rest)]
    b_new = b[rest] - q * K[rest, mode]
    c_new = c + b[mode] * q - 0.5 * K[mode, mode] * q * q
    branch, log_norm = GaussianDesc.from_exponent(K_new, b_new, c_new)
    density = math.exp(2.0 * log_norm)
    if not density > 0.0 or not math.isfinite(density):
        raise PostselectionError(f"Homodyne branch at q={q} has density {density}.")
    return branch.pinned(), density, complex(branch.phase)


def marginal_density(state: GaussianDesc, mode: int, q: float) -> float:
    """Probability density of X_mode at q."""
    var = state.Gamma[mode, mode]
    return math.exp(-0.5 * (q - state.mu[mode]) ** 2 / var) / math.sqrt(2.0 * math.pi * var)


def mean_photon_number(state: GaussianDesc, mode: int) -> float:
    n = state.num_modes
    x, p = state.mu[mode], state.mu[n + mode]
    return 0.5 * (state.Gamma[mode, mode] + state.Gamma[n + mode, n + mode] + x * x + p * p) - 0.5


def sandwich(
    a: GaussianDesc,
    b: GaussianDesc,
    ket: GaussianDesc,
    bra: GaussianDesc,
    mode: int = 0,
) -> complex:
    """<b| (|ket><bra| on ``mode``, identity elsewhere) |a>.

    The contraction is one Gaussian integral over (x, y, rest): x is ``mode`` of b and ket, y is
    ``mode`` of a and bra, and the remaining modes are shared by a and b.
    """
    n = a.num_modes
    if b.num_modes != n or ket.num_modes != 1 or bra.num_modes != 1:
        raise ModeMismatchError("sandwich needs two n-mode states and single-mode ket and bra.")
    rest = [k for k in range(n) if k != mode]
    b_vars = np.empty(n, dtype=int)
    a_vars = np.empty(n, dtype=int)
    b_vars[mode], a_vars[mode] = 0, 1
    for offset, k in enumerate(rest):
        b_vars[k] = a_vars[k] = 2 + offset
    M, J, C = assemble_exponents(
        n + 1,
        [
            (b.exponent, b_vars, True),
            (ket.exponent, np.array([0]), False),
            (bra.exponent, np.array([1]), True),
            (a.exponent, a_vars, False),
        ],
    )
    return complex(np.exp(log_gaussian_integral(M, J, C)))


def assemble_exponents(
    num_vars: int, factors: Sequence[Tuple[Exponent, np.ndarray, bool]]
) -> Tuple[np.ndarray, np.ndarray, complex]:
    """Sums wavefunction exponents placed on given variables, conjugating bras."""
    M = np.zeros((num_vars, num_vars), dtype=complex)
    J = np.zeros(num_vars, dtype=complex)
    C = 0j
    for (K, b, c), index, conjugate in factors:
        if conjugate:
            K, b, c = K.conj(), b.conj(), np.conj(c)
        M[np.ix_(index, index)] += K
        J[index] += b
        C += c
    return M, J, C


# ------------------------------------------------------------------------------------------------ #
#                                   DECOMPOSITIONS                                                 #
# ------------------------------------------------------------------------------------------------ #
def euler_decomposition(S: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """S = O2 diag(e^{-z}, e^{z}) O1 with O1, O2 orthogonal symplectic and z >= 0.

    The polar factor P = sqrt(S S^T) is symmetric, positive and symplectic, so its eigenvectors
    pair up as v (eigenvalue lambda) and Omega v (eigenvalue 1/lambda). Taking one isotropic
    vector from each pair gives W = [Omega V, V] with P = W diag(1/lambda, lambda) W^T.
    """
    S = np.asarray(S, dtype=float)
    n = S.shape[0] // 2
    W_form = omega(n)
    evals, evecs = np.linalg.eigh(S @ S.T)
    evals = np.sqrt(np.clip(evals, 0.0, None))
    P_inv = evecs @ np.diag(1.0 / evals) @ evecs.T
    O = P_inv @ S

    chosen: List[np.ndarray] = []
    lambdas: List[float] = []
    for index in np.argsort(-evals):
        v = evecs[:, index].copy()
        for u in chosen:
            v -= (u @ v) * u
            w = W_form @ u
            v -= (w @ v) * w
        norm = np.linalg.norm(v)
        if norm < 0.5:
            continue
        v /= norm
        chosen.append(v)
        lambdas.append(float(v @ evecs @ np.diag(evals) @ evecs.T @ v))
        if len(chosen) == n:
            break
    V = np.column_stack(chosen)
    O2 = np.hstack([W_form @ V, V])
    z = np.log(np.asarray(lambdas))
    O1 = O2.T @ O
    return O2, z, O1


def preparation(Gamma: np.ndarray) -> np.ndarray:
    """The symmetric symplectic S = (2 Gamma)^{1/2}, so Gamma = S S^T / 2 from vacuum."""
    evals, evecs = np.linalg.eigh(2.0 * np.asarray(Gamma, dtype=float))
    return evecs @ np.diag(np.sqrt(evals)) @ evecs.T


def canonical_form(Gamma: np.ndarray, mu: Optional[np.ndarray] = None) -> GaussianDesc:
    """The phase-pinned description of D(d) O2 Z O1 |0>.

    Passive factors and the displacement do not change the vacuum-referenced overlap, so
    r = prod_j 1/sqrt(cosh z_j) from the squeezing factor alone.

    Raises:
        DomainError: If Gamma is not a pure covariance.
    """
    Gamma = np.asarray(Gamma, dtype=float)
    mu = np.zeros(Gamma.shape[0]) if mu is None else np.asarray(mu, dtype=float)
    sign, logdet = np.linalg.slogdet(2.0 * Gamma)
    if sign <= 0 or abs(logdet) > DEFAULT_PURITY_TOL * max(1.0, np.linalg.norm(Gamma)):
        raise DomainError(f"Covariance is not pure: log det(2 Gamma) = {logdet:.3e}.")
    _, z, _ = euler_decomposition(preparation(Gamma))
    r = float(np.prod(1.0 / np.sqrt(np.cosh(z))))
    return GaussianDesc(Gamma, mu, r)


def to_fock(
    state: GaussianDesc, cutoffs: Sequence[int], points: int = 801
) -> focksim.FockState:
    """Number-basis amplitudes of the state, phase included, for oracle comparisons."""
    spread = float(np.sqrt(np.max(np.diag(state.Gamma)))) * 12.0
    centre = float(np.max(np.abs(state.mu))) if state.mu.size else 0.0
    extent = max(math.sqrt(2.0 * max(cutoffs) + 1.0) + 10.0, centre + spread)
    return focksim.from_wavefunction(
        state.wavefunction, cutoffs, num_modes=state.num_modes, extent=extent, points=points
    )

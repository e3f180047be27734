#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : grank.py                                                                            #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 06:20:33 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Finite sums of Gaussian states approximating squeezed cubic phase states.

The construction rests on the Gaussian moment generating function

    e^{i theta x^3/3} e^{-eps theta^2 x^4/18}
        = (2 pi eps)^{-1/2} int exp(-(x-y)^2/(2 eps) + i theta x^2 y/3) dy,

whose integrand is Gaussian in x. Multiplying by the ancilla envelope, cutting the y-integral
to a window [-Y, Y] and replacing it by a uniform Riemann sum leaves a finite Gaussian sum.
Each of the three steps gets a third of the error budget, and every part of the declared
error is computed from an explicit bound rather than assumed.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import (
    Any,
    Callable,
    Dict,
    Iterable,
    Iterator,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
)

import numpy as np
from scipy.special import erfc, erfcinv

from cvlab import focksim, gausssim
from cvlab.constants import (
    DEFAULT_MAX_TERMS,
    DEFAULT_MAX_THETA,
    DEFAULT_PRUNE_FLOOR,
    DEFAULT_TENSOR_CAP,
)
from cvlab.errors import CapExceededError, DomainError, ModeMismatchError
from cvlab.gausssim import GaussianDesc

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
GSUM_FORMAT = "cvlab-gsum"
# Pointwise bound on |psi_eps| + |grid sum| off the window when the step is at most sqrt(eps).
OUTSIDE_WINDOW_CAP = 2.0 + 1.0 / math.sqrt(2.0 * math.pi)
_WIDTH_DOUBLINGS = 200
_WIDTH_BISECTIONS = 60


class GaussianTerm(NamedTuple):
    """One term c |G> with c = exp(log_mag) * phase and |G> normalized and phase-pinned."""

    log_mag: float
    phase: complex
    state: GaussianDesc

    @property
    def coefficient(self) -> complex:
        return math.exp(self.log_mag) * self.phase


# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class GaussianSum:
    """A linear combination of Gaussian states, possibly as a lazy tensor product.

    The sum is stored as a tuple of factors; the represented vector is the tensor product of
    the factor sums. A plain sum has a single factor. Terms of the product are generated on
    demand so a large product is never held in memory.

    Args:
        factors (Tuple[Tuple[GaussianTerm, ...], ...]): Terms of each tensor factor.
        declared_error (float): Euclidean distance bound to the target state.
    """

    factors: Tuple[Tuple[GaussianTerm, ...], ...]
    declared_error: float = 0.0

    def __post_init__(self) -> None:
        factors = tuple(tuple(f) for f in self.factors)
        if not factors or any(len(f) == 0 for f in factors):
            raise DomainError("A Gaussian sum needs at least one term per factor.")
        for f in factors:
            if any(not math.isfinite(t.log_mag) for t in f):
                raise DomainError("Term magnitudes must be finite.")
            modes = {t.state.num_modes for t in f}
            if len(modes) != 1:
                raise ModeMismatchError("Terms of one factor act on different mode counts.")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def single(cls, state: GaussianDesc, declared_error: float = 0.0) -> GaussianSum:
        """The rank-one sum holding ``state`` with unit coefficient."""
        return cls(((GaussianTerm(0.0, state.phase, state.pinned()),),), declared_error)

    # -------------------------------------------------------------------------------------------- #
    @property
    def rank(self) -> int:
        return math.prod(len(f) for f in self.factors)

    @property
    def factor_modes(self) -> Tuple[int, ...]:
        return tuple(f[0].state.num_modes for f in self.factors)

    @property
    def num_modes(self) -> int:
        return sum(self.factor_modes)

    def iter_terms(self) -> Iterator[GaussianTerm]:
        """Yields the terms of the full product in row-major factor order."""
        if len(self.factors) == 1:
            yield from self.factors[0]
            return
        for combo in itertools.product(*self.factors):
            yield GaussianTerm(
                sum(t.log_mag for t in combo),
                complex(np.prod([t.phase for t in combo])),
                gausssim.product(*[t.state for t in combo]),
            )

    def terms(self, cap: int = DEFAULT_TENSOR_CAP) -> List[GaussianTerm]:
        """Materializes the terms.

        Raises:
            CapExceededError: If the rank exceeds ``cap``.
        """
        if self.rank > cap:
            raise CapExceededError("Gaussian-sum terms", self.rank, cap)
        return list(self.iter_terms())

    def wavefunction(self, *coords: np.ndarray) -> np.ndarray:
        """Evaluates the represented wavefunction; one coordinate array per mode."""
        if len(coords) != self.num_modes:
            raise ModeMismatchError(f"Need {self.num_modes} coordinates, got {len(coords)}.")
        value: Any = 1.0
        start = 0
        for factor, width in zip(self.factors, self.factor_modes):
            part = coords[start : start + width]
            start += width
            total: Any = 0.0
            for term in factor:
                total = total + term.coefficient * term.state.wavefunction(*part)
            value = value * total
        return np.asarray(value)

    def norm(self) -> float:
        """Euclidean norm of the represented vector, the product of the factor norms."""
        return math.prod(math.sqrt(max(_factor_norm_sq(f), 0.0)) for f in self.factors)

    def to_fock(self, cutoffs: Sequence[int], points: int = 1201) -> focksim.FockState:
        """Number-basis amplitudes of the represented vector (unnormalized)."""
        return focksim.from_wavefunction(
            self.wavefunction, cutoffs, num_modes=self.num_modes, points=points
        )

    # -------------------------------------------------------------------------------------------- #
    def records(self) -> Iterator[Dict[str, Any]]:
        """Streams a header record and then one record per term."""
        yield {
            "format": GSUM_FORMAT,
            "rank": self.rank,
            "num_modes": self.num_modes,
            "declared_error": self.declared_error,
        }
        for index, term in enumerate(self.iter_terms()):
            yield {
                "index": index,
                "log_mag": term.log_mag,
                "phase": {"re": term.phase.real, "im": term.phase.imag},
                "state": term.state.to_dict(),
            }

    @classmethod
    def from_records(cls, records: Iterable[Dict[str, Any]]) -> GaussianSum:
        iterator = iter(records)
        header = next(iterator)
        if header.get("format") != GSUM_FORMAT:
            raise DomainError(f"Not a Gaussian-sum stream: {header.get('format')!r}.")
        terms = [
            GaussianTerm(
                float(rec["log_mag"]),
                complex(rec["phase"]["re"], rec["phase"]["im"]),
                GaussianDesc.from_dict(rec["state"]),
            )
            for rec in iterator
        ]
        return cls((tuple(terms),), float(header["declared_error"]))

    def __repr__(self) -> str:
        return (
            f"GaussianSum(rank={self.rank}, num_modes={self.num_modes}, "
            f"declared_error={self.declared_error:.3e})"
        )


def _factor_norm_sq(terms: Sequence[GaussianTerm]) -> float:
    if terms[0].state.num_modes == 1:
        K = np.array([t.state.exponent[0][0, 0] for t in terms])
        b = np.array([t.state.exponent[1][0] for t in terms])
        c = np.array([t.state.exponent[2] for t in terms])
        log_coef = np.array([t.log_mag for t in terms]) + 1j * np.angle([t.phase for t in terms])
        M = K.conj()[:, None] + K[None, :]
        J = b.conj()[:, None] + b[None, :]
        log_gram = (
            0.5 * np.log(2.0 * math.pi / M) + 0.5 * J * J / M + c.conj()[:, None] + c[None, :]
        )
        log_total = log_gram + log_coef.conj()[:, None] + log_coef[None, :]
        shift = float(np.max(log_total.real))
        return float(np.real(np.sum(np.exp(log_total - shift)))) * math.exp(shift)
    total = 0j
    for ta in terms:
        for tb in terms:
            total += np.conj(ta.coefficient) * tb.coefficient * gausssim.overlap(ta.state, tb.state)
    return float(total.real)


# ------------------------------------------------------------------------------------------------ #
#                                    ERROR BOUNDS                                                  #
# ------------------------------------------------------------------------------------------------ #
def riemann_error(L: float, a: float, b: float, N: int) -> float:
    """Right-endpoint Riemann sum error bound L (b - a)^2 / (2N) for |g'| <= L on [a, b]."""
    if not b > a or N < 1 or L < 0:
        raise DomainError(f"riemann_error needs b > a, N >= 1, L >= 0; got {a}, {b}, {N}, {L}.")
    return L * (b - a) ** 2 / (2.0 * N)


def rank_envelope(xi: float, delta: float) -> float:
    """xi^12 delta^-2 log^6(1/delta), the asymptotic rank envelope up to a constant."""
    return xi**12 * delta**-2 * math.log(1.0 / delta) ** 6


def cubic_state_wavefunction(theta: float, xi: float) -> Callable[[np.ndarray], np.ndarray]:
    """The exact target x -> pi^{-1/4} xi^{-1/2} exp(-x^2/(2 xi^2) + i theta x^3/3)."""
    scale = math.pi**-0.25 / math.sqrt(xi)

    def wavefunction(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return scale * np.exp(-0.5 * x**2 / xi**2 + 1j * theta * x**3 / 3.0)

    return wavefunction


def smoothing_bound(theta: float, xi: float, eps: float) -> float:
    """Closed-form cost eps theta^2 sqrt(105) xi^4/72 of the quartic damping.

    |1 - e^{-u}| <= u with u = eps theta^2 x^4/18 and E[x^8] = 105 xi^8/16 under the ancilla
    density.
    """
    return abs(theta) ** 2 * eps * math.sqrt(105.0) * xi**4 / 72.0


@dataclass(frozen=True)
class AncillaQuadrature:
    """x-grid weighted by the ancilla density e^{-x^2/xi^2}/(sqrt(pi) xi)."""

    x: np.ndarray
    weights: np.ndarray
    tail_mass: float

    @classmethod
    def build(cls, xi: float, points: int = 4001, span: float = 8.0) -> AncillaQuadrature:
        x = np.linspace(-span * xi, span * xi, points)
        density = np.exp(-(x**2) / xi**2) / (math.sqrt(math.pi) * xi)
        step = x[1] - x[0]
        w = np.full(points, step)
        w[[0, -1]] *= 0.5
        return cls(x, w * density, float(erfc(span)))

    @property
    def half_width(self) -> float:
        return float(self.x[-1])

    def l2(self, pointwise: np.ndarray, cap: float) -> float:
        """sqrt(int rho |pointwise|^2), with ``cap`` bounding the integrand off the grid."""
        bounded = np.minimum(pointwise, cap)
        return math.sqrt(float(np.sum(self.weights * bounded**2)) + self.tail_mass * cap**2)


def smoothing_error(quad: AncillaQuadrature, theta: float, eps: float) -> float:
    """Norm cost ||psi - psi_eps|| of the quartic damping, integrated on the ancilla grid."""
    u = eps * theta**2 * quad.x**4 / 18.0
    return quad.l2(-np.expm1(-u), 1.0)


def smoothing_width(
    theta: float, xi: float, budget: float, quad: Optional[AncillaQuadrature] = None
) -> float:
    """Largest eps whose smoothing cost stays within ``budget``.

    The closed-form quartic bound gives a feasible starting width; the cost is monotone in eps,
    so doubling then bisecting on the integrated cost finds the largest admissible one.
    """
    if theta == 0:
        raise DomainError("smoothing_width is undefined for theta = 0.")
    if quad is None:
        quad = AncillaQuadrature.build(xi)
    lo = budget / smoothing_bound(theta, xi, 1.0)
    hi = 2.0 * lo
    for _ in range(_WIDTH_DOUBLINGS):
        if smoothing_error(quad, theta, hi) > budget:
            break
        lo, hi = hi, 2.0 * hi
    else:
        return lo
    for _ in range(_WIDTH_BISECTIONS):
        mid = math.sqrt(lo * hi)
        if smoothing_error(quad, theta, mid) <= budget:
            lo = mid
        else:
            hi = mid
    return lo


def _window_tail(x: np.ndarray, Y: float, eps: float) -> np.ndarray:
    """Mass of N(x, eps) outside [-Y, Y]."""
    s = math.sqrt(2.0 * eps)
    return 0.5 * erfc((Y - x) / s) + 0.5 * erfc((Y + x) / s)


def window_error(quad: AncillaQuadrature, Y: float, eps: float) -> float:
    """Norm cost of the window [-Y, Y], independent of the number of grid points.

    Inside the window the loss is the mass of N(x, eps) that falls outside it. Outside the
    window both the smoothed target and any grid sum with step at most sqrt(eps) are bounded
    pointwise, so those points are charged ``OUTSIDE_WINDOW_CAP`` in full.
    """
    x = quad.x
    pointwise = np.where(np.abs(x) <= Y, _window_tail(x, Y, eps), OUTSIDE_WINDOW_CAP)
    return quad.l2(pointwise, OUTSIDE_WINDOW_CAP)


def aliasing_error(quad: AncillaQuadrature, theta: float, Y: float, R: int, eps: float) -> float:
    """Norm cost of the R-point right-endpoint sum on [-Y, Y] for points inside the window.

    By Poisson summation the infinite uniform sum of the Gaussian integrand differs from its
    integral by sum_{k != 0} exp(-eps (2 pi k/h - omega)^2 / 2) with omega = theta x^2/3. The
    samples of that sum beyond the window add at most the window tail, already charged by
    ``window_error``, plus one sample of height h/sqrt(2 pi eps) at the nearer edge. Both
    terms vanish as R grows.
    """
    h = 2.0 * Y / R
    x = quad.x
    inside = np.abs(x) <= Y
    omega = np.abs(theta) * x**2 / 3.0
    kmax = int(math.ceil((float(np.max(omega)) + 40.0 / math.sqrt(eps)) * h / (2.0 * math.pi))) + 1
    freq = 2.0 * math.pi * np.arange(1, kmax + 1) / h
    alias = np.sum(
        np.exp(-0.5 * eps * (freq[None, :] - omega[:, None]) ** 2)
        + np.exp(-0.5 * eps * (freq[None, :] + omega[:, None]) ** 2),
        axis=1,
    )
    peak = h / math.sqrt(2.0 * math.pi * eps)
    gap = np.where(inside, Y - np.abs(x), 0.0)
    edge = peak * (np.exp(-0.5 * gap**2 / eps) + np.exp(-0.5 * (Y + np.abs(x)) ** 2 / eps))
    pointwise = np.where(inside, alias + edge, 0.0)
    return quad.l2(pointwise, 2.0 + peak)



# ------------------------------------------------------------------------------------------------ #
#                                   DECOMPOSITION                                                  #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class CubicGrid:
    """Parameters of the Riemann grid; ``term(j)`` is a pure function of the index."""

    theta: float
    xi: float
    eps: float
    window: float
    R: int

    @property
    def step(self) -> float:
        return 2.0 * self.window / self.R

    def center(self, j: int) -> float:
        """y_j = Y (2j - R)/R for j = 1..R."""
        return self.window * (2 * j - self.R) / self.R

    def term(self, j: int) -> GaussianTerm:
        y = self.center(j)
        K = 1.0 / self.eps + 1.0 / self.xi**2 - 2j * self.theta * y / 3.0
        b = y / self.eps
        c0 = (
            -0.5 * y * y / self.eps
            + math.log(self.step / math.sqrt(2.0 * math.pi * self.eps))
            - 0.25 * math.log(math.pi)
            - 0.5 * math.log(self.xi)
        )
        state, log_norm = GaussianDesc.from_exponent(np.array([[K]]), np.array([b]), c0)
        return GaussianTerm(log_norm, state.phase, state.pinned())

    def terms(self) -> List[GaussianTerm]:
        return [self.term(j) for j in range(1, self.R + 1)]


def _check_cubic(theta: float, xi: float, delta: float) -> None:
    if not xi >= 1.0:
        raise DomainError(f"xi must be at least 1, got {xi}.")
    if not 0.0 < delta < 0.5:
        raise DomainError(f"delta must lie in (0, 1/2), got {delta}.")
    if not abs(theta) <= DEFAULT_MAX_THETA:
        raise DomainError(f"|theta| = {abs(theta)} exceeds {DEFAULT_MAX_THETA}.")


def decompose_cubic(
    theta: float,
    xi: float,
    delta: float,
    max_terms: int = DEFAULT_MAX_TERMS,
    prune_floor: float = DEFAULT_PRUNE_FLOOR,
) -> GaussianSum:
    """Approximates V(theta) S_xi |0> by a finite Gaussian sum within ``delta``.

    Args:
        theta (float): Cubic phase strength.
        xi (float): Ancilla width; the position variance of S_xi|0> is xi^2/2.
        delta (float): Error budget in Euclidean norm.
        max_terms (int): Refuse grids with more points than this.
        prune_floor (float): Drop terms whose magnitude relative to the largest is below this.

    Returns:
        GaussianSum: A single-factor sum; ``declared_error`` is the sum of the computed parts
            plus the pruning loss.

    Raises:
        DomainError: If the parameters are outside the analysed regime.
        CapExceededError: If ``delta`` is too small for ``max_terms``.
    """
    _check_cubic(theta, xi, delta)
    if theta == 0:
        return GaussianSum.single(gausssim.squeezed_vacuum(-math.log(xi)), 0.0)

    part = delta / 3.0
    quad = AncillaQuadrature.build(xi)
    eps = smoothing_width(theta, xi, part, quad)
    smoothing = smoothing_error(quad, theta, eps)

    # The grid step never exceeds sqrt(eps), which keeps OUTSIDE_WINDOW_CAP valid.
    limit = quad.half_width + 40.0 * math.sqrt(eps)
    Y = xi * float(erfcinv(0.5 * (part / OUTSIDE_WINDOW_CAP) ** 2)) + math.sqrt(eps)
    window = window_error(quad, Y, eps)
    while window > part:
        Y *= 1.1
        if Y > limit:
            raise CapExceededError("y-window half-width", Y, limit)
        window = window_error(quad, Y, eps)

    R = max(2, int(math.ceil(2.0 * Y / math.sqrt(eps))))
    if R > max_terms:
        raise CapExceededError("Gaussian-rank terms", R, max_terms)
    riemann = aliasing_error(quad, theta, Y, R, eps)
    while riemann > part:
        R = int(math.ceil(1.25 * R))
        if R > max_terms:
            raise CapExceededError("Gaussian-rank terms", R, max_terms)
        riemann = aliasing_error(quad, theta, Y, R, eps)

    grid = CubicGrid(theta, xi, eps, Y, R)
    terms = grid.terms()
    top = max(t.log_mag for t in terms)
    threshold = top + math.log(prune_floor)
    kept = [t for t in terms if t.log_mag >= threshold]
    pruned = sum(math.exp(t.log_mag) for t in terms if t.log_mag < threshold)
    declared = smoothing + window + riemann + pruned
    logger.info(
        f"Cubic decomposition theta={theta}, xi={xi}, delta={delta}: eps={eps:.3e}, "
        f"Y={Y:.3f}, R={R}, kept={len(kept)}, declared error {declared:.3e}."
    )
    if pruned:
        logger.debug(f"Pruned {R - len(kept)} terms carrying {pruned:.3e} of weight.")
    return GaussianSum((tuple(kept),), declared)


def tensor_rank(parts: Sequence[GaussianSum]) -> GaussianSum:
    """Lazy tensor product; the declared error is m times the largest part's error.

    Raises:
        DomainError: If ``parts`` is empty.
    """
    if not parts:
        raise DomainError("tensor_rank needs at least one part.")
    if len(parts) == 1:
        return parts[0]
    factors = tuple(f for p in parts for f in p.factors)
    declared = len(parts) * max(p.declared_error for p in parts)
    return GaussianSum(factors, declared)


@dataclass(frozen=True)
class PhaseStateIdentity:
    """The nested-integral identity for degree-k phase states, k > 2.

    e^{i x^k} = lim_{eps -> 0} (2 pi eps)^{-(k/2 - 1)} int e^{i x^2 y_1 ... y_{k-2}}
    e^{-sum_i (x - y_i)^2 / (2 eps)} dy_1 ... dy_{k-2}

    Only the k = 3 case has a decomposition routine (:func:`decompose_cubic`).
    """

    degree: int

    def __post_init__(self) -> None:
        if self.degree < 3:
            raise DomainError(f"Phase-state identities start at degree 3, got {self.degree}.")

    @property
    def num_integrals(self) -> int:
        return self.degree - 2

    @property
    def formula(self) -> str:
        ys = " ".join(f"y{i}" for i in range(1, self.degree - 1))
        return (
            f"exp(i x^{self.degree}) = lim eps->0 (2 pi eps)^(-{self.degree / 2 - 1:g}) "
            f"int exp(i x^2 {ys}) exp(-sum_i (x - y_i)^2/(2 eps)) d{ys.replace(' ', ' d')}"
        )

    def target(self, theta: float) -> Callable[[np.ndarray], np.ndarray]:
        k = self.degree
        return lambda x: np.exp(1j * theta * np.asarray(x, dtype=float) ** k / k)

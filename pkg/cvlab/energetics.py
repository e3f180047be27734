#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : energetics.py                                                                       #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 08:14:56 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Energy growth of bosonic circuits: recursions, closed-form bounds and measured verifiers.

The closed forms are cheap and exact to evaluate; the verifiers run the same circuits through
:mod:`cvlab.focksim` and double the cutoff until the mean photon number settles, so every bound
can be held against a converged number. Growth that outruns the largest cutoff is reported as
such, flagged unconverged, rather than raised. Divergence is never returned as a float: the
detectors give a verdict plus a witness from partial sums of the series or integral that defines
the energy.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Sequence, Tuple

import numpy as np
from scipy.special import gammaln, logsumexp
from scipy.stats import nbinom

from cvlab import focksim
from cvlab.circuit import Cubic, Fourier
from cvlab.constants import (
    DEFAULT_CONVERGENCE_RTOL,
    DEFAULT_DISSIPATION_CONSTANT,
    DEFAULT_DIVERGENCE_WITNESS,
    DEFAULT_ENVELOPE_CONSTANT,
    DEFAULT_GROWTH_MAX_CUTOFF,
    DEFAULT_MAX_SERIES_TERMS,
    DEFAULT_MIN_CUTOFF,
)
from cvlab.errors import CertificateNotMetError, DomainError
from cvlab.focksim import DensityMatrix

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
REGIMES = ("bounded", "exponential", "doubly_exponential", "divergent")
DIVERGENCE_EXAMPLES = ("controlled_squeeze_smsv", "controlled_squeeze_n2", "x4_squeeze")
TAIL_KINDS = ("tmsv_lower", "tmsv_upper", "smsv_upper", "smsv_left", "smsv_small")
FINITE = "finite"
DIVERGENT = "divergent"
_LOG_MAX = math.log(np.finfo(float).max)
_ENERGY_FLOOR = 1e-9


def _log_sinh_sq(y: np.ndarray) -> np.ndarray:
    """log sinh^2(y), stable for large |y|; -inf at zero."""
    y = np.abs(np.asarray(y, dtype=float))
    with np.errstate(divide="ignore"):
        return 2.0 * (y + np.log1p(-np.exp(-2.0 * y)) - math.log(2.0))


def _exp_or_inf(log_value: float, what: str) -> float:
    if log_value > _LOG_MAX:
        logger.warning(f"{what} overflows a float (log value {log_value:.6g}); returning inf.")
        return math.inf
    return math.exp(log_value)


# ------------------------------------------------------------------------------------------------ #
#                                      GROWTH REPORT                                               #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class GrowthReport:
    """Measured energy of a circuit family after t rounds, next to the analytic bounds.

    Args:
        t (int): Rounds applied.
        measured_energy (float): Cutoff-converged mean photon number, or the value at the largest
            cutoff when ``converged`` is False.
        lower_bound (float): Analytic lower bound; 0 when none applies.
        upper_bound (float): Analytic upper bound; inf when none applies.
        regime (str): One of ``REGIMES``.
        cutoffs (Tuple[int, int]): The last two cutoffs of the convergence check.
        trace (List[float]): Energy after every round at the final cutoff.
        converged (bool): False when the cap was reached while the energy still rose with the
            cutoff; the regime then reports growth the box could not contain.
    """

    t: int
    measured_energy: float
    lower_bound: float
    upper_bound: float
    regime: str
    cutoffs: Tuple[int, int] = (0, 0)
    trace: List[float] = field(default_factory=list)
    converged: bool = True

    def __post_init__(self) -> None:
        if self.regime not in REGIMES:
            raise DomainError(f"Unknown growth regime {self.regime!r}.")

    @property
    def sandwiched(self) -> bool:
        return self.lower_bound <= self.measured_energy <= self.upper_bound

    def as_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["cutoffs"] = list(self.cutoffs)
        return data

    def as_record(self) -> Dict[str, Any]:
        """The sweep row: t, cutoff, energy, lower, upper, regime."""
        return {
            "t": self.t,
            "cutoff": self.cutoffs[-1],
            "energy": self.measured_energy,
            "lower": self.lower_bound,
            "upper": self.upper_bound,
            "regime": self.regime,
            "converged": self.converged,
        }


# ------------------------------------------------------------------------------------------------ #
#                                   KERR AND GAUSSIAN                                              #
# ------------------------------------------------------------------------------------------------ #
def _step_constants(params: Mapping[str, Any]) -> Tuple[float, float]:
    r = abs(float(params.get("r", 0.0)))
    delta = complex(params.get("delta", 0.0))
    shift = math.sqrt(2.0) * math.exp(r) * (abs(delta.real) + abs(delta.imag))
    alpha = math.exp(2.0 * r) + shift
    beta = 0.5 * math.expm1(2.0 * r) + abs(delta) ** 2 + shift
    return alpha, beta


def kerr_gaussian_bound(gate_params: Sequence[Mapping[str, Any]], E0: float) -> float:
    """Upper bound on the mean photon number after a Gaussian and Kerr circuit.

    Each entry is one gate decomposed as S(r) D(delta) R(theta), given as a mapping with keys
    ``r``, ``delta`` (complex) and ``theta``; missing keys are zero, so a Kerr gate or a
    rotation is ``{}``. Every step applies E -> alpha E + beta with

        alpha = e^{2r} + sqrt(2) e^r (|Re delta| + |Im delta|),
        beta  = (e^{2r} - 1)/2 + |delta|^2 + sqrt(2) e^r (|Re delta| + |Im delta|),

    which follows from N' = ((e^r X + sqrt2 Re delta)^2 + (e^-r P + sqrt2 Im delta)^2 - 1)/2,
    <X^2> + <P^2> = 2E + 1 and sqrt(2E + 1) <= E + 1, so it holds from the vacuum up. Photon
    preserving gates give alpha = 1, beta = 0.

    Args:
        gate_params (Sequence[Mapping[str, Any]]): Per-gate (r, delta, theta).
        E0 (float): Mean photon number of the input.

    Returns:
        float: The bound E_T, inf on overflow.
    """
    if E0 < 0:
        raise DomainError(f"Initial energy must be nonnegative, got {E0}.")
    energy = float(E0)
    for params in gate_params:
        alpha, beta = _step_constants(params)
        energy = alpha * energy + beta
        if not math.isfinite(energy):
            logger.warning("Kerr-Gaussian energy recursion overflowed.")
            return math.inf
    return energy


def fit_growth_constant(energies: Sequence[float]) -> float:
    """Smallest c with 1 + E_t <= e^{c t} over a measured trace E_1, E_2, ...

    Gaussian plus N^2 circuits grow at most exponentially with some circuit-dependent c; this
    fits it per circuit family.
    """
    if not energies:
        raise DomainError("Cannot fit a growth constant to an empty trace.")
    return max(math.log1p(max(e, 0.0)) / t for t, e in enumerate(energies, start=1))


# ------------------------------------------------------------------------------------------------ #
#                                    CUBIC AND FOURIER                                             #
# ------------------------------------------------------------------------------------------------ #
def log_cubic_growth_lower_bound(theta: float, t: int) -> float:
    """log of (1/4e)(theta^2/2e)^{2^t-1} 2^{t 2^t}, the leading term of the lower bound."""
    if t < 1:
        raise DomainError(f"Cubic growth needs t >= 1, got {t}.")
    if theta == 0:
        return -math.inf
    width = 2**t
    return (
        -math.log(4.0 * math.e)
        + (width - 1) * (2.0 * math.log(abs(theta)) - math.log(2.0 * math.e))
        + t * width * math.log(2.0)
    )


def cubic_growth_lower_bound(theta: float, t: int) -> float:
    """Lower bound on <N> after (F V(theta))^t applied to vacuum.

    (1/4e)(theta^2/2e)^{2^t-1} 2^{t 2^t} - 1/2. Returns inf, with a warning, on overflow.
    """
    log_value = log_cubic_growth_lower_bound(theta, t)
    if log_value == -math.inf:
        return -0.5
    return _exp_or_inf(log_value, f"Cubic growth bound at t={t}") - 0.5


def cubic_depth_envelope(s: int, d: int, c: float = DEFAULT_ENVELOPE_CONSTANT) -> float:
    """Envelope 2^{c s d 2^d} on the energy of an s-mode circuit with cubic depth d."""
    if s < 1 or d < 0:
        raise DomainError(f"Envelope needs s >= 1 and d >= 0, got s={s}, d={d}.")
    return _exp_or_inf(c * s * d * 2**d * math.log(2.0), f"Cubic envelope at d={d}")


def tower_bound(r: float, height: int, base: float = math.e) -> float:
    """The power tower base^base^...^r with ``height`` exponentiations; inf on overflow."""
    if height < 0 or base <= 1:
        raise DomainError(f"Tower needs height >= 0 and base > 1, got {height}, {base}.")
    value = float(r)
    for level in range(height):
        value = _exp_or_inf(value * math.log(base), f"Tower level {level + 1}")
        if math.isinf(value):
            break
    return value


# ------------------------------------------------------------------------------------------------ #
#                                       DISSIPATION                                                #
# ------------------------------------------------------------------------------------------------ #
def dissipative_threshold(m: int, C0: float, c: float = DEFAULT_DISSIPATION_CONSTANT) -> float:
    """Damping rate 2 C0 + m + c above which m dissipated cubic rounds stop growing the energy."""
    if m < 1:
        raise DomainError(f"Dissipative threshold needs m >= 1, got {m}.")
    return 2.0 * C0 + m + c


def dissipative_exponent(m: int, gamma: float, C0: float) -> float:
    """Exponent B(m) = (-gamma + 2 C0 + m) 2^m + (gamma - 2 C0) of the dissipated energy bound."""
    if m < 1:
        raise DomainError(f"Dissipative exponent needs m >= 1, got {m}.")
    return (-gamma + 2.0 * C0 + m) * 2**m + (gamma - 2.0 * C0)


# ------------------------------------------------------------------------------------------------ #
#                                   MEASURED VERIFIERS                                             #
# ------------------------------------------------------------------------------------------------ #
def _converged_trace(
    run: Callable[[int], List[float]], max_cutoff: int, rtol: float, strict: bool = True
) -> Tuple[List[float], Tuple[int, int], bool]:
    """Doubles the cutoff until the final energy moves by less than rtol.

    At the cap, after at least two cutoffs, a final energy still rising with the cutoff is
    returned unconverged: the growth outran the box. With ``strict`` False any unsettled energy
    is returned that way. A single cutoff under the cap always raises.
    """
    cutoff = DEFAULT_MIN_CUTOFF
    previous: Tuple[int, List[float]] = (0, [])
    change = math.inf
    rising = False
    while cutoff <= max_cutoff:
        trace = run(cutoff)
        if previous[1]:
            last, before = trace[-1], previous[1][-1]
            change = abs(last - before) / max(abs(last), _ENERGY_FLOOR)
            rising = last > before
            logger.debug(f"Cutoff {previous[0]} -> {cutoff}: <N> {before:.6g} -> {last:.6g}.")
            if change < rtol:
                return trace, (previous[0], cutoff), True
        previous = (cutoff, trace)
        cutoff *= 2
    if math.isfinite(change) and (rising or not strict):
        logger.warning(
            f"Energy unsettled at cutoff {previous[0]} (relative change {change:.3g})."
        )
        return previous[1], (previous[0] // 2, previous[0]), False
    raise CertificateNotMetError(best_delta=change, cutoff=previous[0], target=rtol)


def _round_propagator(theta: float, cutoff: int) -> np.ndarray:
    """F V(theta) on a single-mode box."""
    v_ham, v_time = Cubic(0, theta).hamiltonian(1)
    f_ham, f_time = Fourier(0).hamiltonian(1)
    V = focksim.propagator(v_ham, [cutoff], v_time)
    F = focksim.propagator(f_ham, [cutoff], f_time)
    return F @ V


def measure_cubic_growth(
    theta: float,
    t: int,
    max_cutoff: int = DEFAULT_GROWTH_MAX_CUTOFF,
    rtol: float = DEFAULT_CONVERGENCE_RTOL,
    c: float = DEFAULT_ENVELOPE_CONSTANT,
) -> GrowthReport:
    """Measures <N> of (F V(theta))^t |0> with cutoff doubling and sets it between the bounds.

    Energy that has not settled by ``max_cutoff`` comes back with ``converged`` False; the
    regime is doubly exponential either way.

    Raises:
        CertificateNotMetError: If ``max_cutoff`` admits fewer than two cutoffs to compare.
    """
    if t < 1:
        raise DomainError(f"Cubic growth needs t >= 1, got {t}.")
    logger.info(f"Measuring cubic growth: theta={theta}, t={t}.")

    def run(cutoff: int) -> List[float]:
        U = _round_propagator(theta, cutoff)
        amps = focksim.vacuum([cutoff]).amps
        trace = []
        for _ in range(t):
            amps = U @ amps
            trace.append(focksim.mean_photon_number(focksim.FockState((cutoff,), amps)))
        return trace

    trace, cutoffs, converged = _converged_trace(run, max_cutoff, rtol, strict=False)
    report = GrowthReport(
        t=t,
        measured_energy=trace[-1],
        lower_bound=cubic_growth_lower_bound(theta, t),
        upper_bound=cubic_depth_envelope(1, t, c),
        regime="doubly_exponential",
        cutoffs=cutoffs,
        trace=trace,
        converged=converged,
    )
    logger.info(f"Cubic growth at t={t}: <N> = {report.measured_energy:.6g} at {cutoffs}.")
    return report


def measure_dissipative_growth(
    theta: float,
    t: int,
    gamma: float,
    duration: float = 1.0,
    max_cutoff: int = DEFAULT_GROWTH_MAX_CUTOFF,
    rtol: float = DEFAULT_CONVERGENCE_RTOL,
) -> GrowthReport:
    """Measures <N> after t rounds of F V(theta) each followed by damping at rate gamma.

    The regime is read off the trace: ``bounded`` when the last round carries no more energy
    than the first, ``doubly_exponential`` otherwise or when the energy outgrew ``max_cutoff``.
    """
    if t < 1:
        raise DomainError(f"Dissipative growth needs t >= 1, got {t}.")
    logger.info(f"Measuring dissipative growth: theta={theta}, t={t}, gamma={gamma}.")

    def run(cutoff: int) -> List[float]:
        U = _round_propagator(theta, cutoff)
        state = DensityMatrix.from_state(focksim.vacuum([cutoff]))
        trace = []
        for _ in range(t):
            state = DensityMatrix((cutoff,), U @ state.rho @ U.conj().T)
            state = focksim.lindblad_step(state, gamma, duration)
            trace.append(focksim.mean_photon_number(state))
        return trace

    trace, cutoffs, converged = _converged_trace(run, max_cutoff, rtol)
    bounded = converged and trace[-1] <= trace[0] * (1.0 + rtol) + _ENERGY_FLOOR
    return GrowthReport(
        t=t,
        measured_energy=trace[-1],
        lower_bound=0.0,
        upper_bound=math.inf,
        regime="bounded" if bounded else "doubly_exponential",
        cutoffs=cutoffs,
        trace=trace,
        converged=converged,
    )


# ------------------------------------------------------------------------------------------------ #
#                                       DIVERGENCE                                                 #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class DivergenceVerdict:
    """Finite or divergent, with the threshold used and the partial-sum evidence."""

    verdict: str
    threshold: float
    witness: Dict[str, Any]

    @property
    def divergent(self) -> bool:
        return self.verdict == DIVERGENT

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


def smsv_threshold(r: float) -> float:
    """-ln(tanh r)/2: controlled squeezing of an SMSV diverges from this time on."""
    if r <= 0:
        raise DomainError(f"Squeezing must be positive, got {r}.")
    return -0.5 * math.log(math.tanh(r))


def _probe_series(
    log_terms: Callable[[np.ndarray], np.ndarray], level: float, max_terms: int
) -> Dict[str, Any]:
    """Sums exp(log_terms(n)) for n = 0, 1, ... in blocks until the sum passes ``level``."""
    log_level = math.log(level)
    log_total = -math.inf
    block = 256
    start = 0
    while start < max_terms:
        n = np.arange(start, min(start + block, max_terms))
        logs = log_terms(n)
        partial = np.logaddexp.accumulate(np.concatenate(([log_total], logs)))[1:]
        crossed = np.nonzero(partial >= log_level)[0]
        if crossed.size:
            index = int(crossed[0])
            return {
                "crossed": True,
                "terms": int(n[index]) + 1,
                "log_partial_sum": float(partial[index]),
                "level": level,
            }
        log_total = float(partial[-1])
        start += block
        block *= 2
    return {
        "crossed": False,
        "terms": max_terms,
        "log_partial_sum": log_total,
        "partial_sum": math.exp(log_total) if log_total < _LOG_MAX else math.inf,
        "level": level,
    }


def _probe_x4_integral(t: float, level: float) -> Dict[str, Any]:
    """Widens [-L, L] until the energy integral (1/sqrt pi) int e^{-x^2} sinh^2(t x^4) passes
    ``level``. The trapezoid rule under-counts a convex tail, so a crossing is conservative."""
    log_level = math.log(level)
    L = 1.0
    log_value = -math.inf
    while L <= 1e4:
        x = np.linspace(0.0, L, 4001)
        logs = -x**2 + _log_sinh_sq(t * x**4)
        weights = np.full(x.size, x[1] - x[0])
        weights[[0, -1]] *= 0.5
        # symmetric integrand: twice the half line
        log_value = float(logsumexp(logs, b=weights)) + math.log(2.0) - 0.5 * math.log(math.pi)
        if log_value >= log_level:
            return {"crossed": True, "extent": L, "log_partial_integral": log_value,
                    "level": level}
        L *= 2.0
    return {"crossed": False, "extent": L / 2.0, "log_partial_integral": log_value,
            "level": level}


def divergence_threshold(
    example: str,
    t: float,
    r: float = 1.0,
    level: float = DEFAULT_DIVERGENCE_WITNESS,
    max_terms: int = DEFAULT_MAX_SERIES_TERMS,
) -> DivergenceVerdict:
    """Decides whether one of the infinite-energy constructions has infinite energy at time t.

    * ``controlled_squeeze_smsv``: exp(-itH) S_0(r)|0,0> with H = (i/2) N_0 (a_1^2 - a_1^dag2).
      Mode 1 holds sum_n |c_2n|^2 sinh^2(2nt) photons, divergent iff |t| >= -ln(tanh r)/2.
    * ``controlled_squeeze_n2``: the same with N_0^2 acting on D_0(1)|0>, energy
      e^{-1} sum_n sinh^2(n^2 t)/n!, divergent for every t != 0.
    * ``x4_squeeze``: X_0^4 in place of N_0 acting on vacuum, energy
      (1/sqrt pi) int e^{-x^2} sinh^2(t x^4) dx, divergent for every t != 0.

    The witness carries the partial sums (or partial integrals) and whether they pass ``level``.
    For the SMSV construction it also reports the limiting term ratio tanh^2(r) e^{4|t|}.

    Args:
        example (str): One of ``DIVERGENCE_EXAMPLES``.
        t (float): Evolution time.
        r (float): Input squeezing of the SMSV construction.
        level (float): Height the partial sums must pass to count as witnessed.
        max_terms (int): Series terms summed before giving up on a crossing.

    Returns:
        DivergenceVerdict: Verdict, threshold time and witness.
    """
    if example not in DIVERGENCE_EXAMPLES:
        raise DomainError(f"Unknown divergence example {example!r}; use {DIVERGENCE_EXAMPLES}.")
    if not math.isfinite(t):
        raise DomainError(f"Time must be finite, got {t}.")

    if example == "controlled_squeeze_smsv":
        threshold = smsv_threshold(r)
        log_norm = -math.log(math.cosh(r))
        log_tanh = math.log(math.tanh(r))

        def smsv_terms(n: np.ndarray) -> np.ndarray:
            log_c = (
                log_norm + gammaln(2 * n + 1) - 2.0 * gammaln(n + 1)
                - 2.0 * n * math.log(2.0) + 2.0 * n * log_tanh
            )
            return log_c + _log_sinh_sq(2.0 * n * t)

        witness = _probe_series(smsv_terms, level, max_terms)
        witness["ratio"] = math.tanh(r) ** 2 * math.exp(4.0 * abs(t))
        verdict = DIVERGENT if abs(t) >= threshold else FINITE
    elif example == "controlled_squeeze_n2":
        threshold = 0.0

        def n2_terms(n: np.ndarray) -> np.ndarray:
            return -1.0 - gammaln(n + 1) + _log_sinh_sq(n.astype(float) ** 2 * t)

        witness = _probe_series(n2_terms, level, max_terms)
        verdict = DIVERGENT if t != 0 else FINITE
    else:
        threshold = 0.0
        witness = _probe_x4_integral(abs(t), level) if t != 0 else {"crossed": False}
        verdict = DIVERGENT if t != 0 else FINITE

    logger.info(f"Divergence of {example} at t={t}: {verdict} (threshold {threshold:.6g}).")
    return DivergenceVerdict(verdict=verdict, threshold=threshold, witness=witness)


# ------------------------------------------------------------------------------------------------ #
#                                       TAIL BOUNDS                                                #
# ------------------------------------------------------------------------------------------------ #
def _require(params: Mapping[str, float], *names: str) -> List[float]:
    missing = [name for name in names if name not in params]
    if missing:
        raise DomainError(f"Missing tail parameters {missing}.")
    return [float(params[name]) for name in names]


def _tmsv_params(params: Mapping[str, float], name: str) -> Tuple[float, float]:
    nbar, value = _require(params, "nbar", name)
    if nbar < 1:
        raise DomainError(f"TMSV tail bounds need nbar >= 1, got {nbar}.")
    return nbar, value


def smsv_survival(nbar: float, k: float) -> float:
    """Pr[N >= k] for the squeezed vacuum with mean photon number nbar.

    N = 2m with m negative binomial of shape 1/2 and success probability 1/(nbar + 1).
    """
    if nbar < 0:
        raise DomainError(f"Mean photon number must be nonnegative, got {nbar}.")
    first = math.ceil(k / 2.0)
    if first <= 0:
        return 1.0
    return float(nbinom.sf(first - 1, 0.5, 1.0 / (nbar + 1.0)))


def tail_bounds(kind: str, params: Mapping[str, float]) -> float:
    """Closed-form photon-number tail bounds for squeezed vacua.

    ============  =================  ==============================================
    kind          params             bounds
    ============  =================  ==============================================
    tmsv_lower    nbar >= 1, m       Pr[N < m] <= m / nbar
    tmsv_upper    nbar >= 1, k       Pr[N > k nbar] <= e^{-k/2}
    smsv_upper    nbar > 0, k > 0    Pr[N > 2k nbar] <= sqrt((nbar+1)/(pi k nbar))
                                     e^{-k nbar ln(1 + 1/nbar)}
    smsv_left     nbar >= 0, k >= 0  Pr[N < k] <= 1/sqrt(nbar+1) + sqrt(2k/(pi(nbar+1)))
    smsv_small    r >= 0, k >= 0     Pr[N >= k] <= cosh r tanh^k r
    ============  =================  ==============================================

    TMSV quantities refer to one mode of the pair, whose photon number is geometric.

    Raises:
        DomainError: On an unknown kind or parameters outside the bound's domain.
    """
    if kind == "tmsv_lower":
        nbar, m = _tmsv_params(params, "m")
        return m / nbar
    if kind == "tmsv_upper":
        nbar, k = _tmsv_params(params, "k")
        return math.exp(-k / 2.0)
    if kind == "smsv_upper":
        nbar, k = _require(params, "nbar", "k")
        if nbar <= 0 or k <= 0:
            raise DomainError(f"smsv_upper needs nbar > 0 and k > 0, got {nbar}, {k}.")
        prefactor = math.sqrt((nbar + 1.0) / (math.pi * k * nbar))
        return prefactor * math.exp(-k * nbar * math.log1p(1.0 / nbar))
    if kind == "smsv_left":
        nbar, k = _require(params, "nbar", "k")
        if nbar < 0 or k < 0:
            raise DomainError(f"smsv_left needs nbar >= 0 and k >= 0, got {nbar}, {k}.")
        return 1.0 / math.sqrt(nbar + 1.0) + math.sqrt(2.0 * k / (math.pi * (nbar + 1.0)))
    if kind == "smsv_small":
        r, k = _require(params, "r", "k")
        if r < 0 or k < 0:
            raise DomainError(f"smsv_small needs r >= 0 and k >= 0, got {r}, {k}.")
        return math.cosh(r) * math.tanh(r) ** k
    raise DomainError(f"Unknown tail kind {kind!r}; use {TAIL_KINDS}.")


def exact_tail(kind: str, params: Mapping[str, float]) -> float:
    """The exact probability each :func:`tail_bounds` kind bounds, from the photon statistics."""
    if kind in ("tmsv_lower", "tmsv_upper"):
        nbar, value = _tmsv_params(params, "m" if kind == "tmsv_lower" else "k")
        q = nbar / (nbar + 1.0)
        if kind == "tmsv_lower":
            return -math.expm1(math.ceil(value) * math.log(q)) if value > 0 else 0.0
        return q ** (math.floor(value * nbar) + 1)
    if kind == "smsv_upper":
        nbar, k = _require(params, "nbar", "k")
        # N > 2 k nbar with N even means N = 2m for m >= floor(k nbar) + 1
        return smsv_survival(nbar, 2 * (math.floor(k * nbar) + 1))
    if kind == "smsv_left":
        nbar, k = _require(params, "nbar", "k")
        return 1.0 - smsv_survival(nbar, k)
    if kind == "smsv_small":
        r, k = _require(params, "r", "k")
        return smsv_survival(math.sinh(r) ** 2, k)
    raise DomainError(f"Unknown tail kind {kind!r}; use {TAIL_KINDS}.")


# ------------------------------------------------------------------------------------------------ #
#                                     CHANNEL DISTANCE                                             #
# ------------------------------------------------------------------------------------------------ #
def diamond_norm_bound(eps: float, E: float) -> float:
    """Energy-constrained diamond norm bound for B(eps) - I on inputs of energy at most E.

    2 sqrt(E/E') + e^{2 eps (E' + 1)} - 1 at the cut E' = E^{1/3} eps^{-2/3}, which balances the
    low-photon rotation error against the weight above E'.
    """
    if eps <= 0 or E < 0:
        raise DomainError(f"Diamond bound needs eps > 0 and E >= 0, got {eps}, {E}.")
    cut = E ** (1.0 / 3.0) * eps ** (-2.0 / 3.0)
    tail = 2.0 * math.sqrt(E / cut) if cut > 0 else 0.0
    return tail + math.expm1(2.0 * eps * (cut + 1.0))

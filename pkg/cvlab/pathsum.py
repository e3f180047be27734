#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : pathsum.py                                                                          #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 07:38:21 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Strong simulation of Gaussian plus cubic circuits as a sum over Gaussian paths.

Every cubic gate is replaced in place by its q = 0 teleportation gadget: a fresh magic ancilla
V(theta) S_xi|0>, SUM^-1 from the gate's mode onto the ancilla, and exact homodyne conditioning
of the ancilla at x = 0. Post-selections commute with later gates on other modes, so this is
the circuit G (|0> ⊗ magic states) conditioned on x = 0 for every ancilla. Each magic state is
a finite Gaussian sum, so the conditioned output is a sum of Gaussian states

    psi = sum_J c_J |G_J>,

and expectation values and photon-count probabilities are double sums over pairs of terms.
Coefficients can be astronomically large or small, so every pair contribution is carried as a
logarithm and accumulated by :class:`LogSum`. The normalization kappa = 1/||psi||^2 is computed
exactly from the same sums.

Values are computed for the teleported circuit at the chosen ancilla width and compared with
the ideal circuit. The error budgets cover the magic-state decompositions, the number-state
projectors and the finite-squeezing envelope exp(-x^2/(2 xi^2)) each gadget applies to its input.
The envelope term is measured on the input of each gadget, so a wider ancilla buys a tighter
budget at the price of more terms.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass
from typing import Any, Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln, logsumexp

from cvlab import gadget, gausssim, grank
from cvlab.algebra import PolyOp, parse_expression
from cvlab.circuit import CircuitIR, Cubic, PhotonNumber, heisenberg_images
from cvlab.constants import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_BRANCH_CAP,
    DEFAULT_BRANCH_FLOOR,
    DEFAULT_COND_GUARD,
    DEFAULT_MAX_OBS_DEGREE,
    DEFAULT_PATHSUM_XI,
)
from cvlab.errors import (
    CapExceededError,
    DomainError,
    IllConditionedError,
    ModeMismatchError,
    PostselectionError,
)
from cvlab.gausssim import SymplecticGate
from cvlab.grank import GaussianSum, GaussianTerm

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
Exponents = Tuple[int, ...]
Poly = Dict[Exponents, np.ndarray]
LOG_2PI = math.log(2.0 * math.pi)


# ------------------------------------------------------------------------------------------------ #
#                                        MOMENTS                                                   #
# ------------------------------------------------------------------------------------------------ #
def moment_vacuum(t: int) -> float:
    """<0|X^t|0> = f(t): zero for odd t and (2s)!/(4^s s!) for t = 2s."""
    if t < 0:
        raise DomainError(f"Moment order must be nonnegative, got {t}.")
    if t % 2:
        return 0.0
    s = t // 2
    return math.exp(gammaln(t + 1) - s * math.log(4.0) - gammaln(s + 1))


def moment_squeezed(t: int, xi: float) -> float:
    """<S_xi|X^t|S_xi> = f(t) xi^t for the ancilla of position variance xi^2/2."""
    return moment_vacuum(t) * xi**t


# ------------------------------------------------------------------------------------------------ #
#                                     LOG-DOMAIN SUMS                                              #
# ------------------------------------------------------------------------------------------------ #
class LogSum:
    """Accumulates complex numbers given by their logarithms.

    Each added batch is reduced with its largest real part factored out; batches are merged by
    a fixed pairwise tree, so the result depends only on the order of the batches.
    """

    def __init__(self) -> None:
        self._parts: List[Tuple[float, complex]] = []
        self._count = 0

    def add(self, log_values: Any, weights: Optional[Any] = None) -> None:
        """Adds sum_k weights_k * exp(log_values_k).

        Args:
            log_values: Complex logarithms; -inf real parts contribute nothing.
            weights: Optional complex factors applied outside the logarithm.
        """
        logs = np.asarray(log_values, dtype=complex).reshape(-1)
        if logs.size == 0:
            return
        self._count += logs.size
        finite = np.isfinite(logs.real)
        if not np.any(finite):
            return
        shift = float(np.max(logs.real[finite]))
        scaled = np.where(finite, np.exp(logs - shift), 0.0)
        if weights is not None:
            scaled = scaled * np.asarray(weights, dtype=complex).reshape(-1)
        self._parts.append((shift, complex(np.sum(scaled))))

    @property
    def count(self) -> int:
        return self._count

    def _reduced(self) -> Tuple[float, complex]:
        parts = list(self._parts)
        if not parts:
            return -math.inf, 0j
        while len(parts) > 1:
            merged = []
            for k in range(0, len(parts) - 1, 2):
                (s1, t1), (s2, t2) = parts[k], parts[k + 1]
                s = max(s1, s2)
                merged.append((s, t1 * math.exp(s1 - s) + t2 * math.exp(s2 - s)))
            if len(parts) % 2:
                merged.append(parts[-1])
            parts = merged
        return parts[0]

    @property
    def log_value(self) -> complex:
        shift, total = self._reduced()
        if total == 0:
            return complex(-math.inf)
        return shift + complex(np.log(total))

    @property
    def value(self) -> complex:
        shift, total = self._reduced()
        return total * math.exp(shift) if total != 0 else 0j


class BranchTerm(NamedTuple):
    """c_i* c_j w_p w_q* <G_i|(|alpha_p><alpha_q| ⊗ I)|G_j>, one term of a projector sum."""

    i: int
    j: int
    p: int
    q: int
    log_mag: float
    phase: complex

    @property
    def value(self) -> complex:
        return math.exp(self.log_mag) * self.phase


# ------------------------------------------------------------------------------------------------ #
#                                   BATCHED GAUSSIAN PAIRS                                         #
# ------------------------------------------------------------------------------------------------ #
class _Stack(NamedTuple):
    """Exponents (K, b, c) and log coefficients of a list of Gaussian terms, stacked."""

    K: np.ndarray
    b: np.ndarray
    c: np.ndarray
    log_coef: np.ndarray

    @classmethod
    def from_terms(cls, terms: Sequence[GaussianTerm]) -> _Stack:
        n = terms[0].state.num_modes
        K = np.zeros((len(terms), n, n), dtype=complex)
        b = np.zeros((len(terms), n), dtype=complex)
        c = np.zeros(len(terms), dtype=complex)
        for k, term in enumerate(terms):
            K[k], b[k], c[k] = term.state.exponent
        log_coef = np.array([t.log_mag + 1j * np.angle(t.phase) for t in terms])
        return cls(K, b, c, log_coef)

    @property
    def size(self) -> int:
        return self.c.size

    @property
    def num_modes(self) -> int:
        return self.b.shape[1]


def _batched_log_integral(
    M: np.ndarray, J: np.ndarray, C: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """log of the Gaussian integrals for a stack of (M, J, C), with their means and covariances."""
    n = M.shape[-1]
    if n == 0:
        return C.astype(complex), J, M
    cond = np.linalg.cond(M)
    bad = ~np.isfinite(cond) | (cond > DEFAULT_COND_GUARD)
    if np.any(bad):
        worst = cond[bad]
        raise IllConditionedError("Path-sum pair integral", float(np.max(np.nan_to_num(worst))))
    cov = np.linalg.inv(M)
    mean = np.einsum("pij,pj->pi", cov, J)
    log_value = (
        0.5 * n * LOG_2PI
        - 0.5 * np.sum(np.log(np.linalg.eigvals(M)), axis=-1)
        + 0.5 * np.einsum("pi,pi->p", J, mean)
        + C
    )
    return log_value, mean, cov


def _unit(n: int, k: int) -> np.ndarray:
    e = np.zeros(n, dtype=int)
    e[k] = 1
    return e


def _lower(poly: Poly, k: int, A: np.ndarray, b: np.ndarray) -> Poly:
    """a_k (P psi) = ((d_k P) + P ((I - K) x + b)_k) / sqrt(2) psi, per term."""
    n = b.shape[1]
    out: Poly = {}

    def accumulate(key: Exponents, value: np.ndarray) -> None:
        out[key] = out[key] + value if key in out else value

    for key, coef in poly.items():
        if key[k]:
            accumulate(tuple(np.array(key) - _unit(n, k)), key[k] * coef)
        accumulate(key, coef * b[:, k])
        for j in range(n):
            accumulate(tuple(np.array(key) + _unit(n, j)), coef * A[:, k, j])
    return {key: value / math.sqrt(2.0) for key, value in out.items()}


def _lowered_polynomials(stack: _Stack, orders: Iterable[Exponents]) -> Dict[Exponents, Poly]:
    """For every multi-index nu, the polynomials P_t with a^nu psi_t = P_t psi_t."""
    n, size = stack.num_modes, stack.size
    A = np.eye(n)[None, :, :] - stack.K
    zero = (0,) * n
    cache: Dict[Exponents, Poly] = {zero: {zero: np.ones(size, dtype=complex)}}

    def build(nu: Exponents) -> Poly:
        if nu not in cache:
            k = next(i for i, v in enumerate(nu) if v)
            previous = build(tuple(np.array(nu) - _unit(n, k)))
            cache[nu] = _lower(previous, k, A, stack.b)
        return cache[nu]

    for nu in orders:
        build(tuple(int(v) for v in nu))
    return cache


def _moment_table(mean: np.ndarray, cov: np.ndarray) -> Any:
    """E[x^gamma] under a complex Gaussian weight by Stein's recursion, memoized."""
    n = mean.shape[1]
    memo: Dict[Exponents, np.ndarray] = {(0,) * n: np.ones(mean.shape[0], dtype=complex)}

    def moment(gamma: Exponents) -> np.ndarray:
        if gamma in memo:
            return memo[gamma]
        g = np.array(gamma)
        i = int(np.flatnonzero(g)[0])
        rest = g - _unit(n, i)
        value = mean[:, i] * moment(tuple(rest))
        for j in np.flatnonzero(rest):
            value = value + cov[:, i, j] * rest[j] * moment(tuple(rest - _unit(n, j)))
        memo[gamma] = value
        return value

    return moment


def _pair_sums(
    stack: _Stack,
    operators: Sequence[PolyOp],
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> List[complex]:
    """sum_{a,b} conj(c_a) c_b <G_a|O|G_b> for every operator, over all ordered pairs."""
    n, size = stack.num_modes, stack.size
    mus = {mu for op in operators for (mu, _) in op.terms}
    nus = {nu for op in operators for (_, nu) in op.terms}
    bra_polys = _lowered_polynomials(stack, mus)
    ket_polys = _lowered_polynomials(stack, nus)
    sums = [LogSum() for _ in operators]
    total_pairs = size * size
    for start in range(0, total_pairs, batch_size):
        flat = np.arange(start, min(start + batch_size, total_pairs))
        ia, ib = flat // size, flat % size
        M = stack.K[ia].conj() + stack.K[ib]
        J = stack.b[ia].conj() + stack.b[ib]
        C = stack.c[ia].conj() + stack.c[ib]
        log_integral, mean, cov = _batched_log_integral(M, J, C)
        base = log_integral + stack.log_coef[ia].conj() + stack.log_coef[ib]
        moment = _moment_table(mean, cov) if n else None
        for op, acc in zip(operators, sums):
            factor = np.zeros(flat.size, dtype=complex)
            for (mu, nu), coef in op.items():
                for alpha, pa in bra_polys[mu].items():
                    left = coef * pa[ia].conj()
                    for beta, pb in ket_polys[nu].items():
                        gamma = tuple(x + y for x, y in zip(alpha, beta))
                        weight = moment(gamma) if moment is not None else 1.0
                        factor = factor + left * pb[ib] * weight
            acc.add(base, factor)
    return [acc.value for acc in sums]


# ------------------------------------------------------------------------------------------------ #
#                                    GADGET EXPANSION                                              #
# ------------------------------------------------------------------------------------------------ #
def _log_sup_amplitude(terms: Sequence[GaussianTerm], mode: int) -> float:
    """log of a bound on sup_x of the square root of the X_mode marginal of sum c_J |G_J>."""
    logs = [
        t.log_mag - 0.25 * math.log(2.0 * math.pi * t.state.Gamma[mode, mode]) for t in terms
    ]
    return float(logsumexp(logs))


def _apply_to_terms(terms: List[GaussianTerm], gate: SymplecticGate) -> List[GaussianTerm]:
    if (
        np.array_equal(gate.S, np.eye(gate.S.shape[0]))
        and not np.any(gate.d)
        and gate.phase == 1
    ):
        return terms
    moved = []
    for term in terms:
        state = gausssim.apply_gaussian(term.state, gate)
        moved.append(GaussianTerm(term.log_mag, term.phase * state.phase, state.pinned()))
    return moved


@dataclass(frozen=True)
class PathExpansion:
    """The conditioned circuit output as an explicit Gaussian sum.

    Args:
        terms (Tuple[GaussianTerm, ...]): Unnormalized terms; the vector is their sum.
        num_modes (int): Modes of the original circuit.
        state_error (float): Bound on the Euclidean distance of the unnormalized sum to the
            conditioned output built from exact magic states, first order in the decomposition
            errors.
        xi (float): Ancilla width used by every gadget.
        ancilla_errors (Tuple[float, ...]): Declared error of each magic-state decomposition.
        z_bounds (Tuple[Tuple[float, float], ...]): Bracket of each gadget's branch density.
        envelope_errors (Tuple[float, ...]): Normalized distance each gadget adds through the
            finite-squeezing envelope exp(-x^2/(2 xi^2)) on its input.
    """

    terms: Tuple[GaussianTerm, ...]
    num_modes: int
    state_error: float = 0.0
    xi: float = DEFAULT_PATHSUM_XI
    ancilla_errors: Tuple[float, ...] = ()
    z_bounds: Tuple[Tuple[float, float], ...] = ()
    envelope_errors: Tuple[float, ...] = ()

    @property
    def rank(self) -> int:
        return len(self.terms)

    @property
    def num_gadgets(self) -> int:
        return len(self.ancilla_errors)

    @property
    def envelope_error(self) -> float:
        """Distance of the exact-ancilla output from the ideal circuit output."""
        return float(sum(self.envelope_errors))

    def stack(self) -> _Stack:
        return _Stack.from_terms(self.terms)

    def norm_sq(self, batch_size: int = DEFAULT_BATCH_SIZE) -> float:
        identity = PolyOp.identity(self.num_modes)
        return float(_pair_sums(self.stack(), [identity], batch_size)[0].real)

    def kappa_bracket(self) -> Tuple[float, float]:
        """Range of kappa = 1/prod Z implied by the per-gadget density brackets."""
        low = math.prod(lo for lo, _ in self.z_bounds)
        high = math.prod(hi for _, hi in self.z_bounds)
        return 1.0 / high, (1.0 / low if low > 0 else math.inf)

    def to_sum(self) -> GaussianSum:
        return GaussianSum((self.terms,), self.state_error)

    def branch_term(
        self, i: int, j: int, p: int, q: int, decomposition: FockDecomposition, mode: int = 0
    ) -> BranchTerm:
        """The (i, j, p, q) contribution to <psi|(|n~><n~| ⊗ I)|psi>, from one sandwich."""
        ti, tj = self.terms[i], self.terms[j]
        ket = gausssim.coherent_state([decomposition.alphas[p]])
        bra = gausssim.coherent_state([decomposition.alphas[q]])
        inner = gausssim.sandwich(tj.state, ti.state, ket, bra, mode)
        value = (
            np.conj(ti.coefficient)
            * tj.coefficient
            * decomposition.weights[p]
            * np.conj(decomposition.weights[q])
            * inner
        )
        magnitude = abs(value)
        log_mag = math.log(magnitude) if magnitude > 0 else -math.inf
        return BranchTerm(i, j, p, q, log_mag, value / magnitude if magnitude > 0 else 1.0 + 0j)


def _envelope_distance(stack: _Stack, mode: int, xi: float, norm_sq: float) -> float:
    """Normalized distance between the gadget input and its image under exp(-x^2/(2 xi^2)).

    Weighting every term by exp(-a x^2/2) adds a to its K entry and weights the density by
    exp(-a x^2), so each moment of the envelope is one more pair sum over the input terms.
    """
    identity = PolyOp.identity(stack.num_modes)

    def weighted(a: float) -> float:
        K = stack.K.copy()
        K[:, mode, mode] += a
        return float(_pair_sums(stack._replace(K=K), [identity])[0].real)

    full = weighted(1.0 / xi**2)
    half = weighted(0.5 / xi**2)
    eps = math.sqrt(max(full - 2.0 * half + norm_sq, 0.0) / norm_sq)
    return gadget.normalization_error(eps, math.sqrt(full / norm_sq))


def _teleport_terms(
    terms: List[GaussianTerm],
    gate: Cubic,
    num_modes: int,
    xi: float,
    delta: float,
    error: float,
    branch_cap: int,
) -> Tuple[List[GaussianTerm], float, float, Tuple[float, float], float]:
    mode = gate.mode
    decomposition = grank.decompose_cubic(float(gate.theta), xi, delta)
    ancilla = decomposition.terms()
    count = len(terms) * len(ancilla)
    if count * count > branch_cap:
        raise CapExceededError("Path-sum branch pairs", count * count, branch_cap)

    stack = _Stack.from_terms(terms)
    norm_sq, photons = _pair_sums(
        stack, [PolyOp.identity(num_modes), PolyOp.number(num_modes, mode)]
    )
    energy = max(float(photons.real / norm_sq.real), 0.0)
    lam = gadget.z_lambda(xi, energy)
    top = 1.0 / (math.sqrt(math.pi) * xi)
    z_bounds = gadget.z_bracket(xi, lam) if lam < 0.5 else (0.0, top)
    envelope = _envelope_distance(stack, mode, xi, float(norm_sq.real))

    # T_chi e has norm at most sup|chi| ||e||; the fresh error is sup|phi| times the ancilla's
    sup_input = math.exp(_log_sup_amplitude(terms, mode))
    sup_ancilla = math.exp(_log_sup_amplitude(ancilla, 0))
    ancilla_error = decomposition.declared_error
    error = error * sup_ancilla + sup_input * ancilla_error

    inverse_sum = gausssim.sum_gate(-1.0, mode, num_modes, num_modes + 1)
    branched = []
    for term in terms:
        for anc in ancilla:
            joint = gausssim.apply_gaussian(gausssim.product(term.state, anc.state), inverse_sum)
            reduced, density, phase = gausssim.homodyne_postselect(joint, num_modes, 0.0)
            branched.append(
                GaussianTerm(
                    term.log_mag + anc.log_mag + 0.5 * math.log(density),
                    term.phase * anc.phase * phase,
                    reduced,
                )
            )
    logger.debug(
        f"Cubic gate on mode {mode}: {len(terms)} x {len(ancilla)} terms, input energy "
        f"{energy:.4f}, accumulated error {error:.3e}, envelope distance {envelope:.3e}."
    )
    return branched, error, ancilla_error, z_bounds, envelope


def expand_circuit(
    circuit: CircuitIR,
    delta: float,
    xi: float = DEFAULT_PATHSUM_XI,
    branch_cap: int = DEFAULT_BRANCH_CAP,
) -> PathExpansion:
    """Rewrites the circuit's output as a Gaussian sum.

    Args:
        circuit (CircuitIR): Gaussian unitaries and cubic gates only.
        delta (float): Total decomposition budget shared by the magic states.
        xi (float): Ancilla width.
        branch_cap (int): Refuse expansions whose pair count exceeds this.

    Raises:
        DomainError: If the circuit holds another kind of gate.
        CapExceededError: If the pair count exceeds ``branch_cap``.
    """
    n = circuit.num_modes
    cubics = circuit.cubic_gates
    each = delta / max(1, len(cubics))
    terms = [GaussianTerm(0.0, 1.0 + 0j, gausssim.vacuum(n))]
    pending = gausssim.identity_gate(n)
    error = 0.0
    ancilla_errors: List[float] = []
    z_bounds: List[Tuple[float, float]] = []
    envelope_errors: List[float] = []
    for index, gate in enumerate(circuit.gates):
        if isinstance(gate, Cubic):
            terms = _apply_to_terms(terms, pending)
            pending = gausssim.identity_gate(n)
            terms, error, ancilla_error, bracket, envelope = _teleport_terms(
                terms, gate, n, xi, each, error, branch_cap
            )
            ancilla_errors.append(ancilla_error)
            z_bounds.append(bracket)
            envelope_errors.append(envelope)
        elif gate.gaussian and gate.unitary:
            pending = gate.symplectic(n).compose(pending)
        else:
            raise DomainError(
                f"The path sum handles Gaussian and cubic gates only; gates[{index}] is "
                f"'{gate.kind}'."
            )
    terms = _apply_to_terms(terms, pending)
    return PathExpansion(
        tuple(terms),
        n,
        error,
        xi,
        tuple(ancilla_errors),
        tuple(z_bounds),
        tuple(envelope_errors),
    )


# ------------------------------------------------------------------------------------------------ #
#                                  EXPECTATION VALUES                                              #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class ExpectationResult:
    """Outcome of :func:`estimate_expectation`.

    Args:
        value (complex): <O> on the normalized conditioned output.
        error_budget (float): Bound on the error against the ideal circuit from the magic-state
            decompositions and the ancilla envelope, scaled by sqrt(<O^dag O>).
        envelope_error (float): Distance the finite ancilla width alone contributes.
        kappa (float): 1/||psi||^2, the post-selection normalization.
        kappa_bracket (Tuple[float, float]): Range of kappa implied by the density brackets.
        branch_count (int): Number of term pairs summed.
        cubic_gates (int): Number of gadgets.
        xi (float): Ancilla width.
        wall_time (float): Seconds spent.
    """

    value: complex
    error_budget: float
    envelope_error: float
    kappa: float
    kappa_bracket: Tuple[float, float]
    branch_count: int
    cubic_gates: int
    xi: float
    wall_time: float

    def as_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["value"] = {"re": self.value.real, "im": self.value.imag}
        data["kappa_bracket"] = list(self.kappa_bracket)
        return data


def _as_operator(O: Union[str, PolyOp], num_modes: int) -> PolyOp:
    op = parse_expression(O, num_modes) if isinstance(O, str) else O
    if op.num_modes != num_modes:
        raise ModeMismatchError(f"Observable acts on {op.num_modes} modes, circuit on {num_modes}.")
    return op.as_float()


def _state_distance(expansion: PathExpansion, norm_sq: float) -> float:
    """Distance of the normalized output from the ideal circuit output."""
    if expansion.state_error == 0:
        return expansion.envelope_error
    decomposition = gadget.normalization_error(expansion.state_error, math.sqrt(norm_sq))
    return decomposition + expansion.envelope_error


def estimate_expectation(
    circuit: CircuitIR,
    O: Union[str, PolyOp],
    delta: float = 1e-2,
    xi: float = DEFAULT_PATHSUM_XI,
    branch_cap: int = DEFAULT_BRANCH_CAP,
    max_degree: int = DEFAULT_MAX_OBS_DEGREE,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> ExpectationResult:
    """kappa * sum_{i,j} c_i* c_j <G_i|O|G_j> for a Gaussian plus cubic circuit.

    Args:
        circuit (CircuitIR): The circuit, started from vacuum.
        O: Observable as a PolyOp or expression string.
        delta (float): Decomposition budget shared by the magic states.
        xi (float): Ancilla width.
        branch_cap (int): Largest number of term pairs to sum.
        max_degree (int): Largest observable degree accepted.
        batch_size (int): Pairs evaluated per vectorized batch.

    Raises:
        CapExceededError: If the observable degree or the pair count is above its cap.
        PostselectionError: If the conditioned output has vanishing norm.
    """
    start = time.perf_counter()
    op = _as_operator(O, circuit.num_modes)
    # O^dag O sets the scale of the budget, so its degree is what has to fit
    if 2 * op.degree > max_degree:
        raise CapExceededError("Observable degree", 2 * op.degree, max_degree)
    expansion = expand_circuit(circuit, delta, xi, branch_cap)
    identity = PolyOp.identity(circuit.num_modes)
    norm_sq, raw, second = _pair_sums(
        expansion.stack(), [identity, op, op.dagger() * op], batch_size
    )
    norm_sq = float(norm_sq.real)
    if not norm_sq > DEFAULT_BRANCH_FLOOR:
        raise PostselectionError(f"Conditioned output has squared norm {norm_sq:.3e}.")
    value = complex(raw / norm_sq)
    scale = max(1.0, math.sqrt(max(float(second.real) / norm_sq, 0.0)))
    d = _state_distance(expansion, norm_sq)
    result = ExpectationResult(
        value=value,
        error_budget=(2.0 * d + d * d) * scale,
        envelope_error=expansion.envelope_error,
        kappa=1.0 / norm_sq,
        kappa_bracket=expansion.kappa_bracket(),
        branch_count=expansion.rank**2,
        cubic_gates=expansion.num_gadgets,
        xi=xi,
        wall_time=time.perf_counter() - start,
    )
    logger.info(
        f"Path-sum expectation over {result.branch_count:,} pairs: {value:.6g} "
        f"(budget {result.error_budget:.3e}, kappa {result.kappa:.4g})."
    )
    return result


def eval_poly_observable(
    circuit: CircuitIR,
    O: Union[str, PolyOp],
    squeezed_inputs: Optional[Mapping[int, float]] = None,
    max_degree: int = DEFAULT_MAX_OBS_DEGREE,
) -> complex:
    """<O> exactly, by carrying O back through every gate.

    Gaussian gates map ladder operators to affine images and V(theta) maps a to
    a + i theta X^2 / sqrt(2), so the conjugated observable stays a polynomial. Modes listed in
    ``squeezed_inputs`` start in S_xi|0> and the rest in vacuum; for a normal-ordered
    polynomial the vacuum expectation is its constant term.

    Args:
        circuit (CircuitIR): Gaussian unitaries and cubic gates.
        O: Observable as a PolyOp or expression string.
        squeezed_inputs (Optional[Mapping[int, float]]): mode -> xi for squeezed inputs.
        max_degree (int): Largest degree the conjugated observable may reach.

    Raises:
        CapExceededError: If the conjugated observable exceeds ``max_degree``.
        DomainError: If a gate has no polynomial Heisenberg image.
    """
    n = circuit.num_modes
    op = _as_operator(O, n)
    if op.degree > max_degree:
        raise CapExceededError("Observable degree", op.degree, max_degree)
    for gate in reversed(circuit.gates):
        op = op.substitute(gate.heisenberg(n)).chop()
        if op.degree > max_degree:
            raise CapExceededError("Conjugated observable degree", op.degree, max_degree)
    for mode, xi in sorted((squeezed_inputs or {}).items()):
        if xi <= 0:
            raise DomainError(f"Input width must be positive, got {xi} on mode {mode}.")
        prepare = gausssim.squeeze(-math.log(xi), mode, n)
        op = op.substitute(heisenberg_images(prepare)).chop()
    return complex(op.constant())


# ------------------------------------------------------------------------------------------------ #
#                               NUMBER STATES FROM COHERENT STATES                                 #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class FockDecomposition:
    """|n~> = C_n sum_k omega_k |alpha_k>, a normalized approximation of |n>.

    Args:
        n (int): Photon number.
        beta (float): Radius parameter; the radius is sqrt(n e^{-beta}).
        radius (float): Common modulus of the alpha_k.
        alphas (np.ndarray): The n + 1 coherent amplitudes r e^{2 pi i k/(n+1)}.
        weights (np.ndarray): C_n omega_k with omega_k = e^{-2 pi i k n/(n+1)}.
        normalization (float): C_n.
        fidelity (float): |<n|n~>|^2.
    """

    n: int
    beta: float
    radius: float
    alphas: np.ndarray
    weights: np.ndarray
    normalization: float
    fidelity: float

    @property
    def projector_error(self) -> float:
        """Operator-norm distance between |n~><n~| and |n><n|."""
        return math.sqrt(max(0.0, 1.0 - self.fidelity))

    def as_sum(self) -> GaussianSum:
        """The decomposition as coherent terms; declared error is ||n~ - n||."""
        terms = tuple(
            GaussianTerm(math.log(abs(w)), w / abs(w), gausssim.coherent_state([a]))
            for a, w in zip(self.alphas, self.weights)
        )
        distance = math.sqrt(max(0.0, 2.0 - 2.0 * math.sqrt(self.fidelity)))
        return GaussianSum((terms,), distance)


def _log_overlap_series(n: int, radius: float) -> float:
    """log N with N = n! sum_j r^{2j(n+1)} / (n + j(n+1))!, so that the fidelity is 1/N."""
    if radius == 0:
        return 0.0
    log_r2 = 2.0 * math.log(radius)
    logs = []
    j = 0
    while True:
        m = n + j * (n + 1)
        term = gammaln(n + 1) + j * (n + 1) * log_r2 - gammaln(m + 1)
        logs.append(term)
        if j > 0 and term < logs[0] - 40.0:
            break
        j += 1
    return float(logsumexp(logs))


def _radius_parameter(n: int, delta: float) -> float:
    log_target = math.log(4.0 * math.e / delta)
    if n >= log_target / math.log(4.0 / math.e):
        return 0.0
    return log_target / n


def coherent_decompose_fock(n: int, delta: float) -> FockDecomposition:
    """Writes |n> as n + 1 coherent states on a circle, to fidelity at least 1 - delta.

    The radius is sqrt(n e^{-beta}) with beta = 0 once n is large enough and
    beta = log(4e/delta)/n below that. If the resulting fidelity still falls short, beta is
    increased until it does not.

    Raises:
        DomainError: If n < 0 or delta is outside (0, 1).
    """
    if n < 0 or int(n) != n:
        raise DomainError(f"Photon number must be a nonnegative integer, got {n}.")
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}.")
    n = int(n)
    if n == 0:
        origin, unit = np.zeros(1, dtype=complex), np.ones(1, dtype=complex)
        return FockDecomposition(0, 0.0, 0.0, origin, unit, 1.0, 1.0)
    beta = _radius_parameter(n, delta)
    while True:
        radius = math.sqrt(n * math.exp(-beta))
        log_N = _log_overlap_series(n, radius)
        fidelity = math.exp(-log_N)
        if fidelity >= 1.0 - delta:
            break
        logger.debug(f"Fidelity {fidelity:.6f} for n={n} at beta={beta:.4f}; increasing beta.")
        beta = 2.0 * beta if beta > 0 else 0.25
    k = np.arange(n + 1)
    alphas = radius * np.exp(2j * math.pi * k / (n + 1))
    omegas = np.exp(-2j * math.pi * k * n / (n + 1))
    log_C = (
        0.5 * gammaln(n + 1)
        + 0.5 * radius**2
        - math.log(n + 1)
        - n * math.log(radius)
        - 0.5 * log_N
    )
    C = math.exp(log_C)
    return FockDecomposition(n, beta, radius, alphas, C * omegas, C, fidelity)


# ------------------------------------------------------------------------------------------------ #
#                                 ACCEPTANCE PROBABILITIES                                         #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class AcceptanceResult:
    """Outcome of :func:`estimate_acceptance`.

    Args:
        probability (float): Probability that the measured photon count lies in the set.
        error_budget (float): Projector error plus 2d + d^2 for the state distance d.
        projector_error (float): Sum over accepted counts of the projector errors.
        state_distance (float): Bound on the normalized-output distance from the ideal circuit.
        envelope_error (float): The part of ``state_distance`` due to the finite ancilla width.
        accept (Tuple[int, ...]): Accepted photon counts.
        mode (int): Measured mode.
        kappa (float): 1/||psi||^2.
        branch_count (int): Number of (i, j, p, q) contributions summed.
        wall_time (float): Seconds spent.
    """

    probability: float
    error_budget: float
    projector_error: float
    state_distance: float
    envelope_error: float
    accept: Tuple[int, ...]
    mode: int
    kappa: float
    branch_count: int
    wall_time: float

    def as_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["accept"] = list(self.accept)
        return data


def _project_coherent(stack: _Stack, mode: int, decomposition: FockDecomposition) -> _Stack:
    """Stacks (<alpha_k| ⊗ I)|G_t> over terms t and circle points k, weights conj(w_k) included.

    The bra adds 1 to K and conj(b_alpha) to b at ``mode``; the mode is then integrated out.
    """
    n = stack.num_modes
    rest = [k for k in range(n) if k != mode]
    K_list, b_list, c_list, log_list = [], [], [], []
    for alpha, weight in zip(decomposition.alphas, decomposition.weights):
        _, b_alpha, c_alpha = gausssim.coherent_exponent(np.array([alpha]))
        A = stack.K[:, mode, mode] + 1.0
        Jx = stack.b[:, mode] + np.conj(b_alpha[0])
        cross = stack.K[:, rest, mode]
        outer = cross[:, :, None] * cross[:, None, :]
        K_rest = stack.K[:, rest][:, :, rest] - outer / A[:, None, None]
        b_rest = stack.b[:, rest] - cross * (Jx / A)[:, None]
        c_rest = (
            stack.c
            + np.conj(c_alpha)
            + 0.5 * Jx * Jx / A
            + 0.5 * (LOG_2PI - np.log(A))
        )
        K_list.append(K_rest)
        b_list.append(b_rest)
        c_list.append(c_rest)
        log_list.append(stack.log_coef + np.log(np.conj(weight)))
    return _Stack(
        np.concatenate(K_list),
        np.concatenate(b_list),
        np.concatenate(c_list),
        np.concatenate(log_list),
    )


def estimate_acceptance(
    circuit: CircuitIR,
    accept_set: Optional[Iterable[int]] = None,
    delta: float = 1e-2,
    mode: Optional[int] = None,
    xi: float = DEFAULT_PATHSUM_XI,
    branch_cap: int = DEFAULT_BRANCH_CAP,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> AcceptanceResult:
    """Probability that the photon count of ``mode`` lies in ``accept_set``.

    Each accepted count n contributes <psi|(|n~><n~| ⊗ I)|psi>, the quadruple sum over term
    pairs (i, j) and circle points (p, q). It is evaluated by first projecting every term onto
    each coherent bra and then summing the pair overlaps of the projected terms.

    Args:
        circuit (CircuitIR): Gaussian unitaries and cubic gates.
        accept_set: Accepted counts; defaults to the circuit's photon-number measurement.
        delta (float): Budget split between the magic states and the projectors; the envelope
            term set by ``xi`` comes on top.
        mode (Optional[int]): Measured mode; defaults to the circuit's measurement.
        xi (float): Ancilla width.
        branch_cap (int): Largest number of contributions to sum.
        batch_size (int): Pairs evaluated per vectorized batch.

    Raises:
        DomainError: If neither an accept set nor a photon-number measurement is given.
        CapExceededError: If the contribution count exceeds ``branch_cap``.
    """
    start = time.perf_counter()
    measurement = circuit.measurement
    if accept_set is None or mode is None:
        if not isinstance(measurement, PhotonNumber):
            raise DomainError("No accept set given and the circuit has no photon-number readout.")
        accept_set = measurement.accept if accept_set is None else accept_set
        mode = measurement.mode if mode is None else mode
    accept = tuple(sorted({int(k) for k in accept_set}))
    if not accept or accept[0] < 0:
        raise DomainError(f"Accept set must be a nonempty set of counts, got {accept}.")
    if not 0 <= mode < circuit.num_modes:
        raise ModeMismatchError(f"Measured mode {mode} outside {circuit.num_modes} modes.")

    decompositions = [coherent_decompose_fock(k, (0.25 * delta / len(accept)) ** 2) for k in accept]
    expansion = expand_circuit(circuit, 0.5 * delta, xi, branch_cap)
    branch_count = sum((expansion.rank * (d.n + 1)) ** 2 for d in decompositions)
    if branch_count > branch_cap:
        raise CapExceededError("Path-sum branch contributions", branch_count, branch_cap)

    stack = expansion.stack()
    norm_sq = float(_pair_sums(stack, [PolyOp.identity(circuit.num_modes)], batch_size)[0].real)
    if not norm_sq > DEFAULT_BRANCH_FLOOR:
        raise PostselectionError(f"Conditioned output has squared norm {norm_sq:.3e}.")

    total = LogSum()
    for decomposition in decompositions:
        projected = _project_coherent(stack, mode, decomposition)
        if projected.num_modes == 0:
            # single-mode output: the pair sum is |sum_u d_u|^2
            amplitude = LogSum()
            amplitude.add(projected.log_coef + projected.c)
            total.add([2.0 * amplitude.log_value.real])
        else:
            identity = PolyOp.identity(projected.num_modes)
            value = _pair_sums(projected, [identity], batch_size)[0]
            total.add([complex(np.log(value))] if value != 0 else [])
    probability = float(total.value.real) / norm_sq
    projector_error = float(sum(d.projector_error for d in decompositions))
    d = _state_distance(expansion, norm_sq)
    result = AcceptanceResult(
        probability=probability,
        error_budget=projector_error + 2.0 * d + d * d,
        projector_error=projector_error,
        state_distance=d,
        envelope_error=expansion.envelope_error,
        accept=accept,
        mode=mode,
        kappa=1.0 / norm_sq,
        branch_count=branch_count,
        wall_time=time.perf_counter() - start,
    )
    logger.info(
        f"Path-sum acceptance for counts {accept} on mode {mode}: {probability:.6g} "
        f"(budget {result.error_budget:.3e}, {branch_count:,} contributions)."
    )
    return result


# ------------------------------------------------------------------------------------------------ #
#                                 BEAM-SPLITTER EXPERIMENT                                         #
# ------------------------------------------------------------------------------------------------ #
def beamsplit_overlap(n: int, eps: float) -> float:
    """<n,0|B(eps)|n,0> = cos^n(eps)."""
    return math.cos(eps) ** n


def beamsplit_experiment(n: int, eps: float) -> Tuple[float, float]:
    """Acceptance probabilities of the single-query test with and without B(eps).

    The probe |n,0> returns to |n,0> with certainty under the identity and with probability
    cos^{2n}(eps) under the beam splitter.

    Raises:
        DomainError: If n < 1.
    """
    if n < 1:
        raise DomainError(f"The probe needs at least one photon, got {n}.")
    return 1.0, beamsplit_overlap(n, eps) ** 2


def beamsplit_tmsv_acceptance(eps: float, r: float) -> float:
    """sum_n sech^2 r tanh^{2n} r cos^{2n} eps = sech^2 r / (1 - tanh^2 r cos^2 eps).

    The probe photon number is drawn from a two-mode squeezed source heralded on its partner.
    """
    t2 = math.tanh(r) ** 2
    return (1.0 - t2) / (1.0 - t2 * math.cos(eps) ** 2)


def beamsplit_sample_size(eps: float, delta: float) -> int:
    """ceil(2 eps^-2 log(1/delta)) photons push cos^{2n}(eps) below delta."""
    if eps == 0 or not 0.0 < delta < 1.0:
        raise DomainError(f"Need eps != 0 and delta in (0, 1); got {eps}, {delta}.")
    return int(math.ceil(2.0 * math.log(1.0 / delta) / eps**2))

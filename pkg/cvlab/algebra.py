#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : algebra.py                                                                          #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 04:31:05 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Normal-ordered operator algebra over bosonic ladder operators.

A :class:`PolyOp` is a polynomial in the per-mode operators a_k and a_k^dagger, stored in normal
order as a map from ``(mu, nu)`` multidegrees to coefficients: the term ``(mu, nu): c`` stands
for c * prod_k (a_k^dagger)^mu_k (a_k)^nu_k. Every Hamiltonian and observable in the package is a
PolyOp.

Conventions: hbar = 1, X = (a + a^dagger)/sqrt(2), P = (a - a^dagger)/(sqrt(2) i), so [X, P] = i
and the vacuum has <X^2> = 1/2. A cutoff E on a mode keeps photon numbers 0..E. Flat Fock
indices are mode-0-fastest, which makes the dense realization kron(M_{m-1}, ..., M_0) and lets a
flat vector be viewed as a C-ordered tensor whose axis m-1-k belongs to mode k.

The module also holds :class:`TruncatedMatrix` (the dense Pi_E op Pi_E), a matrix-free
:func:`apply_to_vector` for boxes too large to realize, and a small recursive-descent parser so
operators can be written as text (``"(x0^2 + p0^2 - I)/2"``).
"""
from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Complex, Rational
from types import MappingProxyType
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln

from cvlab.constants import DEFAULT_MAX_DIM
from cvlab.errors import CapExceededError, CircuitParseError, DomainError, ModeMismatchError

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
Multidegree = Tuple[int, ...]
Monomial = Tuple[Multidegree, Multidegree]


# ------------------------------------------------------------------------------------------------ #
#                                   EXACT COEFFICIENTS                                             #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class GaussianRational:
    """A complex number with rational real and imaginary parts.

    Used as the coefficient type of exact-mode PolyOps so symbolic identities can be asserted
    with ``==`` instead of a tolerance.
    """

    re: Fraction = field(default_factory=Fraction)
    im: Fraction = field(default_factory=Fraction)

    @classmethod
    def coerce(cls, value: Any) -> GaussianRational:
        """Converts ints, Fractions, finite floats and complex numbers with rational parts.

        Raises:
            DomainError: If the value has no exact rational representation.
        """
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, Rational):
            return cls(Fraction(value), Fraction(0))
        if isinstance(value, Complex):
            z = complex(value)
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise DomainError(f"Non-finite coefficient {value!r} has no exact form.")
            return cls(Fraction(z.real), Fraction(z.imag))
        raise DomainError(f"Cannot use {value!r} as an exact coefficient.")

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __neg__(self) -> GaussianRational:
        return GaussianRational(-self.re, -self.im)

    def __add__(self, other: Any) -> GaussianRational:
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: Any) -> GaussianRational:
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: Any) -> GaussianRational:
        return GaussianRational.coerce(other) - self

    def __mul__(self, other: Any) -> GaussianRational:
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> GaussianRational:
        o = GaussianRational.coerce(other)
        denom = o.re * o.re + o.im * o.im
        if denom == 0:
            raise ZeroDivisionError("Division of an exact coefficient by zero.")
        num = self * o.conjugate()
        return GaussianRational(num.re / denom, num.im / denom)

    def __rtruediv__(self, other: Any) -> GaussianRational:
        return GaussianRational.coerce(other) / self

    def __eq__(self, other: object) -> bool:
        try:
            o = GaussianRational.coerce(other)
        except DomainError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        return f"({self.re}{'+' if self.im > 0 else '-'}{abs(self.im)}i)"


Coefficient = Union[complex, GaussianRational]


# ------------------------------------------------------------------------------------------------ #
@lru_cache(maxsize=None)
def _reorder_weights(n_left: int, m_right: int) -> Tuple[Tuple[int, int], ...]:
    """Weights of a^n a^dagger^m = sum_k C(n,k) C(m,k) k! a^dagger^(m-k) a^(n-k)."""
    return tuple(
        (k, math.comb(n_left, k) * math.comb(m_right, k) * math.factorial(k))
        for k in range(min(n_left, m_right) + 1)
    )


def _multiply_monomials(left: Monomial, right: Monomial) -> List[Tuple[Monomial, int]]:
    (mu1, nu1), (mu2, nu2) = left, right
    partial: List[Tuple[Multidegree, Multidegree, int]] = [((), (), 1)]
    for j in range(len(mu1)):
        expanded = []
        for mu, nu, weight in partial:
            for k, w in _reorder_weights(nu1[j], mu2[j]):
                expanded.append(
                    (mu + (mu1[j] + mu2[j] - k,), nu + (nu1[j] + nu2[j] - k,), weight * w)
                )
        partial = expanded
    return [((mu, nu), w) for mu, nu, w in partial]


# ------------------------------------------------------------------------------------------------ #
#                                         POLYOP                                                   #
# ------------------------------------------------------------------------------------------------ #
class PolyOp:
    """Normal-ordered polynomial in ladder operators on ``num_modes`` modes.

    Instances are immutable. Zero coefficients are never stored, so two equal operators have
    equal term maps. In exact mode coefficients are :class:`GaussianRational`; mixing an exact
    and a floating operator yields a floating one.

    Args:
        num_modes (int): Number of modes, at least 1.
        terms (Optional[Mapping[Monomial, Any]]): Map from ``(mu, nu)`` to coefficient.
        exact (bool): Keep rational coefficients. Defaults to False.

    Raises:
        DomainError: If ``num_modes`` is not positive or a multidegree is malformed.
    """

    __slots__ = ("_num_modes", "_terms", "_exact")

    def __init__(
        self,
        num_modes: int,
        terms: Optional[Mapping[Monomial, Any]] = None,
        exact: bool = False,
    ) -> None:
        if int(num_modes) != num_modes or num_modes < 1:
            raise DomainError(f"A PolyOp needs at least one mode, got {num_modes}.")
        self._num_modes = int(num_modes)
        self._exact = exact
        cleaned: Dict[Monomial, Coefficient] = {}
        for key, value in (terms or {}).items():
            mu, nu = (tuple(int(v) for v in part) for part in key)
            if len(mu) != self._num_modes or len(nu) != self._num_modes:
                raise DomainError(f"Multidegree {key} does not match {self._num_modes} mode(s).")
            if min(mu + nu) < 0:
                raise DomainError(f"Multidegree {key} has a negative exponent.")
            coeff = self._coerce(value)
            if coeff:
                cleaned[(mu, nu)] = coeff
        self._terms = cleaned

    def _coerce(self, value: Any) -> Coefficient:
        if self._exact:
            return GaussianRational.coerce(value)
        return complex(value)

    # -------------------------------------------------------------------------------------------- #
    @classmethod
    def identity(cls, num_modes: int, exact: bool = False) -> PolyOp:
        zero = (0,) * num_modes
        return cls(num_modes, {(zero, zero): 1}, exact=exact)

    @classmethod
    def ladder(cls, num_modes: int, mode: int, dagger: bool = False, exact: bool = False) -> PolyOp:
        """Returns a_mode, or its adjoint when ``dagger`` is set."""
        _check_mode(mode, num_modes)
        one = tuple(1 if k == mode else 0 for k in range(num_modes))
        zero = (0,) * num_modes
        key = (one, zero) if dagger else (zero, one)
        return cls(num_modes, {key: 1}, exact=exact)

    @classmethod
    def quad_x(cls, num_modes: int, mode: int) -> PolyOp:
        s = 1.0 / math.sqrt(2.0)
        return (cls.ladder(num_modes, mode) + cls.ladder(num_modes, mode, dagger=True)) * s

    @classmethod
    def quad_p(cls, num_modes: int, mode: int) -> PolyOp:
        s = -1j / math.sqrt(2.0)
        return (cls.ladder(num_modes, mode) - cls.ladder(num_modes, mode, dagger=True)) * s

    @classmethod
    def number(cls, num_modes: int, mode: int, exact: bool = False) -> PolyOp:
        _check_mode(mode, num_modes)
        one = tuple(1 if k == mode else 0 for k in range(num_modes))
        return cls(num_modes, {(one, one): 1}, exact=exact)

    # -------------------------------------------------------------------------------------------- #
    @property
    def num_modes(self) -> int:
        return self._num_modes

    @property
    def exact(self) -> bool:
        return self._exact

    @property
    def terms(self) -> Mapping[Monomial, Coefficient]:
        return MappingProxyType(self._terms)

    @property
    def degree(self) -> int:
        """max over terms of |mu|_1 + |nu|_1; zero for the zero operator."""
        return max((sum(mu) + sum(nu) for mu, nu in self._terms), default=0)

    @property
    def max_mode_shift(self) -> int:
        """Largest number of photons any term moves on a single mode."""
        return max(
            (abs(a - b) for mu, nu in self._terms for a, b in zip(mu, nu)),
            default=0,
        )

    def items(self) -> Iterator[Tuple[Monomial, Coefficient]]:
        return iter(sorted(self._terms.items()))

    def coefficient(self, mu: Sequence[int], nu: Sequence[int]) -> Coefficient:
        return self._terms.get((tuple(mu), tuple(nu)), self._coerce(0))

    def constant(self) -> Coefficient:
        """Coefficient of the identity, which is the vacuum expectation of a normal-ordered op."""
        zero = (0,) * self._num_modes
        return self.coefficient(zero, zero)

    def is_zero(self) -> bool:
        return not self._terms

    # -------------------------------------------------------------------------------------------- #
    def _check_partner(self, other: PolyOp) -> None:
        if other.num_modes != self._num_modes:
            raise ModeMismatchError(
                f"Operands act on {self._num_modes} and {other.num_modes} modes."
            )

    def _lift(self, other: Any) -> PolyOp:
        if isinstance(other, PolyOp):
            self._check_partner(other)
            return other
        return PolyOp.identity(self._num_modes, exact=self._exact) * other

    def __add__(self, other: Any) -> PolyOp:
        other = self._lift(other)
        exact = self._exact and other.exact
        merged: Dict[Monomial, Any] = {}
        for source in (self._terms, other._terms):
            for key, value in source.items():
                value = value if exact else complex(value)
                merged[key] = merged.get(key, 0) + value
        return PolyOp(self._num_modes, merged, exact=exact)

    __radd__ = __add__

    def __neg__(self) -> PolyOp:
        return PolyOp(self._num_modes, {k: -v for k, v in self._terms.items()}, exact=self._exact)

    def __sub__(self, other: Any) -> PolyOp:
        return self + (-self._lift(other))

    def __rsub__(self, other: Any) -> PolyOp:
        return self._lift(other) - self

    def __mul__(self, other: Any) -> PolyOp:
        if not isinstance(other, PolyOp):
            return self.scaled(other)
        self._check_partner(other)
        exact = self._exact and other.exact
        product: Dict[Monomial, Any] = {}
        for left, c1 in self._terms.items():
            for right, c2 in other._terms.items():
                c = c1 * c2 if exact else complex(c1) * complex(c2)
                for key, weight in _multiply_monomials(left, right):
                    product[key] = product.get(key, 0) + c * weight
        return PolyOp(self._num_modes, product, exact=exact)

    def __rmul__(self, other: Any) -> PolyOp:
        return self.scaled(other)

    def __truediv__(self, other: Any) -> PolyOp:
        if isinstance(other, PolyOp):
            scalar = other.as_scalar()
            if scalar is None:
                raise DomainError("Division by a non-constant operator is not defined.")
            other = scalar
        if self._exact:
            return self.scaled(GaussianRational(Fraction(1)) / GaussianRational.coerce(other))
        return self.scaled(1.0 / complex(other))

    def __pow__(self, exponent: int) -> PolyOp:
        if int(exponent) != exponent or exponent < 0:
            raise DomainError(f"Operator powers must be nonnegative integers, got {exponent}.")
        result = PolyOp.identity(self._num_modes, exact=self._exact)
        base = self
        n = int(exponent)
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyOp):
            return NotImplemented
        if other.num_modes != self._num_modes or set(self._terms) != set(other._terms):
            return False
        return all(self._terms[k] == other._terms[k] for k in self._terms)

    __hash__ = None  # type: ignore[assignment]

    def scaled(self, factor: Any) -> PolyOp:
        if isinstance(factor, GaussianRational) and not self._exact:
            factor = complex(factor)
        if self._exact:
            factor = GaussianRational.coerce(factor)
        return PolyOp(
            self._num_modes, {k: v * factor for k, v in self._terms.items()}, exact=self._exact
        )

    def as_scalar(self) -> Optional[Coefficient]:
        """The coefficient of a constant operator, or None if the operator is not constant."""
        zero = (0,) * self._num_modes
        if not self._terms:
            return self._coerce(0)
        if set(self._terms) == {(zero, zero)}:
            return self._terms[(zero, zero)]
        return None

    # -------------------------------------------------------------------------------------------- #
    def dagger(self) -> PolyOp:
        """Adjoint. Normal order is preserved because (a^dag^mu a^nu)^dag = a^dag^nu a^mu."""
        return PolyOp(
            self._num_modes,
            {(nu, mu): v.conjugate() for (mu, nu), v in self._terms.items()},
            exact=self._exact,
        )

    def allclose(self, other: PolyOp, atol: float = 1e-12) -> bool:
        self._check_partner(other)
        keys = set(self._terms) | set(other._terms)
        return all(
            abs(complex(self._terms.get(k, 0)) - complex(other._terms.get(k, 0))) <= atol
            for k in keys
        )

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        if self._exact:
            return self == self.dagger()
        return self.allclose(self.dagger(), atol=atol)

    def chop(self, atol: float = 1e-14) -> PolyOp:
        """Drops floating coefficients below ``atol`` in magnitude."""
        if self._exact:
            return self
        return PolyOp(
            self._num_modes,
            {k: v for k, v in self._terms.items() if abs(v) > atol},
        )

    def as_float(self) -> PolyOp:
        return PolyOp(self._num_modes, {k: complex(v) for k, v in self._terms.items()})

    def substitute(self, images: Sequence[PolyOp]) -> PolyOp:
        """Replaces every a_k by ``images[k]`` and every a_k^dagger by its adjoint.

        With images U^dag a_k U this is the Heisenberg conjugation U^dag self U, since the
        conjugation is an algebra homomorphism.

        Args:
            images (Sequence[PolyOp]): One image per mode, all on a common mode count.

        Returns:
            PolyOp: The substituted operator, on the images' mode count.

        Raises:
            ModeMismatchError: If the number of images differs from ``num_modes`` or the images
                disagree on their own mode count.
        """
        if len(images) != self._num_modes:
            raise ModeMismatchError(
                f"Expected {self._num_modes} images, got {len(images)}."
            )
        target = images[0].num_modes
        if any(img.num_modes != target for img in images):
            raise ModeMismatchError("Images act on different numbers of modes.")
        adjoints = [img.dagger() for img in images]
        powers: Dict[Tuple[int, bool, int], PolyOp] = {}

        def power(k: int, dag: bool, n: int) -> PolyOp:
            key = (k, dag, n)
            if key not in powers:
                base = adjoints[k] if dag else images[k]
                powers[key] = base**n
            return powers[key]

        result = PolyOp(target, exact=all(img.exact for img in images) and self._exact)
        for (mu, nu), c in self._terms.items():
            term = PolyOp.identity(target, exact=result.exact)
            for k in range(self._num_modes):
                if mu[k]:
                    term = term * power(k, True, mu[k])
            for k in range(self._num_modes):
                if nu[k]:
                    term = term * power(k, False, nu[k])
            result = result + term.scaled(c)
        return result

    def embed(self, num_modes: int, modes: Sequence[int]) -> PolyOp:
        """Places this operator on ``modes`` of a larger register."""
        if len(modes) != self._num_modes:
            raise ModeMismatchError(f"Need {self._num_modes} target modes, got {len(modes)}.")
        for k in modes:
            _check_mode(k, num_modes)
        terms: Dict[Monomial, Coefficient] = {}
        for (mu, nu), c in self._terms.items():
            big_mu, big_nu = [0] * num_modes, [0] * num_modes
            for src, dst in enumerate(modes):
                big_mu[dst], big_nu[dst] = mu[src], nu[src]
            terms[(tuple(big_mu), tuple(big_nu))] = c
        return PolyOp(num_modes, terms, exact=self._exact)

    # -------------------------------------------------------------------------------------------- #
    def to_records(self) -> List[Dict[str, Any]]:
        """Serializes as ``[{mu, nu, re, im}, ...]`` in sorted term order.

        Exact coefficients are written as ``"p/q"`` strings so they survive the round trip.
        """
        records = []
        for (mu, nu), c in self.items():
            if isinstance(c, GaussianRational):
                re_part: Any = str(c.re)
                im_part: Any = str(c.im)
            else:
                re_part, im_part = c.real, c.imag
            records.append({"mu": list(mu), "nu": list(nu), "re": re_part, "im": im_part})
        return records

    @classmethod
    def from_records(cls, num_modes: int, records: Iterable[Mapping[str, Any]]) -> PolyOp:
        terms: Dict[Monomial, Any] = {}
        exact = False
        for record in records:
            re_part, im_part = record.get("re", 0), record.get("im", 0)
            if isinstance(re_part, str) or isinstance(im_part, str):
                exact = True
                value: Any = GaussianRational(Fraction(str(re_part)), Fraction(str(im_part)))
            else:
                value = complex(float(re_part), float(im_part))
            terms[(tuple(record["mu"]), tuple(record["nu"]))] = value
        if exact:
            terms = {k: GaussianRational.coerce(v) for k, v in terms.items()}
        return cls(num_modes, terms, exact=exact)

    def __repr__(self) -> str:
        return (
            f"PolyOp(num_modes={self._num_modes}, terms={len(self._terms)}, "
            f"degree={self.degree}, exact={self._exact})"
        )

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (mu, nu), c in self.items():
            factors = [f"ad{k}^{p}" if p > 1 else f"ad{k}" for k, p in enumerate(mu) if p]
            factors += [f"a{k}^{p}" if p > 1 else f"a{k}" for k, p in enumerate(nu) if p]
            parts.append(f"({c})" + ("*" + "*".join(factors) if factors else ""))
        return " + ".join(parts)


def _check_mode(mode: int, num_modes: int) -> None:
    if not 0 <= mode < num_modes:
        raise ModeMismatchError(f"Mode {mode} is outside a {num_modes}-mode register.")


# ------------------------------------------------------------------------------------------------ #
#                                         PARSER                                                   #
# ------------------------------------------------------------------------------------------------ #
_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<symbol>ad|a|x|p|n)(?P<index>\d*)"
    r"|(?P<unit>[Ii])(?![A-Za-z0-9])"
    r"|(?P<op>[-+*/^()])"
    r")"
)


def _tokenize(text: str) -> List[Tuple[str, str]]:
    tokens: List[Tuple[str, str]] = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            raise CircuitParseError(f"Unexpected character {text[pos:pos + 1]!r} at {pos}.")
        if match.group("number") is not None:
            tokens.append(("number", match.group("number")))
        elif match.group("symbol") is not None:
            tokens.append(("symbol", match.group("symbol") + (match.group("index") or "0")))
        elif match.group("unit") is not None:
            tokens.append(("unit", match.group("unit")))
        else:
            tokens.append(("op", match.group("op")))
        pos = match.end()
    return tokens


class _Parser:
    """Recursive descent over ``expr := term (+|- term)*``, ``term := unary ((*|/)? unary)*``,
    ``unary := (+|-) unary | power``, ``power := atom (^ int)?``."""

    def __init__(self, tokens: List[Tuple[str, str]], num_modes: int, exact: bool) -> None:
        self._tokens = tokens
        self._pos = 0
        self._num_modes = num_modes
        self._exact = exact

    def _peek(self) -> Optional[Tuple[str, str]]:
        return self._tokens[self._pos] if self._pos < len(self._tokens) else None

    def _take(self) -> Tuple[str, str]:
        token = self._peek()
        if token is None:
            raise CircuitParseError("Expression ended unexpectedly.")
        self._pos += 1
        return token

    def parse(self) -> PolyOp:
        result = self._expr()
        if self._peek() is not None:
            raise CircuitParseError(f"Unexpected token {self._peek()[1]!r}.")  # type: ignore[index]
        return result

    def _expr(self) -> PolyOp:
        result = self._term()
        while self._peek() in (("op", "+"), ("op", "-")):
            sign = self._take()[1]
            rhs = self._term()
            result = result + rhs if sign == "+" else result - rhs
        return result

    def _starts_factor(self) -> bool:
        token = self._peek()
        return token is not None and (token[0] != "op" or token[1] == "(")

    def _term(self) -> PolyOp:
        result = self._unary()
        while True:
            token = self._peek()
            if token in (("op", "*"), ("op", "/")):
                self._take()
                rhs = self._unary()
                result = result * rhs if token[1] == "*" else result / rhs  # type: ignore[index]
            elif self._starts_factor():
                result = result * self._unary()
            else:
                return result

    def _unary(self) -> PolyOp:
        if self._peek() in (("op", "+"), ("op", "-")):
            sign = self._take()[1]
            operand = self._unary()
            return operand if sign == "+" else -operand
        return self._power()

    def _power(self) -> PolyOp:
        base = self._atom()
        if self._peek() == ("op", "^"):
            self._take()
            kind, text = self._take()
            if kind != "number" or not text.isdigit():
                raise CircuitParseError(f"Exponent must be a nonnegative integer, got {text!r}.")
            return base ** int(text)
        return base

    def _atom(self) -> PolyOp:
        kind, text = self._take()
        one = PolyOp.identity(self._num_modes, exact=self._exact)
        if kind == "number":
            value: Any = Fraction(text) if self._exact else float(text)
            return one * value
        if kind == "unit":
            if text == "I":
                return one
            return one * (GaussianRational(Fraction(0), Fraction(1)) if self._exact else 1j)
        if kind == "symbol":
            return self._symbol(text)
        if text == "(":
            inner = self._expr()
            if self._take() != ("op", ")"):
                raise CircuitParseError("Missing closing parenthesis.")
            return inner
        raise CircuitParseError(f"Unexpected token {text!r}.")

    def _symbol(self, text: str) -> PolyOp:
        name, index = re.match(r"([a-z]+)(\d+)", text).groups()  # type: ignore[union-attr]
        mode = int(index)
        if mode >= self._num_modes:
            raise CircuitParseError(f"{text} refers to mode {mode} of a {self._num_modes}-mode op.")
        if name in ("x", "p") and self._exact:
            raise DomainError("Quadratures carry 1/sqrt(2) and have no exact rational form.")
        if name == "a":
            return PolyOp.ladder(self._num_modes, mode, exact=self._exact)
        if name == "ad":
            return PolyOp.ladder(self._num_modes, mode, dagger=True, exact=self._exact)
        if name == "n":
            return PolyOp.number(self._num_modes, mode, exact=self._exact)
        if name == "x":
            return PolyOp.quad_x(self._num_modes, mode)
        return PolyOp.quad_p(self._num_modes, mode)


def _infer_modes(tokens: Sequence[Tuple[str, str]]) -> int:
    indices = [int(re.sub(r"^[a-z]+", "", t)) for kind, t in tokens if kind == "symbol"]
    return max(indices, default=0) + 1


def parse_expression(text: str, num_modes: Optional[int] = None, exact: bool = False) -> PolyOp:
    """Parses an operator expression into a normal-ordered PolyOp.

    Tokens are ``a<k>``, ``ad<k>``, ``x<k>``, ``p<k>``, ``n<k>`` (the index may be omitted for
    mode 0), ``I`` for the identity, ``i`` for the imaginary unit, decimal numbers and the
    operators ``+ - * / ^ ( )``. Juxtaposition multiplies, so ``2 ad0 a0`` is allowed.

    Args:
        text (str): The expression.
        num_modes (Optional[int]): Mode count. Inferred from the largest index when omitted.
        exact (bool): Keep rational coefficients.

    Returns:
        PolyOp: The operator in normal order.

    Raises:
        CircuitParseError: If the text is not a well-formed expression.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise CircuitParseError("Empty operator expression.")
    modes = num_modes if num_modes is not None else _infer_modes(tokens)
    return _Parser(tokens, modes, exact).parse()


def normal_order(
    expr: Union[str, PolyOp, Sequence[str]],
    num_modes: Optional[int] = None,
    exact: bool = False,
) -> PolyOp:
    """Brings an expression to normal order.

    Args:
        expr (Union[str, PolyOp, Sequence[str]]): An expression string, an existing PolyOp
            (returned as an equal operator), or a sequence of factor tokens read as their
            product, for example ``["a0", "ad0"]``.
        num_modes (Optional[int]): Mode count for string or token input.
        exact (bool): Keep rational coefficients.

    Returns:
        PolyOp: The normal-ordered operator.
    """
    if isinstance(expr, PolyOp):
        if num_modes is not None and num_modes != expr.num_modes:
            raise ModeMismatchError(f"Operator has {expr.num_modes} modes, not {num_modes}.")
        return PolyOp(expr.num_modes, expr.terms, exact=expr.exact)
    if isinstance(expr, str):
        return parse_expression(expr, num_modes=num_modes, exact=exact)
    return parse_expression(" * ".join(f"({token})" for token in expr), num_modes, exact)


def commutator(a: PolyOp, b: PolyOp) -> PolyOp:
    """Returns AB - BA in normal order.

    Raises:
        ModeMismatchError: If the operands act on different mode counts.
    """
    if a.num_modes != b.num_modes:
        raise ModeMismatchError(f"Operands act on {a.num_modes} and {b.num_modes} modes.")
    return a * b - b * a


# ------------------------------------------------------------------------------------------------ #
#                                  TRUNCATED REALIZATION                                           #
# ------------------------------------------------------------------------------------------------ #
def box_shape(cutoffs: Sequence[int]) -> Tuple[int, ...]:
    """Tensor shape of a flat Fock vector; axis m-1-k holds mode k."""
    return tuple(int(e) + 1 for e in reversed(cutoffs))


def box_dim(cutoffs: Sequence[int]) -> int:
    return int(np.prod([int(e) + 1 for e in cutoffs], dtype=np.int64))


def _check_cutoffs(cutoffs: Sequence[int], num_modes: int) -> Tuple[int, ...]:
    cutoffs = tuple(int(e) for e in cutoffs)
    if len(cutoffs) != num_modes:
        raise ModeMismatchError(f"{len(cutoffs)} cutoffs for a {num_modes}-mode operator.")
    if min(cutoffs) < 0:
        raise DomainError(f"Cutoffs must be nonnegative, got {cutoffs}.")
    return cutoffs


@lru_cache(maxsize=4096)
def ladder_monomial_matrix(mu: int, nu: int, cutoff: int) -> np.ndarray:
    """Single-mode matrix of a^dag^mu a^nu on photon numbers 0..cutoff.

    <m| a^dag^mu a^nu |n> = sqrt(n!/(n-nu)!) sqrt(m!/(n-nu)!) with m = n - nu + mu; targets above
    the cutoff are dropped, which is exactly Pi_E (a^dag^mu a^nu) Pi_E.
    """
    dim = cutoff + 1
    matrix = np.zeros((dim, dim), dtype=float)
    n = np.arange(nu, dim)
    m = n - nu + mu
    keep = m <= cutoff
    n, m = n[keep], m[keep]
    log_elem = 0.5 * (gammaln(n + 1) + gammaln(m + 1)) - gammaln(n - nu + 1)
    matrix[m, n] = np.exp(log_elem)
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True)
class TruncatedMatrix:
    """Dense Pi_E op Pi_E on the cutoff box, mode-0-fastest.

    Args:
        cutoffs (Tuple[int, ...]): Per-mode cutoffs.
        entries (np.ndarray): Square complex matrix of side prod(E_k + 1). Stored read-only.
    """

    cutoffs: Tuple[int, ...]
    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=complex)
        dim = box_dim(self.cutoffs)
        if entries.shape != (dim, dim):
            raise DomainError(
                f"Entries of shape {entries.shape} do not fit cutoffs {self.cutoffs}."
            )
        entries.setflags(write=False)
        object.__setattr__(self, "cutoffs", tuple(int(e) for e in self.cutoffs))
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def num_modes(self) -> int:
        return len(self.cutoffs)

    def is_hermitian(self, rtol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.entries), initial=0.0)))
        asymmetry = np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0)
        return bool(asymmetry <= rtol * scale)

    def restrict(self, cutoffs: Sequence[int]) -> TruncatedMatrix:
        """Top-left block on a smaller box."""
        cutoffs = _check_cutoffs(cutoffs, self.num_modes)
        if any(a > b for a, b in zip(cutoffs, self.cutoffs)):
            raise DomainError(f"Cannot restrict {self.cutoffs} to the larger box {cutoffs}.")
        shape = box_shape(self.cutoffs)
        block = self.entries.reshape(shape + shape)
        index = tuple(slice(0, s) for s in box_shape(cutoffs))
        sub = block[index + index]
        dim = box_dim(cutoffs)
        return TruncatedMatrix(cutoffs, sub.reshape(dim, dim))

    def __matmul__(self, vec: np.ndarray) -> np.ndarray:
        return self.entries @ vec


def to_matrix(
    op: PolyOp, cutoffs: Sequence[int], max_dim: int = DEFAULT_MAX_DIM
) -> TruncatedMatrix:
    """Realizes ``op`` as a dense matrix on the cutoff box.

    Args:
        op (PolyOp): The operator.
        cutoffs (Sequence[int]): Per-mode cutoffs.
        max_dim (int): Dense dimension cap.

    Returns:
        TruncatedMatrix: Pi_E op Pi_E.

    Raises:
        CapExceededError: If prod(E_k + 1) exceeds ``max_dim``.
    """
    cutoffs = _check_cutoffs(cutoffs, op.num_modes)
    dim = box_dim(cutoffs)
    if dim > max_dim:
        raise CapExceededError("dense dimension", dim, max_dim)
    entries = np.zeros((dim, dim), dtype=complex)
    for (mu, nu), c in op.items():
        factor = np.ones((1, 1))
        for k in reversed(range(op.num_modes)):
            factor = np.kron(factor, ladder_monomial_matrix(mu[k], nu[k], cutoffs[k]))
        entries += complex(c) * factor
    return TruncatedMatrix(cutoffs, entries)


def apply_to_vector(op: PolyOp, vec: np.ndarray, cutoffs: Sequence[int]) -> np.ndarray:
    """Applies Pi_E op Pi_E to a flat box vector without forming the matrix.

    Each term is contracted one mode at a time with ``tensordot``, so memory stays at a few
    copies of the vector.
    """
    cutoffs = _check_cutoffs(cutoffs, op.num_modes)
    m = op.num_modes
    psi = np.asarray(vec, dtype=complex).reshape(box_shape(cutoffs))
    out = np.zeros_like(psi)
    for (mu, nu), c in op.items():
        t = psi
        for k in range(m):
            if mu[k] == 0 and nu[k] == 0:
                continue
            axis = m - 1 - k
            factor = ladder_monomial_matrix(mu[k], nu[k], cutoffs[k])
            t = np.tensordot(factor, t, axes=([1], [axis]))
            t = np.moveaxis(t, 0, axis)
        out += complex(c) * t
    return out.reshape(-1)

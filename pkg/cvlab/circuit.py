#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : circuit.py                                                                          #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 07:10:44 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Circuit intermediate representation and its JSON file format.

A circuit is an ordered list of gates on ``num_modes`` modes followed by at most one
measurement. Every gate knows the three ways the backends consume it: as a symplectic gate for
the Gaussian simulator, as a Hamiltonian and time for the Fock simulator, and as Heisenberg
images of the annihilation operators for observable transport.

File format::

    {"format": "cvlab-circuit", "version": 1, "num_modes": 2,
     "gates": [{"gate": "squeeze", "mode": 0, "z": "1/2^2"}, ...],
     "measurement": {"type": "photon_number", "mode": 0, "accept": [0, 1]}}

Parameters are JSON numbers or dyadic strings ``"p/2^k"``. Dyadic strings are held as exact
fractions and written back unchanged.
"""
from __future__ import annotations

import json
import logging
import math
import re
from abc import ABC
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, ClassVar, Dict, List, Mapping, Optional, Tuple, Type, Union

import numpy as np

from cvlab import gausssim
from cvlab.algebra import PolyOp, parse_expression
from cvlab.constants import CIRCUIT_FORMAT, CIRCUIT_VERSION, DEFAULT_JSON_INDENT
from cvlab.errors import CircuitParseError, CVLabError, DomainError, ModeMismatchError
from cvlab.gausssim import SymplecticGate

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
Param = Union[float, Fraction]
_DYADIC = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*2\s*\^\s*(\d+))?\s*$")


# ------------------------------------------------------------------------------------------------ #
def parse_param(value: Any, location: str = "") -> Param:
    """Reads a gate parameter.

    Args:
        value (Any): A finite JSON number or a dyadic string ``"p/2^k"`` (or ``"p"``).
        location (str): Where the value sits in the file, for error messages.

    Raises:
        CircuitParseError: If the value is neither.
    """
    if isinstance(value, bool):
        raise CircuitParseError(f"Expected a number, got {value!r}.", location)
    if isinstance(value, (int, float)):
        if not math.isfinite(value):
            raise CircuitParseError(f"Parameter {value!r} is not finite.", location)
        return float(value)
    if isinstance(value, str):
        match = _DYADIC.match(value)
        if match is None:
            raise CircuitParseError(f"{value!r} is not a dyadic rational 'p/2^k'.", location)
        power = int(match.group(2) or 0)
        return Fraction(int(match.group(1)), 2**power)
    raise CircuitParseError(f"Expected a number, got {type(value).__name__}.", location)


def format_param(value: Param) -> Union[float, str]:
    """Inverse of :func:`parse_param`: fractions go back to ``"p/2^k"``."""
    if isinstance(value, Fraction):
        power = value.denominator.bit_length() - 1
        return f"{value.numerator}/2^{power}"
    return float(value)


def _mode_index(value: Any, location: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise CircuitParseError(
            f"Mode index must be a nonnegative integer, got {value!r}.", location
        )
    return value


def _quadratures(num_modes: int) -> Tuple[List[PolyOp], List[PolyOp]]:
    xs = [PolyOp.quad_x(num_modes, k) for k in range(num_modes)]
    ps = [PolyOp.quad_p(num_modes, k) for k in range(num_modes)]
    return xs, ps


def heisenberg_images(gate: SymplecticGate) -> List[PolyOp]:
    """U^dag a_k U for phase * D(d) * U_S, read off (X, P) -> S (X, P) + d."""
    n = gate.num_modes
    xs, ps = _quadratures(n)
    one = PolyOp.identity(n)
    quads = []
    for row in range(2 * n):
        image = one * float(gate.d[row])
        for j in range(n):
            if gate.S[row, j]:
                image = image + xs[j] * float(gate.S[row, j])
            if gate.S[row, n + j]:
                image = image + ps[j] * float(gate.S[row, n + j])
        quads.append(image)
    return [(quads[k] + quads[n + k] * 1j) * (1.0 / math.sqrt(2.0)) for k in range(n)]


# ------------------------------------------------------------------------------------------------ #
#                                          GATES                                                   #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class Gate(ABC):
    """Base class of every circuit element that acts on the state.

    Subclasses declare ``kind`` (the JSON tag) and ``MODE_FIELDS`` (fields holding mode
    indices). Every other field is a numeric parameter unless the subclass parses it itself.
    """

    kind: ClassVar[str] = ""
    MODE_FIELDS: ClassVar[Tuple[str, ...]] = ("mode",)
    gaussian: ClassVar[bool] = True
    unitary: ClassVar[bool] = True

    @property
    def modes(self) -> Tuple[int, ...]:
        return tuple(getattr(self, name) for name in self.MODE_FIELDS)

    @property
    def time(self) -> float:
        return 1.0

    def symplectic(self, num_modes: int) -> SymplecticGate:
        """The gate as phase * D(d) * U_S on a ``num_modes`` register."""
        raise DomainError(f"Gate '{self.kind}' is not Gaussian.")

    def hamiltonian(self, num_modes: int) -> Tuple[PolyOp, float]:
        """(H, t) with the gate equal to exp(-i t H)."""
        raise DomainError(f"Gate '{self.kind}' has no Hamiltonian form.")

    def heisenberg(self, num_modes: int) -> List[PolyOp]:
        """Images U^dag a_k U of every annihilation operator as polynomials."""
        return heisenberg_images(self.symplectic(num_modes))

    # -------------------------------------------------------------------------------------------- #
    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"gate": self.kind}
        for f in fields(self):
            value = getattr(self, f.name)
            data[f.name] = value if f.name in self.MODE_FIELDS else format_param(value)
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], location: str) -> Gate:
        kwargs: Dict[str, Any] = {}
        for f in fields(cls):
            if f.name not in data:
                raise CircuitParseError(f"Missing field '{f.name}'.", location)
            where = f"{location}.{f.name}"
            if f.name in cls.MODE_FIELDS:
                kwargs[f.name] = _mode_index(data[f.name], where)
            else:
                kwargs[f.name] = parse_param(data[f.name], where)
        return cls(**kwargs)


@dataclass(frozen=True)
class Squeeze(Gate):
    kind: ClassVar[str] = "squeeze"
    mode: int
    z: Param

    def symplectic(self, num_modes: int) -> SymplecticGate:
        return gausssim.squeeze(float(self.z), self.mode, num_modes)

    def hamiltonian(self, num_modes: int) -> Tuple[PolyOp, float]:
        a = PolyOp.ladder(num_modes, self.mode)
        ad = PolyOp.ladder(num_modes, self.mode, dagger=True)
        return (a * a - ad * ad) * (0.5j * float(self.z)), 1.0


@dataclass(frozen=True)
class Displace(Gate):
    kind: ClassVar[str] = "displace"
    mode: int
    re: Param
    im: Param = 0.0

    @property
    def beta(self) -> complex:
        return complex(float(self.re), float(self.im))

    def symplectic(self, num_modes: int) -> SymplecticGate:
        return gausssim.displace(self.beta, self.mode, num_modes)

    def hamiltonian(self, num_modes: int) -> Tuple[PolyOp, float]:
        a = PolyOp.ladder(num_modes, self.mode)
        ad = PolyOp.ladder(num_modes, self.mode, dagger=True)
        return (ad * self.beta - a * self.beta.conjugate()) * 1j, 1.0

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], location: str) -> Gate:
        return super().from_dict({"im": 0.0, **data}, location)


@dataclass(frozen=True)
class Rotate(Gate):
    kind: ClassVar[str] = "rotate"
    mode: int
    theta: Param

    def symplectic(self, num_modes: int) -> SymplecticGate:
        return gausssim.rotate(float(self.theta), self.mode, num_modes)

    def hamiltonian(self, num_modes: int) -> Tuple[PolyOp, float]:
        return PolyOp.number(num_modes, self.mode) * float(self.theta), 1.0


@dataclass(frozen=True)
class Fourier(Gate):
    kind: ClassVar[str] = "fourier"
    mode: int

    def symplectic(self, num_modes: int) -> SymplecticGate:
        return gausssim.fourier(self.mode, num_modes)

    def hamiltonian(self, num_modes: int) -> Tuple[PolyOp, float]:
        x = PolyOp.quad_x(num_modes, self.mode)
        p = PolyOp.quad_p(num_modes, self.mode)
        return (x * x + p * p) * (-0.25 * math.pi), 1.0


@dataclass(frozen=True)
class QuadraticPhase(Gate):
    kind: ClassVar[str] = "quadratic_phase"
    mode: int
    s: Param

    def symplectic(self, num_modes: int) -> SymplecticGate:
        return gausssim.quadratic_phase(float(self.s), self.mode, num_modes)

    def hamiltonian(self, num_modes: int) -> Tuple[PolyOp, float]:
        x = PolyOp.quad_x(num_modes, self.mode)
        return x * x * (-0.5 * float(self.s)), 1.0


@dataclass(frozen=True)
class Sum(Gate):
    """exp(-i s X_control P_target)."""

    kind: ClassVar[str] = "sum"
    MODE_FIELDS: ClassVar[Tuple[str, ...]] = ("control", "target")
    control: int
    target: int
    s: Param = 1.0

    def symplectic(self, num_modes: int) -> SymplecticGate:
        return gausssim.sum_gate(float(self.s), self.control, self.target, num_modes)

    def hamiltonian(self, num_modes: int) -> Tuple[PolyOp, float]:
        x = PolyOp.quad_x(num_modes, self.control)
        p = PolyOp.quad_p(num_modes, self.target)
        return x * p * float(self.s), 1.0

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], location: str) -> Gate:
        return super().from_dict({"s": 1.0, **data}, location)


@dataclass(frozen=True)
class Beamsplitter(Gate):
    kind: ClassVar[str] = "beamsplitter"
    MODE_FIELDS: ClassVar[Tuple[str, ...]] = ("i", "j")
    i: int
    j: int
    theta: Param

    def symplectic(self, num_modes: int) -> SymplecticGate:
        return gausssim.beamsplitter(float(self.theta), self.i, self.j, num_modes)

    def hamiltonian(self, num_modes: int) -> Tuple[PolyOp, float]:
        ai, aj = PolyOp.ladder(num_modes, self.i), PolyOp.ladder(num_modes, self.j)
        aid = PolyOp.ladder(num_modes, self.i, dagger=True)
        ajd = PolyOp.ladder(num_modes, self.j, dagger=True)
        return (aid * aj + ai * ajd) * (-float(self.theta)), 1.0


@dataclass(frozen=True)
class TwoModeSqueeze(Gate):
    kind: ClassVar[str] = "two_mode_squeeze"
    MODE_FIELDS: ClassVar[Tuple[str, ...]] = ("i", "j")
    i: int
    j: int
    r: Param

    def symplectic(self, num_modes: int) -> SymplecticGate:
        return gausssim.two_mode_squeeze(float(self.r), self.i, self.j, num_modes)

    def hamiltonian(self, num_modes: int) -> Tuple[PolyOp, float]:
        ai, aj = PolyOp.ladder(num_modes, self.i), PolyOp.ladder(num_modes, self.j)
        aid = PolyOp.ladder(num_modes, self.i, dagger=True)
        ajd = PolyOp.ladder(num_modes, self.j, dagger=True)
        return (ai * aj - aid * ajd) * (1j * float(self.r)), 1.0


@dataclass(frozen=True)
class RawGaussian(Gate):
    """An arbitrary D(d) U_S given by its matrix on the listed modes."""

    kind: ClassVar[str] = "gaussian"
    MODE_FIELDS: ClassVar[Tuple[str, ...]] = ()
    targets: Tuple[int, ...]
    S: Tuple[Tuple[float, ...], ...]
    d: Tuple[float, ...] = ()

    @property
    def modes(self) -> Tuple[int, ...]:
        return self.targets

    def symplectic(self, num_modes: int) -> SymplecticGate:
        d = np.asarray(self.d, dtype=float) if self.d else None
        return SymplecticGate(np.asarray(self.S, dtype=float), d).embed(num_modes, self.targets)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gate": self.kind,
            "modes": list(self.targets),
            "S": [[format_param(v) for v in row] for row in self.S],
            "d": [format_param(v) for v in self.d],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], location: str) -> Gate:
        try:
            targets = tuple(
                _mode_index(k, f"{location}.modes[{n}]") for n, k in enumerate(data["modes"])
            )
            rows = data["S"]
        except (KeyError, TypeError) as e:
            raise CircuitParseError(
                f"A raw Gaussian gate needs 'modes' and 'S' ({e}).", location
            ) from e
        size = 2 * len(targets)
        if len(rows) != size or any(len(row) != size for row in rows):
            raise CircuitParseError(f"S must be {size} x {size}.", f"{location}.S")
        S = tuple(
            tuple(parse_param(v, f"{location}.S[{i}][{j}]") for j, v in enumerate(row))
            for i, row in enumerate(rows)
        )
        d = tuple(parse_param(v, f"{location}.d[{i}]") for i, v in enumerate(data.get("d", [])))
        if d and len(d) != size:
            raise CircuitParseError(f"d must have length {size}.", f"{location}.d")
        gate = cls(targets, S, d)
        try:
            gate.symplectic(max(targets) + 1)
        except CVLabError as e:
            raise CircuitParseError(str(e), location) from e
        return gate


@dataclass(frozen=True)
class Cubic(Gate):
    """V(theta) = exp(i theta X^3 / 3)."""

    kind: ClassVar[str] = "cubic"
    gaussian: ClassVar[bool] = False
    mode: int
    theta: Param

    def hamiltonian(self, num_modes: int) -> Tuple[PolyOp, float]:
        x = PolyOp.quad_x(num_modes, self.mode)
        return x * x * x * (-float(self.theta) / 3.0), 1.0

    def heisenberg(self, num_modes: int) -> List[PolyOp]:
        # P -> P + theta X^2
        images = [PolyOp.ladder(num_modes, k) for k in range(num_modes)]
        x = PolyOp.quad_x(num_modes, self.mode)
        images[self.mode] = images[self.mode] + x * x * (1j * float(self.theta) / math.sqrt(2.0))
        return images


@dataclass(frozen=True)
class Kerr(Gate):
    """exp(i chi N^2 t)."""

    kind: ClassVar[str] = "kerr"
    gaussian: ClassVar[bool] = False
    mode: int
    chi: Param
    duration: Param = 1.0

    @property
    def time(self) -> float:
        return float(self.duration)

    def hamiltonian(self, num_modes: int) -> Tuple[PolyOp, float]:
        n = PolyOp.number(num_modes, self.mode)
        return n * n * (-float(self.chi)), self.time

    def heisenberg(self, num_modes: int) -> List[PolyOp]:
        raise DomainError("The Kerr gate has no polynomial Heisenberg images.")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gate": self.kind,
            "mode": self.mode,
            "chi": format_param(self.chi),
            "time": format_param(self.duration),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], location: str) -> Gate:
        if "chi" not in data or "mode" not in data:
            raise CircuitParseError("A Kerr gate needs 'mode' and 'chi'.", location)
        return cls(
            _mode_index(data["mode"], f"{location}.mode"),
            parse_param(data["chi"], f"{location}.chi"),
            parse_param(data.get("time", 1.0), f"{location}.time"),
        )


@dataclass(frozen=True)
class CustomPoly(Gate):
    """exp(-i t H) for a Hermitian polynomial H given as an expression string."""

    kind: ClassVar[str] = "custom"
    MODE_FIELDS: ClassVar[Tuple[str, ...]] = ()
    gaussian: ClassVar[bool] = False
    expression: str
    duration: Param = 1.0

    @property
    def time(self) -> float:
        return float(self.duration)

    @property
    def modes(self) -> Tuple[int, ...]:
        H = parse_expression(self.expression)
        used = set()
        for mu, nu in H.terms:
            used.update(k for k in range(H.num_modes) if mu[k] or nu[k])
        return tuple(sorted(used))

    def hamiltonian(self, num_modes: int) -> Tuple[PolyOp, float]:
        return parse_expression(self.expression, num_modes), self.time

    def heisenberg(self, num_modes: int) -> List[PolyOp]:
        raise DomainError("A custom generator has no polynomial Heisenberg images in general.")

    def to_dict(self) -> Dict[str, Any]:
        return {"gate": self.kind, "H": self.expression, "time": format_param(self.duration)}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], location: str) -> Gate:
        expression = data.get("H")
        if not isinstance(expression, str):
            raise CircuitParseError("A custom gate needs an expression string 'H'.", location)
        H = parse_expression(expression)
        if not H.is_hermitian():
            raise CircuitParseError(f"Generator {expression!r} is not Hermitian.", f"{location}.H")
        return cls(expression, parse_param(data.get("time", 1.0), f"{location}.time"))


@dataclass(frozen=True)
class HomodynePostselect(Gate):
    """Projects ``mode`` onto the position ket |q> and drops it from the register."""

    kind: ClassVar[str] = "homodyne"
    unitary: ClassVar[bool] = False
    mode: int
    q: Param = 0.0

    @property
    def time(self) -> float:
        return 0.0

    def heisenberg(self, num_modes: int) -> List[PolyOp]:
        raise DomainError("Post-selection cannot be moved through an observable.")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], location: str) -> Gate:
        return super().from_dict({"q": 0.0, **data}, location)


GATES: Dict[str, Type[Gate]] = {
    cls.kind: cls
    for cls in (
        Squeeze,
        Displace,
        Rotate,
        Fourier,
        QuadraticPhase,
        Sum,
        Beamsplitter,
        TwoModeSqueeze,
        RawGaussian,
        Cubic,
        Kerr,
        CustomPoly,
        HomodynePostselect,
    )
}


# ------------------------------------------------------------------------------------------------ #
#                                      MEASUREMENTS                                                #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class PhotonNumber:
    """Accepts when the photon count of ``mode`` lies in ``accept``."""

    mode: int
    accept: Tuple[int, ...]

    kind: ClassVar[str] = "photon_number"

    def to_dict(self) -> Dict[str, Any]:
        return {"type": self.kind, "mode": self.mode, "accept": list(self.accept)}


@dataclass(frozen=True)
class Observable:
    expression: str

    kind: ClassVar[str] = "observable"

    def operator(self, num_modes: int) -> PolyOp:
        return parse_expression(self.expression, num_modes)

    def to_dict(self) -> Dict[str, Any]:
        return {"type": self.kind, "O": self.expression}


Measurement = Union[PhotonNumber, Observable]


def _parse_measurement(data: Any, location: str = "measurement") -> Optional[Measurement]:
    if data is None:
        return None
    if not isinstance(data, Mapping):
        raise CircuitParseError("Measurement must be an object.", location)
    kind = data.get("type")
    if kind == PhotonNumber.kind:
        accept = data.get("accept")
        if isinstance(accept, Mapping):
            low = _mode_index(accept.get("min"), f"{location}.accept.min")
            high = _mode_index(accept.get("max"), f"{location}.accept.max")
            accept = list(range(low, high + 1))
        if not isinstance(accept, list) or not accept:
            raise CircuitParseError("'accept' must be a nonempty list or {min, max}.", location)
        counts = tuple(
            sorted({_mode_index(n, f"{location}.accept[{i}]") for i, n in enumerate(accept)})
        )
        return PhotonNumber(_mode_index(data.get("mode", 0), f"{location}.mode"), counts)
    if kind == Observable.kind:
        expression = data.get("O")
        if not isinstance(expression, str):
            raise CircuitParseError("An observable needs an expression string 'O'.", location)
        parse_expression(expression)
        return Observable(expression)
    raise CircuitParseError(f"Unknown measurement type {kind!r}.", f"{location}.type")


# ------------------------------------------------------------------------------------------------ #
#                                        CIRCUIT                                                   #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class CircuitIR:
    """An ordered gate sequence on ``num_modes`` modes with an optional final measurement.

    Args:
        num_modes (int): Register size, at least 1.
        gates (Tuple[Gate, ...]): Gates in time order.
        measurement (Optional[Measurement]): Final photon-number or observable measurement.

    Raises:
        ModeMismatchError: If a gate or the measurement addresses a mode outside the register.
    """

    num_modes: int
    gates: Tuple[Gate, ...] = ()
    measurement: Optional[Measurement] = None

    def __post_init__(self) -> None:
        if self.num_modes < 1:
            raise ModeMismatchError(f"A circuit needs at least one mode, got {self.num_modes}.")
        object.__setattr__(self, "gates", tuple(self.gates))
        for index, gate in enumerate(self.gates):
            bad = [k for k in gate.modes if k >= self.num_modes]
            if bad:
                raise ModeMismatchError(
                    f"gates[{index}] ({gate.kind}) addresses mode {bad[0]} of {self.num_modes}."
                )
            if len(set(gate.modes)) != len(gate.modes):
                raise ModeMismatchError(f"gates[{index}] ({gate.kind}) repeats a mode.")
        if isinstance(self.measurement, PhotonNumber) and self.measurement.mode >= self.num_modes:
            raise ModeMismatchError(f"Measured mode {self.measurement.mode} is out of range.")

    # -------------------------------------------------------------------------------------------- #
    @property
    def cubic_gates(self) -> List[Cubic]:
        return [g for g in self.gates if isinstance(g, Cubic)]

    @property
    def is_gaussian(self) -> bool:
        return all(g.gaussian and g.unitary for g in self.gates)

    @property
    def has_postselection(self) -> bool:
        return any(not g.unitary for g in self.gates)

    @property
    def runtime(self) -> float:
        """Total evolution time, one unit per fixed gate."""
        return float(sum(g.time for g in self.gates))

    def gaussian_part(self) -> SymplecticGate:
        """The product of all gates, phase included, for a purely Gaussian circuit.

        Raises:
            DomainError: If a gate is not a Gaussian unitary.
        """
        total = gausssim.identity_gate(self.num_modes)
        for gate in self.gates:
            if not (gate.gaussian and gate.unitary):
                raise DomainError(f"Gate '{gate.kind}' is not a Gaussian unitary.")
            total = gate.symplectic(self.num_modes).compose(total)
        return total

    # -------------------------------------------------------------------------------------------- #
    def to_dict(self) -> Dict[str, Any]:
        return {
            "format": CIRCUIT_FORMAT,
            "version": CIRCUIT_VERSION,
            "num_modes": self.num_modes,
            "gates": [g.to_dict() for g in self.gates],
            "measurement": self.measurement.to_dict() if self.measurement else None,
        }

    @classmethod
    def from_dict(cls, data: Any) -> CircuitIR:
        """Validates and reads a circuit document.

        Raises:
            CircuitParseError: On any structural or value problem, with its location.
        """
        if not isinstance(data, Mapping):
            raise CircuitParseError("A circuit document must be a JSON object.")
        if data.get("format") != CIRCUIT_FORMAT:
            raise CircuitParseError(f"Expected format '{CIRCUIT_FORMAT}'.", "format")
        if data.get("version") != CIRCUIT_VERSION:
            raise CircuitParseError(f"Unsupported version {data.get('version')!r}.", "version")
        num_modes = data.get("num_modes")
        if isinstance(num_modes, bool) or not isinstance(num_modes, int) or num_modes < 1:
            raise CircuitParseError("num_modes must be a positive integer.", "num_modes")
        raw_gates = data.get("gates", [])
        if not isinstance(raw_gates, list):
            raise CircuitParseError("gates must be a list.", "gates")
        gates = []
        for index, raw in enumerate(raw_gates):
            location = f"gates[{index}]"
            if not isinstance(raw, Mapping) or raw.get("gate") not in GATES:
                kind = raw.get("gate") if isinstance(raw, Mapping) else raw
                raise CircuitParseError(f"Unknown gate {kind!r}.", location)
            gates.append(GATES[raw["gate"]].from_dict(raw, location))
        measurement = _parse_measurement(data.get("measurement"))
        try:
            return cls(num_modes, tuple(gates), measurement)
        except ModeMismatchError as e:
            raise CircuitParseError(str(e), "gates") from e

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=DEFAULT_JSON_INDENT, ensure_ascii=False)

    @classmethod
    def loads(cls, text: str) -> CircuitIR:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise CircuitParseError(e.msg, f"line {e.lineno} column {e.colno}") from e
        return cls.from_dict(data)

    def dump(self, filepath: Union[str, Path]) -> Path:
        path = Path(filepath)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.dumps(), encoding="utf-8")
        logger.debug(f"Wrote circuit with {len(self.gates)} gates to {path}.")
        return path

    @classmethod
    def load(cls, filepath: Union[str, Path]) -> CircuitIR:
        path = Path(filepath)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise CircuitParseError(f"Cannot read circuit file ({e.strerror}).", str(path)) from e
        circuit = cls.loads(text)
        logger.info(
            f"Loaded circuit {path.name}: {circuit.num_modes} modes, {len(circuit.gates)} gates."
        )
        return circuit

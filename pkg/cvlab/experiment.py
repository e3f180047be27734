#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : experiment.py                                                                       #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 09:36:18 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Parameter sweeps over the package's analyses.

An :class:`Experiment` owns a grid of parameter points and one ``evaluate`` method that turns a
point into a row of measured quantities. :meth:`Experiment.run` walks the grid in grid order,
optionally on a thread pool, records a failed point in its ``status`` column instead of
stopping, and returns the rows as a DataFrame. Rows carry no timing, so a sweep with a fixed
seed produces the same table on every run.
"""
from __future__ import annotations

import itertools
import logging
import math
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime
from typing import Any, ClassVar, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Type

import numpy as np
import pandas as pd
from tqdm.auto import tqdm

from cvlab import focksim
from cvlab.adiabatic import manders_adleman, solve_instance
from cvlab.circuit import Beamsplitter
from cvlab.config import RunConfig
from cvlab.constants import (
    DEFAULT_ADIABATIC_STEPS,
    DEFAULT_ADIABATIC_TAU,
    DEFAULT_GROWTH_MAX_CUTOFF,
    DEFAULT_OUTPUT_TIME,
)
from cvlab.energetics import exact_tail, measure_cubic_growth, measure_dissipative_growth
from cvlab.energetics import tail_bounds
from cvlab.errors import ConfigError, CVLabError
from cvlab.gadget import teleport_cubic, xi_threshold
from cvlab.grank import cubic_state_wavefunction, decompose_cubic, rank_envelope
from cvlab.pathsum import beamsplit_experiment, beamsplit_overlap, beamsplit_sample_size
from cvlab.persist import FileManager
from cvlab.print import Printer

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
STATUS_OK = "ok"
_TAIL_SLACK = 1e-12
_CHUNK = 4096


# ------------------------------------------------------------------------------------------------ #
#                                           GRID                                                   #
# ------------------------------------------------------------------------------------------------ #
def coerce(raw: str) -> Any:
    """Reads an option value as int, then float, falling back to the stripped string."""
    raw = raw.strip()
    for kind in (int, float):
        try:
            return kind(raw)
        except ValueError:
            continue
    return raw


def parse_grid(items: Iterable[str]) -> Dict[str, List[Any]]:
    """Parses ``key=v1,v2,...`` options into a grid, keeping the order the keys were given.

    Raises:
        ConfigError: If an item has no ``=``, names a key twice, or lists no values.
    """
    grid: Dict[str, List[Any]] = {}
    for item in items:
        key, sep, values = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"Grid items look like key=v1,v2; got {item!r}.")
        if key in grid:
            raise ConfigError(f"Grid key {key!r} given twice.")
        parsed = [coerce(v) for v in values.split(",") if v.strip()]
        if not parsed:
            raise ConfigError(f"Grid key {key!r} has no values.")
        grid[key] = parsed
    return grid


def expand_grid(grid: Mapping[str, Sequence[Any]]) -> List[Dict[str, Any]]:
    """Cartesian product of the grid; the last key varies fastest.

    Raises:
        ConfigError: If the grid or any of its value lists is empty.
    """
    if not grid:
        raise ConfigError("The sweep grid is empty.")
    empty = [key for key, values in grid.items() if len(values) == 0]
    if empty:
        raise ConfigError(f"Grid keys {empty} have no values.")
    keys = list(grid)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


# ------------------------------------------------------------------------------------------------ #
#                                        EXPERIMENT                                                #
# ------------------------------------------------------------------------------------------------ #
class Experiment(ABC):
    """A sweep of one analysis over a parameter grid.

    Subclasses name themselves, declare the parameters they accept with their defaults, and
    implement :meth:`evaluate`. Grid keys must be declared parameters; undeclared parameters
    take their defaults at every point.

    Args:
        grid (Mapping[str, Sequence[Any]]): Values to sweep, one list per parameter.
        config (Optional[RunConfig]): Seed, caps and thread count. Defaults to ``RunConfig()``.
        printer (Optional[Printer]): Console output for the start and end summaries.
        filemanager (Optional[FileManager]): Where the table is written; None keeps it in
            memory only.
        span (str): Run label used in the file name.

    Raises:
        ConfigError: If the grid is empty or names an unknown parameter.
    """

    name: ClassVar[str] = ""
    defaults: ClassVar[Dict[str, Any]] = {}

    def __init__(
        self,
        grid: Mapping[str, Sequence[Any]],
        config: Optional[RunConfig] = None,
        printer: Optional[Printer] = None,
        filemanager: Optional[FileManager] = None,
        span: str = "",
    ) -> None:
        unknown = [key for key in grid if key not in self.defaults]
        if unknown:
            raise ConfigError(
                f"{self.name} does not take {unknown}; parameters are {list(self.defaults)}."
            )
        self._grid = {key: list(values) for key, values in grid.items()}
        self._points = [{**self.defaults, **point} for point in expand_grid(self._grid)]
        self._config = config or RunConfig()
        self._printer = printer or Printer(verbose=False)
        self._filemanager = filemanager
        self._span = span

        self._n_points = 0
        self._n_failed = 0
        self._start_dt: Optional[datetime] = None
        self._table: Optional[pd.DataFrame] = None

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(points={len(self._points)}, grid={self._grid})"

    # -------------------------------------------------------------------------------------------- #
    @property
    def points(self) -> List[Dict[str, Any]]:
        return [dict(point) for point in self._points]

    @property
    def n_points(self) -> int:
        """Points evaluated so far, failed ones included."""
        return self._n_points

    @property
    def n_failed(self) -> int:
        return self._n_failed

    @property
    def _growth_cap(self) -> int:
        """Cutoff cap for the energy-growth runs, never below the growth default."""
        return max(self._config.max_cutoff, DEFAULT_GROWTH_MAX_CUTOFF)

    @property
    def table(self) -> Optional[pd.DataFrame]:
        """The last table produced by :meth:`run`."""
        return self._table

    @property
    def description(self) -> Dict[str, Any]:
        return {
            "Experiment": self.name,
            "Grid": {key: ", ".join(map(str, values)) for key, values in self._grid.items()},
            "Points": len(self._points),
            "Seed": self._config.seed,
            "Threads": self._config.threads,
        }

    # -------------------------------------------------------------------------------------------- #
    @abstractmethod
    def evaluate(self, point: Dict[str, Any], rng: np.random.Generator) -> Dict[str, Any]:
        """Returns the measured quantities at one grid point."""

    # -------------------------------------------------------------------------------------------- #
    def run(self) -> pd.DataFrame:
        """Evaluates every point and returns one row per point in grid order.

        Each point gets its own generator seeded from ``(seed, index)``, so a row never depends
        on which thread evaluated it or in what order.
        """
        self._startup()
        self._n_points = 0
        self._n_failed = 0
        indexed = list(enumerate(self._points))
        with tqdm(total=len(indexed), desc=self.name, unit="point") as bar:
            if self._config.threads > 1:
                with ThreadPoolExecutor(max_workers=self._config.threads) as pool:
                    rows = []
                    for row in pool.map(self._evaluate_point, indexed):
                        rows.append(row)
                        bar.update(1)
            else:
                rows = []
                for item in indexed:
                    rows.append(self._evaluate_point(item))
                    bar.update(1)
        self._n_points = len(rows)
        self._n_failed = sum(row["status"] != STATUS_OK for row in rows)
        self._table = self._tabulate(rows)
        if self._filemanager is not None:
            self._filemanager.write_sweep(self._table, experiment=self.name, span=self._span)
        self._wrap_up()
        return self._table

    def _evaluate_point(self, item: Tuple[int, Dict[str, Any]]) -> Dict[str, Any]:
        index, point = item
        rng = np.random.default_rng(np.random.SeedSequence([self._config.seed, index]))
        row: Dict[str, Any] = {"index": index, **point}
        try:
            row.update(self.evaluate(dict(point), rng))
            row.update(status=STATUS_OK, error="")
        except CVLabError as e:
            logger.warning(f"{self.name} point {index} {point} failed: {e}")
            row.update(status=e.__class__.__name__, error=str(e))
        except (ArithmeticError, ValueError) as e:
            logger.exception(f"{self.name} point {index} {point} failed unexpectedly.")
            row.update(status=e.__class__.__name__, error=str(e))
        return row

    @staticmethod
    def _tabulate(rows: List[Dict[str, Any]]) -> pd.DataFrame:
        df = pd.DataFrame(rows)
        trailing = ["status", "error"]
        return df[[c for c in df.columns if c not in trailing] + trailing]

    # -------------------------------------------------------------------------------------------- #
    def _startup(self) -> None:
        self._printer.print_rule("=")
        self._start_dt = datetime.now()
        logger.info(f"Starting {self.name} sweep over {len(self._points)} point(s).")
        title = (
            f"{self.__class__.__name__} Started on "
            f"{self._start_dt.strftime('%Y-%m-%d at %H:%M:%S')}"
        )
        self._printer.print_dict(title=title, data=self.description)
        self._printer.print_rule("-")

    def _wrap_up(self) -> None:
        """Prints the sweep summary.

        Raises:
            RuntimeError: If called before :meth:`_startup` recorded a start time.
        """
        end_dt = datetime.now()
        if not isinstance(self._start_dt, datetime):
            raise RuntimeError("Start time not set.")
        duration = end_dt - self._start_dt
        seconds = duration.total_seconds() or 1e-9
        summary = {
            "Duration": str(duration).split(".")[0],
            "Points": self._n_points,
            "Failed": self._n_failed,
            "Points per Minute": round(self._n_points / seconds * 60, 2),
        }
        if self._table is not None:
            self._printer.print_dataframe(self._table, title=self.name)
        self._printer.print_rule("-")
        title = f"{self.__class__.__name__} Completed on {end_dt.strftime('%Y-%m-%d at %H:%M:%S')}"
        self._printer.print_dict(title=title, data=summary)
        self._printer.print_rule("=")
        logger.info(
            f"{self.name} sweep finished: {self._n_points} point(s), {self._n_failed} failed."
        )


# ------------------------------------------------------------------------------------------------ #
#                                       EXPERIMENTS                                                #
# ------------------------------------------------------------------------------------------------ #
class CubicGrowth(Experiment):
    """Cutoff-converged energy of (F V(theta))^t |0> between its analytic bounds."""

    name = "cubic_growth"
    defaults = {"theta": 1.0, "t": 1}

    def evaluate(self, point: Dict[str, Any], rng: np.random.Generator) -> Dict[str, Any]:
        report = measure_cubic_growth(
            float(point["theta"]), int(point["t"]), max_cutoff=self._growth_cap
        )
        return {**report.as_record(), "sandwiched": report.sandwiched}


class Dissipation(Experiment):
    """Energy after rounds of cubic evolution interleaved with photon loss."""

    name = "dissipation"
    defaults = {"theta": 1.0, "t": 3, "gamma": 1.0, "duration": 1.0}

    def evaluate(self, point: Dict[str, Any], rng: np.random.Generator) -> Dict[str, Any]:
        report = measure_dissipative_growth(
            float(point["theta"]),
            int(point["t"]),
            float(point["gamma"]),
            duration=float(point["duration"]),
            max_cutoff=self._growth_cap,
        )
        record = report.as_record()
        record["first_energy"] = report.trace[0]
        record["growth"] = report.measured_energy / max(report.trace[0], 1e-300)
        return record


class GrankFidelity(Experiment):
    """Distance between a cubic-state Gaussian sum and the exact wavefunction it replaces.

    The distance is a Riemann sum on a grid fine enough to resolve the cubic phase out to six
    widths of the envelope, evaluated in chunks so large sums stay within memory.
    """

    name = "grank_fidelity"
    defaults = {"theta": 1.0, "xi": 1.0, "delta": 0.1}

    def evaluate(self, point: Dict[str, Any], rng: np.random.Generator) -> Dict[str, Any]:
        theta, xi, delta = float(point["theta"]), float(point["xi"]), float(point["delta"])
        gsum = decompose_cubic(theta, xi, delta)
        target = cubic_state_wavefunction(theta, xi)
        extent = 6.0 * xi
        points = 4001 + int(20.0 * abs(theta) * extent**3)
        x = np.linspace(-extent, extent, points)
        dx = x[1] - x[0]
        squared = 0.0
        for chunk in np.array_split(x, max(1, points // _CHUNK)):
            squared += float(np.sum(np.abs(gsum.wavefunction(chunk) - target(chunk)) ** 2))
        distance = math.sqrt(squared * dx)
        envelope = rank_envelope(xi, delta)
        return {
            "rank": gsum.rank,
            "declared_error": gsum.declared_error,
            "distance": distance,
            "within": distance <= 3.0 * gsum.declared_error,
            "envelope": envelope,
            "rank_ratio": gsum.rank / envelope,
        }


class TeleportThreshold(Experiment):
    """Gadget output on the vacuum against V(theta)|0>, next to the sufficient squeezing."""

    name = "teleport_threshold"
    defaults = {
        "theta": 0.2,
        "xi": 2.0,
        "eps": 1e-2,
        "delta": 1e-2,
        "cutoff": 30,
        "q": 0.0,
    }

    def evaluate(self, point: Dict[str, Any], rng: np.random.Generator) -> Dict[str, Any]:
        theta, xi = float(point["theta"]), float(point["xi"])
        eps, delta = float(point["eps"]), float(point["delta"])
        cutoff = int(point["cutoff"])
        q = point["q"] if isinstance(point["q"], str) else float(point["q"])
        out, report = teleport_cubic(
            focksim.vacuum([cutoff]), theta, xi, q_policy=q, cutoffs=(cutoff,), rng=rng
        )
        target = focksim.from_wavefunction(cubic_state_wavefunction(theta, 1.0), (cutoff,))
        fid = min(1.0, focksim.fidelity(out, target))
        error = math.sqrt(max(0.0, 2.0 * (1.0 - math.sqrt(fid))))
        # energy bound 1 covers the vacuum input
        threshold = xi_threshold(1.0, eps, delta)
        return {
            "q_used": report.q,
            "Z": report.Z,
            "flagged": report.flagged,
            "eps_bound": report.eps_bound,
            "error": error,
            "within": error <= 2.0 * eps,
            "xi_threshold": threshold,
            "sufficient": xi >= threshold,
        }


class Beamsplit(Experiment):
    """The beam-splitter overlap by closed form and by Fock evolution, with the probe size."""

    name = "beamsplit"
    defaults = {"n": 4, "eps": 0.3, "delta": 0.05}

    def evaluate(self, point: Dict[str, Any], rng: np.random.Generator) -> Dict[str, Any]:
        n, eps, delta = int(point["n"]), float(point["eps"]), float(point["delta"])
        analytic = beamsplit_overlap(n, eps)
        probe = focksim.fock([n, 0], [n, n])
        H, t = Beamsplitter(0, 1, eps).hamiltonian(2)
        evolved = focksim.evolve_truncated(probe, H, t)
        routed = focksim.inner(probe, evolved)
        sample_size = beamsplit_sample_size(eps, delta)
        _, accept = beamsplit_experiment(sample_size, eps)
        return {
            "analytic": analytic,
            "fock": routed.real,
            "deviation": abs(routed - analytic),
            "sample_size": sample_size,
            "distinguish": 1.0 - accept,
            "achieves": 1.0 - accept >= 1.0 - delta,
        }


class AdiabaticDemo(Experiment):
    """End-to-end answers for Manders-Adleman instances alpha x1^2 + beta x2 - gamma."""

    name = "adiabatic_demo"
    defaults = {
        "alpha": 1,
        "beta": 1,
        "gamma": 2,
        "tau": DEFAULT_ADIABATIC_TAU,
        "steps": DEFAULT_ADIABATIC_STEPS,
        "t_out": DEFAULT_OUTPUT_TIME,
    }

    def evaluate(self, point: Dict[str, Any], rng: np.random.Generator) -> Dict[str, Any]:
        instance = manders_adleman(int(point["alpha"]), int(point["beta"]), int(point["gamma"]))
        record = solve_instance(
            instance,
            tau=float(point["tau"]),
            steps=int(point["steps"]),
            t_out=float(point["t_out"]),
        )
        record.pop("gap_trace")
        for key in ("tau", "steps", "t_out"):
            record.pop(key)
        record["bounds"] = "x".join(map(str, record["bounds"]))
        record["correct"] = record["answer"] == record["expected"]
        return record


class Tails(Experiment):
    """Closed-form photon-number tail bounds next to the exact probabilities they bound."""

    name = "tails"
    defaults = {"kind": "smsv_upper", "nbar": 4.0, "k": 2, "m": 1, "r": 1.0}

    def evaluate(self, point: Dict[str, Any], rng: np.random.Generator) -> Dict[str, Any]:
        kind = str(point["kind"])
        params = {key: float(point[key]) for key in ("nbar", "k", "m", "r")}
        bound = tail_bounds(kind, params)
        exact = exact_tail(kind, params)
        return {"bound": bound, "exact": exact, "holds": exact <= bound + _TAIL_SLACK}


# ------------------------------------------------------------------------------------------------ #
EXPERIMENTS: Dict[str, Type[Experiment]] = {
    cls.name: cls
    for cls in (
        CubicGrowth,
        Dissipation,
        GrankFidelity,
        TeleportThreshold,
        Beamsplit,
        AdiabaticDemo,
        Tails,
    )
}


def get_experiment(name: str) -> Type[Experiment]:
    """Looks up an experiment class by its sweep name.

    Raises:
        ConfigError: If no experiment has that name.
    """
    try:
        return EXPERIMENTS[name]
    except KeyError as e:
        raise ConfigError(f"Unknown experiment {name!r}; choose from {list(EXPERIMENTS)}.") from e

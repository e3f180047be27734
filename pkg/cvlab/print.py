#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : print.py                                                                            #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 09:24:03 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Console rendering of run descriptions, result records and sweep tables."""
from __future__ import annotations

import math
from typing import Any, Dict, Iterator, Mapping, Optional, Tuple

import numpy as np
import pandas as pd


# ------------------------------------------------------------------------------------------------ #
def format_value(value: Any) -> str:
    """Short human form of a scalar: integers with separators, floats to six significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return f"{int(value):,}"
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value) or math.isinf(value):
            return str(value)
        return f"{value:.6g}"
    if isinstance(value, complex):
        return f"{value.real:.6g}{value.imag:+.6g}j"
    return str(value)


def flatten(record: Mapping[str, Any], prefix: str = "") -> Iterator[Tuple[str, Any]]:
    """Yields dotted keys for nested mappings; lists longer than four items are summarized."""
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            yield from flatten(value, f"{name}.")
        elif isinstance(value, (list, tuple)) and len(value) > 4:
            yield name, f"[{len(value)} items]"
        else:
            yield name, value


# ------------------------------------------------------------------------------------------------ #
#                                         PRINTER                                                  #
# ------------------------------------------------------------------------------------------------ #
class Printer:
    """Formatted stdout output for titles, key/value tables, records and sweep tables.

    Every method is gated on ``verbose``: a quiet printer writes nothing, so batch sweeps stay
    silent without conditionals at the call sites. Logging is independent of it.

    Args:
        width (int): Width of the output in characters. Defaults to 80.
        verbose (bool): Whether to write to stdout at all. Defaults to True.
    """

    def __init__(self, width: int = 80, verbose: bool = True) -> None:
        self._width = width
        self._verbose = verbose

    @property
    def verbose(self) -> bool:
        return self._verbose

    def print_rule(self, char: str = "=") -> None:
        if not self._verbose:
            return
        print(char * self._width)

    def print_title(self, title: str) -> None:
        if not self._verbose:
            return
        breadth = self._width - 2
        header = f"\n# {breadth * '='} #\n"
        header += f"#{title.center(self._width, ' ')}#\n"
        header += f"# {breadth * '='} #"
        print(header)

    def print_subtitle(self, subtitle: str, linestyle: str = "-") -> None:
        if not self._verbose:
            return
        s = f"\n{subtitle.center(self._width, ' ')}"
        s += f"\n{(linestyle * len(subtitle)).center(self._width, ' ')}"
        print(s)

    def print_kv(self, k: str, v: Any) -> None:
        """Prints ``key | value`` with the key right-aligned on the centre line."""
        if not self._verbose:
            return
        breadth = self._width // 2
        print(f"{k.rjust(breadth, ' ')} | {format_value(v)}")

    def print_dict(self, title: str, data: Mapping[str, Any]) -> None:
        """Prints a titled key/value table; nested mappings are flattened with dotted keys."""
        if not self._verbose:
            return
        self.print_subtitle(title)
        for k, v in flatten(data):
            self.print_kv(k, v)

    def print_dataframe(self, df: pd.DataFrame, title: Optional[str] = None) -> None:
        """Prints a sweep table; columns holding lists or mappings are left out."""
        if not self._verbose:
            return
        if title:
            self.print_subtitle(title)
        nested = [c for c in df.columns if df[c].map(lambda v: isinstance(v, (list, dict))).any()]
        shown = [c for c in df.columns if c not in nested]
        with pd.option_context("display.width", self._width, "display.max_columns", None):
            print(df[shown].to_string(index=False))

    def print_record(self, record: Dict[str, Any], title: str = "Result") -> None:
        self.print_dict(title, record)
        self.print_rule("-")

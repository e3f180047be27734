#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : persist.py                                                                          #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 09:15:37 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Persistence helpers for CV Lab.

:class:`FileManager` builds result paths from a source, a topic (the experiment or command) and
a span (usually a run label), and never overwrites: a second write to the same name lands
beside the first with a timestamp. Three formats go through it: plain JSON documents,
newline-delimited JSON records for streamed results, and CSV sweep tables whose first line is a
versioned comment naming the experiment.
"""
from __future__ import annotations

import json
import logging
import os
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, Optional

import numpy as np
import pandas as pd

from cvlab.constants import DEFAULT_JSON_INDENT, NDJSON_SUFFIX, SWEEP_HEADER
from cvlab.errors import CircuitParseError
from cvlab.grank import GaussianSum

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #


def to_jsonable(value: Any) -> Any:
    """Converts numpy scalars, arrays, tuples and complex numbers into JSON-native values."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def record_line(record: Dict[str, Any]) -> str:
    """One newline-delimited JSON line. Keys keep their insertion order."""
    return json.dumps(to_jsonable(record), ensure_ascii=False)


# ------------------------------------------------------------------------------------------------ #
class FileManager:
    """Reads and writes result files under a consistent naming convention.

    Files live at ``{file_location}/{topic}/{source}-{topic}-{span}{suffix}``; empty parts
    are dropped from the name.

    Args:
        source (str): Producer of the data, usually ``cvlab``.
        topic (str): Experiment or command name, for example ``cubic_growth``.
        file_location (str): Root directory for results. Defaults to ``'results'``.

    Examples:
        >>> fm = FileManager('cvlab', 'tails', file_location='results')
        >>> fm.create_filepath('run1', suffix='.csv')
        PosixPath('results/tails/cvlab-tails-run1.csv')
    """

    def __init__(self, source: str, topic: str, file_location: str = "results") -> None:
        self._source = source
        self._topic = topic
        self._file_location = file_location

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}(source='{self._source}', topic='{self._topic}', "
            f"file_location='{self._file_location}')"
        )

    @property
    def topic(self) -> str:
        return self._topic

    @property
    def directory(self) -> Path:
        return Path(self._file_location) / self._topic.lower()

    # -------------------------------------------------------------------------------------------- #
    def create_filepath(
        self, span: str = "", suffix: str = ".json", for_new_file: bool = False
    ) -> Path:
        """Returns the path for ``span``.

        With ``for_new_file`` the returned path never names an existing file: a clash gets a
        ``-%Y%m%dT%H%M%S`` suffix on the stem, so earlier results are kept.

        Args:
            span (str): Run label; may be empty.
            suffix (str): File extension including the dot.
            for_new_file (bool): Whether the caller is about to create the file.

        Returns:
            Path: Location inside ``file_location``.
        """
        filename = "-".join(filter(None, [self._source, self._topic.lower(), span])) + suffix
        filepath = self.directory / filename
        if for_new_file and filepath.exists():
            stamp = datetime.now().strftime("%Y%m%dT%H%M%S")
            filepath = filepath.with_name(f"{filepath.stem}-{stamp}{filepath.suffix}")
        return filepath

    def exists(self, span: str = "", suffix: str = ".json") -> bool:
        return self.create_filepath(span=span, suffix=suffix).exists()

    # -------------------------------------------------------------------------------------------- #
    def write(self, data: Any, span: str = "") -> Path:
        """Writes one JSON document and returns where it went."""
        filepath = self.create_filepath(span=span, for_new_file=True)
        os.makedirs(filepath.parent, exist_ok=True)
        with open(filepath, "w", encoding="utf-8") as json_file:
            json.dump(
                to_jsonable(data), json_file, indent=DEFAULT_JSON_INDENT, ensure_ascii=False
            )
        logger.info(f"Saved {self._topic} document to {filepath}.")
        return filepath

    def read(self, span: str = "") -> Any:
        """Loads the JSON document for ``span``. A missing file raises FileNotFoundError."""
        with open(self.create_filepath(span=span), "r", encoding="utf-8") as json_file:
            return json.load(json_file)

    # -------------------------------------------------------------------------------------------- #
    def write_records(self, records: Iterable[Dict[str, Any]], span: str = "") -> Path:
        """Streams records to a newline-delimited JSON file, one line per record."""
        filepath = self.create_filepath(span=span, suffix=NDJSON_SUFFIX, for_new_file=True)
        os.makedirs(filepath.parent, exist_ok=True)
        count = 0
        with open(filepath, "w", encoding="utf-8") as ndjson_file:
            for record in records:
                ndjson_file.write(record_line(record) + "\n")
                count += 1
        logger.info(f"Saved {count} {self._topic} record(s) to {filepath}.")
        return filepath

    def read_records(
        self, span: str = "", filepath: Optional[Path] = None
    ) -> Iterator[Dict[str, Any]]:
        path = filepath or self.create_filepath(span=span, suffix=NDJSON_SUFFIX)
        with open(path, "r", encoding="utf-8") as ndjson_file:
            for number, line in enumerate(ndjson_file, start=1):
                if not line.strip():
                    continue
                try:
                    yield json.loads(line)
                except json.JSONDecodeError as e:
                    raise CircuitParseError(e.msg, f"{path.name} line {number}") from e

    # -------------------------------------------------------------------------------------------- #
    def write_sweep(self, df: pd.DataFrame, experiment: str, span: str = "") -> Path:
        """Writes a sweep table as CSV behind a ``# cvlab-sweep v1 <experiment>`` line."""
        filepath = self.create_filepath(span=span, suffix=".csv", for_new_file=True)
        os.makedirs(filepath.parent, exist_ok=True)
        with open(filepath, "w", encoding="utf-8", newline="") as csv_file:
            csv_file.write(f"{sweep_header(experiment)}\n")
            df.to_csv(csv_file, index=False, lineterminator="\n")
        logger.info(f"Saved {len(df)} sweep row(s) for {experiment} to {filepath}.")
        return filepath

    def read_sweep(self, span: str = "", filepath: Optional[Path] = None) -> pd.DataFrame:
        """Reads a sweep table, checking its header line.

        Raises:
            CircuitParseError: If the first line is not a sweep header.
        """
        path = filepath or self.create_filepath(span=span, suffix=".csv")
        with open(path, "r", encoding="utf-8") as csv_file:
            header = csv_file.readline().rstrip("\n")
            if not header.startswith(SWEEP_HEADER):
                raise CircuitParseError(f"Missing '{SWEEP_HEADER}' header.", path.name)
            return pd.read_csv(csv_file)

    # -------------------------------------------------------------------------------------------- #
    def write_gaussian_sum(self, gsum: GaussianSum, span: str = "") -> Path:
        """Streams a Gaussian sum: its header record, then one record per term."""
        return self.write_records(gsum.records(), span=span)

    def read_gaussian_sum(self, span: str = "", filepath: Optional[Path] = None) -> GaussianSum:
        return GaussianSum.from_records(self.read_records(span=span, filepath=filepath))


def sweep_header(experiment: str) -> str:
    return f"{SWEEP_HEADER} {experiment}"

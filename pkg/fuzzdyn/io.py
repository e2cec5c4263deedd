"""
Reading and writing experiment artifacts.

CSV tables start with a ``# seed=N`` line, JSON reports are wrapped as
{"seed": N, "report": ...} with sorted keys, and fuzzy sets use a plain text
format with one ``point-id<TAB>level`` line per support point.
"""
import json
import os
from fractions import Fraction
from typing import Optional

import loguru
import pandas as pd

from fuzzdyn.dynamics.fuzzy import StepFuzzySet
from fuzzdyn.dynamics.spaces import Point, PointKind, PointUniverse, jsonable, parse_number, point_label
from fuzzdyn.errors import DomainError
from fuzzdyn.gallery.shift import ShiftVector

logger = loguru.logger

SEED_PREFIX = "# seed="


def _ensure_dir(path: str) -> None:
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)


def write_csv(frame: pd.DataFrame, path: str, seed: Optional[int]) -> str:
    """
    Write a table with its seed header.
    :param frame: DataFrame to write
    :param path: output file
    :param seed: seed of the run, None for deterministic commands
    :return: path
    """
    _ensure_dir(path)
    with open(path, "w", newline="") as f:
        f.write(f"{SEED_PREFIX}{seed if seed is not None else 'none'}\n")
        frame.to_csv(f, index=False, lineterminator="\n")
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def read_csv(path: str) -> tuple:
    """
    :return: (seed or None, DataFrame)
    """
    with open(path) as f:
        header = f.readline().strip()
        if not header.startswith(SEED_PREFIX):
            raise DomainError(f"{path} does not start with a seed header")
        value = header[len(SEED_PREFIX):]
        frame = pd.read_csv(f, dtype=str, keep_default_na=False)
    return (None if value == "none" else int(value)), frame


def write_json(report: dict, path: str, seed: Optional[int]) -> str:
    _ensure_dir(path)
    with open(path, "w") as f:
        f.write(dumps_report(report, seed))
    logger.info(f"Wrote report to {path}")
    return path


def dumps_report(report: dict, seed: Optional[int]) -> str:
    return json.dumps({"seed": seed, "report": jsonable(report)}, sort_keys=True, indent=2,
                      ensure_ascii=False) + "\n"


def read_json(path: str) -> tuple:
    with open(path) as f:
        data = json.load(f)
    return data["seed"], data["report"]


def encode_point(p: Point) -> str:
    return point_label(p)


def decode_point(text: str, kind: PointKind) -> Point:
    """
    Inverse of encode_point for each universe kind.
    :param text: point id as written by encode_point
    :param kind: PointKind of the target universe
    :return: point
    """
    text = text.strip()
    kind = PointKind(kind)
    try:
        if kind is PointKind.SEQUENCE:
            return ShiftVector.parse(text)
        if kind is PointKind.REAL_LINE:
            return float(text)
        if kind in (PointKind.NAT_BINARY, PointKind.NAT_RATIONAL):
            column, height = text.split(",")
            value = parse_number(height)
            if kind is PointKind.NAT_BINARY or value.denominator == 1:
                value = int(value)
            return int(column), value
        if "," in text:
            return tuple(_finite_coordinate(c) for c in text.split(","))
        return _finite_coordinate(text)
    except (ValueError, TypeError):
        raise DomainError(f"Cannot read a {kind.value} point from {text!r}")


def _finite_coordinate(text: str):
    value = Fraction(text)
    return int(value) if value.denominator == 1 else value


def dumps_fuzzy(u: StepFuzzySet) -> str:
    return "".join(f"{encode_point(p)}\t{point_label(level)}\n" for p, level in u.membership)


def loads_fuzzy(text: str, universe: PointUniverse) -> StepFuzzySet:
    """
    Parse the fuzzy text format; blank lines and ``#`` comments are skipped.
    :raise DomainError: malformed lines or points outside the universe
    :raise NormalityError: no level equals 1
    """
    mapping = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DomainError(f"Line {number}: expected 'point-id<TAB>level', got {line!r}")
        p = decode_point(parts[0], universe.kind)
        if p in mapping:
            raise DomainError(f"Line {number}: point {parts[0]} appears twice")
        mapping[p] = parse_number(parts[1])
    return StepFuzzySet.from_mapping(universe, mapping)


def write_fuzzy(u: StepFuzzySet, path: str) -> str:
    _ensure_dir(path)
    with open(path, "w") as f:
        f.write(dumps_fuzzy(u))
    return path


def read_fuzzy(path: str, universe: PointUniverse) -> StepFuzzySet:
    with open(path) as f:
        return loads_fuzzy(f.read(), universe)

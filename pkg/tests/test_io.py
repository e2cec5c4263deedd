from fractions import Fraction

import pandas as pd
import pytest

from fuzzdyn.dynamics.fuzzy import StepFuzzySet
from fuzzdyn.dynamics.spaces import PointKind
from fuzzdyn.errors import DomainError, NormalityError
from fuzzdyn.gallery.shift import ShiftVector
from fuzzdyn.io import (decode_point, dumps_fuzzy, dumps_report, encode_point, loads_fuzzy, read_csv,
                        read_fuzzy, read_json, write_csv, write_fuzzy, write_json)


def test_csv_carries_its_seed(tmp_path):
    frame = pd.DataFrame({"j": [1, 2], "d_j": [0.5, 0.25]})
    path = write_csv(frame, str(tmp_path / "nested" / "trace.csv"), 7)
    with open(path) as f:
        assert f.readline() == "# seed=7\n"
    seed, back = read_csv(path)
    assert seed == 7
    assert list(back.columns) == ["j", "d_j"]
    assert back["d_j"].tolist() == ["0.5", "0.25"]
    seed, _ = read_csv(write_csv(frame, str(tmp_path / "none.csv"), None))
    assert seed is None


def test_csv_without_header_is_rejected(tmp_path):
    path = tmp_path / "bare.csv"
    path.write_text("j,d_j\n1,0\n")
    with pytest.raises(DomainError):
        read_csv(str(path))


def test_reports_are_sorted_and_exact(tmp_path):
    text = dumps_report({"b": Fraction(1, 3), "a": [1, 0.5]}, 3)
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')
    assert '"1/3"' in text
    seed, report = read_json(write_json({"x": Fraction(2, 4)}, str(tmp_path / "r.json"), 3))
    assert (seed, report) == (3, {"x": "1/2"})


@pytest.mark.parametrize("text, kind, point", [
    ("3,1", PointKind.NAT_BINARY, (3, 1)),
    ("2,1/2", PointKind.NAT_RATIONAL, (2, Fraction(1, 2))),
    ("2,1", PointKind.NAT_RATIONAL, (2, 1)),
    ("0:1|2:-1/2", PointKind.SEQUENCE, ShiftVector(((0, 1), (2, Fraction(-1, 2))))),
    ("0", PointKind.SEQUENCE, ShiftVector.zero()),
    ("1/4,3", PointKind.FINITE, (Fraction(1, 4), 3)),
    ("0.5", PointKind.REAL_LINE, 0.5),
])
def test_decode_point(text, kind, point):
    assert decode_point(text, kind) == point
    if kind is not PointKind.REAL_LINE:
        assert encode_point(point) == text


def test_decode_point_rejects_garbage():
    with pytest.raises(DomainError):
        decode_point("a,b", PointKind.NAT_BINARY)
    with pytest.raises(DomainError):
        decode_point("1,2,3", PointKind.NAT_RATIONAL)


def test_fuzzy_text_format(example3, tmp_path):
    universe, _ = example3
    u = StepFuzzySet.from_mapping(universe, {(0, 0): 1, (1, Fraction(1, 3)): Fraction(1, 2)})
    text = dumps_fuzzy(u)
    assert text == "0,0\t1\n1,1/3\t1/2\n"
    assert loads_fuzzy("# a comment\n\n" + text, universe) == u
    assert read_fuzzy(write_fuzzy(u, str(tmp_path / "u.txt")), universe) == u


def test_fuzzy_text_errors(example3):
    universe, _ = example3
    with pytest.raises(DomainError):
        loads_fuzzy("0,0\t1\n0,0\t1/2\n", universe)
    with pytest.raises(DomainError):
        loads_fuzzy("0,0 1\n", universe)
    with pytest.raises(NormalityError):
        loads_fuzzy("0,0\t1/2\n", universe)

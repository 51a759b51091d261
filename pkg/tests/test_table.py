import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from affinebody import NumericalFailure, ValidationError
from affinebody.scenario.table import ResultTable, export_table, parse_csv, parse_json, read_table, to_csv, to_json

COLUMNS = [("k", "int"), ("x", "float"), ("label", "str")]

rows = st.lists(
    st.tuples(
        st.integers(-10 ** 9, 10 ** 9),
        st.floats(allow_nan=False, allow_infinity=False, width=64),
        st.text(st.characters(blacklist_categories=("Cs",), blacklist_characters="\r\x00"), max_size=8),
    ),
    max_size=12,
)


def _table(data):
    t = ResultTable(COLUMNS, [list(r) for r in data])
    t.provenance = {"column_types": [k for _, k in COLUMNS], "table_hash": t.table_hash()}
    return t


@given(rows)
def test_csv_roundtrip_is_exact(data):
    t = _table(data)
    back = parse_csv(to_csv(t))
    assert back == t
    assert back.table_hash() == t.table_hash()


@given(rows)
def test_json_roundtrip_is_exact(data):
    t = _table(data)
    assert parse_json(to_json(t)) == t


@given(rows)
def test_csv_to_json_conversion_preserves_hash(data):
    t = _table(data)
    assert parse_json(to_json(parse_csv(to_csv(t)))).table_hash() == t.table_hash()


def test_empty_table_is_header_only():
    t = _table([])
    lines = to_csv(t).splitlines()
    assert len(lines) == 2 and lines[1] == "k,x,label"
    assert parse_csv(to_csv(t)).rows == []


@pytest.mark.parametrize("bad", [math.nan, math.inf])
def test_non_finite_values_abort_export(tmp_path, bad):
    t = ResultTable(COLUMNS, [[1, bad, "a"]])
    target = tmp_path / "out.csv"
    with pytest.raises(NumericalFailure):
        export_table(t, target)
    assert not target.exists()


def test_export_and_read(tmp_path):
    t = _table([(1, 0.1, "a"), (2, 1e-300, "b,c")])
    for fmt in ("csv", "json"):
        path = export_table(t, tmp_path / f"t.{fmt}", fmt)
        assert read_table(path) == t
    with pytest.raises(ValidationError):
        export_table(t, tmp_path / "t.xml", "xml")


def test_schema_checks():
    with pytest.raises(ValidationError):
        ResultTable([("a", "complex")])
    t = ResultTable(COLUMNS)
    with pytest.raises(ValidationError):
        t.append(1, 2.0)
    with pytest.raises(ValidationError):
        parse_csv("a,b\n1,2\n")
    with pytest.raises(ValidationError):
        t.append(1, 2.0, "a\x00b")

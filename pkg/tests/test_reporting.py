import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from misl import reporting as rp
from misl.acquisition import read_csv_rows
from misl.errors import InvalidSeries, InvalidTable


def test_one_row_table():
    t = rp.ReportTable("t", ("S#", "Jurisdiction", "# of Cases"), (("1.", "Original", 4),))
    assert rp.emit_table(t) == b"S#,Jurisdiction,# of Cases\r\n1.,Original,4\r\n"


def test_equal_tables_emit_identical_bytes():
    a = rp.ReportTable("t", ("k", "n"), (("x, y", 1),))
    b = rp.ReportTable("t", ("k", "n"), (("x, y", 1),))
    assert rp.emit_table(a) == rp.emit_table(b)
    assert rp.emit_table(a, "json") == rp.emit_table(b, "json")


def test_arity_mismatch():
    with pytest.raises(InvalidTable):
        rp.emit_table(rp.ReportTable("t", ("a", "b"), (("x",),)))
    with pytest.raises(InvalidTable):
        rp.emit_table(rp.ReportTable("t", ("a",), ((1.5,),)))


def test_unknown_format():
    with pytest.raises(ValueError):
        rp.emit_table(rp.ReportTable("t", ("a",)), "xml")


def test_json_form():
    t = rp.ReportTable("Bench size.", ("metric", "value"), (("max", 17),))
    assert json.loads(rp.emit_table(t, "json")) == {
        "title": "Bench size.", "columns": ["metric", "value"], "rows": [["max", 17]]}


def test_empty_series_header_only():
    assert rp.emit_year_series([]) == b"year,count\r\n"


def test_fourteen_year_series():
    rows = read_csv_rows(rp.emit_year_series([(y, y - 2000) for y in range(2001, 2015)]))
    assert len(rows) == 15 and rows[1] == ["2001", "1"] and rows[-1] == ["2014", "14"]


def test_undated_trailer():
    assert rp.emit_year_series([(2010, 2)], undated=3).endswith(b"undated,3\r\n")


@pytest.mark.parametrize("series", [[(2011, 1), (2010, 1)], [(2010, 1), (2010, 2)]])
def test_unsorted_series(series):
    with pytest.raises(InvalidSeries):
        rp.emit_year_series(series)


@pytest.mark.parametrize("value, text", [
    (Fraction(1, 4), "0.3"), (Fraction(9, 4), "2.3"), (Fraction(3, 40), "0.1"),
    (Fraction(100, 3), "33.3"), (Fraction(81, 1000), "0.1"), (Fraction(0), "0.0"),
    (Fraction(1555, 100), "15.6"),
])
def test_round_half_up(value, text):
    assert rp.round_half_up(value) == text


def test_exact():
    assert rp.exact(Fraction(100, 3)) == "100/3"
    assert rp.exact(Fraction(4)) == "4"
    assert rp.exact(None) == ""


cell = st.one_of(st.integers(0, 10**6), st.text(
    st.characters(blacklist_categories=("Cs",), blacklist_characters="\x00\r"), max_size=12))


@given(st.lists(st.tuples(cell, cell), max_size=6))
def test_csv_reparses_to_same_cells(rows):
    t = rp.ReportTable("t", ("a", "b"), tuple(rows))
    parsed = read_csv_rows(rp.emit_table(t))
    assert parsed == [["a", "b"]] + [[str(x) for x in r] for r in rows]


def test_bundle_has_every_report_in_both_formats():
    bundle = rp.render_bundle(rp.ReportData())
    assert sorted(bundle) == sorted(f"{n}.{ext}" for n in rp.REPORT_NAMES for ext in ("csv", "json"))
    assert bundle == rp.render_bundle(rp.ReportData())


def test_write_bundle_leaves_unchanged_files(tmp_path):
    bundle = rp.render_bundle(rp.ReportData())
    rp.write_bundle(bundle, tmp_path)
    stamp = {p.name: p.stat().st_mtime_ns for p in tmp_path.iterdir()}
    rp.write_bundle(bundle, tmp_path)
    assert stamp == {p.name: p.stat().st_mtime_ns for p in tmp_path.iterdir()}
    assert rp.read_bundle(tmp_path) == bundle

"""Rendering of statistics into the report bundle.

The renderer works on plain values (:class:`ReportData`) and never calls
the aggregation code, so independently computed numbers can be rendered
through the same path and compared byte-for-byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .acquisition import write_csv_rows
from .errors import InvalidSeries, InvalidTable

REPORT_NAMES = (
    "cases_by_year", "suo_moto_by_year", "by_type", "by_jurisdiction", "top_judges",
    "top_articles", "top_pld", "top_scmr", "bench_stats", "suo_moto_share", "summary",
)


@dataclass(frozen=True)
class ReportTable:
    title: str
    columns: tuple
    rows: tuple = ()

    def validate(self):
        for i, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise InvalidTable(
                    f"{self.title!r} row {i + 1} has {len(row)} values, "
                    f"expected {len(self.columns)}"
                )
            for v in row:
                if v is not None and not isinstance(v, (str, int)):
                    raise InvalidTable(f"{self.title!r} row {i + 1}: unsupported value {v!r}")


def emit_table(table: ReportTable, fmt: str = "csv") -> bytes:
    table.validate()
    if fmt == "csv":
        return write_csv_rows([table.columns, *table.rows])
    if fmt == "json":
        obj = {"title": table.title, "columns": list(table.columns),
               "rows": [list(r) for r in table.rows]}
        return (json.dumps(obj, ensure_ascii=False, indent=2) + "\n").encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")


def _check_series(series):
    years = [y for y, _ in series]
    if any(b <= a for a, b in zip(years, years[1:])):
        raise InvalidSeries("series years must be strictly ascending")


def emit_year_series(series: Sequence[tuple], label: str = "count", undated: int = 0) -> bytes:
    """Plot-ready ``year,<label>`` CSV, with an ``undated,<n>`` trailer when n > 0."""
    _check_series(series)
    rows = [("year", label), *series]
    if undated:
        rows.append(("undated", undated))
    return write_csv_rows(rows)


def round_half_up(value: Fraction, places: int = 1) -> str:
    """Decimal rendering of a non-negative fraction, rounding halves up."""
    scale = 10 ** places
    n = (value * scale * 2 + 1) // 2
    whole, frac = divmod(int(n), scale)
    return f"{whole}.{frac:0{places}d}" if places else str(whole)


def exact(value: Fraction | None) -> str:
    if value is None:
        return ""
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class ReportData:
    """Every value needed for the bundle, already ranked and ordered."""

    years: Sequence = ()
    undated: int = 0
    suo_years: Sequence = ()
    suo_undated: int = 0
    types: Sequence = ()
    jurisdictions: Sequence = ()
    judges: Sequence = ()
    articles: Sequence = ()
    pld: Sequence = ()
    scmr: Sequence = ()
    bench_mean: Fraction | None = None
    bench_max: int | None = None
    bench_count: int = 0
    full_bench_count: int = 0
    full_bench_size: int = 17
    split_year: int = 2009
    share: tuple = ((0, 0), (0, 0))
    unique_pld: int = 0
    unique_scmr: int = 0
    unique_articles: int = 0
    extra: dict = field(default_factory=dict, compare=False)


def _ranked_table(title, label, rows):
    return ReportTable(title, ("S#", label, "# of Cases"),
                       tuple((f"{i}.", key, n) for i, (key, n) in enumerate(rows, 1)))


def _series_table(title, points, undated):
    rows = [(y, n) for y, n in points]
    if undated:
        rows.append(("undated", undated))
    return ReportTable(title, ("year", "count"), tuple(rows))


def build_tables(data: ReportData) -> dict[str, ReportTable]:
    pct = lambda suo, total: Fraction(100 * suo, total) if total else None  # noqa: E731
    (suo_pre, tot_pre), (suo_post, tot_post) = data.share
    share_rows = []
    for period, suo, total in ((f"before {data.split_year}", suo_pre, tot_pre),
                               (f"{data.split_year} onward", suo_post, tot_post)):
        p = pct(suo, total)
        share_rows.append((period, suo, total, round_half_up(p) if p is not None else "", exact(p)))
    mean = data.bench_mean
    return {
        "cases_by_year": _series_table("Distribution of cases by year.", data.years, data.undated),
        "suo_moto_by_year": _series_table("Distribution of Suo Moto cases by year.",
                                          data.suo_years, data.suo_undated),
        "by_type": _ranked_table("Distribution of cases by type.", "Type", data.types),
        "by_jurisdiction": _ranked_table("Distribution of cases by jurisdiction.",
                                         "Jurisdiction", data.jurisdictions),
        "top_judges": _ranked_table("List of the most prolific judges.", "Name", data.judges),
        "top_articles": _ranked_table("List of the most cited Articles of the Constitution.",
                                      "Article #", data.articles),
        "top_pld": _ranked_table("List of the most cited PLD judgements.", "Citation", data.pld),
        "top_scmr": _ranked_table("List of the most cited SCMR judgements.", "Citation", data.scmr),
        "bench_stats": ReportTable("Bench size.", ("metric", "value"), (
            ("benches", data.bench_count),
            ("mean", exact(mean)),
            ("mean_rounded", round_half_up(mean) if mean is not None else ""),
            ("max", data.bench_max if data.bench_max is not None else ""),
            ("full_bench_size", data.full_bench_size),
            ("full_bench_count", data.full_bench_count),
        )),
        "suo_moto_share": ReportTable(
            "Share of Suo Moto cases.",
            ("period", "suo_moto", "total", "percent", "exact"), tuple(share_rows)),
        "summary": ReportTable("Corpus summary.", ("metric", "value"), (
            ("documents", sum(n for _, n in data.years) + data.undated),
            ("undated", data.undated),
            ("unique_articles", data.unique_articles),
            ("unique_pld", data.unique_pld),
            ("unique_scmr", data.unique_scmr),
        )),
    }


def render_bundle(data: ReportData) -> dict[str, bytes]:
    """All report files, keyed by file name (``<name>.csv`` / ``<name>.json``)."""
    tables = build_tables(data)
    out = {}
    for name in REPORT_NAMES:
        if name == "cases_by_year":
            out[f"{name}.csv"] = emit_year_series(data.years, "count", data.undated)
        elif name == "suo_moto_by_year":
            out[f"{name}.csv"] = emit_year_series(data.suo_years, "count", data.suo_undated)
        else:
            out[f"{name}.csv"] = emit_table(tables[name], "csv")
        out[f"{name}.json"] = emit_table(tables[name], "json")
    return out


def write_bundle(bundle: dict[str, bytes], directory) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, payload in sorted(bundle.items()):
        path = directory / name
        if not path.exists() or path.read_bytes() != payload:
            path.write_bytes(payload)
    return directory


def read_bundle(directory) -> dict[str, bytes]:
    directory = Path(directory)
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())
            if p.suffix in (".csv", ".json")}

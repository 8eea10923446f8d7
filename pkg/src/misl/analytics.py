"""Mergeable corpus statistics.

Per-document facts are lifted into a :class:`StatsPartial`; partials form
a commutative monoid under :func:`merge` with :func:`empty` as identity, so
any partition of the corpus can be aggregated independently and combined.
All arithmetic is exact; rounding happens only in the report layer.
"""

from __future__ import annotations

import functools
import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidDimension
from .extraction import ArticleRef, DocFacts, PldCitation, ScmrCitation
from .normalization import CaseType, JudgeRoster
from .reporting import ReportData

DIMENSIONS = ("type", "jurisdiction", "judge", "article", "pld", "scmr")
COUNTER_FIELDS = (
    "by_year", "suo_by_year", "by_type", "by_jurisdiction", "by_judge", "by_article",
    "by_pld", "by_scmr", "occ_article", "occ_pld", "occ_scmr", "bench_sizes",
)


@dataclass
class StatsPartial:
    docs_total: int = 0
    docs_dated: int = 0
    suo_total: int = 0
    by_year: Counter = field(default_factory=Counter)
    suo_by_year: Counter = field(default_factory=Counter)
    by_type: Counter = field(default_factory=Counter)
    by_jurisdiction: Counter = field(default_factory=Counter)
    by_judge: Counter = field(default_factory=Counter)
    by_article: Counter = field(default_factory=Counter)
    by_pld: Counter = field(default_factory=Counter)
    by_scmr: Counter = field(default_factory=Counter)
    # raw occurrence totals, kept apart from the per-document presence counts
    occ_article: Counter = field(default_factory=Counter)
    occ_pld: Counter = field(default_factory=Counter)
    occ_scmr: Counter = field(default_factory=Counter)
    bench_sizes: Counter = field(default_factory=Counter)

    def check(self):
        """Assert the structural invariants; raises AssertionError."""
        assert self.docs_dated <= self.docs_total
        assert sum(self.by_year.values()) == self.docs_dated
        for year, n in self.suo_by_year.items():
            assert n <= self.by_year[year]
        for f in COUNTER_FIELDS:
            assert all(v > 0 for v in getattr(self, f).values()), f

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        def dump(counter):
            return sorted([str(k), v] for k, v in counter.items())

        out = {"docs_total": self.docs_total, "docs_dated": self.docs_dated,
               "suo_total": self.suo_total}
        for f in COUNTER_FIELDS:
            out[f] = dump(getattr(self, f))
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "StatsPartial":
        parsers = {
            "by_year": int, "suo_by_year": int, "bench_sizes": int,
            "by_type": CaseType, "by_jurisdiction": str, "by_judge": str,
            "by_article": ArticleRef.parse, "occ_article": ArticleRef.parse,
            "by_pld": PldCitation.parse, "occ_pld": PldCitation.parse,
            "by_scmr": ScmrCitation.parse, "occ_scmr": ScmrCitation.parse,
        }
        p = cls(obj["docs_total"], obj["docs_dated"], obj["suo_total"])
        for f in COUNTER_FIELDS:
            setattr(p, f, Counter({parsers[f](k): v for k, v in obj[f]}))
        return p

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1) + "\n"


def empty() -> StatsPartial:
    return StatsPartial()


def facts_to_partial(f: DocFacts) -> StatsPartial:
    p = StatsPartial(docs_total=1)
    if f.year is not None:
        p.docs_dated = 1
        p.by_year[f.year] = 1
        if f.suo_moto:
            p.suo_by_year[f.year] = 1
    if f.suo_moto:
        p.suo_total = 1
    for t in f.types:
        p.by_type[t] = 1
    if f.text_analyzed:
        p.by_jurisdiction[f.jurisdiction.label] = 1
        for judge in f.bench:
            p.by_judge[judge] = 1
        if f.bench:
            p.bench_sizes[len(f.bench)] = 1
    for a in f.articles:
        p.by_article[a] = 1
    for c in f.pld:
        p.by_pld[c] = 1
    for c in f.scmr:
        p.by_scmr[c] = 1
    p.occ_article.update(f.article_occurrences)
    p.occ_pld.update(f.pld_occurrences)
    p.occ_scmr.update(f.scmr_occurrences)
    return p


def merge(a: StatsPartial, b: StatsPartial) -> StatsPartial:
    out = StatsPartial(
        a.docs_total + b.docs_total,
        a.docs_dated + b.docs_dated,
        a.suo_total + b.suo_total,
    )
    for f in COUNTER_FIELDS:
        setattr(out, f, getattr(a, f) + getattr(b, f))
    return out


def fold(facts: Iterable[DocFacts]) -> StatsPartial:
    return functools.reduce(merge, map(facts_to_partial, facts), empty())


def tree_reduce(partials: Sequence[StatsPartial], jobs: int = 1) -> StatsPartial:
    """Pairwise reduction of partials; levels may run in parallel."""
    level = list(partials) or [empty()]
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        while len(level) > 1:
            pairs = [(level[i], level[i + 1]) for i in range(0, len(level) - 1, 2)]
            merged = list(pool.map(lambda ab: merge(*ab), pairs))
            if len(level) % 2:
                merged.append(level[-1])
            level = merged
    return level[0]


def aggregate(facts: Sequence[DocFacts], partitions: int = 1, jobs: int = 1) -> StatsPartial:
    """Fold ``facts`` in ``partitions`` contiguous chunks, then tree-merge."""
    facts = list(facts)
    k = max(1, partitions)
    size, extra = divmod(len(facts), k)
    chunks, start = [], 0
    for i in range(k):
        end = start + size + (1 if i < extra else 0)
        chunks.append(facts[start:end])
        start = end
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        partials = list(pool.map(fold, chunks))
    return tree_reduce(partials, jobs)


# ---------------------------------------------------------------------------
# Queries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class YearSeries:
    points: tuple
    undated: int = 0


def _series(counter: Counter, span: Counter, undated: int) -> YearSeries:
    if not span:
        return YearSeries((), undated)
    lo, hi = min(span), max(span)
    return YearSeries(tuple((y, counter.get(y, 0)) for y in range(lo, hi + 1)), undated)


def cases_by_year(p: StatsPartial) -> YearSeries:
    """Documents per release year, zero-filled over the observed range."""
    return _series(p.by_year, p.by_year, p.docs_total - p.docs_dated)


def suo_moto_by_year(p: StatsPartial) -> YearSeries:
    """Suo-Moto documents per year, over the same range as :func:`cases_by_year`."""
    return _series(p.suo_by_year, p.by_year, p.suo_total - sum(p.suo_by_year.values()))


@dataclass(frozen=True)
class Share:
    """Suo-Moto percentages before and from ``split_year`` (exact)."""

    split_year: int
    suo_pre: int
    total_pre: int
    suo_post: int
    total_post: int

    @property
    def pct_pre(self) -> Fraction | None:
        return Fraction(100 * self.suo_pre, self.total_pre) if self.total_pre else None

    @property
    def pct_post(self) -> Fraction | None:
        return Fraction(100 * self.suo_post, self.total_post) if self.total_post else None


def suo_moto_share(p: StatsPartial, split_year: int) -> Share:
    pre = [y for y in p.by_year if y < split_year]
    post = [y for y in p.by_year if y >= split_year]
    return Share(
        split_year,
        sum(p.suo_by_year[y] for y in pre),
        sum(p.by_year[y] for y in pre),
        sum(p.suo_by_year[y] for y in post),
        sum(p.by_year[y] for y in post),
    )


def render_key(key) -> str:
    if isinstance(key, CaseType):
        return key.label
    return str(key)


def ranked(counter: Counter) -> list:
    """All keys by count descending, ties by rendered key (case-insensitive)."""
    return sorted(counter.items(),
                  key=lambda kv: (-kv[1], render_key(kv[0]).casefold(), render_key(kv[0])))


def top_k(p: StatsPartial, dimension: str, k: int) -> list:
    if dimension not in DIMENSIONS:
        raise InvalidDimension(f"unknown dimension {dimension!r}; expected one of {DIMENSIONS}")
    if k < 1:
        raise ValueError("k must be at least 1")
    counter = {
        "type": p.by_type, "jurisdiction": p.by_jurisdiction, "judge": p.by_judge,
        "article": p.by_article, "pld": p.by_pld, "scmr": p.by_scmr,
    }[dimension]
    return ranked(counter)[:k]


@dataclass(frozen=True)
class BenchStats:
    mean: Fraction | None
    max: int | None
    full_bench_count: int
    full_bench_size: int
    benches: int


def bench_stats(p: StatsPartial, full_bench_size: int = 17) -> BenchStats:
    """Bench size summary over documents whose bench was extracted."""
    n = sum(p.bench_sizes.values())
    if not n:
        return BenchStats(None, None, 0, full_bench_size, 0)
    total = sum(size * count for size, count in p.bench_sizes.items())
    return BenchStats(Fraction(total, n), max(p.bench_sizes), p.bench_sizes[full_bench_size],
                      full_bench_size, n)


def report_data(p: StatsPartial, roster: JudgeRoster, top: int = 10, split_year: int = 2009,
                full_bench_size: int = 17) -> ReportData:
    """Collect every query result needed to render the report bundle."""
    years = cases_by_year(p)
    suo = suo_moto_by_year(p)
    share = suo_moto_share(p, split_year)
    bench = bench_stats(p, full_bench_size)
    rows = lambda dim: [(render_key(k), n) for k, n in top_k(p, dim, top)]  # noqa: E731
    return ReportData(
        years=years.points, undated=years.undated,
        suo_years=suo.points, suo_undated=suo.undated,
        types=[(render_key(k), n) for k, n in ranked(p.by_type)],
        jurisdictions=[(render_key(k), n) for k, n in ranked(p.by_jurisdiction)],
        judges=[(roster.display_name(k), n) for k, n in top_k(p, "judge", top)],
        articles=rows("article"), pld=rows("pld"), scmr=rows("scmr"),
        bench_mean=bench.mean, bench_max=bench.max, bench_count=bench.benches,
        full_bench_count=bench.full_bench_count, full_bench_size=full_bench_size,
        split_year=split_year,
        share=((share.suo_pre, share.total_pre), (share.suo_post, share.total_post)),
        unique_pld=len(p.by_pld), unique_scmr=len(p.by_scmr),
        unique_articles=len(p.by_article),
    )

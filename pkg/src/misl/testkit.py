"""Synthetic judgment corpora with known facts, and a brute-force oracle.

Documents are assembled from templates shaped like real Supreme Court
judgments (jurisdiction line, PRESENT block, prose with inline Article
references and law-report citations). Randomness comes from numpy's PCG64
generator seeded per document with ``SeedSequence([seed, index])``, so each
document is reproducible on its own and generation can be split freely.

The oracle recomputes every report straight from the annotations. It
deliberately does not import :mod:`misl.analytics`.
"""

from __future__ import annotations

import datetime as dt
import html
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .corpus_store import CorpusStore, MetadataRecord
from .errors import InvalidProfile
from .extraction import ArticleRef, DocFacts, Jurisdiction, PldCitation, ScmrCitation
from .normalization import CaseType, JudgeRoster, LookupTable, normalize_key
from .reporting import ReportData, render_bundle

DEFAULT_LINK_BASE = "https://judgments.example/web/user_files/File/"
IDENTITY_CONVERTER = "cp {in} {out}"


@dataclass(frozen=True)
class NoiseProfile:
    judge_typo_rate: float = 0.0
    title_variant_rate: float = 0.0
    date_missing_rate: float = 0.0

    def __post_init__(self):
        for name in ("judge_typo_rate", "title_variant_rate", "date_missing_rate"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise InvalidProfile(f"{name}={rate} outside [0, 1]")


ZERO_NOISE = NoiseProfile()


@dataclass(frozen=True)
class TruthEntry:
    """What a correct pipeline must find in one generated document."""

    id: str
    release_date: dt.date | None
    types: frozenset
    suo_moto: bool
    jurisdiction: Jurisdiction
    bench: tuple
    articles: frozenset
    pld: frozenset
    scmr: frozenset
    mentions: int = 0
    corrupted_mentions: tuple = ()  # (rendered mention, judge id)

    @property
    def year(self):
        return self.release_date.year if self.release_date else None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "year": self.year,
            "release_date": self.release_date.isoformat() if self.release_date else None,
            "types": sorted(t.value for t in self.types),
            "suo_moto": self.suo_moto,
            "jurisdiction": self.jurisdiction.label,
            "bench": list(self.bench),
            "articles": sorted(str(a) for a in self.articles),
            "pld": sorted(str(c) for c in self.pld),
            "scmr": sorted(str(c) for c in self.scmr),
            "mentions": self.mentions,
            "corrupted_mentions": [list(m) for m in self.corrupted_mentions],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TruthEntry":
        date = obj.get("release_date")
        return cls(
            id=obj["id"],
            release_date=dt.date.fromisoformat(date) if date else None,
            types=frozenset(CaseType(t) for t in obj["types"]),
            suo_moto=obj["suo_moto"],
            jurisdiction=Jurisdiction.parse(obj["jurisdiction"]),
            bench=tuple(obj["bench"]),
            articles=frozenset(ArticleRef.parse(a) for a in obj["articles"]),
            pld=frozenset(PldCitation.parse(c) for c in obj["pld"]),
            scmr=frozenset(ScmrCitation.parse(c) for c in obj["scmr"]),
            mentions=obj.get("mentions", 0),
            corrupted_mentions=tuple(tuple(m) for m in obj.get("corrupted_mentions", ())),
        )


def write_truth(truth, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [json.dumps(t.to_json(), ensure_ascii=False) for t in truth]
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return path


def read_truth(path) -> list[TruthEntry]:
    with open(path, encoding="utf-8") as fh:
        return [TruthEntry.from_json(json.loads(line)) for line in fh if line.strip()]


def facts_match_truth(facts: DocFacts, truth: TruthEntry) -> list[str]:
    """Names of the fields where pipeline facts disagree with the annotation."""
    pairs = {
        "year": (facts.year, truth.year),
        "types": (facts.types, truth.types),
        "suo_moto": (facts.suo_moto, truth.suo_moto),
        "jurisdiction": (facts.jurisdiction, truth.jurisdiction),
        "bench": (facts.bench, truth.bench),
        "articles": (facts.articles, truth.articles),
        "pld": (facts.pld, truth.pld),
        "scmr": (facts.scmr, truth.scmr),
    }
    return [name for name, (a, b) in pairs.items() if a != b]


# ---------------------------------------------------------------------------
# Template pools
# ---------------------------------------------------------------------------

_TYPE_WEIGHTS = [
    (CaseType.CONSTITUTION, 30), (CaseType.SUO_MOTO, 12), (CaseType.HUMAN_RIGHTS, 9),
    (CaseType.CIVIL, 8), (CaseType.CIVIL_APPEAL, 8), (CaseType.CIVIL_REVIEW, 3),
    (CaseType.CRIMINAL, 3), (CaseType.CRIMINAL_APPEAL, 3),
    (CaseType.CRIMINAL_MISC_APPLICATION, 2), (CaseType.REFERENCE, 2),
    (CaseType.JAIL_PETITION, 1), (CaseType.CIVIL_PETITION_LEAVE_TO_APPEAL, 1),
    (CaseType.UNKNOWN, 1),
]
_LONG_FORMS = {
    CaseType.CONSTITUTION: "Constitution Petition",
    CaseType.CIVIL: "Civil Petition",
    CaseType.CRIMINAL: "Criminal Petition",
}
_JURISDICTION_WEIGHTS = [
    (("Original",), 55), (("Appellate",), 25), (("Review",), 5),
    (("Original", "Appellate"), 3), (("Advisory",), 2), (("Original", "Review"), 2),
    (("Contempt",), 1), ((), 1),
]
_YEAR_WEIGHTS = dict(zip(range(2001, 2015), [2, 2, 2, 3, 3, 3, 4, 4, 10, 25, 30, 35, 40, 30]))
_BENCH_SIZE_WEIGHTS = [(1, 5), (2, 25), (3, 35), (4, 10), (5, 15), (7, 3), (9, 2), (None, 5)]
_ARTICLE_WEIGHTS = [
    ("184 (3)", 20), ("199", 10), ("9", 10), ("4", 8), ("184", 7), ("25", 7), ("3", 6),
    ("2A", 5), ("14", 5), ("10A", 3), ("187", 3), ("189", 3), ("190", 3), ("18", 2),
    ("19A", 2), ("175", 2), ("248", 1), ("6", 1), ("8", 1), ("212", 1), ("199 (1)", 1),
]
_PLD_FAMOUS = ["PLD 2009 SC 879", "PLD 2011 SC 997", "PLD 1972 SC 139", "PLD 1996 SC 324",
               "PLD 1988 SC 416", "PLD 1973 SC 236", "PLD 1979 SC 38", "PLD 1983 SC 457",
               "PLD 1993 SC 210", "PLD 2007 SC 578", "PLD 1955 FC 240"]
_SCMR_FAMOUS = ["1991 SCMR 1041", "1998 SCMR 793", "2010 SCMR 1301", "1998 SCMR 2268",
                "2012 SCMR 773", "1992 SCMR 563", "1999 SCMR 2883", "1994 SCMR 1299",
                "1997 SCMR 641", "1999 SCMR 2744"]
_COURT_WEIGHTS = [("SC", 12), ("Lah", 3), ("Kar", 3), ("Pesh", 1), ("Quetta", 1), ("FC", 1)]
_PARTIES = [
    "Federation of Pakistan", "Province of Punjab", "Province of Sindh", "Muhammad Aslam",
    "Watan Party", "Karachi Building Control Authority", "Bar Association Lahore",
    "Ghulam Rasool", "Abdul Hameed", "Water and Power Development Authority",
    "Pakistan Steel Mills", "Secretary Establishment Division", "Nusrat Bibi",
]
_TOPICS = [
    "load shedding in Karachi", "the price of sugar", "missing persons in Balochistan",
    "rental power projects", "pollution of Manchar Lake", "encroachment on public parks",
    "shortage of medicines in hospitals", "appointments in the police department",
]
_COUNSEL = ["Mr. Hamid Khan, ASC", "Mr. Abdul Hafeez Pirzada, Sr. ASC", "Mrs. Asma Ahmed, ASC"]
_FILLER = [
    "The learned counsel for the respondents opposed the petition.",
    "Notice was issued to the Attorney General for Pakistan.",
    "The matter was adjourned on 14 occasions since 2011.",
    "We have heard the learned counsel for the parties at length.",
    "The appeal was earlier heard by this Court in its review jurisdiction.",
    "The report filed by the Inspector General was placed on record.",
    "This raises a question of public importance with reference to the enforcement of "
    "fundamental rights.",
]
_HEADINGS = ["JUDGMENT", "ORDER"]
_DATE_FORMATS = ["dmy-dash", "dmy-slash", "ordinal", "month-first"]
_LETTERS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _weighted(rng, pairs):
    values = [v for v, _ in pairs]
    weights = np.array([w for _, w in pairs], dtype=float)
    return values[int(rng.choice(len(values), p=weights / weights.sum()))]


def _render_date(rng, date: dt.date) -> str:
    style = _DATE_FORMATS[int(rng.integers(len(_DATE_FORMATS)))]
    if style == "dmy-dash":
        return f"{date.day:02d}-{date.month:02d}-{date.year}"
    if style == "dmy-slash":
        return f"{date.day:02d}/{date.month:02d}/{date.year}"
    month = date.strftime("%B")
    if style == "ordinal":
        suffix = "th" if 11 <= date.day <= 13 else {1: "st", 2: "nd", 3: "rd"}.get(date.day % 10, "th")
        return f"{date.day}{suffix} {month} {date.year}"
    return f"{month} {date.day}, {date.year}"


def _render_designator(key: str) -> str:
    if " " not in key and len(key) <= 4:
        return ".".join(key.upper()) + "."
    return " ".join(w.capitalize() for w in key.split())


def _corrupt(rng, name: str) -> str:
    """One single-character edit on a letter position of ``name``."""
    while True:
        positions = [i for i, c in enumerate(name) if c.isalpha()]
        pos = positions[int(rng.integers(len(positions)))]
        op = int(rng.integers(3))
        letter = _LETTERS[int(rng.integers(26))]
        if op == 0 and letter != name[pos]:
            return name[:pos] + letter + name[pos + 1:]
        if op == 1:
            return name[:pos] + letter + name[pos:]
        if op == 2:
            # keep every token at least one letter long
            start = name.rfind(" ", 0, pos) + 1
            end = name.find(" ", pos)
            token = name[start:end if end >= 0 else len(name)]
            if sum(c.isalpha() for c in token) > 1:
                return name[:pos] + name[pos + 1:]


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------


@dataclass
class SyntheticCorpus:
    records: list = field(default_factory=list)
    texts: list = field(default_factory=list)
    truth: list = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def write_store(self, root) -> CorpusStore:
        """Write the documents as an already-converted corpus."""
        store = CorpusStore(root)
        with store.batch():
            for rec, text in zip(self.records, self.texts):
                doc_id = store.add_record(rec)
                store.mark_fetched(doc_id)
                store.attach_text(doc_id, text)
        return store

    def write_site(self, directory) -> Path:
        """Write an index page and raw documents, linked with ``file:`` URLs.

        Returns the index page path; crawling it reproduces the corpus.
        """
        directory = Path(directory).resolve()
        docs = directory / "docs"
        docs.mkdir(parents=True, exist_ok=True)
        rows = []
        for rec, text in zip(self.records, self.texts):
            name = rec.link.rsplit("/", 1)[-1]
            path = docs / name
            path.write_bytes(text.encode("utf-8"))
            rows.append(
                "<tr><td><a href=\"{}\">{}</a></td><td>{}</td><td>{}</td></tr>".format(
                    html.escape(path.as_uri()), html.escape(rec.title),
                    html.escape(rec.date or ""), html.escape(rec.description or ""))
            )
        page = ("<html><body><table id=\"judgments\">\n"
                "<tr><th>Title</th><th>Date</th><th>Description</th></tr>\n"
                + "\n".join(rows) + "\n</table></body></html>\n")
        index = directory / "index.html"
        index.write_text(page, encoding="utf-8")
        return index

    def write_truth(self, path) -> Path:
        return write_truth(self.truth, path)


def _type_designator(rng, t: CaseType, noise: NoiseProfile, lookup: LookupTable) -> str:
    long_form = _LONG_FORMS.get(t, t.label)
    if lookup.entries.get(normalize_key(long_form)) != {t}:
        raise ValueError(f"lookup table has no unambiguous entry for {long_form!r}")
    if noise.title_variant_rate and rng.random() < noise.title_variant_rate:
        variants = [k for k in lookup.designators(t) if k != normalize_key(long_form)]
        if variants:
            return _render_designator(variants[int(rng.integers(len(variants)))])
    return long_form


def generate_document(seed: int, index: int, noise: NoiseProfile, roster: JudgeRoster,
                      lookup: LookupTable, link_base: str = DEFAULT_LINK_BASE):
    """One document: ``(record, text, truth)``, a pure function of its arguments."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))
    name = f"judgment-{index:05d}"
    num = lambda: int(rng.integers(1, 2000))  # noqa: E731

    # release date
    year = _weighted(rng, list(_YEAR_WEIGHTS.items()))
    first = dt.date(year, 4, 1) if year == 2001 else dt.date(year, 1, 1)
    last = dt.date(year, 8, 31) if year == 2014 else dt.date(year, 12, 31)
    date = first + dt.timedelta(days=int(rng.integers((last - first).days + 1)))
    raw_date = _render_date(rng, date)
    if noise.date_missing_rate and rng.random() < noise.date_missing_rate:
        raw_date, date = None, None

    # title and types
    primary = _weighted(rng, _TYPE_WEIGHTS)
    types = {primary}
    suo = primary is CaseType.SUO_MOTO
    if primary is CaseType.UNKNOWN:
        title = f"Diary No. {num()} of {year}"
    else:
        title = f"{_type_designator(rng, primary, noise, lookup)} No. {num()} of {year}"
        if rng.random() < 0.2:
            cma = _type_designator(rng, CaseType.CIVIL_MISC_APPLICATION, noise, lookup)
            title = f"{cma} No. {num()} of {year} in {title}"
            types.add(CaseType.CIVIL_MISC_APPLICATION)
    topic = _TOPICS[int(rng.integers(len(_TOPICS)))]
    if primary is CaseType.HUMAN_RIGHTS and rng.random() < 0.25:
        title += f" (Suo Motu action regarding {topic})"
        suo = True
    description = f"Matter regarding {topic}" if rng.random() < 0.7 else None

    # jurisdiction
    jur = _weighted(rng, _JURISDICTION_WEIGHTS)
    jur_line = None
    if jur:
        joiner = "/" if rng.random() < 0.7 else " and "
        jur_line = f"({joiner.join(jur)} Jurisdiction)"

    # bench
    size = _weighted(rng, _BENCH_SIZE_WEIGHTS)
    bench_ids: tuple = ()
    bench_lines: list[str] = []
    corrupted = []
    if size is not None:
        size = min(size, len(roster))
        judges = list(roster)
        chosen = set(int(i) for i in rng.choice(len(judges), size=size, replace=False))
        if size < len(judges) and rng.random() < 0.5 and 0 not in chosen:
            chosen.discard(max(chosen))
            chosen.add(0)
        for i in sorted(chosen):
            judge = judges[i]
            mention = judge.name.upper()
            if noise.judge_typo_rate and rng.random() < noise.judge_typo_rate:
                mention = _corrupt(rng, mention)
                corrupted.append((mention, judge.id))
            line = f"MR. JUSTICE {mention}"
            if i == 0:
                line += ", HCJ"
            bench_lines.append(line)
        bench_ids = tuple(judges[i].id for i in sorted(chosen))

    # citations and references
    articles: set = set()
    pld: set = set()
    scmr: set = set()

    def article():
        ref = ArticleRef.parse(_weighted(rng, [(a, w) for a, w in _ARTICLE_WEIGHTS]))
        articles.add(ref)
        text = str(ref)
        if ref.clause is not None and rng.random() < 0.5:
            text = text.replace(" (", "(")
        return text

    def pld_cite():
        if rng.random() < 0.4:
            c = PldCitation.parse(_PLD_FAMOUS[int(rng.integers(len(_PLD_FAMOUS)))])
        else:
            c = PldCitation(int(rng.integers(1950, 2015)), _weighted(rng, _COURT_WEIGHTS),
                            int(rng.integers(1, 1500)))
        pld.add(c)
        sep = "  " if rng.random() < 0.1 else " "
        return sep.join(["PLD", str(c.year), c.court, str(c.number)])

    def scmr_cite():
        if rng.random() < 0.4:
            c = ScmrCitation.parse(_SCMR_FAMOUS[int(rng.integers(len(_SCMR_FAMOUS)))])
        else:
            c = ScmrCitation(int(rng.integers(1980, 2015)), int(rng.integers(1, 3000)))
        scmr.add(c)
        return f"{c.year} SCMR {c.number}"

    sentence_makers = [
        lambda: f"Under Article {article()} of the Constitution, the petitioners seek relief.",
        lambda: f"Reliance is placed on {pld_cite()} and {scmr_cite()}.",
        lambda: f"The learned counsel referred to Articles {article()}, {article()} and "
                f"{article()} of the Constitution.",
        lambda: f"This Court in {pld_cite()} held that the matter was of public importance.",
        lambda: f"See also {scmr_cite()}.",
        lambda: f"Articles {article()} and {article()} are attracted in the circumstances.",
        lambda: _FILLER[int(rng.integers(len(_FILLER)))],
        lambda: _FILLER[int(rng.integers(len(_FILLER)))],
    ]

    case_line = title.split(" (Suo Motu")[0]
    pre = ["IN THE SUPREME COURT OF PAKISTAN"]
    if jur_line:
        pre.append(jur_line)
    pre.append("")
    if bench_lines:
        pre.append("PRESENT:")
        pre.extend(bench_lines)
        pre.append("")
    pre.append(case_line)
    if "Original" in jur and rng.random() < 0.5:
        pre.append(f"(Under Article {article()} of the Constitution)")
    parties = rng.choice(len(_PARTIES), size=2, replace=False)
    pre += ["", f"{_PARTIES[parties[0]]} ... Petitioner(s)", "VERSUS",
            f"{_PARTIES[parties[1]]} ... Respondent(s)", "",
            f"For the petitioner: {_COUNSEL[int(rng.integers(len(_COUNSEL)))]}",
            f"Date of hearing: {raw_date or 'not recorded'}", ""]
    body = [_HEADINGS[int(rng.integers(len(_HEADINGS)))], ""]
    for _ in range(int(rng.integers(2, 7))):
        count = int(rng.integers(2, 6))
        para = [sentence_makers[int(rng.integers(len(sentence_makers)))]() for _ in range(count)]
        body.append(" ".join(para))
        body.append("")
    text = "\n".join(pre + body)

    record = MetadataRecord(f"{link_base}{name}.pdf", title, raw_date, description)
    truth = TruthEntry(
        id=name, release_date=date, types=frozenset(types), suo_moto=suo,
        jurisdiction=Jurisdiction(frozenset(jur)), bench=bench_ids,
        articles=frozenset(articles), pld=frozenset(pld), scmr=frozenset(scmr),
        mentions=len(bench_lines), corrupted_mentions=tuple(corrupted),
    )
    return record, text, truth


def generate_corpus(seed: int, n: int, noise: NoiseProfile = ZERO_NOISE,
                    roster: JudgeRoster | None = None, lookup: LookupTable | None = None,
                    link_base: str = DEFAULT_LINK_BASE) -> SyntheticCorpus:
    if n < 0:
        raise ValueError("n must be non-negative")
    if not isinstance(noise, NoiseProfile):
        raise InvalidProfile("noise must be a NoiseProfile")
    roster = roster or JudgeRoster.default()
    lookup = lookup or LookupTable.default()
    corpus = SyntheticCorpus()
    for i in range(n):
        rec, text, truth = generate_document(seed, i, noise, roster, lookup, link_base)
        corpus.records.append(rec)
        corpus.texts.append(text)
        corpus.truth.append(truth)
    return corpus


# ---------------------------------------------------------------------------
# Oracle
# ---------------------------------------------------------------------------


def _rank(counts: dict, render) -> list:
    keyed = [(render(k), n) for k, n in counts.items()]
    keyed.sort(key=lambda kn: (-kn[1], kn[0].casefold(), kn[0]))
    return keyed


def oracle_data(truth, roster: JudgeRoster, top_k: int = 10, split_year: int = 2009,
                full_bench_size: int = 17) -> ReportData:
    """Every report value, recounted directly from the annotations."""
    years: dict = {}
    suo_years: dict = {}
    undated = suo_undated = 0
    types: dict = {}
    jurisdictions: dict = {}
    judges: dict = {}
    articles: dict = {}
    plds: dict = {}
    scmrs: dict = {}
    bench_sizes = []
    for t in truth:
        if t.year is None:
            undated += 1
            suo_undated += t.suo_moto
        else:
            years[t.year] = years.get(t.year, 0) + 1
            if t.suo_moto:
                suo_years[t.year] = suo_years.get(t.year, 0) + 1
        for ct in t.types:
            types[ct] = types.get(ct, 0) + 1
        label = t.jurisdiction.label
        jurisdictions[label] = jurisdictions.get(label, 0) + 1
        for j in t.bench:
            judges[j] = judges.get(j, 0) + 1
        if t.bench:
            bench_sizes.append(len(t.bench))
        for a in t.articles:
            articles[a] = articles.get(a, 0) + 1
        for c in t.pld:
            plds[c] = plds.get(c, 0) + 1
        for c in t.scmr:
            scmrs[c] = scmrs.get(c, 0) + 1

    span = range(min(years), max(years) + 1) if years else range(0)
    pre = [y for y in years if y < split_year]
    post = [y for y in years if y >= split_year]
    judge_rows = sorted(judges.items(), key=lambda kv: (-kv[1], kv[0].casefold(), kv[0]))[:top_k]
    return ReportData(
        years=tuple((y, years.get(y, 0)) for y in span),
        undated=undated,
        suo_years=tuple((y, suo_years.get(y, 0)) for y in span),
        suo_undated=suo_undated,
        types=_rank(types, lambda ct: ct.label),
        jurisdictions=_rank(jurisdictions, str),
        judges=[(roster.display_name(j), n) for j, n in judge_rows],
        articles=_rank(articles, str)[:top_k],
        pld=_rank(plds, str)[:top_k],
        scmr=_rank(scmrs, str)[:top_k],
        bench_mean=Fraction(sum(bench_sizes), len(bench_sizes)) if bench_sizes else None,
        bench_max=max(bench_sizes) if bench_sizes else None,
        bench_count=len(bench_sizes),
        full_bench_count=sum(1 for s in bench_sizes if s == full_bench_size),
        full_bench_size=full_bench_size,
        split_year=split_year,
        share=((sum(suo_years.get(y, 0) for y in pre), sum(years[y] for y in pre)),
               (sum(suo_years.get(y, 0) for y in post), sum(years[y] for y in post))),
        unique_pld=len(plds), unique_scmr=len(scmrs), unique_articles=len(articles),
    )


def oracle_stats(truth, roster: JudgeRoster | None = None, top_k: int = 10,
                 split_year: int = 2009, full_bench_size: int = 17) -> dict[str, bytes]:
    """The full report bundle computed from annotations alone."""
    roster = roster or JudgeRoster.default()
    return render_bundle(oracle_data(truth, roster, top_k, split_year, full_bench_size))

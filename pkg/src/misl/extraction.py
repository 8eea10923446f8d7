"""Fact extraction from converted judgment text.

Each extractor is a pure function of the text and an immutable
:class:`Grammar`. Jurisdiction and bench come from the preamble; Article
references and law-report citations are matched anywhere in the text.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path

from .corpus_store import Document, Status
from .errors import NotAnalyzable
from .normalization import (
    CaseType,
    JudgeRoster,
    LookupTable,
    Ambiguity,
    canonicalize_judge,
    normalize_judge_name,
    normalize_key,
    resolve_case_types,
)

JURISDICTIONS = ("Original", "Appellate", "Review", "Advisory", "Contempt")
MIN_YEAR, MAX_YEAR = 1947, 2100


@dataclass(frozen=True)
class Grammar:
    article_keywords: tuple = ("Article", "Articles")
    article_max: int = 280
    pld_keyword: str = "PLD"
    scmr_keyword: str = "SCMR"
    court_codes: tuple = ("SC", "FC", "Lah", "Kar", "Pesh", "Quetta", "AJK")
    court_aliases: dict = field(default_factory=dict, hash=False)
    honorifics: tuple = ("Mr.", "Mrs.", "Ms.", "Justice", "Chief Justice")
    presence_marker: str = "PRESENT"
    heading_tokens: tuple = ("JUDGMENT", "ORDER", "O R D E R")
    preamble_max_lines: int = 120
    suo_moto_designators: tuple = ("suo moto", "suo motu", "s.m.c")

    @classmethod
    def from_json(cls, source) -> "Grammar":
        if isinstance(source, (str, Path)):
            data = json.loads(Path(source).read_text(encoding="utf-8"))
        else:
            data = json.loads(source.read_text(encoding="utf-8"))
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in data.items()})

    @classmethod
    def default(cls) -> "Grammar":
        return cls.from_json(resources.files("misl.data").joinpath("grammar.json"))

    # compiled patterns; cached per instance (frozen dataclasses keep __dict__)
    @cached_property
    def heading_re(self):
        alts = "|".join(re.escape(h) for h in sorted(self.heading_tokens, key=len, reverse=True))
        return re.compile(rf"\s*(?:{alts})\s*[:.]?\s*")

    @cached_property
    def honorific_re(self):
        alts = "|".join(
            r"\s+".join(re.escape(w.rstrip(".")) for w in h.split()) + r"\.?"
            for h in sorted(self.honorifics, key=len, reverse=True)
        )
        return re.compile(rf"(?:{alts})(?![A-Za-z])", re.IGNORECASE)

    @cached_property
    def presence_re(self):
        return re.compile(rf"\s*{re.escape(self.presence_marker)}\s*:?\s*(.*?)\s*",
                          re.IGNORECASE)

    @cached_property
    def article_re(self):
        kw = "|".join(re.escape(k) for k in sorted(self.article_keywords, key=len, reverse=True))
        ref = r"\d{1,3}[A-Za-z]?(?![A-Za-z\d])(?:\s?\(\d{1,3}\))?"
        sep = r"(?:\s*,\s*(?:and\s+)?|\s+and\s+|\s*&\s*)"
        return re.compile(rf"(?<![A-Za-z])(?:{kw})(?![A-Za-z])\s*({ref}(?:{sep}{ref})*)",
                          re.IGNORECASE)

    @cached_property
    def pld_re(self):
        return re.compile(rf"(?<![\w]){re.escape(self.pld_keyword)}\s+(\d{{4}})\s+"
                          rf"([A-Za-z]{{1,8}}\.?)\s+(\d{{1,6}})(?![\w])")

    @cached_property
    def scmr_re(self):
        return re.compile(rf"(?<![\w])(\d{{4}})\s+{re.escape(self.scmr_keyword)}\s+"
                          rf"(\d{{1,6}})(?![\w])")

    @cached_property
    def courts(self) -> dict:
        table = {k.casefold(): v for k, v in self.court_aliases.items()}
        table.update({c.casefold(): c for c in self.court_codes})
        table.update({c.casefold() + ".": c for c in self.court_codes})
        return table

    @cached_property
    def suo_moto_re(self):
        alts = "|".join(re.escape(normalize_key(d)) for d in self.suo_moto_designators)
        return re.compile(rf"(?:^| )(?:{alts})(?= |$)")


DEFAULT_GRAMMAR = Grammar.default()


# ---------------------------------------------------------------------------
# Value types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Jurisdiction:
    members: frozenset = frozenset()

    def __post_init__(self):
        unknown = set(self.members) - set(JURISDICTIONS)
        if unknown:
            raise ValueError(f"unknown jurisdiction {sorted(unknown)}")
        object.__setattr__(self, "members", frozenset(self.members))

    @property
    def label(self) -> str:
        if not self.members:
            return "Unknown"
        return "/".join(j for j in JURISDICTIONS if j in self.members)

    @classmethod
    def parse(cls, label: str) -> "Jurisdiction":
        if label == "Unknown":
            return cls()
        return cls(frozenset(label.split("/")))

    def __str__(self):
        return self.label


_ARTICLE_TEXT_RE = re.compile(r"(\d+)([A-Z]?)(?: \((\d+)\))?")


@dataclass(frozen=True)
class ArticleRef:
    article: int
    suffix: str = ""
    clause: int | None = None

    def __post_init__(self):
        if self.article < 1:
            raise ValueError("article number must be positive")
        if self.suffix and not (len(self.suffix) == 1 and self.suffix.isupper()):
            raise ValueError(f"bad suffix {self.suffix!r}")
        if self.clause is not None and self.clause < 1:
            raise ValueError("clause must be positive")

    def __str__(self):
        s = f"{self.article}{self.suffix}"
        return s if self.clause is None else f"{s} ({self.clause})"

    @classmethod
    def parse(cls, text: str) -> "ArticleRef":
        m = _ARTICLE_TEXT_RE.fullmatch(text)
        if not m:
            raise ValueError(f"not an article reference: {text!r}")
        return cls(int(m.group(1)), m.group(2), int(m.group(3)) if m.group(3) else None)


@dataclass(frozen=True)
class PldCitation:
    year: int
    court: str
    number: int
    known_court: bool = field(default=True, compare=False, repr=False)

    def __str__(self):
        return f"PLD {self.year} {self.court} {self.number}"

    @classmethod
    def parse(cls, text: str, grammar: Grammar = DEFAULT_GRAMMAR) -> "PldCitation":
        found = extract_pld(text, grammar)
        if len(found) != 1:
            raise ValueError(f"not a PLD citation: {text!r}")
        return found[0]


@dataclass(frozen=True)
class ScmrCitation:
    year: int
    number: int

    def __str__(self):
        return f"{self.year} SCMR {self.number}"

    @classmethod
    def parse(cls, text: str, grammar: Grammar = DEFAULT_GRAMMAR) -> "ScmrCitation":
        found = extract_scmr(text, grammar)
        if len(found) != 1:
            raise ValueError(f"not an SCMR citation: {text!r}")
        return found[0]


# ---------------------------------------------------------------------------
# Extractors
# ---------------------------------------------------------------------------


def preamble(text: str, grammar: Grammar = DEFAULT_GRAMMAR) -> list[str]:
    """Lines before the first heading line, capped at ``preamble_max_lines``."""
    lines = text.splitlines()[: grammar.preamble_max_lines]
    for i, line in enumerate(lines):
        if grammar.heading_re.fullmatch(line):
            return lines[:i]
    return lines


_JUR_WORD = "|".join(JURISDICTIONS)
_JUR_RE = re.compile(
    rf"(?<![A-Za-z])((?:{_JUR_WORD})(?:\s*(?:/|,|&|\band\b)\s*(?:{_JUR_WORD}))*)\s+Jurisdiction\b",
    re.IGNORECASE,
)
_JUR_SPLIT_RE = re.compile(_JUR_WORD, re.IGNORECASE)


def extract_jurisdiction(text: str, grammar: Grammar = DEFAULT_GRAMMAR) -> Jurisdiction:
    found = set()
    for line in preamble(text, grammar):
        for m in _JUR_RE.finditer(line):
            found.update(w.capitalize() for w in _JUR_SPLIT_RE.findall(m.group(1)))
    return Jurisdiction(frozenset(found))


def extract_bench(text: str, grammar: Grammar = DEFAULT_GRAMMAR) -> list[str]:
    """Raw judge names listed in the preamble's PRESENT block, in order.

    The block is a line holding the presence marker, followed by one judge
    per line, each line starting with an honorific. Blank lines inside the
    block are skipped; the first other line ends it.
    """
    lines = preamble(text, grammar)
    names: list[str] = []
    for i, line in enumerate(lines):
        m = grammar.presence_re.fullmatch(line)
        if not m:
            continue
        rest = m.group(1)
        if rest and not grammar.honorific_re.match(rest):
            continue
        candidates = ([rest] if rest else []) + lines[i + 1:]
        for cand in candidates:
            cand = " ".join(cand.split())
            if not cand:
                continue
            if not grammar.honorific_re.match(cand):
                break
            names.append(cand)
        break
    seen = set()
    out = []
    for name in names:
        key = normalize_judge_name(name)
        if key and key not in seen:
            seen.add(key)
            out.append(name)
    return out


_REF_RE = re.compile(r"(\d{1,3})([A-Za-z]?)(?:\s?\((\d{1,3})\))?")


def extract_article_refs(text: str, grammar: Grammar = DEFAULT_GRAMMAR) -> list[ArticleRef]:
    """Every Article reference, with multiplicity, in text order."""
    out = []
    for m in grammar.article_re.finditer(text):
        for r in _REF_RE.finditer(m.group(1)):
            number = int(r.group(1))
            clause = int(r.group(3)) if r.group(3) else None
            if not 1 <= number <= grammar.article_max or clause == 0:
                continue
            out.append(ArticleRef(number, r.group(2).upper(), clause))
    return out


def extract_pld(text: str, grammar: Grammar = DEFAULT_GRAMMAR) -> list[PldCitation]:
    out = []
    for m in grammar.pld_re.finditer(text):
        year, court, number = int(m.group(1)), m.group(2), int(m.group(3))
        if not MIN_YEAR <= year <= MAX_YEAR or number < 1:
            continue
        canonical = grammar.courts.get(court.casefold())
        out.append(PldCitation(year, canonical or court.rstrip("."), number, canonical is not None))
    return out


def extract_scmr(text: str, grammar: Grammar = DEFAULT_GRAMMAR) -> list[ScmrCitation]:
    out = []
    for m in grammar.scmr_re.finditer(text):
        year, number = int(m.group(1)), int(m.group(2))
        if MIN_YEAR <= year <= MAX_YEAR and number >= 1:
            out.append(ScmrCitation(year, number))
    return out


def is_suo_moto(types, title: str, grammar: Grammar = DEFAULT_GRAMMAR) -> bool:
    if CaseType.SUO_MOTO in types:
        return True
    return bool(grammar.suo_moto_re.search(normalize_key(title or "")))


# ---------------------------------------------------------------------------
# Per-document facts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DocFacts:
    id: str
    year: int | None = None
    types: frozenset = frozenset()
    suo_moto: bool = False
    jurisdiction: Jurisdiction = Jurisdiction()
    bench: tuple = ()
    articles: frozenset = frozenset()
    article_occurrences: tuple = ()
    pld: frozenset = frozenset()
    pld_occurrences: tuple = ()
    scmr: frozenset = frozenset()
    scmr_occurrences: tuple = ()
    ambiguities: tuple = ()
    text_analyzed: bool = True

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "year": self.year,
            "types": sorted(t.value for t in self.types),
            "suo_moto": self.suo_moto,
            "jurisdiction": self.jurisdiction.label,
            "bench": list(self.bench),
            "articles": sorted(str(a) for a in self.articles),
            "article_occurrences": [str(a) for a in self.article_occurrences],
            "pld": sorted(str(c) for c in self.pld),
            "pld_occurrences": [str(c) for c in self.pld_occurrences],
            "scmr": sorted(str(c) for c in self.scmr),
            "scmr_occurrences": [str(c) for c in self.scmr_occurrences],
            "ambiguities": [
                {"text": a.text, "candidates": sorted(c.value for c in a.candidates)}
                for a in self.ambiguities
            ],
            "text_analyzed": self.text_analyzed,
        }

    @classmethod
    def from_json(cls, obj: dict, grammar: Grammar = DEFAULT_GRAMMAR) -> "DocFacts":
        return cls(
            id=obj["id"],
            year=obj["year"],
            types=frozenset(CaseType(t) for t in obj["types"]),
            suo_moto=obj["suo_moto"],
            jurisdiction=Jurisdiction.parse(obj["jurisdiction"]),
            bench=tuple(obj["bench"]),
            articles=frozenset(ArticleRef.parse(a) for a in obj["articles"]),
            article_occurrences=tuple(ArticleRef.parse(a) for a in obj["article_occurrences"]),
            pld=frozenset(PldCitation.parse(c, grammar) for c in obj["pld"]),
            pld_occurrences=tuple(PldCitation.parse(c, grammar) for c in obj["pld_occurrences"]),
            scmr=frozenset(ScmrCitation.parse(c, grammar) for c in obj["scmr"]),
            scmr_occurrences=tuple(ScmrCitation.parse(c, grammar) for c in obj["scmr_occurrences"]),
            ambiguities=tuple(
                Ambiguity(a["text"], frozenset(CaseType(c) for c in a["candidates"]))
                for a in obj["ambiguities"]
            ),
            text_analyzed=obj["text_analyzed"],
        )


def canonical_bench(raw_names, roster: JudgeRoster) -> tuple:
    keys = []
    for name in raw_names:
        key = canonicalize_judge(name, roster).key
        if key not in keys:
            keys.append(key)
    return tuple(keys)


def analyze_document(doc: Document, lookup: LookupTable, roster: JudgeRoster,
                     grammar: Grammar = DEFAULT_GRAMMAR,
                     allow_metadata_only: bool = False) -> DocFacts:
    """All facts for one document.

    Unconverted documents are rejected unless ``allow_metadata_only`` is
    set, in which case only the title- and date-derived fields are filled.
    """
    date = doc.meta.release_date
    types, ambiguities = resolve_case_types(doc.meta.title, lookup)
    base = dict(
        id=doc.id,
        year=date.year if date else None,
        types=types,
        suo_moto=is_suo_moto(types, doc.meta.title, grammar),
        ambiguities=tuple(ambiguities),
    )
    if doc.status is not Status.CONVERTED or doc.text is None:
        if not allow_metadata_only:
            raise NotAnalyzable(f"{doc.id}: status {doc.status.value}, no text")
        return DocFacts(**base, text_analyzed=False)
    text = doc.text
    articles = extract_article_refs(text, grammar)
    pld = extract_pld(text, grammar)
    scmr = extract_scmr(text, grammar)
    return DocFacts(
        **base,
        jurisdiction=extract_jurisdiction(text, grammar),
        bench=canonical_bench(extract_bench(text, grammar), roster),
        articles=frozenset(articles),
        article_occurrences=tuple(articles),
        pld=frozenset(pld),
        pld_occurrences=tuple(pld),
        scmr=frozenset(scmr),
        scmr_occurrences=tuple(scmr),
    )

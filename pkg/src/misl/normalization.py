"""Canonicalisation of noisy index terms.

Three kinds of noise are handled here: case-type designators in titles
(abbreviated, misspelt, sometimes ambiguous), judge names in bench lists
(misspelt or abbreviated) and release dates (missing or in mixed formats).
The domain knowledge lives in editable CSV files under ``misl/data``; the
code only applies it.
"""

from __future__ import annotations

import csv
import dataclasses
import datetime as dt
import io
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .errors import InvalidLookup, InvalidOverride, InvalidRoster

EARLIEST_DATE = dt.date(1947, 1, 1)
LATEST_DATE = dt.date(2100, 12, 31)


class CaseType(str, Enum):
    CONSTITUTION = "Constitution"
    CIVIL_MISC_APPLICATION = "CivilMiscApplication"
    SUO_MOTO = "SuoMoto"
    HUMAN_RIGHTS = "HumanRights"
    CIVIL = "Civil"
    CIVIL_APPEAL = "CivilAppeal"
    CIVIL_REVIEW = "CivilReview"
    CRIMINAL = "Criminal"
    CRIMINAL_APPEAL = "CriminalAppeal"
    CRIMINAL_MISC_APPLICATION = "CriminalMiscApplication"
    REFERENCE = "Reference"
    JAIL_PETITION = "JailPetition"
    CIVIL_PETITION_LEAVE_TO_APPEAL = "CivilPetitionLeaveToAppeal"
    UNKNOWN = "Unknown"

    @property
    def label(self) -> str:
        """Display name, as used in the case-type table."""
        return _LABELS[self]

    def __str__(self):
        return self.value


_LABELS = {
    CaseType.CONSTITUTION: "Constitution",
    CaseType.CIVIL_MISC_APPLICATION: "Civil Miscellaneous Application",
    CaseType.SUO_MOTO: "Suo Moto Case",
    CaseType.HUMAN_RIGHTS: "Human Rights Case",
    CaseType.CIVIL: "Civil",
    CaseType.CIVIL_APPEAL: "Civil Appeal",
    CaseType.CIVIL_REVIEW: "Civil Review",
    CaseType.CRIMINAL: "Criminal",
    CaseType.CRIMINAL_APPEAL: "Criminal Appeal",
    CaseType.CRIMINAL_MISC_APPLICATION: "Criminal Miscellaneous Application",
    CaseType.REFERENCE: "Reference",
    CaseType.JAIL_PETITION: "Jail Petition",
    CaseType.CIVIL_PETITION_LEAVE_TO_APPEAL: "Civil Petition for Leave to Appeal",
    CaseType.UNKNOWN: "Unknown",
}


# ---------------------------------------------------------------------------
# Case types
# ---------------------------------------------------------------------------

# A token is a run of letters (with embedded '.' or "'") or a run of digits.
_TOKEN_RE = re.compile(r"(?:[^\W\d_]|[.'])+|\d+")
_DROP_RE = re.compile(r"[.']")


def _norm_token(tok: str) -> str:
    return _DROP_RE.sub("", tok).lower()


def _tokens(text: str) -> list[tuple[str, int, int]]:
    out = []
    for m in _TOKEN_RE.finditer(text):
        norm = _norm_token(m.group())
        if norm:
            out.append((norm, m.start(), m.end()))
    return out


def normalize_key(text: str) -> str:
    """Lower-case ``text``, drop '.' and "'", and collapse everything else
    that is not a letter or digit into single spaces.

    >>> normalize_key("Const. P.")
    'const p'
    >>> normalize_key("C.M.A.12/2011")
    'cma 12 2011'
    """
    return " ".join(tok for tok, _, _ in _tokens(text))


@dataclass(frozen=True)
class Ambiguity:
    text: str
    candidates: frozenset


@dataclass(frozen=True)
class LookupTable:
    """Abbreviation table: normalized designator -> candidate case types."""

    entries: Mapping[str, frozenset]
    max_words: int = field(init=False, compare=False)

    def __post_init__(self):
        clean = {}
        for key, cands in self.entries.items():
            nkey = normalize_key(key)
            if not nkey:
                raise InvalidLookup(f"empty abbreviation {key!r}")
            cands = frozenset(CaseType(c) for c in cands)
            if not cands:
                raise InvalidLookup(f"{key!r} maps to no case type")
            if CaseType.UNKNOWN in cands:
                raise InvalidLookup(f"{key!r} maps to Unknown")
            if nkey in clean and clean[nkey] != cands:
                raise InvalidLookup(f"conflicting entries for {nkey!r}")
            clean[nkey] = cands
        object.__setattr__(self, "entries", clean)
        object.__setattr__(
            self, "max_words", max((k.count(" ") + 1 for k in clean), default=0)
        )

    @classmethod
    def from_csv(cls, source) -> "LookupTable":
        """Load ``abbreviation,candidates`` rows; candidates are '|'-separated."""
        entries: dict[str, frozenset] = {}
        for i, row in enumerate(_read_data_csv(source, ("abbreviation", "candidates")), 2):
            try:
                cands = frozenset(CaseType(c.strip()) for c in row[1].split("|") if c.strip())
            except ValueError as exc:
                raise InvalidLookup(f"line {i}: {exc}") from None
            key = normalize_key(row[0])
            if key in entries and entries[key] != cands:
                raise InvalidLookup(f"line {i}: conflicting entry for {key!r}")
            entries[key] = cands
        return cls(entries)

    @classmethod
    def default(cls) -> "LookupTable":
        return cls.from_csv(resources.files("misl.data").joinpath("case_types.csv"))

    def designators(self, case_type: CaseType) -> list[str]:
        """Unambiguous keys that resolve to exactly ``case_type``."""
        return sorted(k for k, v in self.entries.items() if v == {case_type})


def resolve_case_types(title: str, table: LookupTable) -> tuple[frozenset, list[Ambiguity]]:
    """Resolve the type designators in a case title.

    Designators are found by greedy longest match of table keys over the
    title's tokens. Ambiguous designators are reported, never guessed.
    ``{Unknown}`` is returned only when nothing at all matched.
    """
    toks = _tokens(title)
    resolved: set = set()
    ambiguities: list[Ambiguity] = []
    i = 0
    while i < len(toks):
        hit = None
        for width in range(min(table.max_words, len(toks) - i), 0, -1):
            key = " ".join(t[0] for t in toks[i:i + width])
            if key in table.entries:
                hit = (width, table.entries[key])
                break
        if hit is None:
            i += 1
            continue
        width, cands = hit
        if len(cands) == 1:
            resolved |= cands
        else:
            span = title[toks[i][1]:toks[i + width - 1][2]]
            ambiguities.append(Ambiguity(span, cands))
        i += width
    if not resolved and not ambiguities:
        resolved.add(CaseType.UNKNOWN)
    return frozenset(resolved), ambiguities


# ---------------------------------------------------------------------------
# Judges
# ---------------------------------------------------------------------------

MATCH_THRESHOLD = 2
MIN_ROSTER_DISTANCE = 5

_LEADING_HONORIFICS = ("chief justice", "justice", "mrs", "mr", "ms")
_TRAILING_TITLE_RE = re.compile(r",\s*(?:h?cj|acj)\.?\s*$", re.IGNORECASE)


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance (insert, delete, substitute)."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def normalize_judge_name(raw: str) -> str:
    """Strip honorifics and trailing office titles, collapse whitespace, case-fold.

    >>> normalize_judge_name("MR. JUSTICE Iftikhar  Muhammad Chaudhry, HCJ")
    'iftikhar muhammad chaudhry'
    """
    text = _TRAILING_TITLE_RE.sub("", raw)
    text = " ".join(text.replace(".", " ").replace(",", " ").split()).casefold()
    changed = True
    while changed:
        changed = False
        for hon in _LEADING_HONORIFICS:
            if text == hon:
                return ""
            if text.startswith(hon + " "):
                text = text[len(hon) + 1:]
                changed = True
    return text


@dataclass(frozen=True)
class Judge:
    id: str
    name: str
    aliases: tuple = ()


@dataclass(frozen=True)
class Matched:
    judge_id: str

    @property
    def key(self) -> str:
        return self.judge_id


@dataclass(frozen=True)
class New:
    name: str

    @property
    def key(self) -> str:
        return NEW_JUDGE_PREFIX + self.name


NEW_JUDGE_PREFIX = "new:"


class JudgeRoster:
    """Known judges, validated so that fuzzy matching cannot merge two people.

    Every name form (canonical or alias) of one judge must be more than
    four edits away from every name form of any other judge. Combined with
    the match threshold of two, this guarantees that any single-character
    corruption still resolves to the right judge.
    """

    def __init__(self, judges: Iterable[Judge]):
        self.judges = tuple(judges)
        self._forms: list[tuple[str, str]] = []
        self._exact: dict[str, str] = {}
        self._validate()

    def _validate(self):
        ids = [j.id for j in self.judges]
        if len(set(ids)) != len(ids):
            raise InvalidRoster("duplicate judge ids")
        canon = [normalize_judge_name(j.name) for j in self.judges]
        if len(set(canon)) != len(canon):
            raise InvalidRoster("canonical names are not pairwise distinct")
        for judge in self.judges:
            for name in (judge.name, *judge.aliases):
                norm = normalize_judge_name(name)
                if not norm:
                    raise InvalidRoster(f"{judge.id}: empty name form {name!r}")
                self._forms.append((norm, judge.id))
                self._exact.setdefault(norm, judge.id)
        for i, (a, ida) in enumerate(self._forms):
            for b, idb in self._forms[i + 1:]:
                if ida != idb and levenshtein(a, b) < MIN_ROSTER_DISTANCE:
                    raise InvalidRoster(
                        f"{a!r} ({ida}) and {b!r} ({idb}) are fewer than "
                        f"{MIN_ROSTER_DISTANCE} edits apart"
                    )

    def __len__(self):
        return len(self.judges)

    def __iter__(self):
        return iter(self.judges)

    def get(self, judge_id: str) -> Judge:
        for j in self.judges:
            if j.id == judge_id:
                return j
        raise KeyError(judge_id)

    def display_name(self, key: str) -> str:
        """Human-readable name for a bench key (roster id or ``new:`` key)."""
        if key.startswith(NEW_JUDGE_PREFIX):
            return "Justice " + key[len(NEW_JUDGE_PREFIX):].title()
        return "Justice " + self.get(key).name

    @classmethod
    def from_csv(cls, source) -> "JudgeRoster":
        judges = []
        for row in _read_data_csv(source, ("id", "canonical_name", "aliases")):
            aliases = tuple(a.strip() for a in row[2].split("|") if a.strip())
            judges.append(Judge(row[0].strip(), row[1].strip(), aliases))
        return cls(judges)

    @classmethod
    def default(cls) -> "JudgeRoster":
        return cls.from_csv(resources.files("misl.data").joinpath("judges.csv"))


def canonicalize_judge(raw: str, roster: JudgeRoster) -> Matched | New:
    norm = normalize_judge_name(raw)
    hit = roster._exact.get(norm)
    if hit is not None:
        return Matched(hit)
    best_id, best = None, MATCH_THRESHOLD + 1
    for form, judge_id in roster._forms:
        if abs(len(form) - len(norm)) >= best:
            continue
        d = levenshtein(norm, form)
        if d < best:
            best_id, best = judge_id, d
    if best_id is not None:
        return Matched(best_id)
    return New(norm)


# ---------------------------------------------------------------------------
# Dates
# ---------------------------------------------------------------------------

_MONTHS = {
    name: i
    for i, names in enumerate(
        [
            ("january", "jan"), ("february", "feb"), ("march", "mar"),
            ("april", "apr"), ("may",), ("june", "jun"), ("july", "jul"),
            ("august", "aug"), ("september", "sep", "sept"),
            ("october", "oct"), ("november", "nov"), ("december", "dec"),
        ],
        1,
    )
    for name in names
}
_MONTH = r"([A-Za-z]+)\.?"
_ORD = r"(?:st|nd|rd|th)?"
_DATE_PATTERNS = [
    (re.compile(r"(\d{4})-(\d{2})-(\d{2})"), ("y", "m", "d")),
    (re.compile(r"(\d{1,2})[-/.](\d{1,2})[-/.](\d{4})"), ("d", "m", "y")),
    (re.compile(rf"(\d{{1,2}}){_ORD}\s+(?:of\s+)?{_MONTH},?\s+(\d{{4}})", re.I), ("d", "M", "y")),
    (re.compile(rf"{_MONTH}\s+(\d{{1,2}}){_ORD},?\s+(\d{{4}})", re.I), ("M", "d", "y")),
]


def _parse_date_unchecked(raw: str) -> dt.date | None:
    text = " ".join((raw or "").split())
    for pattern, order in _DATE_PATTERNS:
        m = pattern.fullmatch(text)
        if not m:
            continue
        parts = dict(zip(order, m.groups()))
        if "M" in parts:
            month = _MONTHS.get(parts["M"].lower())
            if month is None:
                return None
        else:
            month = int(parts["m"])
        try:
            return dt.date(int(parts["y"]), month, int(parts["d"]))
        except ValueError:
            return None
    return None


def parse_release_date(raw: str, earliest: dt.date = EARLIEST_DATE,
                       latest: dt.date = LATEST_DATE) -> dt.date | None:
    """Parse a day-first release date; ``None`` when unparseable or out of range.

    Accepted: ``YYYY-MM-DD``, ``DD-MM-YYYY``, ``DD/MM/YYYY``,
    ``14th August 2014`` and ``August 14, 2014``.
    """
    date = _parse_date_unchecked(raw)
    if date is None or not earliest <= date <= latest:
        return None
    return date


def load_overrides(source) -> dict[str, dt.date]:
    """Read a ``docid,date`` CSV. Range checks happen in :func:`apply_overrides`."""
    out = {}
    for i, row in enumerate(_read_data_csv(source, ("docid", "date")), 2):
        date = _parse_date_unchecked(row[1])
        if date is None:
            raise InvalidOverride(f"line {i}: unparseable date {row[1]!r}")
        out[row[0].strip()] = date
    return out


def apply_overrides(doc_id: str, record, overrides: Mapping[str, dt.date],
                    earliest: dt.date = EARLIEST_DATE, latest: dt.date | None = None):
    """Return ``record`` with its date replaced by the override for ``doc_id``."""
    date = overrides.get(doc_id)
    if date is None:
        return record
    latest = latest or dt.date.today()
    if not earliest <= date <= latest:
        raise InvalidOverride(f"{doc_id}: override {date} outside {earliest}..{latest}")
    return dataclasses.replace(record, date=date.isoformat())


# ---------------------------------------------------------------------------


def _read_data_csv(source, header: tuple[str, ...]) -> list[list[str]]:
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    elif isinstance(source, bytes):
        text = source.decode("utf-8")
    else:
        text = source.read_text(encoding="utf-8")
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
    if not rows or tuple(c.strip() for c in rows[0]) != header:
        raise ValueError(f"expected header {','.join(header)}")
    for i, r in enumerate(rows[1:], 2):
        if len(r) != len(header):
            raise ValueError(f"line {i}: expected {len(header)} columns, got {len(r)}")
    return rows[1:]

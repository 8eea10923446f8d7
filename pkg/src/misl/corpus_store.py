"""On-disk corpus: a JSON-lines manifest plus one UTF-8 text file per document.

Layout under the corpus root::

    manifest.jsonl        one object per document, ascending id order
    text/<docid>.txt      extracted text of converted documents
    raw/<docid>           fetched source bytes (written by acquisition)
"""

from __future__ import annotations

import contextlib
import dataclasses
import datetime as dt
import json
import os
import re
import threading
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Iterator
from urllib.parse import unquote, urlsplit

from .errors import InvalidRecord, InvalidTransition, ManifestCorrupt, NotFound
from .normalization import EARLIEST_DATE, parse_release_date

MANIFEST_FIELDS = ("id", "link", "title", "date", "description", "status", "failure_reason")


class Status(str, Enum):
    INDEXED = "indexed"
    FETCHED = "fetched"
    CONVERTED = "converted"
    CONVERSION_FAILED = "conversion_failed"
    DEAD_LINK = "dead_link"


_ALLOWED = {
    Status.INDEXED: {Status.FETCHED, Status.DEAD_LINK},
    Status.FETCHED: {Status.CONVERTED, Status.CONVERSION_FAILED},
    Status.CONVERTED: set(),
    Status.CONVERSION_FAILED: set(),
    Status.DEAD_LINK: set(),
}


@dataclass(frozen=True)
class MetadataRecord:
    """One row of the court's index page.

    ``date`` holds the date text as published; it is parsed on access
    through :attr:`release_date`, so a record keeps round-tripping through
    CSV unchanged while downstream code only ever sees validated dates.
    """

    link: str
    title: str = ""
    date: str | None = None
    description: str | None = None

    @property
    def release_date(self) -> dt.date | None:
        return parse_release_date(self.date or "", EARLIEST_DATE, dt.date.today())


@dataclass(frozen=True)
class Document:
    id: str
    meta: MetadataRecord
    status: Status = Status.INDEXED
    failure_reason: str | None = None
    text: str | None = None


def doc_id_stem(link: str) -> str:
    """Sanitized, lower-cased final path segment of ``link`` without extension.

    >>> doc_id_stem("http://www.supremecourt.gov.pk/web/user_files/File/Const.P.45of2010.pdf")
    'const.p.45of2010'
    """
    parts = urlsplit(link.strip())
    path = unquote(parts.path or parts.netloc or link).rstrip("/")
    segment = path.rsplit("/", 1)[-1]
    stem, dot, ext = segment.rpartition(".")
    if dot and stem and re.fullmatch(r"[A-Za-z0-9]{1,5}", ext):
        segment = stem
    stem = re.sub(r"[^a-z0-9._-]+", "-", segment.lower()).strip("-.")
    return stem or "doc"


class CorpusStore:
    """Manifest-backed document store.

    Mutations are serialized by an internal lock and persisted immediately,
    unless grouped in :meth:`batch`, which writes the manifest once on exit.
    Readers see a consistent snapshot of the in-memory manifest.
    """

    def __init__(self, root, create: bool = True):
        self.root = Path(root)
        self.manifest_path = self.root / "manifest.jsonl"
        self.text_dir = self.root / "text"
        self.raw_dir = self.root / "raw"
        self._lock = threading.RLock()
        self._docs: dict[str, Document] = {}
        self._by_link: dict[str, str] = {}
        self._batch_depth = 0
        self._dirty = False
        if self.manifest_path.exists():
            self._load()
        elif not create:
            raise FileNotFoundError(self.manifest_path)

    # -- persistence ---------------------------------------------------------

    def _load(self):
        with open(self.manifest_path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                    if set(obj) != set(MANIFEST_FIELDS):
                        raise ValueError(f"fields {sorted(obj)}")
                    meta = MetadataRecord(obj["link"], obj["title"], obj["date"], obj["description"])
                    doc = Document(obj["id"], meta, Status(obj["status"]), obj["failure_reason"])
                    if not doc.id or not meta.link:
                        raise ValueError("empty id or link")
                except (ValueError, TypeError, KeyError) as exc:
                    raise ManifestCorrupt(self.manifest_path, lineno, str(exc)) from None
                if doc.id in self._docs:
                    raise ManifestCorrupt(self.manifest_path, lineno, f"duplicate id {doc.id}")
                self._docs[doc.id] = doc
                self._by_link[meta.link] = doc.id

    def _row(self, doc: Document) -> dict:
        date = doc.meta.release_date
        return {
            "id": doc.id,
            "link": doc.meta.link,
            "title": doc.meta.title,
            "date": date.isoformat() if date else None,
            "description": doc.meta.description,
            "status": doc.status.value,
            "failure_reason": doc.failure_reason,
        }

    def flush(self):
        """Write the manifest atomically."""
        with self._lock:
            self.root.mkdir(parents=True, exist_ok=True)
            tmp = self.manifest_path.with_suffix(".jsonl.tmp")
            with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
                for doc_id in sorted(self._docs):
                    fh.write(json.dumps(self._row(self._docs[doc_id]), ensure_ascii=False))
                    fh.write("\n")
            os.replace(tmp, self.manifest_path)
            self._dirty = False

    def _changed(self):
        self._dirty = True
        if self._batch_depth == 0:
            self.flush()

    @contextlib.contextmanager
    def batch(self):
        """Defer manifest writes until the outermost batch exits."""
        with self._lock:
            self._batch_depth += 1
        try:
            yield self
        finally:
            with self._lock:
                self._batch_depth -= 1
                if self._batch_depth == 0 and self._dirty:
                    self.flush()

    # -- mutations -------------------------------------------------------------

    def add_record(self, record: MetadataRecord) -> str:
        if not record.link or not record.link.strip():
            raise InvalidRecord("record link is empty")
        with self._lock:
            existing = self._by_link.get(record.link)
            if existing is not None:
                return existing
            stem = doc_id_stem(record.link)
            doc_id, n = stem, 1
            while doc_id in self._docs:
                n += 1
                doc_id = f"{stem}-{n}"
            # store only the normalized date form
            date = record.release_date
            record = dataclasses.replace(record, date=date.isoformat() if date else None)
            self._docs[doc_id] = Document(doc_id, record)
            self._by_link[record.link] = doc_id
            self._changed()
            return doc_id

    def update_record(self, doc_id: str, record: MetadataRecord):
        """Replace the metadata of an existing document (e.g. date overrides)."""
        with self._lock:
            doc = self.get(doc_id)
            if record.link != doc.meta.link:
                raise InvalidRecord("link of an indexed document cannot change")
            date = record.release_date
            record = dataclasses.replace(record, date=date.isoformat() if date else None)
            if record != doc.meta:
                self._docs[doc_id] = dataclasses.replace(doc, meta=record)
                self._changed()

    def _transition(self, doc_id: str, status: Status, reason: str | None = None):
        with self._lock:
            doc = self.get(doc_id)
            if status not in _ALLOWED[doc.status]:
                raise InvalidTransition(f"{doc_id}: {doc.status.value} -> {status.value}")
            self._docs[doc_id] = dataclasses.replace(doc, status=status, failure_reason=reason)
            self._changed()

    def mark_fetched(self, doc_id: str):
        self._transition(doc_id, Status.FETCHED)

    def mark_dead(self, doc_id: str, reason: str = "dead_link"):
        self._transition(doc_id, Status.DEAD_LINK, reason)

    def mark_conversion_failed(self, doc_id: str, reason: str):
        self._transition(doc_id, Status.CONVERSION_FAILED, reason)

    def note_failure(self, doc_id: str, reason: str | None):
        """Record a non-terminal failure (e.g. a transport error) without a status change."""
        with self._lock:
            doc = self.get(doc_id)
            if doc.failure_reason != reason:
                self._docs[doc_id] = dataclasses.replace(doc, failure_reason=reason)
                self._changed()

    def attach_text(self, doc_id: str, text: str):
        with self._lock:
            doc = self.get(doc_id)
            if doc.status is not Status.FETCHED:
                raise InvalidTransition(f"{doc_id}: cannot attach text in status {doc.status.value}")
            self.text_dir.mkdir(parents=True, exist_ok=True)
            path = self.text_path(doc_id)
            tmp = path.with_suffix(".tmp")
            tmp.write_bytes(text.encode("utf-8"))
            os.replace(tmp, path)
            self._transition(doc_id, Status.CONVERTED)

    # -- reads -----------------------------------------------------------------

    def __len__(self):
        return len(self._docs)

    def __contains__(self, doc_id):
        return doc_id in self._docs

    def get(self, doc_id: str) -> Document:
        try:
            return self._docs[doc_id]
        except KeyError:
            raise NotFound(doc_id) from None

    def id_for_link(self, link: str) -> str | None:
        return self._by_link.get(link)

    def text_path(self, doc_id: str) -> Path:
        return self.text_dir / f"{doc_id}.txt"

    def raw_path(self, doc_id: str) -> Path:
        return self.raw_dir / doc_id

    def load_text(self, doc_id: str) -> str | None:
        doc = self.get(doc_id)
        if doc.status is not Status.CONVERTED:
            return None
        return self.text_path(doc_id).read_bytes().decode("utf-8")

    def load(self, doc_id: str) -> Document:
        """The document with its text filled in when converted."""
        doc = self.get(doc_id)
        if doc.status is Status.CONVERTED:
            doc = dataclasses.replace(doc, text=self.load_text(doc_id))
        return doc

    def scan(self, where: Callable[[Document], bool] | Status | None = None,
             with_text: bool = False) -> Iterator[Document]:
        """Documents in ascending id order, optionally filtered.

        ``where`` is a predicate or a single :class:`Status` to match.
        """
        if isinstance(where, Status):
            wanted = where
            where = lambda d: d.status is wanted  # noqa: E731
        with self._lock:
            docs = [self._docs[k] for k in sorted(self._docs)]
        for doc in docs:
            if where is None or where(doc):
                yield self.load(doc.id) if with_text else doc

    def status_counts(self) -> dict[Status, int]:
        counts = {s: 0 for s in Status}
        for doc in self._docs.values():
            counts[doc.status] += 1
        return counts

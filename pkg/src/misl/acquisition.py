"""Getting documents into the corpus: index crawl, download and conversion."""

from __future__ import annotations

import csv
import io
import logging
import os
import re
import shlex
import subprocess
import tempfile
import threading
import time
import urllib.error
import urllib.request
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from html.parser import HTMLParser
from pathlib import Path
from typing import Callable, Iterable, Mapping
from urllib.parse import urljoin, urlsplit
from urllib.request import url2pathname

from .corpus_store import CorpusStore, MetadataRecord, Status
from .errors import CsvShapeError, EmptyIndex, InvalidUrl
from .normalization import apply_overrides

log = logging.getLogger(__name__)

INDEX_COLUMNS = ("link", "title", "date", "description")


# ---------------------------------------------------------------------------
# HTML
# ---------------------------------------------------------------------------

_VOID = {"area", "base", "br", "col", "embed", "hr", "img", "input", "link",
         "meta", "param", "source", "track", "wbr"}
# opening one of these implicitly closes an open element of the listed tags
_IMPLIED_CLOSE = {
    "tr": {"tr", "td", "th"},
    "td": {"td", "th"},
    "th": {"td", "th"},
    "li": {"li"},
    "p": {"p"},
    "option": {"option"},
}
_BLOCK = {"p", "div", "br", "tr", "li", "h1", "h2", "h3", "h4", "h5", "h6",
          "table", "pre", "blockquote", "hr", "section", "article"}


@dataclass(eq=False)
class Node:
    tag: str
    attrs: dict = field(default_factory=dict)
    children: list = field(default_factory=list)
    parent: "Node | None" = None

    def iter(self):
        for child in self.children:
            if isinstance(child, Node):
                yield child
                yield from child.iter()

    def text(self) -> str:
        parts = []
        for child in self.children:
            parts.append(child.text() if isinstance(child, Node) else child)
        return "".join(parts)

    @property
    def classes(self) -> set:
        return set((self.attrs.get("class") or "").split())


class _TreeBuilder(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = Node("#document")
        self.stack = [self.root]

    def handle_starttag(self, tag, attrs):
        closes = _IMPLIED_CLOSE.get(tag)
        if closes:
            for i in range(len(self.stack) - 1, 0, -1):
                t = self.stack[i].tag
                if t in closes:
                    del self.stack[i:]
                    break
                if t in ("table", "ul", "ol", "tbody", "thead", "select"):
                    break
        node = Node(tag, {k: (v or "") for k, v in attrs}, parent=self.stack[-1])
        self.stack[-1].children.append(node)
        if tag not in _VOID:
            self.stack.append(node)

    def handle_startendtag(self, tag, attrs):
        node = Node(tag, {k: (v or "") for k, v in attrs}, parent=self.stack[-1])
        self.stack[-1].children.append(node)

    def handle_endtag(self, tag):
        for i in range(len(self.stack) - 1, 0, -1):
            if self.stack[i].tag == tag:
                del self.stack[i:]
                return

    def handle_data(self, data):
        self.stack[-1].children.append(data)


def parse_html(html: str) -> Node:
    builder = _TreeBuilder()
    builder.feed(html)
    builder.close()
    return builder.root


_COMPOUND_RE = re.compile(r"([a-zA-Z][\w-]*|\*)?((?:[#.][\w-]+)*)")


def _parse_compound(text: str):
    m = _COMPOUND_RE.fullmatch(text)
    if not m or not text:
        raise ValueError(f"unsupported selector {text!r}")
    tag = (m.group(1) or "*").lower()
    ids = re.findall(r"#([\w-]+)", m.group(2))
    classes = re.findall(r"\.([\w-]+)", m.group(2))
    return tag, ids, classes


def _matches(node: Node, compound) -> bool:
    tag, ids, classes = compound
    if tag != "*" and node.tag != tag:
        return False
    if any(node.attrs.get("id") != i for i in ids):
        return False
    return set(classes) <= node.classes


def select(root: Node, selector: str) -> list[Node]:
    """Elements matching a small CSS subset: tag, ``#id``, ``.class``,
    descendant (space) and child (``>``) combinators. Document order."""
    steps = []
    combinator = " "
    for part in selector.replace(">", " > ").split():
        if part == ">":
            combinator = ">"
            continue
        steps.append((combinator, _parse_compound(part)))
        combinator = " "
    if not steps:
        raise ValueError("empty selector")

    def ok(node: Node, i: int) -> bool:
        comb, compound = steps[i]
        if not _matches(node, compound):
            return False
        if i == 0:
            return True
        anc = node.parent
        if comb == ">":
            return anc is not None and ok(anc, i - 1)
        while anc is not None:
            if ok(anc, i - 1):
                return True
            anc = anc.parent
        return False

    return [n for n in root.iter() if ok(n, len(steps) - 1)]


def html_to_text(html: str) -> str:
    """Visible text of an HTML document, one line per block element."""
    root = parse_html(html)
    out: list[str] = []

    def walk(node: Node):
        if node.tag in ("script", "style", "head"):
            return
        if node.tag in _BLOCK:
            out.append("\n")
        for child in node.children:
            if isinstance(child, Node):
                walk(child)
            else:
                out.append(child)
        if node.tag in _BLOCK:
            out.append("\n")

    walk(root)
    lines = (" ".join(line.split()) for line in "".join(out).splitlines())
    return "".join(line + "\n" for line in lines if line)


# ---------------------------------------------------------------------------
# Index page
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IndexLayout:
    """Where the metadata sits on the index page.

    Each row matched by ``row_selector`` yields one record; its link is the
    first anchor's ``href``, and the other fields are taken from the cells
    matched by ``cell_selector`` by position. Rows without a link are
    skipped (header rows).
    """

    row_selector: str = "tr"
    cell_selector: str = "td"
    title_cell: int = 0
    date_cell: int = 1
    description_cell: int | None = 2


def _clean(text: str) -> str:
    return " ".join(text.split())


def parse_index_page(html: bytes | str, layout: IndexLayout = IndexLayout(),
                     base_url: str = "") -> list[MetadataRecord]:
    if isinstance(html, bytes):
        html = html.decode("utf-8", errors="replace")
    root = parse_html(html)
    records = []
    for row in select(root, layout.row_selector):
        anchors = [a for a in select(row, "a") if a.attrs.get("href")]
        if not anchors:
            continue
        cells = [n for n in select(row, layout.cell_selector)]

        def cell(i):
            if i is None or i >= len(cells):
                return None
            return _clean(cells[i].text()) or None

        link = urljoin(base_url, anchors[0].attrs["href"].strip())
        title = cell(layout.title_cell) or _clean(anchors[0].text())
        records.append(MetadataRecord(link, title, cell(layout.date_cell),
                                      cell(layout.description_cell)))
    if not records:
        warnings.warn("index page contains no document rows", EmptyIndex, stacklevel=2)
    return records


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def read_csv_rows(data: bytes) -> list[list[str]]:
    """RFC-4180 rows of a UTF-8 CSV file (BOM tolerated)."""
    text = data.decode("utf-8-sig")
    return list(csv.reader(io.StringIO(text, newline="")))


def write_csv_rows(rows: Iterable[Iterable]) -> bytes:
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\r\n")
    for row in rows:
        writer.writerow(["" if v is None else v for v in row])
    return buf.getvalue().encode("utf-8")


def write_index_csv(records: Iterable[MetadataRecord]) -> bytes:
    rows = [INDEX_COLUMNS]
    rows += [(r.link, r.title, r.date, r.description) for r in records]
    return write_csv_rows(rows)


def read_index_csv(data: bytes) -> list[MetadataRecord]:
    rows = read_csv_rows(data)
    if not rows:
        raise CsvShapeError(1, len(INDEX_COLUMNS), 0)
    if len(rows[0]) != len(INDEX_COLUMNS):
        raise CsvShapeError(1, len(INDEX_COLUMNS), len(rows[0]))
    if tuple(rows[0]) != INDEX_COLUMNS:
        raise CsvShapeError(1, len(INDEX_COLUMNS), len(rows[0]), f"bad header {rows[0]}")
    out = []
    for i, row in enumerate(rows[1:], 2):
        if len(row) != len(INDEX_COLUMNS):
            raise CsvShapeError(i, len(INDEX_COLUMNS), len(row))
        link, title, date, desc = row
        out.append(MetadataRecord(link, title, date or None, desc or None))
    return out


# ---------------------------------------------------------------------------
# Fetching
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Response:
    status: int
    body: bytes = b""
    content_type: str = ""


Transport = Callable[[str, float], Response]


@dataclass(frozen=True)
class Fetched:
    body: bytes
    content_type: str = ""


@dataclass(frozen=True)
class DeadLink:
    http_status: int


@dataclass(frozen=True)
class TransportError:
    detail: str


FetchResult = Fetched | DeadLink | TransportError


@dataclass(frozen=True)
class FetchPolicy:
    retries: int = 3
    backoff: float = 0.5
    timeout: float = 30.0


def urllib_transport(url: str, timeout: float) -> Response:
    """Default transport: HTTP(S) through urllib, ``file:`` read directly."""
    parts = urlsplit(url)
    if parts.scheme == "file":
        path = Path(url2pathname(parts.path))
        try:
            return Response(200, path.read_bytes())
        except FileNotFoundError:
            return Response(404)
    req = urllib.request.Request(url, headers={"User-Agent": "misl/0.1"})
    try:
        with urllib.request.urlopen(req, timeout=timeout) as resp:
            return Response(resp.status, resp.read(), resp.headers.get("Content-Type", ""))
    except urllib.error.HTTPError as exc:
        return Response(exc.code, b"", "")


class HostThrottle:
    """Serializes requests per host with a minimum gap between them."""

    def __init__(self, delay: float = 0.0, clock=time.monotonic, sleep=time.sleep):
        self.delay = delay
        self._clock = clock
        self._sleep = sleep
        self._guard = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}
        self._last: dict[str, float] = {}

    def __call__(self, host: str):
        with self._guard:
            lock = self._locks.setdefault(host, threading.Lock())
        return _HostSlot(self, host, lock)


class _HostSlot:
    def __init__(self, throttle, host, lock):
        self.t, self.host, self.lock = throttle, host, lock

    def __enter__(self):
        self.lock.acquire()
        last = self.t._last.get(self.host)
        if last is not None and self.t.delay > 0:
            wait = last + self.t.delay - self.t._clock()
            if wait > 0:
                self.t._sleep(wait)

    def __exit__(self, *exc):
        self.t._last[self.host] = self.t._clock()
        self.lock.release()


def check_url(url: str):
    parts = urlsplit(url or "")
    if parts.scheme == "file" and parts.path:
        return
    if parts.scheme not in ("http", "https") or not parts.netloc:
        raise InvalidUrl(f"malformed url: {url!r}")


def fetch(url: str, policy: FetchPolicy = FetchPolicy(), transport: Transport = urllib_transport,
          throttle: HostThrottle | None = None, sleep=time.sleep) -> FetchResult:
    """Download ``url``.

    Client errors (4xx) are final and give :class:`DeadLink`. Transport
    failures and server errors (5xx) are retried with exponential backoff;
    when retries run out the result is :class:`TransportError`.
    """
    check_url(url)
    host = urlsplit(url).netloc
    detail = ""
    for attempt in range(policy.retries + 1):
        if attempt:
            sleep(policy.backoff * 2 ** (attempt - 1))
        try:
            if throttle is not None:
                with throttle(host):
                    resp = transport(url, policy.timeout)
            else:
                resp = transport(url, policy.timeout)
        except (OSError, TimeoutError) as exc:
            detail = f"{type(exc).__name__}: {exc}"
            continue
        if 400 <= resp.status < 500:
            return DeadLink(resp.status)
        if resp.status >= 500:
            detail = f"HTTP {resp.status}"
            continue
        if 200 <= resp.status < 300:
            if resp.body:
                return Fetched(resp.body, resp.content_type)
            detail = "empty body"
            continue
        return TransportError(f"unexpected HTTP {resp.status}")
    return TransportError(detail)


# ---------------------------------------------------------------------------
# Conversion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Converted:
    text: str


@dataclass(frozen=True)
class NonLatinScript:
    fraction: float


@dataclass(frozen=True)
class CorruptSource:
    pass


@dataclass(frozen=True)
class ConverterFailed:
    detail: str


ConversionResult = Converted | NonLatinScript | CorruptSource | ConverterFailed


def non_latin_fraction(text: str) -> float:
    """Share of alphabetic characters that lie outside Basic Latin."""
    letters = [c for c in text if c.isalpha()]
    if not letters:
        return 0.0
    return sum(1 for c in letters if ord(c) > 0x7F) / len(letters)


def _looks_like_html(text: str) -> bool:
    head = text.lstrip()[:512].lower()
    return head.startswith("<") and ("<html" in head or "<body" in head or "<!doctype" in head)


def convert(input_path, converter_cmd: str, timeout: float = 120.0,
            non_latin_threshold: float = 0.5) -> ConversionResult:
    """Run the external converter on one file and classify the outcome.

    ``converter_cmd`` is a command template containing ``{in}`` and
    ``{out}``. HTML output is reduced to its visible text.
    """
    input_path = Path(input_path)
    if not input_path.exists():
        raise FileNotFoundError(input_path)
    if "{in}" not in converter_cmd or "{out}" not in converter_cmd:
        raise ValueError("converter template needs {in} and {out} placeholders")
    with tempfile.TemporaryDirectory(prefix="misl-conv-") as tmp:
        out_path = Path(tmp) / "out"
        argv = [a.replace("{in}", str(input_path)).replace("{out}", str(out_path))
                for a in shlex.split(converter_cmd)]
        try:
            proc = subprocess.run(argv, capture_output=True, timeout=timeout)
        except subprocess.TimeoutExpired:
            return ConverterFailed("timeout")
        except OSError as exc:
            return ConverterFailed(f"cannot run converter: {exc}")
        if proc.returncode != 0:
            diag = proc.stderr.decode("utf-8", "replace").strip().splitlines()[-3:]
            return ConverterFailed(f"exit {proc.returncode}: {' | '.join(diag)}".rstrip(": "))
        if not out_path.exists():
            return ConverterFailed("converter produced no output file")
        text = out_path.read_bytes().decode("utf-8", errors="replace")
    if _looks_like_html(text):
        text = html_to_text(text)
    if not text.strip():
        return CorruptSource()
    frac = non_latin_fraction(text)
    if frac > non_latin_threshold:
        return NonLatinScript(frac)
    return Converted(text)


def conversion_failure_reason(result: ConversionResult) -> str:
    if isinstance(result, NonLatinScript):
        return "non_latin_script"
    if isinstance(result, CorruptSource):
        return "corrupt_source"
    if isinstance(result, ConverterFailed):
        return f"converter_failed: {result.detail}"
    raise ValueError("not a failure")


# ---------------------------------------------------------------------------
# Stage drivers
# ---------------------------------------------------------------------------


@dataclass
class Funnel:
    """Per-status document counts after a stage."""

    indexed: int = 0
    fetched: int = 0
    dead_link: int = 0
    converted: int = 0
    conversion_failed: int = 0
    transport_errors: int = 0
    work_done: int = 0

    @classmethod
    def of(cls, store: CorpusStore, work_done: int = 0) -> "Funnel":
        c = store.status_counts()
        pending_errors = sum(1 for d in store.scan(Status.INDEXED) if d.failure_reason)
        reached_fetch = c[Status.FETCHED] + c[Status.CONVERTED] + c[Status.CONVERSION_FAILED]
        return cls(
            indexed=len(store),
            fetched=reached_fetch,
            dead_link=c[Status.DEAD_LINK],
            converted=c[Status.CONVERTED],
            conversion_failed=c[Status.CONVERSION_FAILED],
            transport_errors=pending_errors,
            work_done=work_done,
        )

    def line(self) -> str:
        return (f"indexed={self.indexed} dead_link={self.dead_link} fetched={self.fetched} "
                f"converted={self.converted} conversion_failed={self.conversion_failed} "
                f"transport_errors={self.transport_errors}")


def ingest_records(store: CorpusStore, records: Iterable[MetadataRecord],
                   overrides: Mapping | None = None) -> list[str]:
    """Add index records to the store, applying date overrides."""
    ids = []
    with store.batch():
        for rec in records:
            doc_id = store.id_for_link(rec.link)
            if doc_id is None:
                doc_id = store.add_record(rec)
            if overrides:
                patched = apply_overrides(doc_id, store.get(doc_id).meta, overrides)
                store.update_record(doc_id, patched)
            ids.append(doc_id)
    return ids


def fetch_documents(store: CorpusStore, policy: FetchPolicy = FetchPolicy(),
                    transport: Transport = urllib_transport, jobs: int = 1,
                    throttle: HostThrottle | None = None, sleep=time.sleep) -> Funnel:
    """Download every document still in Indexed state into ``raw/``."""
    pending = list(store.scan(Status.INDEXED))
    store.raw_dir.mkdir(parents=True, exist_ok=True)

    def work(doc):
        try:
            return doc, fetch(doc.meta.link, policy, transport, throttle, sleep)
        except InvalidUrl as exc:
            return doc, TransportError(str(exc))

    with store.batch():
        with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
            for doc, result in pool.map(work, pending):
                if isinstance(result, Fetched):
                    path = store.raw_path(doc.id)
                    tmp = path.with_name(path.name + ".part")
                    tmp.write_bytes(result.body)
                    os.replace(tmp, path)
                    store.note_failure(doc.id, None)
                    store.mark_fetched(doc.id)
                elif isinstance(result, DeadLink):
                    log.info("dead link %s (HTTP %d)", doc.meta.link, result.http_status)
                    store.mark_dead(doc.id, f"http_{result.http_status}")
                else:
                    log.warning("fetch failed for %s: %s", doc.meta.link, result.detail)
                    store.note_failure(doc.id, f"transport: {result.detail}")
    return Funnel.of(store, len(pending))


def convert_documents(store: CorpusStore, converter_cmd: str, jobs: int = 1,
                      timeout: float = 120.0, non_latin_threshold: float = 0.5) -> Funnel:
    """Convert every Fetched document's raw bytes to text."""
    pending = list(store.scan(Status.FETCHED))

    def work(doc):
        raw = store.raw_path(doc.id)
        if not raw.exists():
            return doc, ConverterFailed("raw file missing")
        return doc, convert(raw, converter_cmd, timeout, non_latin_threshold)

    with store.batch():
        with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
            for doc, result in pool.map(work, pending):
                if isinstance(result, Converted):
                    store.attach_text(doc.id, result.text)
                else:
                    reason = conversion_failure_reason(result)
                    log.info("conversion failed for %s: %s", doc.id, reason)
                    store.mark_conversion_failed(doc.id, reason)
    return Funnel.of(store, len(pending))

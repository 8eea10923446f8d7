"""Command-line pipeline: crawl, fetch, convert, analyze, report.

Every stage is resumable: documents already past a stage are skipped, and
rerunning a completed stage rewrites no artifact.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import acquisition, analytics, reporting, testkit
from .config import RunConfig, load_config
from .corpus_store import CorpusStore, Status
from .errors import ConfigError, MislError, StageOrderError
from .extraction import DocFacts, Grammar, analyze_document
from .normalization import JudgeRoster, LookupTable, load_overrides

log = logging.getLogger("misl")

STAGES = ("crawl", "fetch", "convert", "analyze", "report")


@dataclass
class StageResult:
    stage: str
    work_done: int = 0
    failures: int = 0
    documents: int = 0
    message: str = ""

    @property
    def failure_rate(self) -> float:
        return self.failures / self.documents if self.documents else 0.0


class Pipeline:
    def __init__(self, config: RunConfig, transport=acquisition.urllib_transport, out=None):
        self.cfg = config
        self.root = Path(config.root)
        self.transport = transport
        self.out = out or sys.stdout

    # -- shared resources ----------------------------------------------------

    def lookup(self) -> LookupTable:
        return LookupTable.from_csv(self.cfg.lookup) if self.cfg.lookup else LookupTable.default()

    def roster(self) -> JudgeRoster:
        return JudgeRoster.from_csv(self.cfg.roster) if self.cfg.roster else JudgeRoster.default()

    def grammar(self) -> Grammar:
        return Grammar.from_json(self.cfg.grammar) if self.cfg.grammar else Grammar.default()

    def _fingerprint(self) -> str:
        from importlib import resources

        h = hashlib.sha256()
        data = resources.files("misl.data")
        for path, default in ((self.cfg.lookup, "case_types.csv"),
                              (self.cfg.roster, "judges.csv"),
                              (self.cfg.grammar, "grammar.json"),
                              (self.cfg.overrides, None)):
            if path is not None:
                h.update(Path(path).read_bytes())
            elif default:
                h.update(data.joinpath(default).read_bytes())
            h.update(b"\0")
        return h.hexdigest()[:16]

    def store(self) -> CorpusStore:
        if not (self.root / "manifest.jsonl").exists():
            raise StageOrderError("crawl")
        return CorpusStore(self.root, create=False)

    def print(self, msg: str):
        print(msg, file=self.out)

    # -- stages ------------------------------------------------------------------

    def crawl(self) -> StageResult:
        if not self.cfg.index_url:
            raise ConfigError("index_url is not configured")
        result = acquisition.fetch(self.cfg.index_url, self._policy(), self.transport)
        if not isinstance(result, acquisition.Fetched):
            raise MislError(f"cannot fetch index page {self.cfg.index_url}: {result}")
        layout = acquisition.IndexLayout(self.cfg.row_selector, self.cfg.cell_selector)
        records = acquisition.parse_index_page(result.body, layout, self.cfg.index_url)
        self.root.mkdir(parents=True, exist_ok=True)
        _write_if_changed(self.root / "index.csv", acquisition.write_index_csv(records))
        store = CorpusStore(self.root)
        before = len(store)
        overrides = load_overrides(self.cfg.overrides) if self.cfg.overrides else None
        acquisition.ingest_records(store, records, overrides)
        if not store.manifest_path.exists():
            store.flush()
        added = len(store) - before
        self.print(f"crawl: {len(records)} index rows, {added} new documents, {len(store)} total")
        return StageResult("crawl", added, 0, len(store))

    def _policy(self) -> acquisition.FetchPolicy:
        return acquisition.FetchPolicy(self.cfg.fetch_retries, self.cfg.fetch_backoff_ms / 1000,
                                       self.cfg.fetch_timeout_ms / 1000)

    def fetch(self) -> StageResult:
        store = self.store()
        throttle = acquisition.HostThrottle(self.cfg.politeness_ms / 1000)
        funnel = acquisition.fetch_documents(store, self._policy(), self.transport,
                                             self.cfg.jobs, throttle)
        self.print(f"fetch: {funnel.work_done} attempted; {funnel.line()}")
        return StageResult("fetch", funnel.work_done,
                           funnel.dead_link + funnel.transport_errors, funnel.indexed)

    def convert(self) -> StageResult:
        store = self.store()
        counts = store.status_counts()
        if len(store) and counts[Status.INDEXED] == len(store):
            raise StageOrderError("fetch")
        pending = counts[Status.FETCHED]
        if pending and not self.cfg.converter_cmd:
            raise ConfigError("converter_cmd is not configured")
        if pending:
            funnel = acquisition.convert_documents(
                store, self.cfg.converter_cmd, self.cfg.jobs,
                self.cfg.converter_timeout_s, self.cfg.non_latin_threshold)
        else:
            funnel = acquisition.Funnel.of(store)
        self.print(f"convert: {funnel.work_done} attempted; {funnel.line()}")
        return StageResult("convert", funnel.work_done, funnel.conversion_failed, funnel.fetched)

    def analyze(self) -> StageResult:
        store = self.store()
        lookup, roster, grammar = self.lookup(), self.roster(), self.grammar()
        fingerprint = self._fingerprint()
        facts_path = self.root / "facts.jsonl"
        cached = {}
        if facts_path.exists():
            with open(facts_path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        row = json.loads(line)
                        cached[row["id"]] = row
        overrides = load_overrides(self.cfg.overrides) if self.cfg.overrides else None
        if overrides:
            acquisition.ingest_records(store, [d.meta for d in store.scan()], overrides)

        docs = list(store.scan())
        todo = [d for d in docs
                if not (d.id in cached and cached[d.id]["status"] == d.status.value
                        and cached[d.id]["fingerprint"] == fingerprint)]

        def work(doc):
            doc = store.load(doc.id)
            return analyze_document(doc, lookup, roster, grammar, allow_metadata_only=True)

        with ThreadPoolExecutor(max_workers=self.cfg.jobs) as pool:
            fresh = {f.id: f for f in pool.map(work, todo)}
        rows, facts = [], []
        for doc in docs:
            if doc.id in fresh:
                f = fresh[doc.id]
                row = {"id": doc.id, "status": doc.status.value, "fingerprint": fingerprint,
                       "facts": f.to_json()}
            else:
                row = cached[doc.id]
                f = DocFacts.from_json(row["facts"], grammar)
            rows.append(row)
            facts.append(f)
        _write_if_changed(facts_path, "".join(
            json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n" for r in rows).encode("utf-8"))
        partial = analytics.aggregate(facts, partitions=self.cfg.jobs, jobs=self.cfg.jobs)
        _write_if_changed(self.root / "partial.json", partial.dumps().encode("utf-8"))
        self.print(f"analyze: {len(todo)} analyzed, {len(docs) - len(todo)} cached, "
                   f"{sum(f.text_analyzed for f in facts)} with text")
        return StageResult("analyze", len(todo), 0, len(docs))

    def report(self) -> StageResult:
        path = self.root / "partial.json"
        if not path.exists():
            raise StageOrderError("analyze")
        partial = analytics.StatsPartial.from_json(json.loads(path.read_text(encoding="utf-8")))
        data = analytics.report_data(partial, self.roster(), self.cfg.top_k,
                                     self.cfg.split_year, self.cfg.full_bench_size)
        bundle = reporting.render_bundle(data)
        reporting.write_bundle(bundle, self.root / "reports")
        self.print(f"report: {len(bundle)} files in {self.root / 'reports'}")
        return StageResult("report", len(bundle), 0, partial.docs_total)

    def run(self, stage: str) -> list[StageResult]:
        stages = STAGES if stage == "all" else (stage,)
        return [getattr(self, s)() for s in stages]


def _write_if_changed(path: Path, payload: bytes):
    if path.exists() and path.read_bytes() == payload:
        return
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(payload)
    os.replace(tmp, path)


# ---------------------------------------------------------------------------


def fixture_gen(args, out=sys.stdout) -> int:
    noise = testkit.NoiseProfile(args.typo_rate, args.variant_rate, args.missing_rate)
    target = Path(args.out)
    corpus = testkit.generate_corpus(args.seed, args.n, noise)
    index = corpus.write_site(target / "site")
    corpus.write_truth(target / "truth.jsonl")
    reporting.write_bundle(testkit.oracle_stats(corpus.truth), target / "oracle")
    conf = target / "misl.conf"
    conf.write_text(
        "# generated by `misl fixture-gen`\n"
        f"root = corpus\n"
        f"index_url = {index.as_uri()}\n"
        f"converter_cmd = {testkit.IDENTITY_CONVERTER}\n",
        encoding="utf-8",
    )
    print(f"fixture-gen: {len(corpus)} documents; run `misl all --config {conf}` and compare "
          f"{target / 'corpus' / 'reports'} with {target / 'oracle'}", file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value configuration file")
    common.add_argument("--root", type=Path, help="corpus root directory")
    common.add_argument("--jobs", type=int, help="parallel documents per stage")
    common.add_argument("--split-year", type=int, help="pivot year for the Suo Moto share")
    common.add_argument("--top-k", type=int, help="rows in the ranking tables")
    common.add_argument("--strict", action="store_true", default=None,
                        help="treat any per-document failure as fatal")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="misl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*STAGES, "all"):
        sub.add_parser(name, parents=[common])
    fx = sub.add_parser("fixture-gen", parents=[common],
                        help="write a synthetic corpus site, its truth file and oracle reports")
    fx.add_argument("--out", type=Path, required=True)
    fx.add_argument("--seed", type=int, default=42)
    fx.add_argument("--n", type=int, default=100)
    fx.add_argument("--typo-rate", type=float, default=0.0)
    fx.add_argument("--variant-rate", type=float, default=0.0)
    fx.add_argument("--missing-rate", type=float, default=0.0)
    return parser


def main(argv=None, transport=acquisition.urllib_transport, out=None) -> int:
    args = build_parser().parse_args(argv)
    out = out or sys.stdout
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "fixture-gen":
            return fixture_gen(args, out)
        cfg = load_config(args.config, root=args.root, jobs=args.jobs,
                          split_year=args.split_year, top_k=args.top_k, strict=args.strict)
        results = Pipeline(cfg, transport, out).run(args.command)
    except StageOrderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (MislError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for r in results:
        if r.failures and (cfg.strict or r.failure_rate > cfg.failure_threshold):
            print(f"error: {r.stage}: {r.failures} of {r.documents} documents failed",
                  file=sys.stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""
A synthetic corpus, end to end
==============================

Generate judgments with known annotations, run them through extraction
and aggregation, and compare against the brute-force recount.
"""

import numpy as np

from misl import analytics, reporting, testkit
from misl.corpus_store import Document, Status
from misl.extraction import analyze_document
from misl.normalization import JudgeRoster, LookupTable

roster = JudgeRoster.default()
lookup = LookupTable.default()

corpus = testkit.generate_corpus(seed=42, n=500)
print(corpus.texts[0][:400])

facts = [analyze_document(Document(t.id, r, Status.CONVERTED, None, x), lookup, roster)
         for r, x, t in zip(corpus.records, corpus.texts, corpus.truth)]
partial = analytics.aggregate(facts, partitions=8)

series = analytics.cases_by_year(partial)
years = np.array([y for y, _ in series.points])
counts = np.array([n for _, n in series.points])
print("years", years.min(), "-", years.max(), "busiest", years[counts.argmax()])
print("cumulative", np.cumsum(counts))

share = analytics.suo_moto_share(partial, 2009)
print("Suo Moto before/after 2009: %.1f%% / %.1f%%" % (share.pct_pre, share.pct_post))

for key, n in analytics.top_k(partial, "judge", 5):
    print(f"{roster.display_name(key):40s} {n}")

bundle = reporting.render_bundle(analytics.report_data(partial, roster))
oracle = testkit.oracle_stats(corpus.truth)
print("pipeline == oracle:", bundle == oracle)
print(bundle["bench_stats.csv"].decode())

"""
Noise in titles and judge names
===============================

Case titles use a zoo of abbreviations and judge names carry typos.
Here we see what the lookup table and the roster make of them.
"""

from misl import testkit
from misl.normalization import (
    JudgeRoster, LookupTable, canonicalize_judge, levenshtein, normalize_judge_name,
    resolve_case_types,
)

lookup = LookupTable.default()
for title in ["Const.P. 12/2011", "CONST. PETITION 3 of 2012", "c.p. 9/2008",
              "S.M.C. No. 4 of 2010", "Crl.M.A. 55/2013", "Letter dated 3.4.2012"]:
    types, ambiguities = resolve_case_types(title, lookup)
    print(f"{title:30s} {sorted(t.label for t in types)} {ambiguities}")

roster = JudgeRoster.default()
names = [normalize_judge_name(j.name) for j in roster]
gaps = [levenshtein(a, b) for i, a in enumerate(names) for b in names[i + 1:]]
print("closest pair of roster names is", min(gaps), "edits apart")

noisy = testkit.generate_corpus(7, 200, testkit.NoiseProfile(judge_typo_rate=0.05,
                                                              title_variant_rate=0.5))
mentions = sum(t.mentions for t in noisy.truth)
bad = [m for t in noisy.truth for m in t.corrupted_mentions]
print(f"{len(bad)} of {mentions} mentions corrupted ({len(bad) / mentions:.1%})")
for mention, judge_id in bad[:8]:
    print(f"  {mention:45s} -> {canonicalize_judge(mention, roster)} (truth {judge_id})")

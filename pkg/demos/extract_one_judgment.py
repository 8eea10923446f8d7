"""
Reading one judgment
====================

Pull the structured facts out of a single judgment text: the bench, the
jurisdiction, the constitutional Articles and the law-report citations.
"""

from misl.corpus_store import Document, MetadataRecord, Status
from misl.extraction import analyze_document, extract_bench, extract_pld
from misl.normalization import JudgeRoster, LookupTable, canonicalize_judge

text = """IN THE SUPREME COURT OF PAKISTAN
(Original Jurisdiction)

PRESENT:
MR. JUSTICE IFTIKHAR MUHAMMAD CHOUDHRY, HCJ
MR. JUSTICE JAWWAD S. KHAWAJA
MR. JUSTICE KHILJI ARIF HUSSAIN

Constitution Petition No. 77 of 2010

JUDGMENT

The petition invokes Article 184 (3) read with Articles 9 and 14. We are
guided by PLD 2009 SC 879, by PLD 1955 FC 240 and by 1991 SCMR 1041.
"""

roster = JudgeRoster.default()
lookup = LookupTable.default()

# The raw bench lines, as printed. "CHOUDHRY" is one edit off the roster entry.
for name in extract_bench(text):
    print(f"{name:45s} -> {canonicalize_judge(name, roster)}")

print(extract_pld(text))

record = MetadataRecord("https://court.example/files/const.p.77-2010.pdf",
                        "Const.P. 77/2010", "14-05-2010", "")
doc = Document("const-p-77-2010", record, Status.CONVERTED, None, text)
facts = analyze_document(doc, lookup, roster)
for key, value in facts.to_json().items():
    print(f"{key:20s} {value}")

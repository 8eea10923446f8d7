import pytest
from hypothesis import given, strategies as st

from misl.corpus_store import Document, MetadataRecord, Status
from misl.errors import NotAnalyzable
from misl.extraction import (
    ArticleRef, DocFacts, Jurisdiction, PldCitation, ScmrCitation, analyze_document,
    extract_article_refs, extract_bench, extract_jurisdiction, extract_pld, extract_scmr,
    is_suo_moto, preamble,
)
from misl.normalization import CaseType, Matched, New

PREAMBLE = """IN THE SUPREME COURT OF PAKISTAN
(Original Jurisdiction)

PRESENT:
MR. JUSTICE IFTIKHAR MUHAMMAD CHAUDHRY, HCJ
MR. JUSTICE JAVED IQBAL
MR. JUSTICE SAQIB NISAR

Constitution Petition No. 12 of 2011
Mr. Hamid Khan, ASC for the petitioner

JUDGMENT
The learned counsel referred to Mr. Justice Somebody Else in argument.
"""


def test_preamble_stops_at_heading():
    lines = preamble(PREAMBLE)
    assert lines[-2] == "Mr. Hamid Khan, ASC for the petitioner"
    assert "JUDGMENT" not in lines


def test_original_jurisdiction():
    assert extract_jurisdiction(PREAMBLE) == Jurisdiction(frozenset({"Original"}))


def test_combined_jurisdiction_label():
    text = "(Appellate Jurisdiction)\n(Original Jurisdiction)\nJUDGMENT\n"
    j = extract_jurisdiction(text)
    assert j.members == {"Original", "Appellate"} and j.label == "Original/Appellate"
    assert extract_jurisdiction("(Original/Appellate Jurisdiction)\n").label == "Original/Appellate"


def test_no_jurisdiction_is_unknown():
    j = extract_jurisdiction("PRESENT:\nMR. JUSTICE A\nJUDGMENT\nAppellate Jurisdiction later\n")
    assert j.members == frozenset() and j.label == "Unknown"
    assert Jurisdiction.parse("Unknown") == j


def test_bench_three_names_in_order():
    assert extract_bench(PREAMBLE) == [
        "MR. JUSTICE IFTIKHAR MUHAMMAD CHAUDHRY, HCJ",
        "MR. JUSTICE JAVED IQBAL",
        "MR. JUSTICE SAQIB NISAR",
    ]


def test_no_present_block():
    assert extract_bench("IN THE SUPREME COURT\nJUDGMENT\nMR. JUSTICE X\n") == []


def test_full_bench_of_seventeen():
    names = [f"MR. JUSTICE JUDGE {chr(65 + i)}{chr(65 + i)}" for i in range(17)]
    text = "PRESENT:\n" + "\n".join(names) + "\n\nJUDGMENT\n"
    assert extract_bench(text) == names


def test_present_inline_first_judge():
    text = "PRESENT: Mr. Justice Javed Iqbal\nMr. Justice Saqib Nisar\nC.A. 1/2010\n"
    assert extract_bench(text) == ["Mr. Justice Javed Iqbal", "Mr. Justice Saqib Nisar"]


@pytest.mark.parametrize("text, refs", [
    ("Under Article 184 (3) of the Constitution", ["184 (3)"]),
    ("Under Article 184(3) of the Constitution", ["184 (3)"]),
    ("Article 2A", ["2A"]),
    ("Articles 9 and 14", ["9", "14"]),
    ("Articles 9, 14 and 25 of the Constitution", ["9", "14", "25"]),
    ("Article 999 is not a thing", []),
    ("", []),
])
def test_article_refs(text, refs):
    assert [str(r) for r in extract_article_refs(text)] == refs


def test_article_ref_order_and_parse():
    assert ArticleRef.parse("184 (3)") == ArticleRef(184, "", 3)
    assert str(ArticleRef.parse("2A")) == "2A"


@pytest.mark.parametrize("text, cites", [
    ("PLD 1955 FC 240", [(1955, "FC", 240)]),
    ("PLD 2009 SC 879", [(2009, "SC", 879)]),
    ("reported as PLD 2011 Lahore 12 and PLD 1999 Kar. 3", [(2011, "Lah", 12), (1999, "Kar", 3)]),
    ("PLDX 1999 SC 1", []),
    ("XPLD 1999 SC 1", []),
])
def test_pld(text, cites):
    assert [(c.year, c.court, c.number) for c in extract_pld(text)] == cites


def test_unknown_pld_court_kept_verbatim():
    (c,) = extract_pld("PLD 1990 Quetta 7 and PLD 1991 Zzz 8")[1:]
    assert (c.court, c.known_court) == ("Zzz", False)
    assert str(c) == "PLD 1991 Zzz 8"


@pytest.mark.parametrize("text, cites", [
    ("1991 SCMR 1041", [(1991, 1041)]),
    ("2012 SCMR 773", [(2012, 773)]),
    ("SCMR 1041", []),
    ("(1998 SCMR 793) and 2010 SCMR 1301", [(1998, 793), (2010, 1301)]),
    ("2010 S.C.M.R. 1301", []),
])
def test_scmr(text, cites):
    assert [(c.year, c.number) for c in extract_scmr(text)] == cites


def test_citation_string_forms():
    assert str(PldCitation(2009, "SC", 879)) == "PLD 2009 SC 879"
    assert str(ScmrCitation(1991, 1041)) == "1991 SCMR 1041"
    assert PldCitation.parse("PLD 2009 SC 879") == PldCitation(2009, "SC", 879)
    assert ScmrCitation.parse("1991 SCMR 1041") == ScmrCitation(1991, 1041)


@given(st.integers(1947, 2100), st.sampled_from(["SC", "FC", "Lah", "Kar", "Pesh", "Quetta", "AJK"]),
       st.integers(1, 99999))
def test_pld_round_trip(year, court, number):
    c = PldCitation(year, court, number)
    assert extract_pld(f"see {c}.") == [c]


@given(st.integers(1947, 2100), st.integers(1, 99999))
def test_scmr_round_trip(year, number):
    c = ScmrCitation(year, number)
    assert extract_scmr(f"({c})") == [c]


def test_suo_moto_flag():
    assert is_suo_moto({CaseType.SUO_MOTO}, "")
    assert is_suo_moto(set(), "Suo Motu action regarding load shedding")
    assert not is_suo_moto({CaseType.CIVIL}, "Civil Appeal 4/2010")


def _doc(status=Status.CONVERTED, text=PREAMBLE, title="Const. P. 12/2011", date="2011-05-03"):
    return Document("d", MetadataRecord("https://h/d.pdf", title, date, ""), status, None,
                    text if status is Status.CONVERTED else None)


def test_analyze_document(lookup, roster):
    f = analyze_document(_doc(), lookup, roster)
    assert f.year == 2011 and f.types == {CaseType.CONSTITUTION}
    assert f.bench[0] == Matched("iftikhar-muhammad-chaudhry").key
    assert len(f.bench) == 3 and f.jurisdiction.label == "Original"
    assert DocFacts.from_json(f.to_json()) == f


def test_unknown_judge_kept_as_new(lookup, roster):
    text = "PRESENT:\nMR. JUSTICE NOBODY WE KNOW\n\nJUDGMENT\n"
    f = analyze_document(_doc(text=text), lookup, roster)
    assert f.bench == (New("nobody we know").key,)


def test_metadata_only(lookup, roster):
    f = analyze_document(_doc(Status.FETCHED), lookup, roster, allow_metadata_only=True)
    assert not f.text_analyzed and f.bench == () and f.pld == frozenset()
    assert f.types == {CaseType.CONSTITUTION}


def test_unconverted_strict(lookup, roster):
    with pytest.raises(NotAnalyzable):
        analyze_document(_doc(Status.FETCHED), lookup, roster)


def test_occurrences_keep_multiplicity(lookup, roster):
    text = PREAMBLE + "PLD 1955 FC 240 ... PLD 1955 FC 240 and Article 9, Article 9.\n"
    f = analyze_document(_doc(text=text), lookup, roster)
    assert len(f.pld_occurrences) == 2 and len(f.pld) == 1
    assert len(f.article_occurrences) == 2 and f.articles == {ArticleRef(9)}

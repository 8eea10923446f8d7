import json

import pytest

from misl.corpus_store import CorpusStore, MetadataRecord, Status, doc_id_stem
from misl.errors import InvalidRecord, InvalidTransition, ManifestCorrupt, NotFound


def rec(name, title="Const.P.1/2010", date="12-04-2010"):
    return MetadataRecord(f"https://example.org/files/{name}.pdf", title, date, "")


def test_add_record_uses_final_path_segment(tmp_path):
    store = CorpusStore(tmp_path)
    assert store.add_record(rec("x")) == "x"
    assert len(store) == 1
    assert CorpusStore(tmp_path).add_record(rec("x")) == "x"


def test_add_is_idempotent(tmp_path):
    store = CorpusStore(tmp_path)
    a = store.add_record(rec("x"))
    b = store.add_record(rec("x"))
    assert a == b and len(store) == 1


def test_colliding_stems_get_suffix(tmp_path):
    store = CorpusStore(tmp_path)
    store.add_record(rec("x"))
    other = MetadataRecord("https://example.org/other/X.PDF", "t", None, "")
    assert store.add_record(other) == "x-2"


@pytest.mark.parametrize("link", ["", "   "])
def test_empty_link_rejected(tmp_path, link):
    with pytest.raises(InvalidRecord):
        CorpusStore(tmp_path).add_record(MetadataRecord(link, "t", None, ""))


def test_doc_id_stem_sanitizes():
    assert doc_id_stem("http://h/a/b/Const P 1 (2010).pdf?x=1") == "const-p-1-2010"


def test_attach_round_trip_and_reload(tmp_path):
    store = CorpusStore(tmp_path)
    doc_id = store.add_record(rec("x"))
    store.mark_fetched(doc_id)
    text = "PRESENT:\nMR. JUSTICE A\nا mixed text"
    store.attach_text(doc_id, text)
    assert store.load(doc_id).text == text
    again = CorpusStore(tmp_path)
    assert again.load(doc_id).text == text
    assert again.get(doc_id).status is Status.CONVERTED


def test_attach_to_indexed_is_invalid(tmp_path):
    store = CorpusStore(tmp_path)
    doc_id = store.add_record(rec("x"))
    with pytest.raises(InvalidTransition):
        store.attach_text(doc_id, "text")


def test_unknown_id(tmp_path):
    with pytest.raises(NotFound):
        CorpusStore(tmp_path).attach_text("nope", "text")


def test_transitions_only_move_forward(tmp_path):
    store = CorpusStore(tmp_path)
    doc_id = store.add_record(rec("x"))
    store.mark_dead(doc_id)
    with pytest.raises(InvalidTransition):
        store.mark_fetched(doc_id)
    other = store.add_record(rec("y"))
    store.mark_fetched(other)
    store.mark_conversion_failed(other, "corrupt_source")
    with pytest.raises(InvalidTransition):
        store.attach_text(other, "late")


def test_scan_empty(tmp_path):
    assert list(CorpusStore(tmp_path).scan()) == []


def test_scan_filters_in_id_order(tmp_path):
    store = CorpusStore(tmp_path)
    for name in ("c", "a", "b"):
        store.add_record(rec(name))
    for name in ("c", "a"):
        store.mark_fetched(name)
        store.attach_text(name, f"text {name}")
    got = list(store.scan(Status.CONVERTED))
    assert [d.id for d in got] == ["a", "c"]
    assert [d.id for d in store.scan()] == ["a", "b", "c"]
    assert [d.text for d in store.scan(lambda d: d.id != "b", with_text=True)] == ["text a", "text c"]


def test_manifest_line_number_reported(tmp_path):
    store = CorpusStore(tmp_path)
    store.add_record(rec("a"))
    store.add_record(rec("b"))
    lines = store.manifest_path.read_text().splitlines()
    lines.insert(1, "{not json")
    store.manifest_path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ManifestCorrupt) as info:
        CorpusStore(tmp_path)
    assert info.value.line == 2


def test_manifest_fields_and_iso_date(tmp_path):
    store = CorpusStore(tmp_path)
    store.add_record(rec("a", date="14th August 2014"))
    row = json.loads(store.manifest_path.read_text())
    assert list(row) == ["id", "link", "title", "date", "description", "status", "failure_reason"]
    assert row["date"] == "2014-08-14" and row["status"] == "indexed"


def test_batch_defers_writes(tmp_path):
    store = CorpusStore(tmp_path)
    with store.batch():
        store.add_record(rec("a"))
        assert not store.manifest_path.exists()
    assert store.manifest_path.exists()
    assert len(CorpusStore(tmp_path)) == 1

import json

import pytest

from termex.corpus import (
    DuplicateId,
    EmptyCorpus,
    MalformedLine,
    MissingKey,
    SentenceRecord,
    check_term_containment,
    corpus_stats,
    load_corpus,
    save_corpus,
)


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
    return path


MEDICAL_ROW = {
    "id": "q1",
    "text": "The blood pressure measurement is recorded daily.",
    "domain": "heart_failure",
    "terms": ["blood pressure"],
}


class TestLoadCorpus:
    def test_single_record(self, tmp_path):
        path = write_jsonl(tmp_path / "c.jsonl", [MEDICAL_ROW])
        records = load_corpus(path)
        assert len(records) == 1
        rec = records[0]
        assert rec.id == "q1"
        assert rec.domain == "heart_failure"
        assert rec.terms == ("blood pressure",)

    def test_empty_term_list_is_valid(self, tmp_path):
        row = dict(MEDICAL_ROW, id="q2", terms=[])
        path = write_jsonl(tmp_path / "c.jsonl", [row])
        assert load_corpus(path)[0].terms == ()

    def test_duplicate_id(self, tmp_path):
        path = write_jsonl(
            tmp_path / "c.jsonl", [MEDICAL_ROW, dict(MEDICAL_ROW, text="other")]
        )
        with pytest.raises(DuplicateId):
            load_corpus(path)

    def test_missing_key(self, tmp_path):
        row = {k: v for k, v in MEDICAL_ROW.items() if k != "terms"}
        path = write_jsonl(tmp_path / "c.jsonl", [row])
        with pytest.raises(MissingKey):
            load_corpus(path)

    def test_malformed_line_reports_number(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text(
            json.dumps(MEDICAL_ROW) + "\nnot json\n", encoding="utf-8"
        )
        with pytest.raises(MalformedLine) as excinfo:
            load_corpus(path)
        assert "line 2" in str(excinfo.value)

    def test_duplicate_terms_deduped_with_warning(self, tmp_path, caplog):
        row = dict(MEDICAL_ROW, terms=["a", "b", "a"])
        path = write_jsonl(tmp_path / "c.jsonl", [row])
        with caplog.at_level("WARNING"):
            records = load_corpus(path)
        assert records[0].terms == ("a", "b")
        assert any("duplicate" in message for message in caplog.messages)

    def test_bad_split_rejected(self, tmp_path):
        row = dict(MEDICAL_ROW, split="dev")
        path = write_jsonl(tmp_path / "c.jsonl", [row])
        with pytest.raises(MalformedLine):
            load_corpus(path)

    def test_round_trip(self, tmp_path, fixture_paths):
        records = load_corpus(fixture_paths["demo_corpus"])
        out = tmp_path / "copy.jsonl"
        save_corpus(out, records)
        assert load_corpus(out) == records


class TestTermContainment:
    def test_contained_term_no_warning(self):
        rec = SentenceRecord(
            id="q1",
            text="The blood pressure measurement is recorded daily.",
            domain="heart_failure",
            terms=("blood pressure",),
        )
        assert check_term_containment(rec) == []

    def test_case_mismatch_warns(self):
        rec = SentenceRecord(
            id="q1",
            text="The blood pressure measurement is recorded daily.",
            domain="heart_failure",
            terms=("Blood Pressure",),
        )
        assert len(check_term_containment(rec)) == 1

    def test_empty_terms_no_warnings(self):
        rec = SentenceRecord(id="x", text="anything", domain="d", terms=())
        assert check_term_containment(rec) == []


class TestCorpusStats:
    def test_acter_scale_fixture_rounds_to_table_values(self):
        # 18 and 20 token sentences with 2 terms each: averages 19 / 2.
        words_a = " ".join(f"w{i}" for i in range(18))
        words_b = " ".join(f"w{i}" for i in range(20))
        records = [
            SentenceRecord(id="a", text=words_a, domain="d", terms=("t1", "t2")),
            SentenceRecord(id="b", text=words_b, domain="d", terms=("t3", "t4")),
        ]
        stats = corpus_stats(records)
        assert stats.avg_words == 19.0
        assert stats.avg_terms == 2.0
        assert stats.avg_words_rounded == 19
        assert stats.avg_terms_rounded == 2

    def test_exact_rational_values(self):
        records = [
            SentenceRecord(id="a", text="one two three", domain="d", terms=("x",)),
            SentenceRecord(id="b", text="one two", domain="d", terms=()),
        ]
        stats = corpus_stats(records)
        assert stats.avg_words == 2.5
        assert stats.avg_terms == 0.5
        assert stats.n_sentences == 2

    def test_single_sentence(self):
        records = [SentenceRecord(id="a", text="just one", domain="d", terms=("t",))]
        stats = corpus_stats(records)
        assert stats.avg_words == 2.0
        assert stats.avg_terms == 1.0

    def test_all_empty_terms(self):
        records = [
            SentenceRecord(id=str(i), text="a b", domain="d", terms=())
            for i in range(3)
        ]
        assert corpus_stats(records).avg_terms == 0.0

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            corpus_stats([])

    def test_permutation_invariant(self, fixture_paths):
        records = load_corpus(fixture_paths["demo_corpus"])
        forward = corpus_stats(records)
        backward = corpus_stats(list(reversed(records)))
        assert forward == backward

import json
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from retta.corpus import (
    ContextSpec,
    Corpus,
    corpus_stats,
    filter_by_context,
    load_jsonl,
    save_jsonl,
)
from retta.errors import IntegrityError, ParseError, ValidationError

from .conftest import corpus_of, make_doc, ts


def write_lines(path, records):
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


VALID = [
    {"id": "t1", "text": "signal out at main", "source": "twitter", "ts": "2024-05-01T08:00:00Z"},
    {"id": "t2", "text": "bus stuck", "source": "twitter", "ts": "2024-05-01T08:05:00Z",
     "tags": ["#yyc", "#traffic"]},
    {"id": "t3", "text": "camera offline", "source": "twitter", "ts": "2024-05-01T08:10:00Z",
     "lat": 51.0, "lon": -114.0},
]


class TestLoadJsonl:
    def test_loads_valid_records_in_order(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_lines(path, VALID)
        corpus = load_jsonl(path)
        assert [d.id for d in corpus] == ["t1", "t2", "t3"]
        assert corpus.source_counts["twitter"] == 3

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        assert len(load_jsonl(path)) == 0

    def test_missing_text_field_reports_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        records = [VALID[0], {"id": "t2", "source": "twitter", "ts": "2024-05-01T08:00:00Z"}]
        write_lines(path, records)
        with pytest.raises(ParseError) as err:
            load_jsonl(path)
        assert err.value.line == 2
        assert "text" in str(err.value)

    def test_invalid_json_reports_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(json.dumps(VALID[0]) + "\n{not json\n")
        with pytest.raises(ParseError) as err:
            load_jsonl(path)
        assert err.value.line == 2

    def test_duplicate_id_names_the_id(self, tmp_path):
        path = tmp_path / "dup.jsonl"
        write_lines(path, [VALID[0], VALID[0]])
        with pytest.raises(IntegrityError, match="t1"):
            load_jsonl(path)

    def test_latitude_out_of_range_rejected(self, tmp_path):
        path = tmp_path / "geo.jsonl"
        write_lines(path, [{**VALID[0], "lat": 91.0, "lon": 0.0}])
        with pytest.raises(ParseError, match="latitude"):
            load_jsonl(path)

    def test_unknown_fields_ignored(self, tmp_path):
        path = tmp_path / "extra.jsonl"
        write_lines(path, [{**VALID[0], "favourited": True, "retweets": 3}])
        assert len(load_jsonl(path)) == 1

    def test_roundtrip_equals(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_lines(path, VALID)
        first = load_jsonl(path)
        out = tmp_path / "out.jsonl"
        save_jsonl(first, out)
        second = load_jsonl(out)
        assert first == second


class TestFilterByContext:
    def test_keyword_substring_match(self):
        docs = [make_doc(f"d{i}", text="signal broken" if i < 4 else "bus late")
                for i in range(10)]
        spec = ContextSpec(keywords=["signal"], max_documents=100)
        result = filter_by_context(corpus_of(*docs), spec)
        assert [d.id for d in result] == ["d0", "d1", "d2", "d3"]

    def test_no_constraints_is_identity(self):
        docs = [make_doc(f"d{i}", when=ts(minute=i)) for i in range(5)]
        corpus = corpus_of(*docs)
        spec = ContextSpec(max_documents=5)
        assert filter_by_context(corpus, spec) == corpus

    def test_truncation_keeps_earliest(self):
        docs = [make_doc(f"d{i}", when=ts(minute=10 - i)) for i in range(5)]
        spec = ContextSpec(max_documents=1)
        result = filter_by_context(corpus_of(*docs), spec)
        assert [d.id for d in result] == ["d4"]

    def test_hashtag_match_counts_as_textual(self):
        tagged = make_doc("a", text="no match here", tags=["#fixit"])
        plain = make_doc("b", text="no match here")
        spec = ContextSpec(keywords=["signal"], hashtags=["fixit"])
        result = filter_by_context(corpus_of(tagged, plain), spec)
        assert [d.id for d in result] == ["a"]

    def test_keyword_case_insensitive(self):
        doc = make_doc("a", text="SIGNAL msg")
        spec = ContextSpec(keywords=["signal"])
        assert len(filter_by_context(corpus_of(doc), spec)) == 1

    def test_date_range(self):
        early = make_doc("a", when=ts(hour=8))
        late = make_doc("b", when=ts(hour=20))
        spec = ContextSpec(date_range=(ts(hour=7), ts(hour=9)))
        assert [d.id for d in filter_by_context(corpus_of(early, late), spec)] == ["a"]

    def test_geo_filter(self):
        near = make_doc("a", geo=(51.05, -114.07))
        far = make_doc("b", geo=(53.5, -113.5))
        nogeo = make_doc("c")
        spec = ContextSpec(geo_filter=(51.05, -114.07, 25.0))
        assert [d.id for d in filter_by_context(corpus_of(near, far, nogeo), spec)] == ["a"]

    def test_language_filter(self):
        en = make_doc("a")
        fr = make_doc("b", lang="fr")
        spec = ContextSpec(language="en")
        assert [d.id for d in filter_by_context(corpus_of(en, fr), spec)] == ["a"]

    def test_query_term_recorded(self):
        doc = make_doc("a", text="the signal is stuck")
        spec = ContextSpec(keywords=["Signal"])
        result = filter_by_context(corpus_of(doc), spec)
        assert result.documents[0].meta["query_term"] == "signal"
        assert "query_term" not in doc.meta  # input untouched

    def test_rejects_invalid_spec(self):
        with pytest.raises(ValidationError):
            filter_by_context(corpus_of(), ContextSpec(max_documents=0))

    def test_order_timestamp_then_id(self):
        d1 = make_doc("b", when=ts(hour=8))
        d2 = make_doc("a", when=ts(hour=8))
        d3 = make_doc("c", when=ts(hour=7))
        result = filter_by_context(corpus_of(d1, d2, d3), ContextSpec())
        assert [d.id for d in result] == ["c", "a", "b"]


@st.composite
def small_corpora(draw):
    n = draw(st.integers(0, 12))
    docs = []
    for i in range(n):
        text = draw(st.sampled_from(
            ["signal stuck", "bus late again", "smooth traffic", "camera offline",
             "accident on main", "light is red forever"]))
        minute = draw(st.integers(0, 59))
        tags = draw(st.sampled_from([None, ["#yyc"], ["#fix", "#yyc"]]))
        docs.append(make_doc(f"d{i}", text=text, when=ts(minute=minute), tags=tags))
    return corpus_of(*docs)


@st.composite
def contexts(draw):
    keywords = draw(st.lists(st.sampled_from(["signal", "bus", "traffic", "zzz"]), max_size=2))
    hashtags = draw(st.lists(st.sampled_from(["yyc", "fix", "none"]), max_size=2))
    max_docs = draw(st.integers(1, 20))
    return ContextSpec(keywords=keywords, hashtags=hashtags, max_documents=max_docs)


class TestFilterProperties:
    @given(small_corpora(), contexts())
    @settings(max_examples=60, deadline=None)
    def test_idempotent(self, corpus, spec):
        once = filter_by_context(corpus, spec)
        twice = filter_by_context(once, spec)
        assert once == twice

    @given(small_corpora(), contexts())
    @settings(max_examples=60, deadline=None)
    def test_subset_by_id(self, corpus, spec):
        result = filter_by_context(corpus, spec)
        assert {d.id for d in result} <= {d.id for d in corpus}


class TestCorpusStats:
    def test_counts_by_source(self):
        docs = [make_doc(f"t{i}") for i in range(3)]
        docs += [make_doc(f"h{i}", source="historical") for i in range(2)]
        stats = corpus_stats(corpus_of(*docs))
        assert stats.per_source["twitter"] == 3
        assert stats.per_source["historical"] == 2

    def test_empty(self):
        stats = corpus_stats(corpus_of())
        assert stats.total == 0
        assert stats.min_timestamp is None and stats.max_timestamp is None
        assert stats.distinct_hashtags == 0

    def test_distinct_hashtags(self):
        docs = [
            make_doc("a", tags=["#yyc"]),
            make_doc("b", tags=["#yyc"]),
            make_doc("c", tags=["#traffic"]),
        ]
        assert corpus_stats(corpus_of(*docs)).distinct_hashtags == 2

    def test_min_max_timestamps(self):
        docs = [make_doc("a", when=ts(hour=8)), make_doc("b", when=ts(hour=20))]
        stats = corpus_stats(corpus_of(*docs))
        assert stats.min_timestamp == ts(hour=8)
        assert stats.max_timestamp == ts(hour=20)


class TestCorpusInvariants:
    def test_duplicate_ids_rejected_on_construction(self):
        with pytest.raises(IntegrityError):
            corpus_of(make_doc("x"), make_doc("x"))

    def test_timestamps_truncated_to_seconds(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_lines(path, [{**VALID[0], "ts": "2024-05-01T08:00:00.250Z"}])
        doc = load_jsonl(path).documents[0]
        assert doc.timestamp.microsecond == 0

import time

from retta.porter import stem


class TestKnownStems:
    def test_plural_stripping(self):
        assert stem("caresses") == "caress"
        assert stem("ponies") == "poni"
        assert stem("cats") == "cat"

    def test_fixed_points(self):
        assert stem("run") == "run"
        assert stem("feed") == "feed"
        assert stem("sky") == "sky"

    def test_suffix_chains(self):
        assert stem("relational") == "relat"
        assert stem("hopefulness") == "hope"
        assert stem("generalization") == "gener"
        assert stem("malfunctioning") == "malfunct"
        assert stem("accidents") == "accid"

    def test_short_words_untouched(self):
        assert stem("a") == "a"
        assert stem("is") == "is"
        assert stem("by") == "by"

    def test_non_alpha_untouched(self):
        assert stem("can't") == "can't"
        assert stem("café") == "café"
        assert stem("x9") == "x9"


class TestOfficialVocabulary:
    def test_full_agreement(self, porter_pair):
        voc, expected = porter_pair
        assert len(voc) > 23_000
        mismatches = [
            (word, stem(word), want)
            for word, want in zip(voc, expected)
            if stem(word) != want
        ]
        assert mismatches == []

    def test_runtime_under_a_second(self, porter_pair):
        voc, _ = porter_pair
        start = time.perf_counter()
        for word in voc:
            stem(word)
        assert time.perf_counter() - start < 1.0

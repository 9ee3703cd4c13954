from collections import Counter

from hypothesis import given
from hypothesis import strategies as st

import pytest

from emocast.corpus import CharacterRecord, Corpus, Gender
from emocast.lexical import (
    FrequencyTable,
    default_nouns,
    default_stopwords,
    exclusive_nouns,
    group_frequencies,
    load_word_list,
)


def corpus_of(*records):
    return Corpus(records=list(records), provenance={})


def rec(gender, *dialogues, name="X", movie="m"):
    return Corpus(
        records=[
            CharacterRecord(
                name=name, movie=movie, year=2000, gender=gender, dialogues=tuple(dialogues)
            )
        ],
        provenance={},
    ).records[0]


class TestGroupFrequencies:
    def test_single_token_after_stopwords(self):
        corpus = corpus_of(rec(Gender.FEMALE, "the dress"))
        table = group_frequencies(corpus, stopwords={"the"})
        assert table.counts["female"] == Counter({"dress": 1})
        assert table.counts["male"] == Counter()

    def test_shared_word_counted_in_both(self):
        corpus = corpus_of(
            rec(Gender.FEMALE, "time waits", name="A"),
            rec(Gender.MALE, "time flies", name="B"),
        )
        table = group_frequencies(corpus, stopwords=set())
        assert table.counts["female"]["time"] == 1
        assert table.counts["male"]["time"] == 1

    def test_empty_corpus(self):
        table = group_frequencies(corpus_of(), stopwords=set())
        assert all(not counter for counter in table.counts.values())

    def test_unknown_characters_ignored(self):
        corpus = corpus_of(rec(Gender.UNKNOWN, "mystery words here"))
        table = group_frequencies(corpus, stopwords=set())
        assert all(not counter for counter in table.counts.values())

    def test_short_tokens_dropped(self):
        corpus = corpus_of(rec(Gender.MALE, "o a go going"))
        table = group_frequencies(corpus, stopwords=set())
        assert set(table.counts["male"]) == {"go", "going"}


NOUNS = {"kitchen", "time", "war", "dress"}


class TestExclusiveNouns:
    def test_shared_nouns_excluded(self):
        freq = FrequencyTable(
            counts={
                "female": Counter({"kitchen": 5, "time": 9}),
                "male": Counter({"time": 40, "war": 7}),
            }
        )
        out = exclusive_nouns(freq, NOUNS, top_n=10)
        assert out["female"] == [("kitchen", 5)]
        assert out["male"] == [("war", 7)]

    def test_identical_vocabularies_empty(self):
        counts = Counter({"time": 3, "war": 1})
        freq = FrequencyTable(counts={"female": counts.copy(), "male": counts.copy()})
        out = exclusive_nouns(freq, NOUNS, top_n=5)
        assert out == {"female": [], "male": []}

    def test_non_nouns_filtered(self):
        freq = FrequencyTable(
            counts={"female": Counter({"quickly": 9, "dress": 2}), "male": Counter()}
        )
        out = exclusive_nouns(freq, NOUNS, top_n=5)
        assert out["female"] == [("dress", 2)]

    def test_rank_by_count_then_alpha(self):
        freq = FrequencyTable(
            counts={
                "female": Counter({"dress": 2, "kitchen": 2, "time": 7}),
                "male": Counter(),
            }
        )
        out = exclusive_nouns(freq, NOUNS, top_n=3)
        assert out["female"] == [("time", 7), ("dress", 2), ("kitchen", 2)]

    def test_top_n_truncates(self):
        freq = FrequencyTable(
            counts={"female": Counter({"dress": 2, "kitchen": 1}), "male": Counter()}
        )
        out = exclusive_nouns(freq, NOUNS, top_n=1)
        assert out["female"] == [("dress", 2)]

    def test_top_n_must_be_positive(self):
        with pytest.raises(ValueError):
            exclusive_nouns(FrequencyTable(counts={}), NOUNS, top_n=0)

    @given(
        st.dictionaries(st.sampled_from(sorted(NOUNS) + ["misc"]), st.integers(1, 9), max_size=5),
        st.dictionaries(st.sampled_from(sorted(NOUNS) + ["misc"]), st.integers(1, 9), max_size=5),
    )
    def test_outputs_disjoint_and_noun_only(self, female_counts, male_counts):
        freq = FrequencyTable(
            counts={"female": Counter(female_counts), "male": Counter(male_counts)}
        )
        out = exclusive_nouns(freq, NOUNS, top_n=10)
        female_words = {w for w, _ in out["female"]}
        male_words = {w for w, _ in out["male"]}
        assert not female_words & male_words
        assert female_words <= NOUNS and male_words <= NOUNS


class TestWordLists:
    def test_load_skips_comments_and_blanks(self):
        words = load_word_list("# heading\n\nWar\n time \n")
        assert words == {"war", "time"}

    def test_bundled_resources_present(self):
        stopwords = default_stopwords()
        nouns = default_nouns()
        assert "the" in stopwords
        assert {"kitchen", "dress", "war", "time", "business", "world"} <= nouns
        assert not (stopwords & nouns)

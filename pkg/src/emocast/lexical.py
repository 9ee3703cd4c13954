"""Word-usage contrast between gender groups.

Counts tokens per group with stopwords removed, restricts to nouns via a
bundled word list (no tagger dependency, fully deterministic), and drops
every noun both groups use so only the distinctive vocabulary remains.
Both resource files are plain newline-delimited text and can be swapped
out by the caller.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable

from .corpus import Corpus, Gender
from .emotion import tokenize

MIN_TOKEN_LEN = 2
GROUPS = ("female", "male")


@dataclass
class FrequencyTable:
    """Per-group word counts: group label -> Counter of lowercase words."""

    counts: dict[str, Counter]


def load_word_list(text: str) -> set[str]:
    """Newline-delimited words, lowercased; blank lines and # comments skipped."""
    words = set()
    for line in text.splitlines():
        word = line.strip().lower()
        if word and not word.startswith("#"):
            words.add(word)
    return words


def _bundled(name: str) -> str:
    return resources.files("emocast").joinpath(f"data/{name}").read_text(encoding="utf-8")


def default_stopwords() -> set[str]:
    return load_word_list(_bundled("stopwords.txt"))


def default_nouns() -> set[str]:
    return load_word_list(_bundled("nouns.txt"))


def load_word_list_file(path: str | Path) -> set[str]:
    return load_word_list(Path(path).read_text(encoding="utf-8"))


def group_frequencies(
    corpus: Corpus,
    stopwords: set[str],
    tokenizer: Callable[[str], list[str]] = tokenize,
) -> FrequencyTable:
    """Token counts per gender group; UNKNOWN characters belong to neither."""
    counts = {group: Counter() for group in GROUPS}
    group_of = {Gender.FEMALE: "female", Gender.MALE: "male"}
    for rec in corpus.records:
        group = group_of.get(rec.gender)
        if group is None:
            continue
        counter = counts[group]
        for dialogue in rec.dialogues:
            for token in tokenizer(dialogue):
                if len(token) >= MIN_TOKEN_LEN and token not in stopwords:
                    counter[token] += 1
    return FrequencyTable(counts=counts)


def exclusive_nouns(
    freq: FrequencyTable,
    nouns: Iterable[str],
    top_n: int,
) -> dict[str, list[tuple[str, int]]]:
    """Top nouns per group after dropping every word both groups use.

    Ranking is by count descending, then alphabetically, so the output is
    deterministic. The two lists are disjoint by construction.
    """
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    noun_set = set(nouns)
    female = freq.counts.get("female", Counter())
    male = freq.counts.get("male", Counter())
    shared = set(female) & set(male)

    def top(counter: Counter) -> list[tuple[str, int]]:
        candidates = [
            (word, count)
            for word, count in counter.items()
            if word in noun_set and word not in shared
        ]
        candidates.sort(key=lambda pair: (-pair[1], pair[0]))
        return candidates[:top_n]

    return {"female": top(female), "male": top(male)}

"""Plutchik emotion embeddings for dialogue.

A dialogue is scored against a word-affect lexicon (NRC word-level TSV
format) into a probability distribution over the eight primary emotions:
every affect assignment of every matched token contributes one count, and
counts are normalized so the vector sums to one. The eight primaries then
expand to 32 dimensions through the 24 compound emotions (dyads) of the
wheel, each scored as the arithmetic mean of its two constituents, e.g.
envy is the mean of sadness and anger.

Dialogues with no lexicon hit carry no affect evidence; they score as the
all-zero vector and are excluded from per-character averages.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .corpus import CharacterRecord
from .errors import LengthError, LexiconError

PRIMARY_EMOTIONS = (
    "anger",
    "anticipation",
    "disgust",
    "fear",
    "joy",
    "sadness",
    "surprise",
    "trust",
)

POSITIVE_PRIMARIES = ("joy", "anticipation", "trust", "surprise")
NEGATIVE_PRIMARIES = ("anger", "fear", "sadness", "disgust")

# Sentiment columns of the NRC format; accepted in input, not scored here.
_SENTIMENT_AFFECTS = ("positive", "negative")

# Dyad -> its two primaries, following the wheel's adjacency rings.
DYADS: dict[str, tuple[str, str]] = {
    "love": ("joy", "trust"),
    "submission": ("trust", "fear"),
    "awe": ("fear", "surprise"),
    "disapproval": ("surprise", "sadness"),
    "remorse": ("sadness", "disgust"),
    "contempt": ("disgust", "anger"),
    "aggression": ("anger", "anticipation"),
    "optimism": ("anticipation", "joy"),
    "guilt": ("joy", "fear"),
    "curiosity": ("trust", "surprise"),
    "despair": ("fear", "sadness"),
    "confined": ("surprise", "disgust"),
    "envy": ("sadness", "anger"),
    "cynicism": ("disgust", "anticipation"),
    "pride": ("anger", "joy"),
    "hope": ("anticipation", "trust"),
    "delight": ("joy", "surprise"),
    "sentimentality": ("trust", "sadness"),
    "shame": ("fear", "disgust"),
    "outrage": ("surprise", "anger"),
    "pessimism": ("sadness", "anticipation"),
    "morbidness": ("disgust", "joy"),
    "dominance": ("anger", "trust"),
    "anxiety": ("anticipation", "fear"),
}

# "aggressiveness" appears as a synonym for the aggression dyad in some
# report conventions; resolve it when reading external column names.
DYAD_ALIASES = {"aggressiveness": "aggression"}


def resolve_emotion_name(name: str) -> str:
    """Canonical column name for ``name``, accepting known aliases."""
    key = name.strip().lower()
    key = DYAD_ALIASES.get(key, key)
    if key not in EMOTION_COLUMNS:
        raise KeyError(f"unknown emotion {name!r}")
    return key

# Canonical 32-column report order: primaries and dyads interleaved.
EMOTION_COLUMNS = (
    "anger",
    "joy",
    "anticipation",
    "surprise",
    "trust",
    "delight",
    "sadness",
    "disgust",
    "hope",
    "curiosity",
    "despair",
    "confined",
    "envy",
    "cynicism",
    "pride",
    "love",
    "submission",
    "shame",
    "awe",
    "disapproval",
    "remorse",
    "aggression",
    "anxiety",
    "outrage",
    "fear",
    "dominance",
    "guilt",
    "sentimentality",
    "optimism",
    "pessimism",
    "contempt",
    "morbidness",
)

_PRIMARY_SET = frozenset(PRIMARY_EMOTIONS)

_TOKEN_RE = re.compile(r"[^\W\d_]+(?:['’][^\W\d_]+)*")


class SentimentLabel(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class EmotionLexicon:
    """Word -> set of primary affects, plus a count of skipped phrase rows."""

    entries: dict[str, frozenset[str]]
    skipped_phrases: int = 0

    def affects(self, word: str) -> frozenset[str]:
        return self.entries.get(word, frozenset())

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class PrimaryVector:
    """Probability distribution over the eight primaries.

    With at least one lexicon hit the scores sum to one; with none, every
    score is zero and hit_count is zero.
    """

    anger: float = 0.0
    anticipation: float = 0.0
    disgust: float = 0.0
    fear: float = 0.0
    joy: float = 0.0
    sadness: float = 0.0
    surprise: float = 0.0
    trust: float = 0.0
    hit_count: int = 0

    def score(self, emotion: str) -> float:
        if emotion not in _PRIMARY_SET:
            raise KeyError(f"not a primary emotion: {emotion!r}")
        return getattr(self, emotion)

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in PRIMARY_EMOTIONS}


def load_lexicon(text: str) -> EmotionLexicon:
    """Parse NRC-format rows ``word<TAB>affect<TAB>flag``.

    Rows with flag 1 and a primary affect populate the lexicon; positive
    and negative sentiment rows are accepted but not stored. Multi-word
    phrase entries are skipped and counted, token matching cannot reach
    them. Anything else raises LexiconError with its line number.
    """
    entries: dict[str, set[str]] = {}
    skipped = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise LexiconError(f"line {lineno}: expected 3 tab-separated fields")
        word, affect, flag = (part.strip() for part in parts)
        affect = affect.lower()
        if not word:
            raise LexiconError(f"line {lineno}: empty word")
        if affect not in _PRIMARY_SET and affect not in _SENTIMENT_AFFECTS:
            raise LexiconError(f"line {lineno}: unknown affect {affect!r}")
        if flag not in ("0", "1"):
            raise LexiconError(f"line {lineno}: flag must be 0 or 1, got {flag!r}")
        if flag == "0" or affect in _SENTIMENT_AFFECTS:
            continue
        word = word.lower()
        if any(ch.isspace() for ch in word):
            skipped += 1
            continue
        entries.setdefault(word, set()).add(affect)
    return EmotionLexicon(
        entries={word: frozenset(affects) for word, affects in entries.items()},
        skipped_phrases=skipped,
    )


def load_lexicon_file(path: str | Path) -> EmotionLexicon:
    return load_lexicon(Path(path).read_text(encoding="utf-8"))


def tokenize(dialogue: str) -> list[str]:
    """Lowercase word tokens; letters and internal apostrophes only."""
    return _TOKEN_RE.findall(dialogue.lower())


def score_dialogue(dialogue: str, lexicon: EmotionLexicon) -> PrimaryVector:
    """Count every affect assignment of every matched token, then normalize."""
    counts: Counter[str] = Counter()
    for token in tokenize(dialogue):
        for affect in lexicon.affects(token):
            counts[affect] += 1
    total = sum(counts.values())
    if total == 0:
        return PrimaryVector()
    return PrimaryVector(
        hit_count=total,
        **{name: counts[name] / total for name in PRIMARY_EMOTIONS},
    )


def dyad_expand(
    pv: PrimaryVector,
    table: Mapping[str, tuple[str, str]] = DYADS,
) -> dict[str, float]:
    """Expand to the 32-dim vector: primaries pass through, dyads average.

    Output keys follow the canonical column order.
    """
    order = [name for name in EMOTION_COLUMNS if name in _PRIMARY_SET or name in table]
    order += [name for name in table if name not in EMOTION_COLUMNS]
    out: dict[str, float] = {}
    for name in order:
        if name in _PRIMARY_SET:
            out[name] = pv.score(name)
        else:
            a, b = table[name]
            out[name] = (pv.score(a) + pv.score(b)) / 2
    return out


def sentiment_of(pv: PrimaryVector) -> SentimentLabel:
    """Positive, negative, or neutral by comparing the two emotion groups."""
    if pv.hit_count == 0:
        return SentimentLabel.NEUTRAL
    pos = sum(pv.score(name) for name in POSITIVE_PRIMARIES)
    neg = sum(pv.score(name) for name in NEGATIVE_PRIMARIES)
    if pos > neg:
        return SentimentLabel.POSITIVE
    if neg > pos:
        return SentimentLabel.NEGATIVE
    return SentimentLabel.NEUTRAL


def sentiment_classifier(lexicon: EmotionLexicon) -> Callable[[str], SentimentLabel]:
    """Dialogue-level classifier backed by the lexicon.

    Returns a plain ``dialogue -> SentimentLabel`` callable so that any
    other classifier with the same shape (a neural model, a human labeler
    replaying annotations) can stand in for it, e.g. when building the
    agreement matrix.
    """

    def classify(dialogue: str) -> SentimentLabel:
        return sentiment_of(score_dialogue(dialogue, lexicon))

    return classify


def agreement_matrix(
    labelings: Mapping[str, Sequence[object]],
) -> tuple[list[str], list[list[float]]]:
    """Pairwise accuracy between label sequences over the same items.

    Cell (i, j) is the fraction of positions where sequence i equals
    sequence j, so the diagonal is 1.0 and the matrix is symmetric.
    """
    names = list(labelings)
    sequences = [list(labelings[name]) for name in names]
    if not sequences:
        raise LengthError("no label sequences given")
    length = len(sequences[0])
    if length == 0:
        raise LengthError("label sequences must be non-empty")
    for name, seq in zip(names, sequences):
        if len(seq) != length:
            raise LengthError(f"sequence {name!r} has length {len(seq)}, expected {length}")
    matrix = [
        [sum(a == b for a, b in zip(seq_i, seq_j)) / length for seq_j in sequences]
        for seq_i in sequences
    ]
    return names, matrix


@dataclass(frozen=True)
class CharacterEmotions:
    """Per-character mean 32-dim vector over its affect-bearing dialogues."""

    vector: dict[str, float]
    no_affect: bool
    scored_dialogues: int


def aggregate_character(
    record: CharacterRecord,
    lexicon: EmotionLexicon,
    table: Mapping[str, tuple[str, str]] = DYADS,
) -> CharacterEmotions:
    """Element-wise mean of the 32-dim vectors of dialogues with hits.

    Zero-hit dialogues would dilute the distribution with no evidence, so
    they are left out of the mean; a character whose every dialogue is
    zero-hit gets the zero vector and the no_affect flag.
    """
    if not record.dialogues:
        raise ValueError(f"character {record.name!r} has no dialogues")
    vectors = [
        dyad_expand(pv, table)
        for pv in (score_dialogue(d, lexicon) for d in record.dialogues)
        if pv.hit_count > 0
    ]
    if not vectors:
        zero = dyad_expand(PrimaryVector(), table)
        return CharacterEmotions(vector=zero, no_affect=True, scored_dialogues=0)
    n = len(vectors)
    mean = {name: sum(v[name] for v in vectors) / n for name in vectors[0]}
    return CharacterEmotions(vector=mean, no_affect=False, scored_dialogues=n)


def vector_row(vector: Mapping[str, float], columns: Iterable[str] = EMOTION_COLUMNS) -> list[float]:
    """Flatten a named vector into the canonical column order."""
    return [vector[name] for name in columns]

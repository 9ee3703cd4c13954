"""Corpus assembly: parsed dialogue joined with character metadata.

Metadata lives in a sidecar CSV (``movie,character,gender,year``). Characters
parsed from a script but missing from the CSV stay in the corpus with gender
UNKNOWN and the movie-level year, so an incomplete tag sheet never blocks a
run; two-group comparisons simply skip those records.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from enum import Enum

from .errors import AssemblyError, MetadataError
from .screenplay import CharacterDictionary, normalize_character_name

YEAR_MIN = 1870
YEAR_MAX = 2100

_HEADER = ["movie", "character", "gender", "year"]


class Gender(Enum):
    FEMALE = "female"
    MALE = "male"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class CharacterRecord:
    """A character within one movie; the same name elsewhere is a new record."""

    name: str
    movie: str
    year: int
    gender: Gender
    dialogues: tuple[str, ...]


@dataclass(frozen=True)
class CorpusSummary:
    characters: int
    dialogues: int
    female: int
    male: int
    unknown: int


@dataclass
class Corpus:
    records: list[CharacterRecord]
    provenance: dict[str, str]

    def summary(self) -> CorpusSummary:
        by_gender = {g: 0 for g in Gender}
        for rec in self.records:
            by_gender[rec.gender] += 1
        return CorpusSummary(
            characters=len(self.records),
            dialogues=sum(len(rec.dialogues) for rec in self.records),
            female=by_gender[Gender.FEMALE],
            male=by_gender[Gender.MALE],
            unknown=by_gender[Gender.UNKNOWN],
        )


MetadataMap = dict[tuple[str, str], tuple[Gender, int]]


def ingest_metadata(text: str) -> MetadataMap:
    """Parse the metadata CSV into (movie, name) -> (gender, year).

    Character names pass through the same normalization as parsed cues so
    the two sides join cleanly. Malformed rows, out-of-range years, and
    duplicate (movie, character) pairs raise MetadataError with the
    offending row number (header is row 1).
    """
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise MetadataError("empty metadata file")
    header = [cell.strip().lower() for cell in rows[0]]
    if header != _HEADER:
        raise MetadataError(f"row 1: expected header {','.join(_HEADER)!r}")
    meta: MetadataMap = {}
    for rownum, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 4:
            raise MetadataError(f"row {rownum}: expected 4 fields, got {len(row)}")
        movie, character, gender_text, year_text = (cell.strip() for cell in row)
        if not movie:
            raise MetadataError(f"row {rownum}: empty movie name")
        try:
            name = normalize_character_name(character)
        except Exception as exc:
            raise MetadataError(f"row {rownum}: bad character name: {exc}") from exc
        try:
            gender = Gender(gender_text.lower())
        except ValueError:
            raise MetadataError(
                f"row {rownum}: gender must be female/male/unknown, got {gender_text!r}"
            ) from None
        try:
            year = int(year_text)
        except ValueError:
            raise MetadataError(f"row {rownum}: year is not an integer: {year_text!r}") from None
        if not YEAR_MIN <= year <= YEAR_MAX:
            raise MetadataError(f"row {rownum}: year {year} outside [{YEAR_MIN}, {YEAR_MAX}]")
        key = (movie, name)
        if key in meta:
            raise MetadataError(f"row {rownum}: duplicate entry for {movie!r} / {name!r}")
        meta[key] = (gender, year)
    return meta


def assemble_corpus(
    dicts: dict[str, CharacterDictionary],
    meta: MetadataMap,
    provenance: dict[str, str] | None = None,
) -> Corpus:
    """Build CharacterRecords for every parsed character.

    Characters absent from the metadata get Gender.UNKNOWN and the movie
    year taken from that movie's first metadata row. A movie with no
    metadata rows at all raises AssemblyError.
    """
    movie_year: dict[str, int] = {}
    for (movie, _), (_, year) in meta.items():
        movie_year.setdefault(movie, year)

    records: list[CharacterRecord] = []
    for movie, entries in dicts.items():
        if movie not in movie_year:
            raise AssemblyError(f"movie {movie!r} has no metadata rows")
        for name, dialogues in entries.items():
            gender, year = meta.get((movie, name), (Gender.UNKNOWN, movie_year[movie]))
            records.append(
                CharacterRecord(
                    name=name,
                    movie=movie,
                    year=year,
                    gender=gender,
                    dialogues=tuple(dialogues),
                )
            )
    records.sort(key=lambda rec: (rec.movie, rec.name))
    return Corpus(records=records, provenance=dict(provenance or {}))


def corpus_to_json(corpus: Corpus) -> str:
    """Serialize with a stable field order for byte-reproducible output."""
    payload = {
        "records": [
            {
                "movie": rec.movie,
                "name": rec.name,
                "year": rec.year,
                "gender": rec.gender.value,
                "dialogues": list(rec.dialogues),
            }
            for rec in corpus.records
        ],
        "provenance": {movie: corpus.provenance[movie] for movie in sorted(corpus.provenance)},
    }
    return json.dumps(payload, indent=2, ensure_ascii=True) + "\n"


def corpus_from_json(text: str) -> Corpus:
    data = json.loads(text)
    records = [
        CharacterRecord(
            name=item["name"],
            movie=item["movie"],
            year=int(item["year"]),
            gender=Gender(item["gender"]),
            dialogues=tuple(item["dialogues"]),
        )
        for item in data["records"]
    ]
    return Corpus(records=records, provenance=dict(data.get("provenance", {})))

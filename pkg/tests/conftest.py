from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def fixture_lexicon():
    from emocast.emotion import load_lexicon_file

    return load_lexicon_file(FIXTURES / "lexicon.tsv")

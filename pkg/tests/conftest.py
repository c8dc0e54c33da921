import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import fixturegen  # noqa: E402

from somascope import corpus as corpus_mod  # noqa: E402
from somascope import lexicon as lexicon_mod  # noqa: E402


@pytest.fixture(scope="session")
def fixture_paths(tmp_path_factory):
    root = tmp_path_factory.mktemp("fixtures")
    return fixturegen.write_all(root)


@pytest.fixture(scope="session")
def bp_lex(fixture_paths):
    return lexicon_mod.load_bp_terms(fixture_paths["bp_lexicon"])


@pytest.fixture(scope="session")
def emo_lex(fixture_paths):
    return lexicon_mod.load_emotion_lexicon(fixture_paths["emotion_lexicon"])


@pytest.fixture(scope="session")
def vad_lex(fixture_paths):
    return lexicon_mod.load_vad_lexicon(fixture_paths["vad_lexicon"])


@pytest.fixture(scope="session")
def fixture_instances(fixture_paths):
    with open(fixture_paths["corpus"], encoding="utf-8") as f:
        return list(corpus_mod.ingest(f))


@pytest.fixture(scope="session")
def fixture_stats(fixture_instances, bp_lex, emo_lex, vad_lex):
    return corpus_mod.scan(fixture_instances, bp_lex, emo_lex, vad_lex)

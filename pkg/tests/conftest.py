import pytest

from sqlscore import load_corpus, write_fixtures


@pytest.fixture(scope="session")
def fixture_paths(tmp_path_factory):
    """(corpus path, db dir) for the built-in benchmark, built once."""
    out = tmp_path_factory.mktemp("fixtures")
    return write_fixtures(out)


@pytest.fixture(scope="session")
def corpus_path(fixture_paths):
    return fixture_paths[0]


@pytest.fixture(scope="session")
def db_dir(fixture_paths):
    return fixture_paths[1]


@pytest.fixture(scope="session")
def questions(corpus_path):
    return load_corpus(corpus_path)

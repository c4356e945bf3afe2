import pathlib
import sys

import pytest

TESTS_DIR = pathlib.Path(__file__).resolve().parent
FIXTURE_DIR = TESTS_DIR / "fixtures"

# make the shared oracle helpers importable from every test module
sys.path.insert(0, str(TESTS_DIR))


@pytest.fixture(scope="session")
def fixture_dir() -> pathlib.Path:
    return FIXTURE_DIR


@pytest.fixture(scope="session")
def load_fixture():
    from gogtool.gog import parse_document

    cache = {}

    def load(name: str):
        if name not in cache:
            text = (FIXTURE_DIR / f"{name}.gog").read_text(encoding="utf-8")
            cache[name] = parse_document(text)
        return cache[name]

    return load

import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from typepycker.bench import load  # noqa: E402

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


def corpus_paths():
    return sorted(CORPUS.glob("*.spy"))


@pytest.fixture
def listing1():
    return load(CORPUS / "listing1.spy")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running timing test")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])

from pathlib import Path

import pytest

from lassocause.ltl import parse_ltl
from lassocause.model import Lasso, parse_model
from lassocause.search import partition

ROOT = Path(__file__).resolve().parent.parent
ELEVATOR = ROOT / "models" / "elevator.model"
LIVENESS = "G (B2 -> F E2)"


@pytest.fixture(scope="session")
def elevator_ts():
    return parse_model(ELEVATOR.read_text())


@pytest.fixture(scope="session")
def elevator_universe(elevator_ts):
    return partition(elevator_ts, parse_ltl(LIVENESS))


@pytest.fixture
def abc_lasso():
    """s0 -a1-> s1 -a2-> s2 -a3-> s1, the running example of the unfolding discussion."""
    return Lasso(("s0", "s1", "s2"), ("a1", "a2", "a3"), 1)


def words(stem, loop):
    return Lasso.from_words(stem.split(), loop.split())


# Random models past a few dozen lassos take minutes to explain, so the shared
# corpus keeps the first models at desk scale.
CORPUS_MODELS = 20
CORPUS_MAX_LASSOS = 40


def desk_corpus(models=CORPUS_MODELS, max_lassos=CORPUS_MAX_LASSOS):
    """``(seed, model, property text)`` for the first small random models."""
    from lassocause.oracle import random_model, random_properties
    from lassocause.search import enumerate_lassos

    seed = taken = 0
    while taken < models:
        ts = random_model(seed)
        if len(enumerate_lassos(ts)) <= max_lassos:
            taken += 1
            for prop in random_properties(ts, seed):
                yield seed, ts, prop
        seed += 1


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])

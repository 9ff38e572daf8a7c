import os
from fractions import Fraction

import pytest

from plog.parser import parse_program
from plog.updates import apply_update

HERE = os.path.dirname(__file__)
CORPUS = os.path.join(HERE, "corpus")
NETS = os.path.join(HERE, "nets")


def corpus_path(name: str) -> str:
    if not name.endswith(".plog"):
        name += ".plog"
    return os.path.join(CORPUS, name)


def load(name: str, extra: str = ""):
    with open(corpus_path(name)) as fh:
        prog = parse_program(fh.read())
    return apply_update(prog, extra) if extra else prog


def F(x) -> Fraction:
    return Fraction(x)


def corpus_names() -> list:
    return sorted(n[:-5] for n in os.listdir(CORPUS) if n.endswith(".plog"))


@pytest.fixture
def corpus():
    return load


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])

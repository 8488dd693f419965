"""Shared fixtures and parsing helpers for the test suite."""

import pytest

from softlc.generators import random_corpus
from softlc.parser import parse
from softlc.syntax import Term, erase_markers, expand_plain_let


def term(src: str) -> Term:
    """Parse a single term given as source text."""
    module = parse("def it = " + src)
    return module.by_name["it"].body


def runnable(src: str) -> Term:
    """Parse a term and strip it down to the marker-free runnable core."""
    return expand_plain_let(erase_markers(term(src)))


@pytest.fixture(scope="session")
def corpus() -> list[Term]:
    # One mid-sized deterministic corpus shared by the property tests.
    return list(random_corpus(400, seed=11, target_size=20))

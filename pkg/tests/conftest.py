from __future__ import annotations

import pytest

from lpadim import linalg
from lpadim.corpus import corpus, get
from lpadim.graph import analyze
from lpadim.scalars import QQ, LaurentPoly, parse_scalar


def pytest_configure(config):
    # every Smith normal form computed by the suite is verified in place
    linalg.set_self_check(True)


def lp(text: str, field=QQ) -> LaurentPoly:
    """Laurent polynomial from text such as '3 + x + x^-1'."""
    return parse_scalar(text, field).to_laurent()


NO_EXIT = [name for name, g in corpus().items() if analyze(g).no_exit]


@pytest.fixture
def tail():
    return get("G_tail")


@pytest.fixture
def cyc2():
    return get("G_cyc2")

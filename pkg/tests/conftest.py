import pathlib

import pytest

from roomdiv.marriage import parse_marriage_instance
from roomdiv.model import parse_instance

DATA = pathlib.Path(__file__).parent / "data"


def load(name):
    text = (DATA / name).read_text()
    if '"marriage"' in text:
        return parse_marriage_instance(text)
    return parse_instance(text)


@pytest.fixture
def no_core():
    """Strict s=4 instance without a core stable outcome."""
    return load("no_core.json")


@pytest.fixture
def no_exchange():
    """Strict single-peaked s=3 instance without an exchange stable outcome."""
    return load("no_exchange.json")


@pytest.fixture
def no_envy():
    """s=2, one red and three blue agents; no (same-type) envy-free outcome."""
    return load("no_envy.json")


@pytest.fixture
def marriage_no_exchange():
    """Two dimensions, two agents each; no exchange stable outcome."""
    return load("marriage_no_exchange.json")

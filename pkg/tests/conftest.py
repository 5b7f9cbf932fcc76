import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from flogic.loaders import load_path

SAMPLES = os.path.join(os.path.dirname(__file__), "..", "samples")


def sample(name: str) -> str:
    return os.path.join(SAMPLES, name)


@pytest.fixture(scope="session")
def list_program():
    """conc/last over lists; conc is flex, last searches via a guard."""
    return load_path(sample("list.mcy"))


@pytest.fixture(scope="session")
def nat_program():
    return load_path(sample("nat.mcy"))


@pytest.fixture(scope="session")
def app_program():
    return load_path(sample("app.pl"))


@pytest.fixture(scope="session")
def app_clauses():
    from flogic.prolog import parse_prolog
    with open(sample("app.pl")) as fh:
        return parse_prolog(fh.read())

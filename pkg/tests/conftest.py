"""
PsiPRIO - Fixtures compartidas de los tests
"""
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from psiprio.services.harness import FAIRNESS_LETS
from psiprio.services.instances import make_flip_instance, make_pi_instance, make_piat_instance
from psiprio.services.parser import parse_agent, parse_assertion, parse_macros


@pytest.fixture(scope="session")
def flip():
    return make_flip_instance(("x", "y"))


@pytest.fixture(scope="session")
def piat():
    return make_piat_instance(max_priority=1, names=("a", "v"))


@pytest.fixture(scope="session")
def pi():
    return make_pi_instance(("m", "n"))


@pytest.fixture(scope="session")
def fairness_macros(flip):
    return parse_macros(FAIRNESS_LETS, flip)


@pytest.fixture
def agent(flip, fairness_macros):
    """parse_agent ligado a una instancia (flip por defecto) con las macros Px/Py."""

    def _parse(text, inst=None):
        if inst is None:
            return parse_agent(text, flip, fairness_macros)
        return parse_agent(text, inst)

    return _parse


@pytest.fixture
def assertion(flip):
    def _parse(text, inst=None):
        return parse_assertion(text, inst or flip)

    return _parse

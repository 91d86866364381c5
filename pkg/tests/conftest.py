import random

import pytest

from bipglue.corpus import eq5_operator, eq6_operator, load_example, nfebo
from bipglue.lts import Lts, interaction


def I(text):
    return interaction(text)


def T(lts):
    """Transitions as (src, "p,q", dst) with product states rendered."""
    from bipglue.lts import fmt_interaction, state_name
    return {(state_name(s), fmt_interaction(a), state_name(t)) for s, a, t in lts.transitions}


@pytest.fixture
def ex1():
    return load_example("ex1-priority")


@pytest.fixture
def b1(ex1):
    return ex1.behaviours["B1"]


@pytest.fixture
def b2(ex1):
    return ex1.behaviours["B2"]


@pytest.fixture
def ex1_glue(ex1):
    return ex1.glues["ex1"]


@pytest.fixture
def fig2():
    return nfebo()


@pytest.fixture
def eq5():
    return eq5_operator()


@pytest.fixture
def eq6():
    return eq6_operator()


@pytest.fixture
def rng():
    return random.Random(1234)


def random_component(rng, ports, max_states=3, density=0.3):
    from bipglue.compile import random_lts
    return random_lts(rng, ports, max_states, density)


def tiny_lts(rng, ports=("p", "q"), max_states=3, density=0.35):
    return random_component(rng, frozenset(ports), max_states, density)


__all__ = ["I", "T", "Lts", "tiny_lts"]


ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Collects criterion lines for the terminal summary."""
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from twoway.core import Instance
from twoway.generate import two_key_instance, two_key_loc_tree, two_key_nil_tree


@pytest.fixture
def two_key():
    return two_key_instance()


@pytest.fixture
def two_key_nil():
    return two_key_nil_tree()


@pytest.fixture
def two_key_loc():
    return two_key_loc_tree()


@st.composite
def instances(draw, min_n=0, max_n=5, zeros=True):
    """Instances with small integer weights; some atoms may get weight zero."""
    n = draw(st.integers(min_n, max_n))
    lo = 0 if zeros else 1
    w = draw(st.lists(st.integers(lo, 20), min_size=2 * n + 1, max_size=2 * n + 1))
    if sum(w) == 0:
        w[0] = 1
    return Instance.from_weights(w[1::2], w[0::2])


def random_instances(count, n_min, n_max, seed):
    from twoway.generate import random_instance

    rng = random.Random(seed)
    return [random_instance(rng.randint(n_min, n_max), rng.getrandbits(32)) for _ in range(count)]


FIFTH = Fraction(1, 5)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

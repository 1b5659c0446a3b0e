import random
import sys

import numpy as np
import pytest

from hlr3 import _tensor as T
from hlr3 import fixtures


@pytest.fixture(scope="session")
def F1():
    return fixtures.build("F1")


@pytest.fixture(scope="session")
def F2():
    return fixtures.build("F2")


@pytest.fixture(scope="session")
def F3():
    return fixtures.build("F3")


@pytest.fixture(scope="session")
def F4():
    return fixtures.build("F4")


@pytest.fixture(scope="session")
def all_fixtures(F1, F2, F3, F4):
    return {"F1": F1, "F2": F2, "F3": F3, "F4": F4}


def perturb_entry(alg, rng: random.Random, fields=("bracket", "alpha", "a_action", "anchor")):
    """Add a nonzero integer to one random entry of one structure tensor."""
    which = rng.choice(fields)
    t = getattr(alg, which).copy()
    idx = tuple(rng.randrange(s) for s in t.shape)
    t[idx] = t[idx] + rng.choice([-2, -1, 1, 2])
    return alg.replace(**{which: T.normalize(t)}), which, idx


def rand_matrix(rng: random.Random, rows, cols, lo=-3, hi=3):
    return T.normalize(np.array([[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)], dtype=object))


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance")
    if acc is None or not acc.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(acc.RESULTS):
        terminalreporter.write_line(acc.format_line(n))

import random
from fractions import Fraction

import pytest

from stepped.brun import brun_step


def random_alpha(rng: random.Random, lo=1, hi=50, distinct=False):
    """Positive rational vector with entries p/q, p in lo..hi, small q."""
    while True:
        alpha = tuple(Fraction(rng.randint(lo, hi), rng.randint(1, 7)) for _ in range(3))
        if not distinct or len(set(alpha)) == 3:
            return alpha


def random_rho(rng: random.Random):
    return Fraction(rng.randint(0, 99), 100)


def random_brun_move(rng: random.Random, d=3, amax=4):
    i, j = rng.sample(range(1, d + 1), 2)
    return rng.randint(1, amax), i, j


@pytest.fixture
def rng():
    return random.Random(20241016)


def brun_move_of(alpha):
    step, t = brun_step(alpha)
    return step.a, step.i, step.j, t


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

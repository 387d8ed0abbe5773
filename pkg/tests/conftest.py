import cmath
import itertools
import math

import pytest

from pasdfs import StateSpec

GRID_ALPHAS = (0j, cmath.rect(0.5, math.pi / 4), 1 + 0j, 2 + 0j)


def grid_specs(alphas=GRID_ALPHAS, top=3):
    """k, q, n in 0..top crossed with the alphas; annihilated specs skipped."""
    out = []
    for k, q, n in itertools.product(range(top + 1), repeat=3):
        for a in alphas:
            if a == 0 and q > n + k:
                continue
            out.append(StateSpec(k, q, n, a))
    return out


@pytest.fixture
def tol():
    return 1e-10


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record(number, passed, detail):
    ACCEPTANCE[number] = (bool(passed), detail)
    print(f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}")

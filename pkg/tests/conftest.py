import itertools

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("kcsp", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("kcsp")


def all_points(n, R):
    """Points of [R]^n in row-major order, as plain tuples."""
    return list(itertools.product(range(R), repeat=n))


def slow_value(instance, a):
    """Independent evaluator: plain loops over the constraint list."""
    total = 0.0
    for c in instance.constraints:
        idx = 0
        for v in c.scope:
            idx = idx * instance.R + int(a[v])
        total += c.weight * int(c.predicate[idx])
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """``acceptance(label, status, detail)`` records one criterion line.

    ``status`` is a bool (PASS/FAIL) or a literal tag such as ``"MONITOR"``.
    """
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(label, status, detail=""):
        tag = status if isinstance(status, str) else ("PASS" if status else "FAIL")
        line = f"{tag:<8}{label}  {detail}".rstrip()
        lines.append(line)
        print(line)
        return status

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

from fractions import Fraction

import numpy as np
import pytest

ACCEPTANCE_LINES = []


def brute_force_edges(h):
    """Every pair checked against every intermediate point, in exact rationals."""
    h = [Fraction(float(v)) for v in h]
    n = len(h)
    edges = set()
    for a in range(n):
        for b in range(a + 1, n):
            if all(h[c] < h[a] + (h[b] - h[a]) * (c - a) / (b - a) for c in range(a + 1, b)):
                edges.add((a, b))
    return edges


def adversarial_sequences():
    """Named hand-built sequences whose values keep float arithmetic exact."""
    rng = np.random.default_rng(1234)
    out = {}
    for n in (2, 3, 7, 64, 257):
        i = np.arange(n, dtype=float)
        out[f"constant-{n}"] = np.full(n, 5.0)
        out[f"increasing-{n}"] = i
        out[f"decreasing-{n}"] = -3 * i
        out[f"random-monotone-{n}"] = np.cumsum(rng.integers(1, 9, n)).astype(float)
        out[f"convex-{n}"] = (i - n // 2) ** 2
        out[f"concave-{n}"] = -((i - n // 2) ** 2)
        spike = np.zeros(n)
        spike[n // 2] = 10.0
        out[f"spike-{n}"] = spike
        ties = rng.integers(0, 4, n).astype(float)
        out[f"tied-{n}"] = ties
        plateau = np.ones(n)
        plateau[::3] = 7.0
        out[f"tied-maxima-{n}"] = plateau
    out["tied-maxima-valley"] = np.array([1.0, 3, 2, 3, 1])
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def acceptance_report():
    def record(criterion, passed, detail=""):
        passed = None if passed is None else bool(passed)
        status = "PASS" if passed is True else ("FLAG" if passed is None else "FAIL")
        line = f"[{status}] criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

from __future__ import annotations

from math import lcm
from pathlib import Path

import pytest

from skewstc.algebra import quantum_matrix, skew
from skewstc.autgroup import GradedMap, close_group, g_b, root, tau
from skewstc.cyclotomic import embed_root

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "skewstc" / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def k3():
    return skew(3, -1, order=4)


@pytest.fixture(scope="session")
def ex61(k3):
    """<tau_{1,2,1}, tau_{2,3,1}> on k_{-1}[x1,x2,x3]."""
    return close_group([tau(k3, 1, 2), tau(k3, 2, 3)])


@pytest.fixture(scope="session")
def k2():
    return skew(2, -1, order=4)


def dicyclic_example(m: int):
    """g1 = [[0,1],[-1,0]], g2 = [[0,lam],[-1/lam,0]] with lam a primitive 2m-th root."""
    A = skew(2, -1, order=lcm(2 * m, 4))
    lam = root(A, 2 * m)
    g1 = GradedMap(A, [[0, 1], [-1, 0]])
    g2 = GradedMap(A, [[0, lam], [-lam.inverse(), 0]])
    return A, close_group([g1, g2])


def oq_dihedral(q_order: int, m: int):
    order = lcm(q_order, m, 4)
    A = quantum_matrix(embed_root(q_order, 1), order=order)
    b = root(A, m)
    return A, b, close_group([g_b(A, 1), g_b(A, b)])


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
